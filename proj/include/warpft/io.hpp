#pragma once

#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "warpft/system.hpp"
#include "warpft/transform.hpp"

namespace warpft {

/// Flat "key = value" text; '#' starts a comment.  Errors carry the line number.
struct KeyValues {
  std::vector<std::pair<std::string, std::string>> entries;  // file order
  std::map<std::string, int> line_of;
  bool has(const std::string& k) const { return line_of.count(k) != 0; }
  const std::string& get(const std::string& k) const;
  double number(const std::string& k) const;
  double number_or(const std::string& k, double fallback) const;
  long integer(const std::string& k) const;
  bool boolean_or(const std::string& k, bool fallback) const;
};

KeyValues parse_key_values(std::istream& is, const std::string& source = "<input>");
KeyValues parse_key_values_file(const std::string& path);

/// System parameters from config keys warp.*, prototype.*, delta, sample_rate,
/// length, time_scale.  Unknown keys are rejected.
SystemParams params_from_config(const KeyValues& kv);
SystemParams load_config(const std::string& path);

/// Deterministic descriptor: canonical parameters followed by the channel table.
void write_descriptor(const WarpedSystem& sys, std::ostream& os);
void write_descriptor(const WarpedSystem& sys, const std::string& path);
/// Rebuilds the system from a descriptor and checks the stored channel table.
WarpedSystem read_descriptor(const std::string& path);

void write_coefficients(const Coefficients& c, std::ostream& os);
void write_coefficients(const Coefficients& c, const std::string& path);
Coefficients read_coefficients(std::istream& is);
Coefficients read_coefficients(const std::string& path);

/// Binary atom cache (magic WTS1).
void write_atom_cache(const WarpedSystem& sys, const std::string& path);
/// Replaces the atoms of sys by the cached ones after checking grid and channels.
void load_atom_cache(WarpedSystem& sys, const std::string& path);

/// Raw little-endian f64 pairs (re, im).
void write_signal(const Signal& f, const std::string& path);
Signal read_signal(const std::string& path);

}  // namespace warpft
