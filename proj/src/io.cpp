#include "warpft/io.hpp"

#include <bit>
#include <charconv>
#include <cstring>
#include <fstream>
#include <set>
#include <sstream>

#include "warpft/format.hpp"

static_assert(std::endian::native == std::endian::little, "binary formats assume a little-endian host");

namespace warpft {

namespace {

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

std::string where(const KeyValues& kv, const std::string& k) {
  auto it = kv.line_of.find(k);
  return it == kv.line_of.end() ? std::string("") : "line " + std::to_string(it->second) + ": ";
}

template <class T>
void put(std::ostream& os, T v) {
  char buf[sizeof(T)];
  std::memcpy(buf, &v, sizeof(T));
  os.write(buf, sizeof(T));
}

template <class T>
T get(std::istream& is, const char* what) {
  char buf[sizeof(T)];
  if (!is.read(buf, sizeof(T))) fail(ErrorKind::Format, std::string("truncated file while reading ") + what);
  T v;
  std::memcpy(&v, buf, sizeof(T));
  return v;
}

void expect_magic(std::istream& is, const char* magic) {
  char m[4];
  if (!is.read(m, 4) || std::memcmp(m, magic, 4) != 0)
    fail(ErrorKind::Format, std::string("bad magic: expected ") + magic);
}

void expect_end(std::istream& is) {
  is.peek();
  if (!is.eof()) fail(ErrorKind::Format, "trailing bytes after end of payload");
}

std::ifstream open_in(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) fail(ErrorKind::Config, "cannot open " + path);
  return is;
}

std::ofstream open_out(const std::string& path) {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) fail(ErrorKind::Internal, "cannot open " + path + " for writing");
  return os;
}

const std::set<std::string> kBaseKeys = {"warp.kind",   "warp.c",          "warp.d",           "warp.l",
                                         "warp.c1",     "warp.c2",         "prototype.kind",   "prototype.sigma",
                                         "prototype.radius", "prototype.normalize", "delta", "sample_rate",
                                         "length",      "time_scale"};

SystemParams params_from_kv(const KeyValues& kv, bool descriptor) {
  for (const auto& [k, v] : kv.entries) {
    if (kBaseKeys.count(k)) continue;
    if (descriptor && (k == "format" || k == "channels" || k == "dropped_channels" || k == "painless" ||
                       k.rfind("channel.", 0) == 0))
      continue;
    fail(ErrorKind::Config, where(kv, k) + "unknown key '" + k + "'");
  }
  auto forbid = [&](std::initializer_list<const char*> keys, const std::string& kind) {
    for (const char* k : keys)
      if (kv.has(k)) fail(ErrorKind::Config, where(kv, k) + "'" + k + "' is not a parameter of " + kind);
  };

  SystemParams p;
  const std::string wk = kv.get("warp.kind");
  if (wk == "linear") {
    forbid({"warp.d", "warp.l", "warp.c1", "warp.c2"}, wk);
    p.warp = WarpingFunction::linear(kv.number_or("warp.c", 1.0));
  } else if (wk == "log") {
    forbid({"warp.c", "warp.d", "warp.l", "warp.c1", "warp.c2"}, wk);
    p.warp = WarpingFunction::log();
  } else if (wk == "power_law") {
    forbid({"warp.c1", "warp.c2"}, wk);
    p.warp = WarpingFunction::power_law(kv.number_or("warp.c", 1.0), kv.number_or("warp.d", 1.0), kv.number("warp.l"));
  } else if (wk == "erb") {
    forbid({"warp.c", "warp.d", "warp.l"}, wk);
    p.warp = WarpingFunction::erb(kv.number_or("warp.c1", 9.265), kv.number_or("warp.c2", 228.8));
  } else if (wk == "alpha_like") {
    forbid({"warp.c", "warp.d", "warp.c1", "warp.c2"}, wk);
    p.warp = WarpingFunction::alpha_like(kv.number("warp.l"));
  } else {
    fail(ErrorKind::Config, where(kv, "warp.kind") + "unknown warp kind '" + wk + "'");
  }

  const std::string pk = kv.get("prototype.kind");
  if (pk == "gaussian") {
    forbid({"prototype.radius"}, pk);
    p.prototype = Prototype::gaussian(kv.number_or("prototype.sigma", 1.0));
  } else if (pk == "hann_bump" || pk == "smooth_bump") {
    forbid({"prototype.sigma"}, pk);
    const double r = kv.number_or("prototype.radius", 1.0);
    p.prototype = pk == "hann_bump" ? Prototype::hann_bump(r) : Prototype::smooth_bump(r);
  } else {
    fail(ErrorKind::Config, where(kv, "prototype.kind") + "unknown prototype kind '" + pk + "'");
  }
  p.normalize = kv.boolean_or("prototype.normalize", true);
  p.delta = kv.number("delta");
  require(p.delta > 0.0, ErrorKind::Config, where(kv, "delta") + "delta must be positive");
  const long N = kv.integer("length");
  require(N > 0, ErrorKind::Config, where(kv, "length") + "length must be positive");
  try {
    p.grid = SignalGrid::make(static_cast<std::size_t>(N), kv.number("sample_rate"));
  } catch (const Error& e) {
    fail(ErrorKind::Config, where(kv, "length") + e.what());
  }
  p.time_scale = kv.number_or("time_scale", 1.0);
  require(p.time_scale > 0.0, ErrorKind::Config, where(kv, "time_scale") + "time_scale must be positive");
  return p;
}

const char* warp_kind_name(WarpKind k) {
  switch (k) {
    case WarpKind::Linear: return "linear";
    case WarpKind::Log: return "log";
    case WarpKind::PowerLaw: return "power_law";
    case WarpKind::Erb: return "erb";
    case WarpKind::AlphaLike: return "alpha_like";
  }
  return "?";
}

}  // namespace

const std::string& KeyValues::get(const std::string& k) const {
  for (const auto& e : entries)
    if (e.first == k) return e.second;
  fail(ErrorKind::Config, "missing required key '" + k + "'");
}

double KeyValues::number(const std::string& k) const {
  const std::string& s = get(k);
  double v = 0.0;
  const auto r = std::from_chars(s.data(), s.data() + s.size(), v);
  if (r.ec != std::errc() || r.ptr != s.data() + s.size() || !std::isfinite(v))
    fail(ErrorKind::Config, where(*this, k) + "'" + k + "' expects a number, got '" + s + "'");
  return v;
}

double KeyValues::number_or(const std::string& k, double fallback) const { return has(k) ? number(k) : fallback; }

long KeyValues::integer(const std::string& k) const {
  const std::string& s = get(k);
  long v = 0;
  const auto r = std::from_chars(s.data(), s.data() + s.size(), v);
  if (r.ec != std::errc() || r.ptr != s.data() + s.size())
    fail(ErrorKind::Config, where(*this, k) + "'" + k + "' expects an integer, got '" + s + "'");
  return v;
}

bool KeyValues::boolean_or(const std::string& k, bool fallback) const {
  if (!has(k)) return fallback;
  const std::string& s = get(k);
  if (s == "true" || s == "1" || s == "yes") return true;
  if (s == "false" || s == "0" || s == "no") return false;
  fail(ErrorKind::Config, where(*this, k) + "'" + k + "' expects true or false, got '" + s + "'");
}

KeyValues parse_key_values(std::istream& is, const std::string& source) {
  KeyValues kv;
  std::string line;
  int n = 0;
  while (std::getline(is, line)) {
    ++n;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      fail(ErrorKind::Config, source + ": line " + std::to_string(n) + ": expected 'key = value'");
    const std::string k = trim(line.substr(0, eq)), v = trim(line.substr(eq + 1));
    if (k.empty()) fail(ErrorKind::Config, source + ": line " + std::to_string(n) + ": empty key");
    if (v.empty()) fail(ErrorKind::Config, source + ": line " + std::to_string(n) + ": empty value for '" + k + "'");
    if (kv.has(k))
      fail(ErrorKind::Config, source + ": line " + std::to_string(n) + ": duplicate key '" + k + "' (first on line " +
                                  std::to_string(kv.line_of[k]) + ")");
    kv.entries.emplace_back(k, v);
    kv.line_of[k] = n;
  }
  return kv;
}

KeyValues parse_key_values_file(const std::string& path) {
  std::ifstream is(path);
  if (!is) fail(ErrorKind::Config, "cannot open config " + path);
  return parse_key_values(is, path);
}

SystemParams params_from_config(const KeyValues& kv) { return params_from_kv(kv, false); }

SystemParams load_config(const std::string& path) {
  const KeyValues kv = parse_key_values_file(path);
  try {
    return params_from_config(kv);
  } catch (const Error& e) {
    fail(e.kind(), path + ": " + e.what());
  }
}

void write_descriptor(const WarpedSystem& sys, std::ostream& os) {
  const SystemParams& p = sys.params;
  const WarpingFunction& F = p.warp;
  os << "# warpft system descriptor\n";
  os << "format = warpft-system-1\n";
  os << "warp.kind = " << warp_kind_name(F.kind) << '\n';
  switch (F.kind) {
    case WarpKind::Linear: os << "warp.c = " << fmt(F.c) << '\n'; break;
    case WarpKind::Log: break;
    case WarpKind::PowerLaw:
      os << "warp.c = " << fmt(F.c) << "\nwarp.d = " << fmt(F.d) << "\nwarp.l = " << fmt(F.l) << '\n';
      break;
    case WarpKind::Erb: os << "warp.c1 = " << fmt(F.c1) << "\nwarp.c2 = " << fmt(F.c2) << '\n'; break;
    case WarpKind::AlphaLike: os << "warp.l = " << fmt(F.l) << '\n'; break;
  }
  const Prototype& th = p.prototype;
  switch (th.kind) {
    case PrototypeKind::Gaussian: os << "prototype.kind = gaussian\nprototype.sigma = " << fmt(th.sigma) << '\n'; break;
    case PrototypeKind::HannBump: os << "prototype.kind = hann_bump\nprototype.radius = " << fmt(th.radius) << '\n'; break;
    case PrototypeKind::SmoothBump:
      os << "prototype.kind = smooth_bump\nprototype.radius = " << fmt(th.radius) << '\n';
      break;
  }
  os << "prototype.normalize = " << (p.normalize ? "true" : "false") << '\n';
  os << "delta = " << fmt(p.delta) << '\n';
  os << "sample_rate = " << fmt(p.grid.fs) << '\n';
  os << "length = " << p.grid.N << '\n';
  os << "time_scale = " << fmt(p.time_scale) << '\n';
  os << "channels = " << sys.size() << '\n';
  os << "dropped_channels = " << sys.dropped_channels << '\n';
  os << "painless = " << (sys.painless.painless ? "true" : "false") << '\n';
  os << "# channel.i = l center_hz bandwidth_hz time_hop_s hop_samples\n";
  for (std::size_t i = 0; i < sys.size(); ++i) {
    const Channel& ch = sys.channels[i];
    os << "channel." << i << " = " << ch.l << ' ' << fmt(ch.center_hz) << ' ' << fmt(ch.bandwidth_hz) << ' '
       << fmt(ch.time_hop) << ' ' << ch.hop_samples << '\n';
  }
}

void write_descriptor(const WarpedSystem& sys, const std::string& path) {
  auto os = open_out(path);
  write_descriptor(sys, os);
  require(static_cast<bool>(os), ErrorKind::Internal, "write failed: " + path);
}

WarpedSystem read_descriptor(const std::string& path) {
  std::ifstream is(path);
  if (!is) fail(ErrorKind::Config, "cannot open descriptor " + path);
  const KeyValues kv = parse_key_values(is, path);
  if (kv.has("format") && kv.get("format") != "warpft-system-1")
    fail(ErrorKind::Format, path + ": unsupported descriptor format '" + kv.get("format") + "'");
  SystemParams p;
  try {
    p = params_from_kv(kv, true);
  } catch (const Error& e) {
    fail(e.kind(), path + ": " + e.what());
  }
  WarpedSystem sys = build_system(p);
  if (kv.has("channels")) {
    const long n = kv.integer("channels");
    if (n != static_cast<long>(sys.size()))
      fail(ErrorKind::Format, path + ": descriptor lists " + std::to_string(n) + " channels, rebuild gives " +
                                  std::to_string(sys.size()));
    for (std::size_t i = 0; i < sys.size(); ++i) {
      const std::string key = "channel." + std::to_string(i);
      if (!kv.has(key)) fail(ErrorKind::Format, path + ": missing " + key);
      std::istringstream ls(kv.get(key));
      long l = 0;
      std::size_t hop = 0;
      double center = 0.0, bw = 0.0, tau = 0.0;
      if (!(ls >> l >> center >> bw >> tau >> hop))
        fail(ErrorKind::Format, path + ": " + where(kv, key) + "malformed channel entry");
      const Channel& ch = sys.channels[i];
      if (l != ch.l || hop != ch.hop_samples || std::abs(center - ch.center_hz) > 1e-12 * std::abs(ch.center_hz) + 1e-300)
        fail(ErrorKind::Format, path + ": " + where(kv, key) + "channel table does not match the parameters");
    }
  }
  return sys;
}

void write_coefficients(const Coefficients& c, std::ostream& os) {
  os.write("WTC1", 4);
  put<std::uint32_t>(os, 1);
  put<std::uint32_t>(os, static_cast<std::uint32_t>(c.size()));
  for (const auto& ch : c.channels) {
    put<double>(os, ch.center_hz);
    put<double>(os, ch.hop_seconds);
    put<std::uint64_t>(os, static_cast<std::uint64_t>(ch.values.size()));
  }
  for (const auto& ch : c.channels)
    for (Eigen::Index k = 0; k < ch.values.size(); ++k) {
      put<double>(os, ch.values(k).real());
      put<double>(os, ch.values(k).imag());
    }
}

void write_coefficients(const Coefficients& c, const std::string& path) {
  auto os = open_out(path);
  write_coefficients(c, os);
  require(static_cast<bool>(os), ErrorKind::Internal, "write failed: " + path);
}

Coefficients read_coefficients(std::istream& is) {
  expect_magic(is, "WTC1");
  const auto version = get<std::uint32_t>(is, "version");
  if (version != 1) fail(ErrorKind::Format, "unsupported WTC1 version " + std::to_string(version));
  const auto count = get<std::uint32_t>(is, "channel count");
  Coefficients c;
  std::vector<std::uint64_t> frames;
  for (std::uint32_t i = 0; i < count; ++i) {
    ChannelCoefficients ch;
    ch.center_hz = get<double>(is, "channel header");
    ch.hop_seconds = get<double>(is, "channel header");
    const auto n = get<std::uint64_t>(is, "channel header");
    if (n > (1ull << 32)) fail(ErrorKind::Format, "implausible frame count in channel " + std::to_string(i));
    frames.push_back(n);
    c.channels.push_back(std::move(ch));
  }
  for (std::uint32_t i = 0; i < count; ++i) {
    auto& v = c.channels[i].values;
    v.resize(static_cast<Eigen::Index>(frames[i]));
    for (Eigen::Index k = 0; k < v.size(); ++k) {
      const double re = get<double>(is, "coefficients");
      const double im = get<double>(is, "coefficients");
      v(k) = {re, im};
    }
  }
  expect_end(is);
  return c;
}

Coefficients read_coefficients(const std::string& path) {
  auto is = open_in(path);
  try {
    return read_coefficients(is);
  } catch (const Error& e) {
    fail(e.kind(), path + ": " + e.what());
  }
}

void write_atom_cache(const WarpedSystem& sys, const std::string& path) {
  auto os = open_out(path);
  os.write("WTS1", 4);
  put<std::uint32_t>(os, 1);
  put<std::uint64_t>(os, sys.grid().N);
  put<double>(os, sys.grid().fs);
  put<std::uint32_t>(os, static_cast<std::uint32_t>(sys.size()));
  for (std::size_t l = 0; l < sys.size(); ++l) {
    const Atom& a = sys.atoms[l];
    put<std::int64_t>(os, sys.channels[l].l);
    put<double>(os, sys.channels[l].center_hz);
    put<std::uint64_t>(os, a.first);
    put<std::uint64_t>(os, a.size());
    for (double v : a.values) put<double>(os, v);
  }
  require(static_cast<bool>(os), ErrorKind::Internal, "write failed: " + path);
}

void load_atom_cache(WarpedSystem& sys, const std::string& path) {
  auto is = open_in(path);
  auto bad = [&](const std::string& why) { fail(ErrorKind::Format, path + ": " + why); };
  try {
    expect_magic(is, "WTS1");
    if (get<std::uint32_t>(is, "version") != 1) bad("unsupported WTS1 version");
    if (get<std::uint64_t>(is, "length") != sys.grid().N) bad("cached grid length differs from the system");
    if (get<double>(is, "sample rate") != sys.grid().fs) bad("cached sample rate differs from the system");
    if (get<std::uint32_t>(is, "channel count") != sys.size()) bad("cached channel count differs from the system");
    std::vector<Atom> atoms(sys.size());
    for (std::size_t l = 0; l < sys.size(); ++l) {
      if (get<std::int64_t>(is, "channel") != sys.channels[l].l) bad("cached channel index mismatch");
      if (get<double>(is, "channel") != sys.channels[l].center_hz) bad("cached channel center mismatch");
      Atom& a = atoms[l];
      a.first = get<std::uint64_t>(is, "atom");
      const auto n = get<std::uint64_t>(is, "atom");
      if (n == 0 || a.first + n > sys.grid().N) bad("cached atom support outside the grid");
      a.values.resize(n);
      for (auto& v : a.values) v = get<double>(is, "atom values");
      for (std::size_t i = 0; i < n; ++i)
        if (std::abs(a.values[i]) > a.peak) {
          a.peak = std::abs(a.values[i]);
          a.peak_position = a.first + i;
        }
    }
    expect_end(is);
    sys.atoms = std::move(atoms);
    sys.painless = painless_check(sys);
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::Format && std::string(e.what()).rfind(path, 0) != 0) bad(e.what());
    throw;
  }
}

void write_signal(const Signal& f, const std::string& path) {
  auto os = open_out(path);
  for (Eigen::Index i = 0; i < f.size(); ++i) {
    put<double>(os, f(i).real());
    put<double>(os, f(i).imag());
  }
  require(static_cast<bool>(os), ErrorKind::Internal, "write failed: " + path);
}

Signal read_signal(const std::string& path) {
  auto is = open_in(path);
  is.seekg(0, std::ios::end);
  const auto size = static_cast<std::size_t>(is.tellg());
  is.seekg(0);
  if (size % 16 != 0) fail(ErrorKind::Format, path + ": size is not a multiple of 16 bytes (f64 re/im pairs)");
  Signal f(static_cast<Eigen::Index>(size / 16));
  for (Eigen::Index i = 0; i < f.size(); ++i) {
    const double re = get<double>(is, "signal");
    const double im = get<double>(is, "signal");
    f(i) = {re, im};
  }
  return f;
}

}  // namespace warpft
