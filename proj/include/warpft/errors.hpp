#pragma once

#include <stdexcept>
#include <string>

namespace warpft {

enum class ErrorKind {
  Config,      // bad parameters, parse failures, too few channels
  Domain,      // argument outside the domain of a warp or prototype
  Shape,       // length / size mismatch
  Format,      // malformed file contents
  Capability,  // requested operation unsupported for this input
  Numeric,     // iteration or quadrature failed to converge
  Degenerate,  // empty atoms and similar
  Internal
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) { throw Error(kind, what); }

inline void require(bool cond, ErrorKind kind, const std::string& what) {
  if (!cond) fail(kind, what);
}

}  // namespace warpft
