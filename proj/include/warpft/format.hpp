#pragma once

#include <complex>
#include <string>

namespace warpft {

/// 17 significant digits; integral values keep a trailing ".0".
std::string fmt(double v);
std::string fmt(std::complex<double> v);

}  // namespace warpft
