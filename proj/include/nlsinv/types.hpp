#pragma once

#include <array>
#include <cmath>
#include <complex>

namespace nlsinv {

using cdouble = std::complex<double>;
using Vec2 = std::array<double, 2>;
using CVec2 = std::array<cdouble, 2>;

inline constexpr double kPi = 3.14159265358979323846;

inline double dot(const Vec2& a, const Vec2& b) { return a[0] * b[0] + a[1] * b[1]; }
inline double norm(const Vec2& a) { return std::hypot(a[0], a[1]); }

// Bilinear (unconjugated) product used for the constraint zeta . zeta = k^2.
inline cdouble dot(const CVec2& a, const CVec2& b) { return a[0] * b[0] + a[1] * b[1]; }
inline cdouble dot(const CVec2& a, const Vec2& x) { return a[0] * x[0] + a[1] * x[1]; }

}  // namespace nlsinv
