#include "nlsinv/waves.hpp"

#include <algorithm>
#include <limits>

#include "nlsinv/error.hpp"

namespace nlsinv::waves {

Frequency Frequency::from_xi(const Vec2& xi) {
  const double kappa = norm(xi);
  NLSINV_REQUIRE(kappa > 0.0, "Frequency: xi must be nonzero");
  Frequency f;
  f.xi = xi;
  f.kappa = kappa;
  f.yhat = {xi[0] / kappa, xi[1] / kappa};
  f.zhat = {-f.yhat[1], f.yhat[0]};
  return f;
}

namespace {

CVec2 combine(double a, const Vec2& e1, cdouble b, const Vec2& e2, double scale) {
  return {(a * e1[0] + b * e2[0]) / scale, (a * e1[1] + b * e2[1]) / scale};
}

}  // namespace

ZetaSet make_zeta(int m, double k, const Frequency& freq) {
  NLSINV_REQUIRE(m >= 2, "make_zeta: m must be >= 2");
  NLSINV_REQUIRE(k > 0.0, "make_zeta: k must be > 0");
  NLSINV_REQUIRE(freq.kappa > 0.0, "make_zeta: xi must be nonzero");

  ZetaSet z;
  z.m = m;
  z.k = k;
  z.freq = freq;
  z.zetas.resize(m);
  const double cutoff = (m + 1) * k;
  const double kappa = freq.kappa;
  const Vec2& e1 = freq.yhat;
  const Vec2& e2 = freq.zhat;
  // |xi| a few ulps above the cutoff is the boundary case, not evanescent
  const double boundary = cutoff * (1.0 + 4.0 * std::numeric_limits<double>::epsilon());
  z.regime = kappa <= boundary ? Regime::Propagating : Regime::Evanescent;
  const bool propagating = z.regime == Regime::Propagating;

  if (m % 2 == 1) {
    const double d = cutoff * cutoff - kappa * kappa;
    z.xi_big = propagating ? cdouble(std::sqrt(std::max(d, 0.0)), 0.0)
                           : cdouble(0.0, std::sqrt(-d));
    const double scale = m + 1;
    const CVec2 plus = combine(kappa, e1, z.xi_big, e2, scale);
    const CVec2 minus = combine(kappa, e1, -z.xi_big, e2, scale);
    z.zeta0 = minus;
    for (int j = 1; j <= m; ++j) z.zetas[j - 1] = (j % 2 == 1) ? plus : minus;
  } else {
    const double a = kappa - k;
    const double d = m * m * k * k - a * a;
    z.xi_big = propagating ? cdouble(std::sqrt(std::max(d, 0.0)), 0.0)
                           : cdouble(0.0, std::sqrt(-d));
    z.zeta0 = {cdouble(k * e1[0]), cdouble(k * e1[1])};
    const CVec2 plus = combine(a, e1, z.xi_big, e2, m);
    const CVec2 minus = combine(a, e1, -z.xi_big, e2, m);
    for (int j = 1; j <= m; ++j) z.zetas[j - 1] = (j % 2 == 1) ? plus : minus;
  }
  return z;
}

ZetaResiduals residuals(const ZetaSet& z) {
  ZetaResiduals r;
  const double k2 = z.k * z.k;
  CVec2 sum{};
  for (int j = 0; j <= z.m; ++j) {
    const CVec2& v = z.zeta(j);
    r.dot_residual = std::max(r.dot_residual, std::abs(dot(v, v) - k2) / k2);
    sum[0] += v[0];
    sum[1] += v[1];
  }
  const double e = std::hypot(std::abs(sum[0] - z.freq.xi[0]), std::abs(sum[1] - z.freq.xi[1]));
  r.sum_residual = e / (1.0 + z.freq.kappa);
  return r;
}

std::vector<cdouble> ce_field(const CVec2& zeta, std::span<const Vec2> points) {
  std::vector<cdouble> out;
  out.reserve(points.size());
  for (const Vec2& x : points) out.push_back(ce_value(zeta, x));
  return out;
}

std::vector<cdouble> test_function_psi(const Frequency& freq, std::span<const Vec2> points) {
  std::vector<cdouble> out;
  out.reserve(points.size());
  for (const Vec2& x : points) out.push_back(std::exp(cdouble(0.0, -dot(freq.xi, x))));
  return out;
}

}  // namespace nlsinv::waves
