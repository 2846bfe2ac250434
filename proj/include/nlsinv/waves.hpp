#pragma once

// Complex probe vectors and complex-exponential (CE) fields.
//
// For a target frequency xi != 0 and wavenumber k we build zeta_0..zeta_m with
// zeta_j . zeta_j = k^2 (bilinear) and zeta_0 + ... + zeta_m = xi, so that
// exp(i zeta_0.x) * prod_j exp(i zeta_j.x) = exp(i xi.x).

#include <span>
#include <vector>

#include "nlsinv/types.hpp"

namespace nlsinv::waves {

struct Frequency {
  Vec2 xi{};
  double kappa = 0.0;  // |xi|
  Vec2 yhat{};         // xi / |xi|
  Vec2 zhat{};         // yhat rotated by +90 degrees

  /// Throws ParameterError for xi == 0.
  static Frequency from_xi(const Vec2& xi);
};

enum class Regime { Propagating, Evanescent };

struct ZetaSet {
  int m = 0;
  double k = 0.0;
  Frequency freq;
  CVec2 zeta0{};
  std::vector<CVec2> zetas;  // zeta_1 .. zeta_m
  cdouble xi_big{};          // Xi_odd or Xi_even
  Regime regime = Regime::Propagating;

  const CVec2& zeta(int j) const { return j == 0 ? zeta0 : zetas[j - 1]; }
};

/// Probe vectors for m >= 2, k > 0, freq.kappa > 0. The evanescent branch is
/// used strictly above |xi| = (m+1)k; values within rounding of the cutoff
/// count as the boundary case.
ZetaSet make_zeta(int m, double k, const Frequency& freq);

struct ZetaResiduals {
  double dot_residual = 0.0;  // max_j |zeta_j.zeta_j - k^2| / k^2
  double sum_residual = 0.0;  // |sum_j zeta_j - xi| / (1 + |xi|)
};
ZetaResiduals residuals(const ZetaSet& z);

inline cdouble ce_value(const CVec2& zeta, const Vec2& x) {
  return std::exp(cdouble(0.0, 1.0) * dot(zeta, x));
}

/// exp(i zeta.x) at each point.
std::vector<cdouble> ce_field(const CVec2& zeta, std::span<const Vec2> points);

/// The synthesis kernel psi = exp(-i xi.x).
std::vector<cdouble> test_function_psi(const Frequency& freq, std::span<const Vec2> points);

}  // namespace nlsinv::waves
