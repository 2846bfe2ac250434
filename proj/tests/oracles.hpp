#pragma once

// Independent reference computations shared by the unit tests and the
// acceptance runner.

#include <cmath>
#include <set>
#include <utility>
#include <vector>

#include "nlsinv/grid.hpp"
#include "nlsinv/recon.hpp"

namespace nlsinv::oracle {

/// Least-squares slope of log y against log x.
inline double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) mx += std::log(x[i]), my += std::log(y[i]);
  mx /= static_cast<double>(x.size());
  my /= static_cast<double>(y.size());
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (std::log(x[i]) - mx) * (std::log(y[i]) - my);
    sxx += (std::log(x[i]) - mx) * (std::log(x[i]) - mx);
  }
  return sxy / sxx;
}

/// Pointwise error of the truncated Fourier series of c on the unit square,
/// from the Poisson summation formula:
///   series(x) - c(x) = sum_{p != 0} c(x + p) - sum_{n not in plan} F[c](2 pi n) exp(-2 pi i n.x)
/// with the outer lattice sum cut at |n_i| <= tail_extent and images at
/// |p_i| <= 2. Returns the sup over synthesis points inside the disk.
inline double truncation_error(const recon::FrequencyPlan& plan, const PotentialSpec& spec,
                               int n, double radius, int tail_extent = 30) {
  std::set<std::pair<int, int>> in_plan;
  for (const auto& e : plan.entries) in_plan.insert({e.n1, e.n2});
  std::vector<std::pair<Vec2, cdouble>> tail;
  for (int a = -tail_extent; a <= tail_extent; ++a)
    for (int b = -tail_extent; b <= tail_extent; ++b) {
      if (in_plan.count({a, b})) continue;
      const Vec2 xi{plan.lattice_step * a, plan.lattice_step * b};
      tail.push_back({xi, spec.fourier(xi)});
    }
  double worst = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      const Vec2 x{n == 1 ? 0.0 : -0.5 + static_cast<double>(i) / (n - 1),
                   n == 1 ? 0.0 : -0.5 + static_cast<double>(j) / (n - 1)};
      if (dot(x, x) > radius * radius) continue;
      double images = 0.0;
      for (int p = -2; p <= 2; ++p)
        for (int q = -2; q <= 2; ++q)
          if (p != 0 || q != 0) images += spec({x[0] + p, x[1] + q});
      cdouble t = 0.0;
      for (const auto& [xi, f] : tail) t += f * std::exp(cdouble(0.0, -dot(xi, x)));
      worst = std::max(worst, std::abs(images - t.real()));
    }
  return worst;
}

}  // namespace nlsinv::oracle
