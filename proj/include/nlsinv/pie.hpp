#pragma once

// Inclusion-exclusion polarization: the product of m values written as a
// signed combination of m-th powers of subset sums.

#include <cstdint>
#include <span>
#include <type_traits>
#include <vector>

#include "nlsinv/error.hpp"

namespace nlsinv::pie {

inline constexpr int kMaxOrder = 12;

/// One non-empty subset S of {1..m}, stored as a bitmask (bit j-1 <=> j in S).
struct SubsetTerm {
  std::uint32_t mask = 0;
  int size = 0;  // |S|
  int sign = 1;  // (-1)^(m - |S|)

  bool contains(int j) const { return (mask >> (j - 1)) & 1u; }
  std::vector<int> members() const;  // 1-based, ascending
};

struct PieExpansion {
  int m = 0;
  std::vector<SubsetTerm> terms;  // ascending bitmask order
  std::int64_t factorial = 1;     // normalizer is 1 / factorial

  double normalizer() const { return 1.0 / static_cast<double>(factorial); }
};

/// All 2^m - 1 non-empty subsets of {1..m} with their signs. 1 <= m <= 12.
PieExpansion expand(int m);

namespace detail {

template <typename T>
T ipow(T base, int e) {
  T r(1);
  for (int i = 0; i < e; ++i) r = r * base;
  return r;
}

template <typename T>
T signed_power_sum(const PieExpansion& ex, std::span<const T> w, int power) {
  T acc(0);
  for (const SubsetTerm& t : ex.terms) {
    T s(0);
    for (int j = 1; j <= ex.m; ++j)
      if (t.contains(j)) s = s + w[j - 1];
    T p = ipow(s, power);
    if (t.sign > 0)
      acc += p;
    else
      acc -= p;
  }
  return acc;
}

template <typename T>
T divide_by_factorial(const T& v, std::int64_t f) {
  if constexpr (std::is_integral_v<T>) {
    NLSINV_REQUIRE(v % static_cast<T>(f) == 0,
                   "polarize: integer sum not divisible by m!");
    return v / static_cast<T>(f);
  } else {
    return v / T(f);
  }
}

}  // namespace detail

/// (1/m!) sum_S sign(S) (sum_{j in S} w_j)^m, which equals w_1 * ... * w_m.
/// T may be an exact type (integers, boost rationals) or a floating/complex
/// type; exact types give exact results.
template <typename T>
T polarize(const PieExpansion& ex, std::span<const T> w) {
  NLSINV_REQUIRE(static_cast<int>(w.size()) == ex.m,
                 "polarize: weight count does not match m");
  return detail::divide_by_factorial(detail::signed_power_sum(ex, w, ex.m),
                                     ex.factorial);
}

/// Same combination with exponent 0 < l < m; vanishes identically.
template <typename T>
T polarize_power(const PieExpansion& ex, std::span<const T> w, int l) {
  NLSINV_REQUIRE(static_cast<int>(w.size()) == ex.m,
                 "polarize_power: weight count does not match m");
  NLSINV_REQUIRE(l > 0 && l < ex.m, "polarize_power: need 0 < l < m");
  T s = detail::signed_power_sum(ex, w, l);
  if constexpr (std::is_integral_v<T>) {
    return s;  // exact: the signed sum itself must be 0
  } else {
    return s / T(ex.factorial);
  }
}

}  // namespace nlsinv::pie
