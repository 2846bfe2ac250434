#include "nlsinv/pie.hpp"

#include <bit>
#include <string>

namespace nlsinv::pie {

std::vector<int> SubsetTerm::members() const {
  std::vector<int> out;
  for (int j = 1; j <= 32; ++j)
    if (contains(j)) out.push_back(j);
  return out;
}

PieExpansion expand(int m) {
  if (m < 1 || m > kMaxOrder)
    throw ParameterError("pie::expand: m must be in [1, " +
                         std::to_string(kMaxOrder) + "], got " +
                         std::to_string(m));
  PieExpansion ex;
  ex.m = m;
  for (int i = 2; i <= m; ++i) ex.factorial *= i;
  const std::uint32_t count = (1u << m) - 1u;
  ex.terms.reserve(count);
  for (std::uint32_t mask = 1; mask <= count; ++mask) {
    const int size = std::popcount(mask);
    ex.terms.push_back({mask, size, (m - size) % 2 == 0 ? 1 : -1});
  }
  return ex;
}

}  // namespace nlsinv::pie
