#include <gtest/gtest.h>

#include <algorithm>
#include <boost/multiprecision/cpp_int.hpp>
#include <complex>
#include <random>
#include <vector>

#include "nlsinv/pie.hpp"

using namespace nlsinv;
using boost::multiprecision::cpp_rational;

TEST(PieExpand, OrderTwoTermsInBitmaskOrder) {
  const auto ex = pie::expand(2);
  ASSERT_EQ(ex.terms.size(), 3u);
  EXPECT_EQ(ex.factorial, 2);
  EXPECT_EQ(ex.terms[0].mask, 0b01u);
  EXPECT_EQ(ex.terms[0].sign, -1);
  EXPECT_EQ(ex.terms[1].mask, 0b10u);
  EXPECT_EQ(ex.terms[1].sign, -1);
  EXPECT_EQ(ex.terms[2].mask, 0b11u);
  EXPECT_EQ(ex.terms[2].sign, +1);
  EXPECT_EQ(ex.terms[2].members(), (std::vector<int>{1, 2}));
}

TEST(PieExpand, OrderOneIsSingleTerm) {
  const auto ex = pie::expand(1);
  ASSERT_EQ(ex.terms.size(), 1u);
  EXPECT_EQ(ex.terms[0].mask, 1u);
  EXPECT_EQ(ex.terms[0].sign, 1);
  EXPECT_DOUBLE_EQ(ex.normalizer(), 1.0);
}

TEST(PieExpand, OrderThreeSignsBySize) {
  const auto ex = pie::expand(3);
  ASSERT_EQ(ex.terms.size(), 7u);
  for (const auto& t : ex.terms) {
    if (t.size == 3) EXPECT_EQ(t.sign, 1);
    if (t.size == 2) EXPECT_EQ(t.sign, -1);
    if (t.size == 1) EXPECT_EQ(t.sign, 1);
  }
  EXPECT_EQ(ex.factorial, 6);
}

TEST(PieExpand, CountAndSignParityForAllOrders) {
  for (int m = 1; m <= pie::kMaxOrder; ++m) {
    const auto ex = pie::expand(m);
    ASSERT_EQ(ex.terms.size(), (std::size_t{1} << m) - 1) << "m=" << m;
    std::uint32_t prev = 0;
    for (const auto& t : ex.terms) {
      EXPECT_GT(t.mask, prev);
      prev = t.mask;
      EXPECT_EQ(t.size, __builtin_popcount(t.mask));
      EXPECT_EQ(t.sign, ((m - t.size) % 2 == 0) ? 1 : -1);
      EXPECT_EQ(static_cast<int>(t.members().size()), t.size);
    }
  }
}

TEST(PieExpand, RejectsOrdersOutsideRange) {
  EXPECT_THROW(pie::expand(0), ParameterError);
  EXPECT_THROW(pie::expand(13), ParameterError);
  EXPECT_THROW(pie::expand(-2), ParameterError);
}

TEST(PiePolarize, IntegerExamples) {
  const auto e2 = pie::expand(2);
  const std::vector<long long> w2{2, 3};
  EXPECT_EQ(pie::polarize<long long>(e2, w2), 6);

  // (6^3 - 3^3 - 4^3 - 5^3 + 1^3 + 2^3 + 3^3) / 6 written out by hand.
  const long long expanded = (216 - 27 - 64 - 125 + 1 + 8 + 27) / 6;
  const auto e3 = pie::expand(3);
  const std::vector<long long> w3{1, 2, 3};
  EXPECT_EQ(pie::polarize<long long>(e3, w3), expanded);
  EXPECT_EQ(expanded, 6);
}

TEST(PiePolarize, PowerBelowOrderVanishesExactly) {
  const auto e3 = pie::expand(3);
  const std::vector<long long> w{1, 2, 3};
  // (36 - 9 - 16 - 25 + 1 + 4 + 9) = 0
  EXPECT_EQ(pie::polarize_power<long long>(e3, w, 2), 0);
  EXPECT_EQ(pie::polarize_power<long long>(e3, w, 1), 0);
  const auto e2 = pie::expand(2);
  const std::vector<long long> ones{1, 1};
  EXPECT_EQ(pie::polarize_power<long long>(e2, ones, 1), 0);
}

TEST(PiePolarize, ZeroEntryGivesZero) {
  std::mt19937 rng(5);
  std::uniform_int_distribution<int> d(-9, 9);
  for (int m = 2; m <= 6; ++m) {
    const auto ex = pie::expand(m);
    std::vector<long long> w(m);
    for (auto& x : w) x = d(rng);
    w[m / 2] = 0;
    EXPECT_EQ(pie::polarize<long long>(ex, w), 0);
  }
}

TEST(PiePolarize, ExactRationalMatchesProduct) {
  std::mt19937 rng(11);
  std::uniform_int_distribution<int> num(-50, 50), den(1, 17);
  for (int m = 1; m <= 8; ++m) {
    const auto ex = pie::expand(m);
    for (int trial = 0; trial < 10; ++trial) {
      std::vector<cpp_rational> w(m);
      cpp_rational prod = 1;
      for (auto& x : w) {
        x = cpp_rational(num(rng), den(rng));
        prod *= x;
      }
      EXPECT_EQ(pie::polarize<cpp_rational>(ex, w), prod);
      for (int l = 1; l < m; ++l) EXPECT_EQ(pie::polarize_power<cpp_rational>(ex, w, l), 0);
    }
  }
}

TEST(PiePolarize, RandomComplexWithinRelativeTolerance) {
  std::mt19937_64 rng(2024);
  std::normal_distribution<double> n;
  for (int m = 2; m <= 8; ++m) {
    const auto ex = pie::expand(m);
    for (int trial = 0; trial < 100; ++trial) {
      std::vector<std::complex<double>> w(m);
      std::complex<double> prod = 1.0;
      double l1 = 0.0;
      for (auto& z : w) {
        z = {n(rng), n(rng)};
        prod *= z;
        l1 += std::abs(z);
      }
      EXPECT_LE(std::abs(pie::polarize<std::complex<double>>(ex, w) - prod),
                1e-12 * std::pow(l1, m));
      for (int l = 1; l < m; ++l)
        EXPECT_LE(std::abs(pie::polarize_power<std::complex<double>>(ex, w, l)),
                  1e-12 * std::pow(l1, l));
    }
  }
}

TEST(PiePolarize, SymmetricUnderPermutation) {
  const auto ex = pie::expand(5);
  std::vector<long long> w{3, -1, 4, 1, -5};
  const long long ref = pie::polarize<long long>(ex, w);
  std::sort(w.begin(), w.end());
  do {
    EXPECT_EQ(pie::polarize<long long>(ex, w), ref);
  } while (std::next_permutation(w.begin(), w.end()));
}

TEST(PiePolarize, RejectsBadArguments) {
  const auto ex = pie::expand(3);
  const std::vector<double> two{1.0, 2.0};
  EXPECT_THROW(pie::polarize<double>(ex, two), ParameterError);
  const std::vector<double> three{1.0, 2.0, 3.0};
  EXPECT_THROW(pie::polarize_power<double>(ex, three, 3), ParameterError);
  EXPECT_THROW(pie::polarize_power<double>(ex, three, 0), ParameterError);
}
