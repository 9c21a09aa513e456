#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <random>
#include <vector>

#include "glossrank/error.hpp"
#include "glossrank/kernels.hpp"

namespace k = glossrank::kernels;

namespace {

std::vector<double> random_vec(std::mt19937_64& rng, std::size_t n, double lo = -1.0, double hi = 1.0) {
  std::uniform_real_distribution<double> u(lo, hi);
  std::vector<double> v(n);
  for (auto& x : v) x = u(rng);
  return v;
}

// |sum| of absolute terms bounds the error of any summation order.
double abs_dot(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0;
  for (std::size_t i = 0; i < a.size(); ++i) s += std::fabs(a[i] * b[i]);
  return s;
}

class KernelEquivalence : public ::testing::Test {
 protected:
  void SetUp() override {
    if (!k::available(k::Isa::kAvx2)) GTEST_SKIP() << "AVX2/FMA variant not available";
    simd = &k::table(k::Isa::kAvx2);
    ref = &k::scalar_table();
  }
  const k::KernelTable* simd = nullptr;
  const k::KernelTable* ref = nullptr;
};

}  // namespace

TEST(Kernels, ScalarAlwaysAvailable) {
  EXPECT_TRUE(k::available(k::Isa::kScalar));
  EXPECT_EQ(k::table(k::Isa::kScalar).isa, k::Isa::kScalar);
}

TEST(Kernels, ParseIsa) {
  EXPECT_EQ(k::parse_isa("scalar"), k::Isa::kScalar);
  EXPECT_EQ(k::parse_isa("avx2"), k::Isa::kAvx2);
  EXPECT_EQ(k::parse_isa("auto"), k::best_available());
  EXPECT_FALSE(k::parse_isa("neon").has_value());
  EXPECT_EQ(k::name(k::Isa::kScalar), "scalar");
}

TEST(Kernels, SetActiveSwitchesTable) {
  const k::Isa before = k::active().isa;
  k::set_active(k::Isa::kScalar);
  EXPECT_EQ(k::active().isa, k::Isa::kScalar);
  k::set_active(before);
  EXPECT_EQ(k::active().isa, before);
}

TEST(Kernels, ScalarReferenceValues) {
  const std::vector<double> a{1, 2, 3}, b{4, -5, 6};
  const auto& t = k::scalar_table();
  EXPECT_EQ(t.dot(a.data(), b.data(), 3), 12.0);
  EXPECT_EQ(t.sum_squares(a.data(), 3), 14.0);
  EXPECT_EQ(t.sum(b.data(), 3), 5.0);
  EXPECT_EQ(t.max(b.data(), 3), 6.0);
  std::vector<double> y{1, 1, 1};
  t.axpy(2.0, a.data(), y.data(), 3);
  EXPECT_EQ(y, (std::vector<double>{3, 5, 7}));
  t.scale(0.5, y.data(), 3);
  EXPECT_EQ(y, (std::vector<double>{1.5, 2.5, 3.5}));
  EXPECT_EQ(t.dot(a.data(), b.data(), 0), 0.0);
  EXPECT_EQ(t.sum(a.data(), 0), 0.0);
}

TEST_F(KernelEquivalence, DotAndReductionsAcrossLengths) {
  std::mt19937_64 rng(11);
  const double eps = std::numeric_limits<double>::epsilon();
  for (std::size_t n = 0; n <= 259; ++n) {
    const auto a = random_vec(rng, n), b = random_vec(rng, n);
    const double bound = 2.0 * (n + 1) * eps * abs_dot(a, b) + 1e-300;
    EXPECT_NEAR(simd->dot(a.data(), b.data(), n), ref->dot(a.data(), b.data(), n), bound) << n;
    EXPECT_NEAR(simd->sum_squares(a.data(), n), ref->sum_squares(a.data(), n), bound + 2.0 * (n + 1) * eps * n)
        << n;
    double abs_sum = 0;
    for (double x : a) abs_sum += std::fabs(x);
    EXPECT_NEAR(simd->sum(a.data(), n), ref->sum(a.data(), n), 2.0 * (n + 1) * eps * abs_sum + 1e-300) << n;
    if (n > 0) {
      EXPECT_EQ(simd->max(a.data(), n), ref->max(a.data(), n)) << n;
    }
  }
}

TEST_F(KernelEquivalence, MaxFindsExtremesAnywhere) {
  for (std::size_t n = 1; n <= 40; ++n) {
    for (std::size_t pos = 0; pos < n; ++pos) {
      std::vector<double> v(n, -3.0);
      v[pos] = 2.5;
      EXPECT_EQ(simd->max(v.data(), n), 2.5);
      std::vector<double> neg(n, -1e300);
      neg[pos] = -1e299;
      EXPECT_EQ(simd->max(neg.data(), n), -1e299);
    }
  }
}

TEST_F(KernelEquivalence, AxpyAndScaleElementwise) {
  std::mt19937_64 rng(12);
  const double eps = std::numeric_limits<double>::epsilon();
  for (std::size_t n = 0; n <= 131; ++n) {
    const auto x = random_vec(rng, n);
    auto y1 = random_vec(rng, n);
    auto y2 = y1;
    const double alpha = 0.37;
    simd->axpy(alpha, x.data(), y1.data(), n);
    ref->axpy(alpha, x.data(), y2.data(), n);
    for (std::size_t i = 0; i < n; ++i) {
      // fused vs unfused multiply-add differ by at most one rounding of the product
      EXPECT_NEAR(y1[i], y2[i], 2 * eps * (std::fabs(alpha * x[i]) + std::fabs(y2[i])));
    }
    auto s1 = x, s2 = x;
    simd->scale(alpha, s1.data(), n);
    ref->scale(alpha, s2.data(), n);
    EXPECT_EQ(s1, s2);
  }
}

TEST_F(KernelEquivalence, ExactOnSmallIntegers) {
  // Integer-valued inputs make every partial sum exact, so order cannot matter.
  std::vector<double> a(97), b(97);
  for (std::size_t i = 0; i < a.size(); ++i) {
    a[i] = static_cast<double>(static_cast<int>(i % 7) - 3);
    b[i] = static_cast<double>(static_cast<int>(i % 5) - 2);
  }
  EXPECT_EQ(simd->dot(a.data(), b.data(), a.size()), ref->dot(a.data(), b.data(), a.size()));
  EXPECT_EQ(simd->sum(a.data(), a.size()), ref->sum(a.data(), a.size()));
  EXPECT_EQ(simd->sum_squares(a.data(), a.size()), ref->sum_squares(a.data(), a.size()));
}

TEST_F(KernelEquivalence, UnalignedSubspans) {
  std::mt19937_64 rng(13);
  const auto a = random_vec(rng, 70), b = random_vec(rng, 70);
  for (std::size_t off = 0; off < 5; ++off) {
    const std::size_t n = 64;
    EXPECT_NEAR(simd->dot(a.data() + off, b.data() + off, n), ref->dot(a.data() + off, b.data() + off, n), 1e-13);
  }
}
