#pragma once
// Dense double-precision kernels behind every inner product and reduction
// in the scoring path.
//
// Each kernel has a scalar reference implementation (plain sequential loops,
// the numerical definition) and, on x86-64, an AVX2/FMA variant. The active
// table is chosen once at first use from cpuid, or from GLOSSRANK_KERNEL
// (scalar|avx2|auto), and may be pinned with set_active(). Variants agree
// with the reference to rounding; tests/unit/test_kernels.cpp holds the bounds.

#include <cstddef>
#include <optional>
#include <span>
#include <string_view>

namespace glossrank::kernels {

enum class Isa { kScalar, kAvx2 };

struct KernelTable {
  Isa isa;
  double (*dot)(const double* a, const double* b, std::size_t n);
  double (*sum_squares)(const double* a, std::size_t n);
  double (*sum)(const double* a, std::size_t n);
  // n must be >= 1.
  double (*max)(const double* a, std::size_t n);
  // y += alpha * x
  void (*axpy)(double alpha, const double* x, double* y, std::size_t n);
  // x *= alpha
  void (*scale)(double alpha, double* x, std::size_t n);
};

const KernelTable& scalar_table() noexcept;

/// nullptr when the variant was not compiled in.
const KernelTable* avx2_table() noexcept;

/// Compiled in and supported by the running CPU.
bool available(Isa isa) noexcept;

Isa best_available() noexcept;

const KernelTable& table(Isa isa);

const KernelTable& active() noexcept;

/// Throws Error(kInvalidConfig) if the variant is unavailable.
void set_active(Isa isa);

std::string_view name(Isa isa) noexcept;
std::optional<Isa> parse_isa(std::string_view s) noexcept;

// Span conveniences over the active table.

inline double dot(std::span<const double> a, std::span<const double> b) noexcept {
  return active().dot(a.data(), b.data(), a.size());
}

inline double sum_squares(std::span<const double> a) noexcept {
  return active().sum_squares(a.data(), a.size());
}

inline double sum(std::span<const double> a) noexcept { return active().sum(a.data(), a.size()); }

inline double max(std::span<const double> a) noexcept { return active().max(a.data(), a.size()); }

inline void axpy(double alpha, std::span<const double> x, std::span<double> y) noexcept {
  active().axpy(alpha, x.data(), y.data(), x.size());
}

inline void scale(double alpha, std::span<double> x) noexcept {
  active().scale(alpha, x.data(), x.size());
}

}  // namespace glossrank::kernels
