#include "kernels_impl.hpp"

namespace glossrank::kernels {

namespace {

double dot_ref(const double* a, const double* b, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) acc += a[i] * b[i];
  return acc;
}

double sum_squares_ref(const double* a, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) acc += a[i] * a[i];
  return acc;
}

double sum_ref(const double* a, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) acc += a[i];
  return acc;
}

double max_ref(const double* a, std::size_t n) {
  double m = a[0];
  for (std::size_t i = 1; i < n; ++i) {
    if (a[i] > m) m = a[i];
  }
  return m;
}

void axpy_ref(double alpha, const double* x, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] += alpha * x[i];
}

void scale_ref(double alpha, double* x, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) x[i] *= alpha;
}

constexpr KernelTable kScalar{
    Isa::kScalar, dot_ref, sum_squares_ref, sum_ref, max_ref, axpy_ref, scale_ref,
};

}  // namespace

const KernelTable& scalar_table() noexcept { return kScalar; }

}  // namespace glossrank::kernels
