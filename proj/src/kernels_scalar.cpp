#include "affnego/kernels.hpp"

namespace affnego::simd {
namespace {

double squared_distance_ref(const double* a, const double* b, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double d = a[i] - b[i];
    acc += d * d;
  }
  return acc;
}

double dot_ref(const double* a, const double* b, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) acc += a[i] * b[i];
  return acc;
}

void move_toward_ref(double* w, const double* target, double rate, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) w[i] += rate * (target[i] - w[i]);
}

void axpy_ref(double* y, const double* x, double alpha, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] += alpha * x[i];
}

void matvec_ref(const double* w, const double* bias, const double* x, double* out,
                std::size_t rows, std::size_t cols) {
  for (std::size_t r = 0; r < rows; ++r) {
    out[r] = bias[r] + dot_ref(w + r * cols, x, cols);
  }
}

void matvec_transposed_acc_ref(const double* w, const double* v, double* out,
                               std::size_t rows, std::size_t cols) {
  for (std::size_t r = 0; r < rows; ++r) axpy_ref(out, w + r * cols, v[r], cols);
}

}  // namespace

const KernelTable& scalar_kernels() {
  static const KernelTable table{Isa::Scalar,     squared_distance_ref, dot_ref,
                                 move_toward_ref, axpy_ref,             matvec_ref,
                                 matvec_transposed_acc_ref};
  return table;
}

}  // namespace affnego::simd
