#pragma once

// Data-parallel inner loops shared by the self-organizing networks and the
// actor/critic layers. Every kernel has a scalar reference implementation;
// vectorized variants are selected once at startup based on CPU support and
// must agree with the reference (see tests/test_kernels.cpp).

#include <cstddef>
#include <span>
#include <string_view>

namespace affnego::simd {

enum class Isa { Scalar, Avx2, Neon };

struct KernelTable {
  Isa isa;
  // sum_i (a_i - b_i)^2
  double (*squared_distance)(const double* a, const double* b, std::size_t n);
  // sum_i a_i * b_i
  double (*dot)(const double* a, const double* b, std::size_t n);
  // w_i += rate * (target_i - w_i)
  void (*move_toward)(double* w, const double* target, double rate, std::size_t n);
  // y_i += alpha * x_i
  void (*axpy)(double* y, const double* x, double alpha, std::size_t n);
  // out_r = bias_r + sum_c W[r, c] * x_c, W row-major rows x cols
  void (*matvec)(const double* w, const double* bias, const double* x, double* out,
                 std::size_t rows, std::size_t cols);
  // out_c = sum_r W[r, c] * v_r (transpose product, accumulates into out)
  void (*matvec_transposed_acc)(const double* w, const double* v, double* out,
                                std::size_t rows, std::size_t cols);
};

const KernelTable& scalar_kernels();
// nullptr when the variant was not compiled in or the CPU lacks it.
const KernelTable* avx2_kernels();
const KernelTable* neon_kernels();

// Table chosen at first use. AFFNEGO_SIMD=scalar forces the reference path.
const KernelTable& active();
std::string_view isa_name(Isa isa);

inline double squared_distance(std::span<const double> a, std::span<const double> b) {
  return active().squared_distance(a.data(), b.data(), a.size());
}
inline double dot(std::span<const double> a, std::span<const double> b) {
  return active().dot(a.data(), b.data(), a.size());
}
inline void move_toward(std::span<double> w, std::span<const double> target, double rate) {
  active().move_toward(w.data(), target.data(), rate, w.size());
}
inline void axpy(std::span<double> y, std::span<const double> x, double alpha) {
  active().axpy(y.data(), x.data(), alpha, y.size());
}

}  // namespace affnego::simd
