#include "affnego/kernels.hpp"

#if defined(__aarch64__) && defined(__ARM_NEON)
#include <arm_neon.h>
#define AFFNEGO_HAVE_NEON 1
#else
#define AFFNEGO_HAVE_NEON 0
#endif

namespace affnego::simd {

#if AFFNEGO_HAVE_NEON
namespace {

double squared_distance_neon(const double* a, const double* b, std::size_t n) {
  std::size_t i = 0;
  double acc = 0.0;
  if (n >= 2) {
    float64x2_t v = vdupq_n_f64(0.0);
    for (; i + 2 <= n; i += 2) {
      const float64x2_t d = vsubq_f64(vld1q_f64(a + i), vld1q_f64(b + i));
      v = vfmaq_f64(v, d, d);
    }
    acc = vaddvq_f64(v);
  }
  for (; i < n; ++i) {
    const double d = a[i] - b[i];
    acc += d * d;
  }
  return acc;
}

double dot_neon(const double* a, const double* b, std::size_t n) {
  std::size_t i = 0;
  double acc = 0.0;
  if (n >= 2) {
    float64x2_t v = vdupq_n_f64(0.0);
    for (; i + 2 <= n; i += 2) v = vfmaq_f64(v, vld1q_f64(a + i), vld1q_f64(b + i));
    acc = vaddvq_f64(v);
  }
  for (; i < n; ++i) acc += a[i] * b[i];
  return acc;
}

void move_toward_neon(double* w, const double* target, double rate, std::size_t n) {
  const float64x2_t r = vdupq_n_f64(rate);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const float64x2_t wv = vld1q_f64(w + i);
    vst1q_f64(w + i, vaddq_f64(wv, vmulq_f64(r, vsubq_f64(vld1q_f64(target + i), wv))));
  }
  for (; i < n; ++i) w[i] += rate * (target[i] - w[i]);
}

void axpy_neon(double* y, const double* x, double alpha, std::size_t n) {
  const float64x2_t a = vdupq_n_f64(alpha);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    vst1q_f64(y + i, vaddq_f64(vld1q_f64(y + i), vmulq_f64(a, vld1q_f64(x + i))));
  }
  for (; i < n; ++i) y[i] += alpha * x[i];
}

void matvec_neon(const double* w, const double* bias, const double* x, double* out,
                 std::size_t rows, std::size_t cols) {
  for (std::size_t r = 0; r < rows; ++r) out[r] = bias[r] + dot_neon(w + r * cols, x, cols);
}

void matvec_transposed_acc_neon(const double* w, const double* v, double* out,
                                std::size_t rows, std::size_t cols) {
  for (std::size_t r = 0; r < rows; ++r) axpy_neon(out, w + r * cols, v[r], cols);
}

}  // namespace

const KernelTable* neon_kernels() {
  static const KernelTable table{Isa::Neon,       squared_distance_neon, dot_neon,
                                 move_toward_neon, axpy_neon,            matvec_neon,
                                 matvec_transposed_acc_neon};
  return &table;
}

#else

const KernelTable* neon_kernels() { return nullptr; }

#endif

}  // namespace affnego::simd
