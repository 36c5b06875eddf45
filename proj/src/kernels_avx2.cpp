#include "affnego/kernels.hpp"

#if defined(__x86_64__) && defined(__AVX2__) && defined(__FMA__)
#define AFFNEGO_HAVE_AVX2 1
#include <immintrin.h>
#else
#define AFFNEGO_HAVE_AVX2 0
#endif

namespace affnego::simd {

#if AFFNEGO_HAVE_AVX2
namespace {

// Elementwise kernels use separate mul/add so each lane rounds exactly like
// the scalar reference. Reductions use FMA and a different summation order;
// they agree with the reference to rounding only.

inline double hsum(__m256d v) {
  const __m128d lo = _mm256_castpd256_pd128(v);
  const __m128d hi = _mm256_extractf128_pd(v, 1);
  const __m128d s = _mm_add_pd(lo, hi);
  return _mm_cvtsd_f64(_mm_add_sd(s, _mm_unpackhi_pd(s, s)));
}

double squared_distance_avx2(const double* a, const double* b, std::size_t n) {
  std::size_t i = 0;
  double acc = 0.0;
  if (n >= 8) {
    __m256d acc0 = _mm256_setzero_pd();
    __m256d acc1 = _mm256_setzero_pd();
    for (; i + 8 <= n; i += 8) {
      const __m256d d0 = _mm256_sub_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i));
      const __m256d d1 = _mm256_sub_pd(_mm256_loadu_pd(a + i + 4), _mm256_loadu_pd(b + i + 4));
      acc0 = _mm256_fmadd_pd(d0, d0, acc0);
      acc1 = _mm256_fmadd_pd(d1, d1, acc1);
    }
    acc = hsum(_mm256_add_pd(acc0, acc1));
  }
  for (; i + 4 <= n; i += 4) {
    const __m256d d = _mm256_sub_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i));
    acc += hsum(_mm256_mul_pd(d, d));
  }
  for (; i < n; ++i) {
    const double d = a[i] - b[i];
    acc += d * d;
  }
  return acc;
}

double dot_avx2(const double* a, const double* b, std::size_t n) {
  std::size_t i = 0;
  double acc = 0.0;
  if (n >= 8) {
    __m256d acc0 = _mm256_setzero_pd();
    __m256d acc1 = _mm256_setzero_pd();
    for (; i + 8 <= n; i += 8) {
      acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
      acc1 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i + 4), _mm256_loadu_pd(b + i + 4), acc1);
    }
    acc = hsum(_mm256_add_pd(acc0, acc1));
  }
  for (; i + 4 <= n; i += 4) {
    acc += hsum(_mm256_mul_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i)));
  }
  for (; i < n; ++i) acc += a[i] * b[i];
  return acc;
}

void move_toward_avx2(double* w, const double* target, double rate, std::size_t n) {
  const __m256d r = _mm256_set1_pd(rate);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d wv = _mm256_loadu_pd(w + i);
    const __m256d step = _mm256_mul_pd(r, _mm256_sub_pd(_mm256_loadu_pd(target + i), wv));
    _mm256_storeu_pd(w + i, _mm256_add_pd(wv, step));
  }
  for (; i < n; ++i) w[i] += rate * (target[i] - w[i]);
}

void axpy_avx2(double* y, const double* x, double alpha, std::size_t n) {
  const __m256d a = _mm256_set1_pd(alpha);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d prod = _mm256_mul_pd(a, _mm256_loadu_pd(x + i));
    _mm256_storeu_pd(y + i, _mm256_add_pd(_mm256_loadu_pd(y + i), prod));
  }
  for (; i < n; ++i) y[i] += alpha * x[i];
}

void matvec_avx2(const double* w, const double* bias, const double* x, double* out,
                 std::size_t rows, std::size_t cols) {
  for (std::size_t r = 0; r < rows; ++r) out[r] = bias[r] + dot_avx2(w + r * cols, x, cols);
}

void matvec_transposed_acc_avx2(const double* w, const double* v, double* out,
                                std::size_t rows, std::size_t cols) {
  for (std::size_t r = 0; r < rows; ++r) axpy_avx2(out, w + r * cols, v[r], cols);
}

}  // namespace

const KernelTable* avx2_kernels() {
  static const bool supported = __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
  static const KernelTable table{Isa::Avx2,       squared_distance_avx2, dot_avx2,
                                 move_toward_avx2, axpy_avx2,            matvec_avx2,
                                 matvec_transposed_acc_avx2};
  return supported ? &table : nullptr;
}

#else

const KernelTable* avx2_kernels() { return nullptr; }

#endif

}  // namespace affnego::simd
