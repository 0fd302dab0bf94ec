// Compiled with -mavx2 only; never called unless the CPU reports AVX2.
#include "carinfo/simd/kernels.hpp"

#include <immintrin.h>

namespace carinfo::simd::detail {
namespace {

inline double fold(__m256d acc) {
  alignas(32) double l[4];
  _mm256_store_pd(l, acc);
  return (l[0] + l[1]) + (l[2] + l[3]);
}

// Mask selecting the first `rem` lanes (rem in 1..3).
inline __m256i tail_mask(std::size_t rem) {
  return _mm256_setr_epi64x(rem > 0 ? -1 : 0, rem > 1 ? -1 : 0, rem > 2 ? -1 : 0, 0);
}

double sum_avx2(const double* x, std::size_t n) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) acc = _mm256_add_pd(acc, _mm256_loadu_pd(x + i));
  if (i < n) acc = _mm256_add_pd(acc, _mm256_maskload_pd(x + i, tail_mask(n - i)));
  return fold(acc);
}

double dot_avx2(const double* x, const double* y, std::size_t n) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    acc = _mm256_add_pd(acc, _mm256_mul_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i)));
  }
  if (i < n) {
    const __m256i m = tail_mask(n - i);
    acc = _mm256_add_pd(acc, _mm256_mul_pd(_mm256_maskload_pd(x + i, m), _mm256_maskload_pd(y + i, m)));
  }
  return fold(acc);
}

double sum_sq_dev_avx2(const double* x, std::size_t n, double c) {
  const __m256d vc = _mm256_set1_pd(c);
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d d = _mm256_sub_pd(_mm256_loadu_pd(x + i), vc);
    acc = _mm256_add_pd(acc, _mm256_mul_pd(d, d));
  }
  if (i < n) {
    const __m256i m = tail_mask(n - i);
    // Masked-off lanes load 0 and would contribute c^2; blend them back to 0.
    __m256d d = _mm256_sub_pd(_mm256_maskload_pd(x + i, m), vc);
    d = _mm256_and_pd(d, _mm256_castsi256_pd(m));
    acc = _mm256_add_pd(acc, _mm256_mul_pd(d, d));
  }
  return fold(acc);
}

double sum_sq_resid_avx2(const double* x, const double* y, std::size_t n, double c) {
  const __m256d vc = _mm256_set1_pd(c);
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d d = _mm256_sub_pd(_mm256_sub_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i)), vc);
    acc = _mm256_add_pd(acc, _mm256_mul_pd(d, d));
  }
  if (i < n) {
    const __m256i m = tail_mask(n - i);
    __m256d d = _mm256_sub_pd(_mm256_sub_pd(_mm256_maskload_pd(x + i, m), _mm256_maskload_pd(y + i, m)), vc);
    d = _mm256_and_pd(d, _mm256_castsi256_pd(m));
    acc = _mm256_add_pd(acc, _mm256_mul_pd(d, d));
  }
  return fold(acc);
}

void shift_avx2(double* x, std::size_t n, double c) {
  const __m256d vc = _mm256_set1_pd(c);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) _mm256_storeu_pd(x + i, _mm256_add_pd(_mm256_loadu_pd(x + i), vc));
  for (; i < n; ++i) x[i] += c;
}

}  // namespace

const KernelTable avx2_table = {
    sum_avx2, dot_avx2, sum_sq_dev_avx2, sum_sq_resid_avx2, shift_avx2,
};

}  // namespace carinfo::simd::detail
