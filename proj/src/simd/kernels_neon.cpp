#include "carinfo/simd/kernels.hpp"

#if defined(__aarch64__)
#include <arm_neon.h>

namespace carinfo::simd::detail {
namespace {

// Two 2-wide registers hold lanes {0,1} and {2,3}.
struct Acc {
  float64x2_t lo = vdupq_n_f64(0.0);
  float64x2_t hi = vdupq_n_f64(0.0);
  double fold() const {
    return (vgetq_lane_f64(lo, 0) + vgetq_lane_f64(lo, 1)) +
           (vgetq_lane_f64(hi, 0) + vgetq_lane_f64(hi, 1));
  }
  // Tail elements go to their scalar lane.
  void add_lane(std::size_t lane, double v) {
    double l[4];
    vst1q_f64(l, lo);
    vst1q_f64(l + 2, hi);
    l[lane] += v;
    lo = vld1q_f64(l);
    hi = vld1q_f64(l + 2);
  }
};

double sum_neon(const double* x, std::size_t n) {
  Acc acc;
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    acc.lo = vaddq_f64(acc.lo, vld1q_f64(x + i));
    acc.hi = vaddq_f64(acc.hi, vld1q_f64(x + i + 2));
  }
  for (; i < n; ++i) acc.add_lane(i & 3, x[i]);
  return acc.fold();
}

double dot_neon(const double* x, const double* y, std::size_t n) {
  Acc acc;
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    acc.lo = vaddq_f64(acc.lo, vmulq_f64(vld1q_f64(x + i), vld1q_f64(y + i)));
    acc.hi = vaddq_f64(acc.hi, vmulq_f64(vld1q_f64(x + i + 2), vld1q_f64(y + i + 2)));
  }
  for (; i < n; ++i) acc.add_lane(i & 3, x[i] * y[i]);
  return acc.fold();
}

double sum_sq_dev_neon(const double* x, std::size_t n, double c) {
  const float64x2_t vc = vdupq_n_f64(c);
  Acc acc;
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const float64x2_t d0 = vsubq_f64(vld1q_f64(x + i), vc);
    const float64x2_t d1 = vsubq_f64(vld1q_f64(x + i + 2), vc);
    acc.lo = vaddq_f64(acc.lo, vmulq_f64(d0, d0));
    acc.hi = vaddq_f64(acc.hi, vmulq_f64(d1, d1));
  }
  for (; i < n; ++i) {
    const double d = x[i] - c;
    acc.add_lane(i & 3, d * d);
  }
  return acc.fold();
}

double sum_sq_resid_neon(const double* x, const double* y, std::size_t n, double c) {
  const float64x2_t vc = vdupq_n_f64(c);
  Acc acc;
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const float64x2_t d0 = vsubq_f64(vsubq_f64(vld1q_f64(x + i), vld1q_f64(y + i)), vc);
    const float64x2_t d1 = vsubq_f64(vsubq_f64(vld1q_f64(x + i + 2), vld1q_f64(y + i + 2)), vc);
    acc.lo = vaddq_f64(acc.lo, vmulq_f64(d0, d0));
    acc.hi = vaddq_f64(acc.hi, vmulq_f64(d1, d1));
  }
  for (; i < n; ++i) {
    const double d = (x[i] - y[i]) - c;
    acc.add_lane(i & 3, d * d);
  }
  return acc.fold();
}

void shift_neon(double* x, std::size_t n, double c) {
  const float64x2_t vc = vdupq_n_f64(c);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) vst1q_f64(x + i, vaddq_f64(vld1q_f64(x + i), vc));
  for (; i < n; ++i) x[i] += c;
}

}  // namespace

const KernelTable neon_table = {
    sum_neon, dot_neon, sum_sq_dev_neon, sum_sq_resid_neon, shift_neon,
};

}  // namespace carinfo::simd::detail
#endif
