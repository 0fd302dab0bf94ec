#include "carinfo/simd/kernels.hpp"

namespace carinfo::simd::detail {
namespace {

// Lane-ordered accumulation; see kernels.hpp.
struct Lanes {
  double l[4] = {0.0, 0.0, 0.0, 0.0};
  double fold() const { return (l[0] + l[1]) + (l[2] + l[3]); }
};

double sum_scalar(const double* x, std::size_t n) {
  Lanes acc;
  for (std::size_t i = 0; i < n; ++i) acc.l[i & 3] += x[i];
  return acc.fold();
}

double dot_scalar(const double* x, const double* y, std::size_t n) {
  Lanes acc;
  for (std::size_t i = 0; i < n; ++i) acc.l[i & 3] += x[i] * y[i];
  return acc.fold();
}

double sum_sq_dev_scalar(const double* x, std::size_t n, double c) {
  Lanes acc;
  for (std::size_t i = 0; i < n; ++i) {
    const double d = x[i] - c;
    acc.l[i & 3] += d * d;
  }
  return acc.fold();
}

double sum_sq_resid_scalar(const double* x, const double* y, std::size_t n, double c) {
  Lanes acc;
  for (std::size_t i = 0; i < n; ++i) {
    const double d = (x[i] - y[i]) - c;
    acc.l[i & 3] += d * d;
  }
  return acc.fold();
}

void shift_scalar(double* x, std::size_t n, double c) {
  for (std::size_t i = 0; i < n; ++i) x[i] += c;
}

}  // namespace

const KernelTable scalar_table = {
    sum_scalar, dot_scalar, sum_sq_dev_scalar, sum_sq_resid_scalar, shift_scalar,
};

}  // namespace carinfo::simd::detail
