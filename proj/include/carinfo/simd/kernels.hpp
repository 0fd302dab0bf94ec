#pragma once

// Reduction kernels shared by the samplers and the diagnostics.
//
// Every variant accumulates into four lanes (element i goes to lane i % 4)
// and folds them as (l0 + l1) + (l2 + l3). The scalar reference follows the
// same order, so all variants return bit-identical results and a chain is
// reproducible regardless of which instruction set the host supports.

#include <cstddef>
#include <span>
#include <string_view>

namespace carinfo::simd {

enum class Isa { scalar, avx2, neon };

std::string_view isa_name(Isa isa);

/// Best instruction set supported by the host CPU (and compiled in).
Isa detected_isa();

/// Instruction set used by the dispatching entry points below.
Isa active_isa();

/// Force a particular variant. Throws std::invalid_argument if the variant
/// is not available on this host.
void set_active_isa(Isa isa);

bool isa_available(Isa isa);

// Dispatching entry points.

double sum(std::span<const double> x);
double dot(std::span<const double> x, std::span<const double> y);
/// sum_i (x_i - c)^2
double sum_sq_dev(std::span<const double> x, double c);
/// sum_i (x_i - y_i - c)^2
double sum_sq_resid(std::span<const double> x, std::span<const double> y, double c);
/// x_i += c
void shift(std::span<double> x, double c);

/// Function table for one instruction set.
struct KernelTable {
  double (*sum)(const double* x, std::size_t n);
  double (*dot)(const double* x, const double* y, std::size_t n);
  double (*sum_sq_dev)(const double* x, std::size_t n, double c);
  double (*sum_sq_resid)(const double* x, const double* y, std::size_t n, double c);
  void (*shift)(double* x, std::size_t n, double c);
};

/// Direct access to one variant's table; used by equivalence tests.
const KernelTable& kernels_for(Isa isa);

namespace detail {
extern const KernelTable scalar_table;
#if defined(__x86_64__) || defined(_M_X64)
extern const KernelTable avx2_table;
#endif
#if defined(__aarch64__)
extern const KernelTable neon_table;
#endif
}  // namespace detail

}  // namespace carinfo::simd
