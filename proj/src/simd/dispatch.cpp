#include "carinfo/simd/kernels.hpp"

#include <atomic>
#include <cassert>
#include <stdexcept>
#include <string>

namespace carinfo::simd {
namespace {

const KernelTable& table_unchecked(Isa isa) {
  switch (isa) {
#if defined(__x86_64__) || defined(_M_X64)
    case Isa::avx2: return detail::avx2_table;
#endif
#if defined(__aarch64__)
    case Isa::neon: return detail::neon_table;
#endif
    default: return detail::scalar_table;
  }
}

struct ActiveState {
  std::atomic<Isa> isa;
  std::atomic<const KernelTable*> table;
  ActiveState() : isa(detected_isa()), table(&table_unchecked(isa.load())) {}
};

ActiveState& state() {
  static ActiveState s;
  return s;
}

}  // namespace

std::string_view isa_name(Isa isa) {
  switch (isa) {
    case Isa::scalar: return "scalar";
    case Isa::avx2: return "avx2";
    case Isa::neon: return "neon";
  }
  return "unknown";
}

bool isa_available(Isa isa) {
  switch (isa) {
    case Isa::scalar:
      return true;
    case Isa::avx2:
#if defined(__x86_64__) || defined(_M_X64)
      return __builtin_cpu_supports("avx2");
#else
      return false;
#endif
    case Isa::neon:
#if defined(__aarch64__)
      return true;
#else
      return false;
#endif
  }
  return false;
}

Isa detected_isa() {
  if (isa_available(Isa::avx2)) return Isa::avx2;
  if (isa_available(Isa::neon)) return Isa::neon;
  return Isa::scalar;
}

Isa active_isa() { return state().isa.load(std::memory_order_relaxed); }

void set_active_isa(Isa isa) {
  if (!isa_available(isa)) {
    throw std::invalid_argument("instruction set not available on this host: " + std::string(isa_name(isa)));
  }
  state().table.store(&table_unchecked(isa), std::memory_order_relaxed);
  state().isa.store(isa, std::memory_order_relaxed);
}

const KernelTable& kernels_for(Isa isa) {
  if (!isa_available(isa)) {
    throw std::invalid_argument("instruction set not available on this host: " + std::string(isa_name(isa)));
  }
  return table_unchecked(isa);
}

namespace {
const KernelTable& active() { return *state().table.load(std::memory_order_relaxed); }
}  // namespace

double sum(std::span<const double> x) { return active().sum(x.data(), x.size()); }

double dot(std::span<const double> x, std::span<const double> y) {
  assert(x.size() == y.size());
  return active().dot(x.data(), y.data(), x.size());
}

double sum_sq_dev(std::span<const double> x, double c) { return active().sum_sq_dev(x.data(), x.size(), c); }

double sum_sq_resid(std::span<const double> x, std::span<const double> y, double c) {
  assert(x.size() == y.size());
  return active().sum_sq_resid(x.data(), y.data(), x.size(), c);
}

void shift(std::span<double> x, double c) { active().shift(x.data(), x.size(), c); }

}  // namespace carinfo::simd
