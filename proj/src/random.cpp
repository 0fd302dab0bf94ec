#include "carinfo/random.hpp"

#include <boost/random/binomial_distribution.hpp>
#include <boost/random/gamma_distribution.hpp>
#include <boost/random/normal_distribution.hpp>
#include <boost/random/uniform_int_distribution.hpp>

#include <algorithm>
#include <cmath>
#include <limits>

namespace carinfo {

std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t derive_seed(std::uint64_t master, std::initializer_list<std::uint64_t> path) {
  std::uint64_t s = mix64(master);
  for (auto p : path) s = mix64(s ^ mix64(p + 0x632be59bd9b4e019ULL));
  return s;
}

Rng make_rng(std::uint64_t master, std::initializer_list<std::uint64_t> path) {
  return Rng(derive_seed(master, path));
}

double uniform_open(Rng& rng) {
  // 53 random bits, shifted half an ulp off zero.
  return (static_cast<double>(rng() >> 11) + 0.5) * 0x1.0p-53;
}

double standard_normal(Rng& rng) { return boost::random::normal_distribution<double>(0.0, 1.0)(rng); }

double normal(Rng& rng, double mean, double sd) { return mean + sd * standard_normal(rng); }

double gamma_rate(Rng& rng, double shape, double rate) {
  return boost::random::gamma_distribution<double>(shape, 1.0)(rng) / rate;
}

double log_gamma_variate(Rng& rng, double shape) {
  if (shape >= 1.0) return std::log(boost::random::gamma_distribution<double>(shape, 1.0)(rng));
  // G(shape) = G(shape + 1) * U^(1/shape)
  const double g = boost::random::gamma_distribution<double>(shape + 1.0, 1.0)(rng);
  return std::log(g) + std::log(uniform_open(rng)) / shape;
}

double beta(Rng& rng, double a, double b) {
  const double lx = log_gamma_variate(rng, a);
  const double ly = log_gamma_variate(rng, b);
  const double hi = std::max(lx, ly);
  const double log_total = hi + std::log(std::exp(lx - hi) + std::exp(ly - hi));
  const double p = std::exp(lx - log_total);
  constexpr double tiny = std::numeric_limits<double>::min();
  constexpr double top = 1.0 - std::numeric_limits<double>::epsilon() / 2;
  return std::clamp(p, tiny, top);
}

long long binomial(Rng& rng, long long n, double p) {
  if (n <= 0 || p <= 0.0) return 0;
  if (p >= 1.0) return n;
  return boost::random::binomial_distribution<long long, double>(n, p)(rng);
}

long long uniform_int(Rng& rng, long long lo, long long hi) {
  return boost::random::uniform_int_distribution<long long>(lo, hi)(rng);
}

}  // namespace carinfo
