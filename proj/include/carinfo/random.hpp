#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

namespace carinfo {

/// Chain random engine. Boost.Random distributions are used on top of it
/// because their output is specified, unlike std:: distributions.
using Rng = std::mt19937_64;

/// SplitMix64 finalizer.
std::uint64_t mix64(std::uint64_t x);

/// Seed for an independent substream identified by `path` under `master`,
/// e.g. derive_seed(base, {cell, replicate, stream}).
std::uint64_t derive_seed(std::uint64_t master, std::initializer_list<std::uint64_t> path);

Rng make_rng(std::uint64_t master, std::initializer_list<std::uint64_t> path);

// Variates. All take the engine explicitly and consume it deterministically.

/// Uniform on the open interval (0, 1).
double uniform_open(Rng& rng);
double standard_normal(Rng& rng);
double normal(Rng& rng, double mean, double sd);
/// Gamma with shape and *rate*.
double gamma_rate(Rng& rng, double shape, double rate);
/// Log of a Gamma(shape, 1) variate; accurate for tiny shapes.
double log_gamma_variate(Rng& rng, double shape);
/// Beta(a, b) draw kept strictly inside (0, 1).
double beta(Rng& rng, double a, double b);
long long binomial(Rng& rng, long long n, double p);
/// Uniform integer on [lo, hi].
long long uniform_int(Rng& rng, long long lo, long long hi);

}  // namespace carinfo
