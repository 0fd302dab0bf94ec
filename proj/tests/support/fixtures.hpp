#pragma once

// Engineered fixtures on the 67-region lattice in tests/data/pa_like.adj.

#include <algorithm>
#include <cmath>
#include <deque>
#include <string>
#include <vector>

#include "carinfo/models.hpp"
#include "carinfo/region_graph.hpp"

#ifndef CARINFO_TEST_DATA
#error "CARINFO_TEST_DATA must point at tests/data"
#endif

namespace fixtures {

inline std::string data_path(const std::string& name) { return std::string(CARINFO_TEST_DATA) + "/" + name; }

inline carinfo::RegionGraph pa_graph() { return carinfo::load_adjacency_file(data_path("pa_like.adj")); }

inline constexpr const char* kPhiladelphia = "C34";
inline constexpr const char* kCameron = "C01";

/// First region with the largest neighbor count.
inline std::size_t busiest_region(const carinfo::RegionGraph& g) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < g.size(); ++i)
    if (g.neighbor_count(i) > g.neighbor_count(best)) best = i;
  return best;
}

inline long long background_trials(std::size_t i) { return 400 + static_cast<long long>((i * 379) % 2600); }

inline long long rounded_events(long long n, double p) { return std::llround(static_cast<double>(n) * p); }

/// Focal region observed at 70/594; each neighbor at 71/1000; everything else
/// at 7%.
struct Armstrong {
  carinfo::CountData data;
  std::size_t focal;
};

inline Armstrong armstrong(const carinfo::RegionGraph& g) {
  Armstrong out;
  out.focal = busiest_region(g);
  const auto& nb = g.neighbors(out.focal);
  auto& d = out.data;
  d.stratum = "all";
  for (std::size_t i = 0; i < g.size(); ++i) {
    long long n = background_trials(i);
    long long y = rounded_events(n, 0.07);
    if (i == out.focal) {
      n = 594;
      y = 70;
    } else if (std::find(nb.begin(), nb.end(), i) != nb.end()) {
      n = 1000;
      y = 71;
    }
    d.region_ids.push_back(g.region_id(i));
    d.n.push_back(n);
    d.y.push_back(y);
  }
  return out;
}

inline std::vector<int> bfs_distance(const carinfo::RegionGraph& g, std::size_t source) {
  std::vector<int> dist(g.size(), -1);
  std::deque<std::size_t> queue{source};
  dist[source] = 0;
  while (!queue.empty()) {
    const auto u = queue.front();
    queue.pop_front();
    for (auto v : g.neighbors(u))
      if (dist[v] < 0) {
        dist[v] = dist[u] + 1;
        queue.push_back(v);
      }
  }
  return dist;
}

/// Smooth gradient in graph distance, small counts, events at their
/// expectations: the data are explained by the spatial term almost entirely.
inline carinfo::CountData strong_spatial(const carinfo::RegionGraph& g) {
  const auto dist = bfs_distance(g, 0);
  carinfo::CountData d;
  d.stratum = "all";
  for (std::size_t i = 0; i < g.size(); ++i) {
    const double eta = std::log(0.04 / 0.96) + 0.12 * dist[i];
    const double p = 1.0 / (1.0 + std::exp(-eta));
    const long long n = 120;
    d.region_ids.push_back(g.region_id(i));
    d.n.push_back(n);
    d.y.push_back(rounded_events(n, p));
  }
  return d;
}

/// Two strata at the statewide rates 14.4% (comparison) and 7.0% (reference),
/// with a large-count region and a region holding 21 reference and 1
/// comparison trial.
struct DisparityPair {
  carinfo::CountData comparison;
  carinfo::CountData reference;
};

inline DisparityPair disparity_pair(const carinfo::RegionGraph& g) {
  DisparityPair out;
  out.comparison.stratum = "black";
  out.reference.stratum = "white";
  for (std::size_t i = 0; i < g.size(); ++i) {
    const auto& id = g.region_id(i);
    long long n_ref = background_trials(i);
    long long n_cmp = std::max<long long>(20, n_ref / 6);
    if (id == kPhiladelphia) n_ref = n_cmp = 9000;
    if (id == kCameron) {
      n_ref = 21;
      n_cmp = 1;
    }
    const long long y_ref = id == kCameron ? 1 : rounded_events(n_ref, 0.070);
    const long long y_cmp = id == kCameron ? 0 : rounded_events(n_cmp, 0.144);
    out.reference.region_ids.push_back(id);
    out.reference.n.push_back(n_ref);
    out.reference.y.push_back(y_ref);
    out.comparison.region_ids.push_back(id);
    out.comparison.n.push_back(n_cmp);
    out.comparison.y.push_back(y_cmp);
  }
  return out;
}

inline double median_events(const carinfo::CountData& d) {
  std::vector<long long> y = d.y;
  std::sort(y.begin(), y.end());
  const auto k = y.size() / 2;
  return y.size() % 2 ? static_cast<double>(y[k]) : 0.5 * static_cast<double>(y[k - 1] + y[k]);
}

}  // namespace fixtures
