#pragma once

#include <cstddef>
#include <istream>
#include <ostream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace carinfo {

/// Raised for malformed or invalid adjacency input.
class GraphError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Symmetric, loop-free neighborhood structure over a fixed ordering of
/// regions. Region order is file order; every per-region vector elsewhere in
/// the library is indexed against it. Immutable after construction.
class RegionGraph {
 public:
  RegionGraph() = default;

  /// Validates the structure; throws GraphError on asymmetry, self-loops,
  /// duplicate ids, out-of-range neighbors, isolated regions or an empty
  /// region list.
  RegionGraph(std::vector<std::string> region_ids, std::vector<std::vector<std::size_t>> adjacency);

  std::size_t size() const { return ids_.size(); }
  bool empty() const { return ids_.empty(); }

  const std::vector<std::string>& region_ids() const { return ids_; }
  const std::string& region_id(std::size_t i) const;

  /// Neighbor indices of region i, ascending.
  const std::vector<std::size_t>& neighbors(std::size_t i) const;

  /// m_i, the number of neighbors of region i. Throws std::out_of_range.
  std::size_t neighbor_count(std::size_t i) const;

  /// Index of a region id, or throws std::out_of_range.
  std::size_t index_of(std::string_view id) const;
  bool contains(std::string_view id) const;

  /// Number of undirected edges.
  std::size_t edge_count() const;

  /// Connected components (1 for a connected graph).
  std::size_t component_count() const;
  bool connected() const { return component_count() == 1; }

  /// Non-fatal observations made during construction (e.g. disconnection).
  const std::vector<std::string>& warnings() const { return warnings_; }

  friend bool operator==(const RegionGraph& a, const RegionGraph& b) {
    return a.ids_ == b.ids_ && a.adj_ == b.adj_;
  }

 private:
  std::vector<std::string> ids_;
  std::vector<std::vector<std::size_t>> adj_;
  std::unordered_map<std::string, std::size_t> index_;
  std::vector<std::string> warnings_;
};

/// Parses the adjacency text format:
///
///     # comment
///     region_id: neighbor_id,neighbor_id,...
///
/// Asymmetric edges are an error; nothing is symmetrized silently.
RegionGraph load_adjacency(std::istream& in);
RegionGraph load_adjacency_file(const std::string& path);

/// Writes `g` in the format accepted by load_adjacency.
void write_adjacency(std::ostream& out, const RegionGraph& g);

}  // namespace carinfo
