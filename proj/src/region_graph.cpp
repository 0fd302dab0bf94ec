#include "carinfo/region_graph.hpp"

#include <algorithm>
#include <fstream>
#include <numeric>
#include <sstream>

namespace carinfo {
namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::string at_line(std::size_t line) { return "line " + std::to_string(line) + ": "; }

}  // namespace

RegionGraph::RegionGraph(std::vector<std::string> region_ids, std::vector<std::vector<std::size_t>> adjacency)
    : ids_(std::move(region_ids)), adj_(std::move(adjacency)) {
  if (ids_.empty()) throw GraphError("adjacency graph has no regions");
  if (adj_.size() != ids_.size()) throw GraphError("adjacency list count does not match region count");

  for (std::size_t i = 0; i < ids_.size(); ++i) {
    if (!index_.emplace(ids_[i], i).second) throw GraphError("duplicate region id '" + ids_[i] + "'");
  }
  for (std::size_t i = 0; i < adj_.size(); ++i) {
    auto& nb = adj_[i];
    std::sort(nb.begin(), nb.end());
    if (std::adjacent_find(nb.begin(), nb.end()) != nb.end()) {
      throw GraphError("region '" + ids_[i] + "' lists a neighbor twice");
    }
    if (nb.empty()) throw GraphError("region '" + ids_[i] + "' has no neighbors");
    for (std::size_t j : nb) {
      if (j >= ids_.size()) throw GraphError("region '" + ids_[i] + "' has an out-of-range neighbor index");
      if (j == i) throw GraphError("region '" + ids_[i] + "' lists itself as a neighbor");
    }
  }
  for (std::size_t i = 0; i < adj_.size(); ++i) {
    for (std::size_t j : adj_[i]) {
      if (!std::binary_search(adj_[j].begin(), adj_[j].end(), i)) {
        throw GraphError("asymmetric edge: '" + ids_[i] + "' lists '" + ids_[j] + "' but not the reverse");
      }
    }
  }
  if (const auto k = component_count(); k > 1) {
    warnings_.push_back("adjacency graph is disconnected (" + std::to_string(k) + " components)");
  }
}

const std::string& RegionGraph::region_id(std::size_t i) const { return ids_.at(i); }

const std::vector<std::size_t>& RegionGraph::neighbors(std::size_t i) const {
  if (i >= adj_.size()) throw std::out_of_range("region index out of range");
  return adj_[i];
}

std::size_t RegionGraph::neighbor_count(std::size_t i) const { return neighbors(i).size(); }

std::size_t RegionGraph::index_of(std::string_view id) const {
  auto it = index_.find(std::string(id));
  if (it == index_.end()) throw std::out_of_range("unknown region id '" + std::string(id) + "'");
  return it->second;
}

bool RegionGraph::contains(std::string_view id) const { return index_.count(std::string(id)) != 0; }

std::size_t RegionGraph::edge_count() const {
  std::size_t total = 0;
  for (const auto& nb : adj_) total += nb.size();
  return total / 2;
}

std::size_t RegionGraph::component_count() const {
  std::vector<std::size_t> parent(ids_.size());
  std::iota(parent.begin(), parent.end(), std::size_t{0});
  auto find = [&](std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  std::size_t components = ids_.size();
  for (std::size_t i = 0; i < adj_.size(); ++i) {
    for (std::size_t j : adj_[i]) {
      const auto a = find(i), b = find(j);
      if (a != b) {
        parent[a] = b;
        --components;
      }
    }
  }
  return components;
}

RegionGraph load_adjacency(std::istream& in) {
  std::vector<std::string> ids;
  std::vector<std::vector<std::string>> raw;
  std::vector<std::size_t> lines;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto body = trim(line);
    if (body.empty() || body.front() == '#') continue;
    const auto colon = body.find(':');
    if (colon == std::string_view::npos) throw GraphError(at_line(line_no) + "expected 'region_id: neighbors'");
    const auto id = trim(body.substr(0, colon));
    if (id.empty()) throw GraphError(at_line(line_no) + "empty region id");
    const auto list = trim(body.substr(colon + 1));
    if (list.empty()) throw GraphError(at_line(line_no) + "region '" + std::string(id) + "' has an empty neighbor list");
    std::vector<std::string> nbrs;
    std::size_t start = 0;
    while (start <= list.size()) {
      auto comma = list.find(',', start);
      if (comma == std::string_view::npos) comma = list.size();
      const auto tok = trim(list.substr(start, comma - start));
      if (tok.empty()) throw GraphError(at_line(line_no) + "empty neighbor id");
      nbrs.emplace_back(tok);
      start = comma + 1;
    }
    ids.emplace_back(id);
    raw.push_back(std::move(nbrs));
    lines.push_back(line_no);
  }
  if (ids.empty()) throw GraphError("adjacency input contains no regions");

  std::unordered_map<std::string, std::size_t> index;
  for (std::size_t i = 0; i < ids.size(); ++i) {
    if (!index.emplace(ids[i], i).second) {
      throw GraphError(at_line(lines[i]) + "duplicate region id '" + ids[i] + "'");
    }
  }
  std::vector<std::vector<std::size_t>> adj(ids.size());
  for (std::size_t i = 0; i < ids.size(); ++i) {
    for (const auto& name : raw[i]) {
      auto it = index.find(name);
      if (it == index.end()) throw GraphError(at_line(lines[i]) + "unknown neighbor id '" + name + "'");
      if (it->second == i) throw GraphError(at_line(lines[i]) + "region '" + name + "' lists itself as a neighbor");
      adj[i].push_back(it->second);
    }
  }
  return RegionGraph(std::move(ids), std::move(adj));
}

RegionGraph load_adjacency_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw GraphError("cannot open adjacency file '" + path + "'");
  return load_adjacency(in);
}

void write_adjacency(std::ostream& out, const RegionGraph& g) {
  for (std::size_t i = 0; i < g.size(); ++i) {
    out << g.region_id(i) << ':';
    const auto& nb = g.neighbors(i);
    for (std::size_t k = 0; k < nb.size(); ++k) out << (k == 0 ? " " : ",") << g.region_id(nb[k]);
    out << '\n';
  }
}

}  // namespace carinfo
