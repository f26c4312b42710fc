#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string_view>
#include <utility>
#include <vector>

namespace polyvol {

using Vertex = std::size_t;
using Edge = std::pair<Vertex, Vertex>;

/// Simple undirected graph on labels [0, m).
///
/// Removing a vertex keeps every original label; the removed vertex is
/// tombstoned and disappears from all adjacency lists. Adjacency lists hold
/// live neighbors only and are sorted ascending.
class Graph {
 public:
  Graph() = default;

  /// Validates simplicity (no loops, no duplicates, indices < vertex_count).
  /// Throws std::invalid_argument on violation.
  static Graph from_edges(std::size_t vertex_count, std::span<const Edge> edges);

  std::size_t vertex_count() const { return adjacency_.size(); }
  std::size_t live_count() const { return live_count_; }
  std::size_t edge_count() const { return edge_count_; }
  std::size_t max_degree() const { return max_degree_; }

  bool is_live(Vertex v) const { return v < removed_.size() && !removed_[v]; }
  std::span<const Vertex> neighbors(Vertex v) const { return adjacency_.at(v); }
  std::size_t degree(Vertex v) const { return adjacency_.at(v).size(); }
  bool adjacent(Vertex u, Vertex v) const;

  std::vector<Vertex> live_vertices() const;
  /// Live edges with u < v, in lexicographic order.
  std::vector<Edge> edges() const;

  /// Induced subgraph on V \ {v}. Throws std::out_of_range if v is not live.
  Graph remove_vertex(Vertex v) const;

  /// Bit i set iff vertex i has been removed.
  const std::vector<bool>& removed_mask() const { return removed_; }

  friend bool operator==(const Graph&, const Graph&) = default;

 private:
  void refresh_degree();

  std::vector<std::vector<Vertex>> adjacency_;
  std::vector<bool> removed_;
  std::size_t live_count_ = 0;
  std::size_t edge_count_ = 0;
  std::size_t max_degree_ = 0;
};

/// Parses the edge-list text format:
///
///   # comment
///   vertices 3
///   0 1
///   1 2
///
/// The `vertices` line is optional and must precede all edges; without it the
/// vertex count is one more than the largest index seen.
Graph parse_edge_list(std::string_view text);

/// Reads and parses a file; throws std::runtime_error if it can't be opened.
Graph read_edge_list(const std::string& path);

/// Value pins v <- n. Pins never live on removed vertices.
class ConstraintSet {
 public:
  ConstraintSet() = default;
  explicit ConstraintSet(std::size_t vertex_count) : pins_(vertex_count, kUnpinned) {}

  std::size_t vertex_count() const { return pins_.size(); }
  bool is_pinned(Vertex v) const { return v < pins_.size() && pins_[v] != kUnpinned; }
  std::optional<int> pin(Vertex v) const;
  std::size_t pinned_count() const;
  bool empty() const { return pinned_count() == 0; }

  /// Copy with v <- value added (or overwritten). Grows to fit v.
  ConstraintSet with(Vertex v, int value) const;
  void set(Vertex v, int value);

  /// Raw per-vertex storage; kUnpinned marks free vertices.
  std::span<const int> raw() const { return pins_; }

  static constexpr int kUnpinned = -1;

  friend bool operator==(const ConstraintSet&, const ConstraintSet&) = default;

 private:
  std::vector<int> pins_;
};

struct Params;

/// Every pinned value lies in [0, cap] and pinned adjacent pairs sum to at most N.
bool is_feasible(const Graph& g, const Params& params, const ConstraintSet& beta);

/// Largest pin among the live neighbors of v, 0 when none is pinned.
int max_pinned_neighbor(const Graph& g, const ConstraintSet& beta, Vertex v);

/// Replaces every pin with value <= A by 0. A pin that small can never violate
/// an edge constraint, so counts and marginals are unchanged.
ConstraintSet canonicalize(const ConstraintSet& beta, const Params& params);

}  // namespace polyvol
