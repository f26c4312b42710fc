#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "polyvol/graph.hpp"

namespace polyvol::families {

Graph edgeless(std::size_t m);
Graph path(std::size_t m);
Graph cycle(std::size_t m);
/// Star K_{1,leaves}; vertex 0 is the center.
Graph star(std::size_t leaves);
Graph complete(std::size_t m);

/// One representative per isomorphism class of connected graphs on m vertices
/// (m <= 6). Counts are 1, 1, 2, 6, 21, 112 for m = 1..6.
std::vector<Graph> connected_graphs(std::size_t m);

struct NamedGraph {
  std::string name;
  Graph graph;
};

/// Paths P1..P{max_m} and stars with 2..max_m-1 leaves, skipping the star that
/// duplicates P3.
std::vector<NamedGraph> paths_and_stars(std::size_t max_m);

}  // namespace polyvol::families
