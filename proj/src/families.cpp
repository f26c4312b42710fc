#include "polyvol/families.hpp"

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <set>
#include <stdexcept>

namespace polyvol::families {

Graph edgeless(std::size_t m) { return Graph::from_edges(m, {}); }

Graph path(std::size_t m) {
  std::vector<Edge> e;
  for (std::size_t i = 0; i + 1 < m; ++i) e.emplace_back(i, i + 1);
  return Graph::from_edges(m, e);
}

Graph cycle(std::size_t m) {
  if (m < 3) throw std::invalid_argument("cycle needs at least 3 vertices");
  std::vector<Edge> e;
  for (std::size_t i = 0; i < m; ++i) e.emplace_back(i, (i + 1) % m);
  return Graph::from_edges(m, e);
}

Graph star(std::size_t leaves) {
  std::vector<Edge> e;
  for (std::size_t i = 1; i <= leaves; ++i) e.emplace_back(0, i);
  return Graph::from_edges(leaves + 1, e);
}

Graph complete(std::size_t m) {
  std::vector<Edge> e;
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = i + 1; j < m; ++j) e.emplace_back(i, j);
  return Graph::from_edges(m, e);
}

namespace {

bool connected(std::size_t m, const std::vector<Edge>& edges) {
  std::vector<std::size_t> parent(m);
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  std::size_t comps = m;
  for (auto [u, v] : edges) {
    auto a = find(u), b = find(v);
    if (a != b) {
      parent[a] = b;
      --comps;
    }
  }
  return comps <= 1;
}

}  // namespace

std::vector<Graph> connected_graphs(std::size_t m) {
  if (m == 0 || m > 6) throw std::invalid_argument("connected_graphs supports 1 <= m <= 6");
  std::vector<Edge> slots;
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = i + 1; j < m; ++j) slots.emplace_back(i, j);
  auto slot_of = [&](std::size_t i, std::size_t j) {
    if (i > j) std::swap(i, j);
    return static_cast<std::size_t>(std::find(slots.begin(), slots.end(), Edge{i, j}) - slots.begin());
  };

  std::vector<std::vector<std::size_t>> perms;
  std::vector<std::size_t> p(m);
  std::iota(p.begin(), p.end(), 0);
  do perms.push_back(p);
  while (std::next_permutation(p.begin(), p.end()));

  std::set<std::uint32_t> seen;
  std::vector<Graph> out;
  const std::uint32_t total = 1u << slots.size();
  for (std::uint32_t mask = 0; mask < total; ++mask) {
    std::vector<Edge> edges;
    for (std::size_t s = 0; s < slots.size(); ++s)
      if (mask >> s & 1u) edges.push_back(slots[s]);
    if (!connected(m, edges)) continue;
    std::uint32_t canon = UINT32_MAX;
    for (const auto& perm : perms) {
      std::uint32_t image = 0;
      for (auto [u, v] : edges) image |= 1u << slot_of(perm[u], perm[v]);
      canon = std::min(canon, image);
    }
    if (seen.insert(canon).second) out.push_back(Graph::from_edges(m, edges));
  }
  return out;
}

std::vector<NamedGraph> paths_and_stars(std::size_t max_m) {
  std::vector<NamedGraph> out;
  for (std::size_t m = 1; m <= max_m; ++m) out.push_back({"P" + std::to_string(m), path(m)});
  for (std::size_t leaves = 3; leaves + 1 <= max_m; ++leaves)
    out.push_back({"K1," + std::to_string(leaves), star(leaves)});
  return out;
}

}  // namespace polyvol::families
