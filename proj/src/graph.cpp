#include "polyvol/graph.hpp"

#include <algorithm>
#include <cmath>
#include <charconv>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>

#include "polyvol/params.hpp"

namespace polyvol {

Graph Graph::from_edges(std::size_t vertex_count, std::span<const Edge> edges) {
  Graph g;
  g.adjacency_.assign(vertex_count, {});
  g.removed_.assign(vertex_count, false);
  g.live_count_ = vertex_count;
  for (auto [u, v] : edges) {
    if (u >= vertex_count || v >= vertex_count)
      throw std::invalid_argument("edge (" + std::to_string(u) + "," + std::to_string(v) +
                                  ") out of range for " + std::to_string(vertex_count) +
                                  " vertices");
    if (u == v) throw std::invalid_argument("self-loop at vertex " + std::to_string(u));
    g.adjacency_[u].push_back(v);
    g.adjacency_[v].push_back(u);
  }
  for (std::size_t v = 0; v < vertex_count; ++v) {
    auto& adj = g.adjacency_[v];
    std::sort(adj.begin(), adj.end());
    if (std::adjacent_find(adj.begin(), adj.end()) != adj.end())
      throw std::invalid_argument("duplicate edge at vertex " + std::to_string(v));
  }
  g.edge_count_ = edges.size();
  g.refresh_degree();
  return g;
}

void Graph::refresh_degree() {
  max_degree_ = 0;
  for (const auto& adj : adjacency_) max_degree_ = std::max(max_degree_, adj.size());
}

bool Graph::adjacent(Vertex u, Vertex v) const {
  const auto& adj = adjacency_.at(u);
  return std::binary_search(adj.begin(), adj.end(), v);
}

std::vector<Vertex> Graph::live_vertices() const {
  std::vector<Vertex> out;
  out.reserve(live_count_);
  for (Vertex v = 0; v < removed_.size(); ++v)
    if (!removed_[v]) out.push_back(v);
  return out;
}

std::vector<Edge> Graph::edges() const {
  std::vector<Edge> out;
  out.reserve(edge_count_);
  for (Vertex u = 0; u < adjacency_.size(); ++u)
    for (Vertex v : adjacency_[u])
      if (u < v) out.emplace_back(u, v);
  return out;
}

Graph Graph::remove_vertex(Vertex v) const {
  if (!is_live(v)) throw std::out_of_range("remove_vertex: vertex " + std::to_string(v) + " is not live");
  Graph g = *this;
  for (Vertex u : adjacency_[v]) {
    auto& adj = g.adjacency_[u];
    adj.erase(std::lower_bound(adj.begin(), adj.end(), v));
  }
  g.edge_count_ -= adjacency_[v].size();
  g.adjacency_[v].clear();
  g.removed_[v] = true;
  --g.live_count_;
  g.refresh_degree();
  return g;
}

namespace {

std::size_t parse_index(std::string_view token, std::size_t line_no) {
  std::size_t value = 0;
  auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
  if (ec != std::errc{} || ptr != token.data() + token.size())
    throw std::invalid_argument("line " + std::to_string(line_no) + ": malformed token '" +
                                std::string(token) + "'");
  return value;
}

std::vector<std::string_view> split_ws(std::string_view line) {
  std::vector<std::string_view> tokens;
  std::size_t i = 0;
  auto is_ws = [](char c) { return c == ' ' || c == '\t' || c == '\r' || c == '\v' || c == '\f'; };
  while (i < line.size()) {
    while (i < line.size() && is_ws(line[i])) ++i;
    std::size_t j = i;
    while (j < line.size() && !is_ws(line[j])) ++j;
    if (j > i) tokens.push_back(line.substr(i, j - i));
    i = j;
  }
  return tokens;
}

}  // namespace

Graph parse_edge_list(std::string_view text) {
  std::optional<std::size_t> declared;
  std::vector<Edge> edges;
  std::size_t max_index = 0;
  bool any_index = false;

  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;

    auto tokens = split_ws(line);
    if (tokens.empty() || tokens.front().front() == '#') continue;
    if (tokens.front() == "vertices") {
      if (tokens.size() != 2)
        throw std::invalid_argument("line " + std::to_string(line_no) + ": expected 'vertices <m>'");
      if (declared || !edges.empty())
        throw std::invalid_argument("line " + std::to_string(line_no) +
                                    ": 'vertices' must appear once, before any edge");
      declared = parse_index(tokens[1], line_no);
      continue;
    }
    if (tokens.size() != 2)
      throw std::invalid_argument("line " + std::to_string(line_no) + ": expected '<u> <v>'");
    Vertex u = parse_index(tokens[0], line_no);
    Vertex v = parse_index(tokens[1], line_no);
    if (declared && (u >= *declared || v >= *declared))
      throw std::invalid_argument("line " + std::to_string(line_no) + ": index out of declared range");
    max_index = std::max({max_index, u, v});
    any_index = true;
    edges.emplace_back(u, v);
  }

  std::size_t m = declared ? *declared : (any_index ? max_index + 1 : 0);
  return Graph::from_edges(m, edges);
}

Graph read_edge_list(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open graph file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_edge_list(buf.str());
}

std::optional<int> ConstraintSet::pin(Vertex v) const {
  if (!is_pinned(v)) return std::nullopt;
  return pins_[v];
}

std::size_t ConstraintSet::pinned_count() const {
  return static_cast<std::size_t>(std::count_if(pins_.begin(), pins_.end(),
                                                [](int p) { return p != kUnpinned; }));
}

void ConstraintSet::set(Vertex v, int value) {
  if (value < 0) throw std::invalid_argument("pin values must be nonnegative");
  if (v >= pins_.size()) pins_.resize(v + 1, kUnpinned);
  pins_[v] = value;
}

ConstraintSet ConstraintSet::with(Vertex v, int value) const {
  ConstraintSet out = *this;
  out.set(v, value);
  return out;
}

bool is_feasible(const Graph& g, const Params& params, const ConstraintSet& beta) {
  for (Vertex v = 0; v < beta.vertex_count(); ++v) {
    auto p = beta.pin(v);
    if (!p) continue;
    if (*p > params.cap()) return false;
    if (v >= g.vertex_count()) continue;
    for (Vertex u : g.neighbors(v)) {
      auto q = beta.pin(u);
      if (u > v && q && *p + *q > params.N) return false;
    }
  }
  return true;
}

int max_pinned_neighbor(const Graph& g, const ConstraintSet& beta, Vertex v) {
  int b = 0;
  for (Vertex u : g.neighbors(v))
    if (auto p = beta.pin(u)) b = std::max(b, *p);
  return b;
}

ConstraintSet canonicalize(const ConstraintSet& beta, const Params& params) {
  ConstraintSet out = beta;
  for (Vertex v = 0; v < beta.vertex_count(); ++v) {
    auto p = beta.pin(v);
    if (p && *p <= params.A) out.set(v, 0);
  }
  return out;
}

}  // namespace polyvol
