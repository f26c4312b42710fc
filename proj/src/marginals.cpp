#include "polyvol/marginals.hpp"

#include "polyvol/rng.hpp"

namespace polyvol {

namespace {

std::vector<double> random_slice(Rng& rng, const Params& p) {
  const int tail = p.cap() - p.A;
  std::vector<double> steps(tail + 1);
  double total = 0.0;
  for (auto& s : steps) total += (s = rng.exponential());
  std::vector<double> w(p.width(), 1.0);
  double level = 1.0;
  for (int i = 0; i < tail; ++i) {
    level -= steps[i] / total;
    w[p.A + 1 + i] = std::max(level, 0.0);
  }
  double sum = 0.0;
  for (double x : w) sum += x;
  for (double& x : w) x /= sum;
  return w;
}

}  // namespace

MarginalTable<double> random_fmd(std::uint64_t seed, int d, const Params& params) {
  MarginalTable<double> t(params, d);
  Rng rng(seed, static_cast<std::uint64_t>(d));
  for (int j = 1; j <= d; ++j) {
    for (std::size_t s = 0; s < t.slice_count(j); ++s) {
      auto digits = t.decode(s, j - 1);
      for (int& x : digits)
        if (x <= params.A) x = 0;
      const std::size_t canonical = t.encode(digits);
      if (canonical == s) {
        t.set_slice(j, s, random_slice(rng, params));
      } else {
        const auto src = t.slice(j, canonical);
        const std::vector<double> copy(src.begin(), src.end());
        t.set_slice(j, s, copy);
      }
    }
  }
  return t;
}

std::vector<Vertex> child_slots(const Graph& g, Vertex v, const ConstraintSet& beta) {
  std::vector<Vertex> out;
  for (Vertex u : g.neighbors(v))
    if (!beta.is_pinned(u)) out.push_back(u);
  return out;
}

bool prefix_feasible(const Graph& g, const Params& params, const ConstraintSet& beta,
                     std::span<const Vertex> children, std::span<const int> prefix) {
  for (std::size_t i = 0; i < prefix.size(); ++i) {
    const int x = prefix[i];
    if (x < 0 || x > params.cap()) return false;
    if (x + max_pinned_neighbor(g, beta, children[i]) > params.N) return false;
    for (std::size_t k = 0; k < i; ++k)
      if (x + prefix[k] > params.N && g.adjacent(children[i], children[k])) return false;
  }
  return true;
}

MarginalTable<Rational> exact_child_table(const Graph& g, const Params& params, Vertex v,
                                          const ConstraintSet& beta,
                                          const EnumerationBudget& budget) {
  const auto children = child_slots(g, v, beta);
  const Graph rest = g.remove_vertex(v);
  const int d = static_cast<int>(children.size());
  MarginalTable<Rational> t(params, d);
  std::vector<Rational> buf(params.width());
  for (int j = 1; j <= d; ++j) {
    for (std::size_t s = 0; s < t.slice_count(j); ++s) {
      auto prefix = t.decode(s, j - 1);
      if (!prefix_feasible(rest, params, beta, children, prefix)) continue;
      ConstraintSet pinned = beta;
      for (int i = 0; i < j - 1; ++i) pinned.set(children[i], prefix[i]);
      auto marg = exact_marginals(rest, params, children[j - 1], pinned, budget);
      for (int n = 0; n <= params.cap(); ++n) buf[n] = marg[n].value();
      t.set_slice(j, s, buf);
    }
  }
  return t;
}

}  // namespace polyvol
