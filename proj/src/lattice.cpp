#include "polyvol/lattice.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <string>
#include <thread>

namespace polyvol {

IntRange s_set(int n, const Params& params) {
  if (n < 0 || n > params.cap())
    throw std::out_of_range("s_set: n=" + std::to_string(n) + " outside [0, " +
                            std::to_string(params.cap()) + "]");
  return {0, std::min(params.N - n, params.cap())};
}

bool is_feasible(const Graph& g, const Params& params, std::span<const int> x) {
  auto live = g.live_vertices();
  if (x.size() != live.size())
    throw std::invalid_argument("is_feasible: expected " + std::to_string(live.size()) +
                                " values, got " + std::to_string(x.size()));
  std::vector<int> value(g.vertex_count(), 0);
  for (std::size_t i = 0; i < live.size(); ++i) {
    if (x[i] < 0 || x[i] > params.cap()) return false;
    value[live[i]] = x[i];
  }
  for (auto [u, v] : g.edges())
    if (value[u] + value[v] > params.N) return false;
  return true;
}

namespace {

// Depth-first enumeration over the free vertices; `hi` already folds in the
// fixed vertices. `back` lists, for every free vertex, the earlier free
// neighbors it must be checked against.
struct BoxEnumerator {
  std::vector<int> lo, hi;
  std::vector<std::vector<std::size_t>> back;
  int limit = 0;

  std::uint64_t run(std::vector<int>& x, std::size_t depth) const {
    const std::size_t last = lo.size() - 1;
    int top = hi[depth];
    for (std::size_t p : back[depth]) top = std::min(top, limit - x[p]);
    if (top < lo[depth]) return 0;
    if (depth == last) return static_cast<std::uint64_t>(top - lo[depth] + 1);
    std::uint64_t total = 0;
    for (int value = lo[depth]; value <= top; ++value) {
      x[depth] = value;
      total += run(x, depth + 1);
    }
    return total;
  }
};

}  // namespace

BigCount count_box(const Graph& g, std::span<const IntRange> box, int edge_limit,
                   const EnumerationBudget& budget) {
  if (box.size() < g.vertex_count())
    throw std::invalid_argument("count_box: box has fewer entries than vertices");

  auto live = g.live_vertices();
  std::vector<int> fixed(g.vertex_count(), -1);
  std::vector<Vertex> free;
  for (Vertex v : live) {
    if (box[v].size() == 0) return 0;
    if (box[v].size() == 1)
      fixed[v] = box[v].lo;
    else
      free.push_back(v);
  }
  for (auto [u, v] : g.edges())
    if (fixed[u] >= 0 && fixed[v] >= 0 && fixed[u] + fixed[v] > edge_limit) return 0;
  if (free.empty()) return 1;

  double log2_states = 0.0;
  for (Vertex v : free) log2_states += std::log2(static_cast<double>(box[v].size()));
  if (log2_states > budget.max_log2_states + 1e-9)
    throw BudgetExceeded("exact enumeration needs 2^" + std::to_string(log2_states) +
                         " states, budget is 2^" + std::to_string(budget.max_log2_states));

  BoxEnumerator en;
  en.limit = edge_limit;
  std::vector<std::size_t> position(g.vertex_count(), SIZE_MAX);
  for (std::size_t i = 0; i < free.size(); ++i) position[free[i]] = i;
  for (std::size_t i = 0; i < free.size(); ++i) {
    Vertex v = free[i];
    int top = box[v].hi;
    std::vector<std::size_t> earlier;
    for (Vertex u : g.neighbors(v)) {
      if (fixed[u] >= 0)
        top = std::min(top, edge_limit - fixed[u]);
      else if (position[u] < i)
        earlier.push_back(position[u]);
    }
    en.lo.push_back(box[v].lo);
    en.hi.push_back(top);
    en.back.push_back(std::move(earlier));
  }

  if (free.size() == 1) {
    std::vector<int> x(1);
    return BigCount(en.run(x, 0));
  }

  // Split on the first free coordinate; each worker owns a strided set of values.
  const int first_lo = en.lo[0];
  const int first_hi = en.hi[0];
  if (first_hi < first_lo) return 0;
  const unsigned workers = std::max(1u, std::min<unsigned>(budget.threads, first_hi - first_lo + 1));
  std::vector<std::uint64_t> partial(workers, 0);
  auto work = [&](unsigned w) {
    std::vector<int> x(free.size());
    for (int value = first_lo + static_cast<int>(w); value <= first_hi; value += workers) {
      x[0] = value;
      partial[w] += en.run(x, 1);
    }
  };
  if (workers == 1) {
    work(0);
  } else {
    std::vector<std::jthread> pool;
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work, w);
  }
  BigCount total = 0;
  for (auto p : partial) total += p;
  return total;
}

BigCount exact_count(const Graph& g, const Params& params, const ConstraintSet& beta,
                     const EnumerationBudget& budget) {
  std::vector<IntRange> box(g.vertex_count(), IntRange{0, params.cap()});
  for (Vertex v = 0; v < g.vertex_count(); ++v) {
    if (auto p = beta.pin(v)) {
      if (*p < 0 || *p > params.cap()) return 0;
      box[v] = {*p, *p};
    }
  }
  return count_box(g, box, params.N, budget);
}

double log_of(const BigCount& value) {
  if (value <= 0) return -std::numeric_limits<double>::infinity();
  const std::size_t bits = boost::multiprecision::msb(value) + 1;
  if (bits <= 1000) return std::log(static_cast<double>(value));
  const std::size_t shift = bits - 64;
  const BigCount top = value >> shift;
  return std::log(static_cast<double>(top)) + static_cast<double>(shift) * std::log(2.0);
}

Rational ExactMarginal::value() const {
  if (denominator == 0) return Rational(0);
  return Rational(numerator, denominator);
}

double ExactMarginal::to_double() const { return static_cast<double>(value()); }

ExactMarginal exact_marginal(const Graph& g, const Params& params, Vertex v, int n,
                             const ConstraintSet& beta, const EnumerationBudget& budget) {
  if (!g.is_live(v)) throw std::out_of_range("exact_marginal: vertex is not live");
  if (n < 0 || n > params.cap()) throw std::out_of_range("exact_marginal: value outside [0, cap]");
  ExactMarginal out;
  out.denominator = exact_count(g, params, beta, budget);
  if (auto p = beta.pin(v))
    out.numerator = *p == n ? out.denominator : BigCount(0);
  else
    out.numerator = out.denominator == 0 ? BigCount(0) : exact_count(g, params, beta.with(v, n), budget);
  return out;
}

std::vector<ExactMarginal> exact_marginals(const Graph& g, const Params& params, Vertex v,
                                           const ConstraintSet& beta,
                                           const EnumerationBudget& budget) {
  std::vector<ExactMarginal> out;
  out.reserve(params.width());
  const BigCount den = exact_count(g, params, beta, budget);
  for (int n = 0; n <= params.cap(); ++n) {
    ExactMarginal m;
    m.denominator = den;
    if (auto p = beta.pin(v))
      m.numerator = *p == n ? den : BigCount(0);
    else
      m.numerator = den == 0 ? BigCount(0) : exact_count(g, params, beta.with(v, n), budget);
    out.push_back(std::move(m));
  }
  return out;
}

}  // namespace polyvol
