#include "polyvol/counting.hpp"

#include <atomic>
#include <cmath>
#include <mutex>
#include <shared_mutex>
#include <stdexcept>
#include <string>
#include <thread>
#include <unordered_map>

#include "polyvol/lattice.hpp"
#include "polyvol/marginals.hpp"

namespace polyvol {

LogEstimate LogEstimate::from_log(double log_value) {
  LogEstimate out;
  out.log_value = log_value;
  if (!out.is_zero() && log_value < 709.0) out.value = std::exp(log_value);
  if (out.is_zero()) out.value = 0.0;
  return out;
}

namespace {

using MemoKey = std::vector<std::int32_t>;

struct MemoKeyHash {
  std::size_t operator()(const MemoKey& key) const noexcept {
    std::uint64_t h = 1469598103934665603ull;
    for (std::int32_t x : key) {
      h ^= static_cast<std::uint32_t>(x);
      h *= 1099511628211ull;
    }
    return static_cast<std::size_t>(h);
  }
};

constexpr std::int32_t kRemoved = -2;
constexpr std::int32_t kFree = -1;
constexpr std::int32_t kInert = -3;

}  // namespace

struct ApproxProbSolver::Impl {
  Graph root;
  Params params;
  ApproxOptions options;
  std::unordered_map<MemoKey, std::vector<double>, MemoKeyHash> memo;
  mutable std::shared_mutex memo_mutex;
  std::atomic<std::uint64_t> calls{0};
  std::atomic<std::uint64_t> hits{0};

  // Pins on vertices with no free live neighbor can no longer influence any
  // descendant call once the pairwise check at this level has passed, and pins
  // <= A act like 0; both are folded out of the key.
  MemoKey key_for(const Graph& g, int k, Vertex v, const ConstraintSet& beta) const {
    MemoKey key;
    key.reserve(g.vertex_count() + 2);
    key.push_back(k);
    key.push_back(static_cast<std::int32_t>(v));
    for (Vertex u = 0; u < g.vertex_count(); ++u) {
      if (!g.is_live(u)) {
        key.push_back(kRemoved);
        continue;
      }
      auto pin = beta.pin(u);
      if (!pin) {
        key.push_back(kFree);
        continue;
      }
      bool relevant = false;
      for (Vertex w : g.neighbors(u))
        if (!beta.is_pinned(w)) {
          relevant = true;
          break;
        }
      if (!relevant)
        key.push_back(kInert);
      else
        key.push_back(*pin <= params.A ? 0 : *pin);
    }
    return key;
  }

  std::vector<double> compute(const Graph& g, int k, Vertex v, const ConstraintSet& beta, bool top_level) {
    if (++calls > options.max_calls)
      throw BudgetExceeded("approx_prob exceeded " + std::to_string(options.max_calls) + " recursive calls");

    const int b = max_pinned_neighbor(g, beta, v);
    const EffectiveCap ecap{b};
    const int top = ecap.top(params);
    std::vector<double> out(params.width(), 0.0);

    if (!is_feasible(g, params, beta)) return out;
    if (k == 0) {
      for (int n = 0; n <= top; ++n) out[n] = 1.0 / (top + 1);
      return out;
    }

    MemoKey key;
    if (options.memoize) {
      key = key_for(g, k, v, beta);
      std::shared_lock lock(memo_mutex);
      if (auto it = memo.find(key); it != memo.end()) {
        ++hits;
        return it->second;
      }
    }

    const auto children = child_slots(g, v, beta);
    const Graph rest = g.remove_vertex(v);
    const int d = static_cast<int>(children.size());
    MarginalTable<double> table(params, d);

    struct Task {
      int j;
      std::size_t slice;
    };
    std::vector<Task> tasks;
    for (int j = 1; j <= d; ++j)
      for (std::size_t s = 0; s < table.slice_count(j); ++s) {
        auto prefix = table.decode(s, j - 1);
        if (prefix_feasible(rest, params, beta, children, prefix)) tasks.push_back({j, s});
      }

    auto run = [&](const Task& task) {
      auto prefix = table.decode(task.slice, task.j - 1);
      ConstraintSet pinned = beta;
      for (int i = 0; i < task.j - 1; ++i) pinned.set(children[i], prefix[i]);
      if (options.memoize) return compute(rest, k - 1, children[task.j - 1], pinned, false);
      // Without sharing, every entry of the slice is its own recursive call.
      std::vector<double> slice(params.width(), 0.0);
      for (int n = 0; n <= params.cap(); ++n)
        slice[n] = compute(rest, k - 1, children[task.j - 1], pinned, false)[n];
      return slice;
    };

    const unsigned workers = top_level ? std::min<unsigned>(options.threads, tasks.size()) : 1;
    if (workers <= 1) {
      for (const auto& task : tasks) table.set_slice(task.j, task.slice, run(task));
    } else {
      std::vector<std::vector<double>> results(tasks.size());
      std::exception_ptr failure;
      std::mutex failure_mutex;
      {
        std::vector<std::jthread> pool;
        for (unsigned w = 0; w < workers; ++w)
          pool.emplace_back([&, w] {
            try {
              for (std::size_t i = w; i < tasks.size(); i += workers) results[i] = run(tasks[i]);
            } catch (...) {
              std::lock_guard lock(failure_mutex);
              if (!failure) failure = std::current_exception();
            }
          });
      }
      if (failure) std::rethrow_exception(failure);
      for (std::size_t i = 0; i < tasks.size(); ++i) table.set_slice(tasks[i].j, tasks[i].slice, results[i]);
    }

    out = f_all(table, ecap).w;
    if (options.memoize) {
      std::unique_lock lock(memo_mutex);
      memo.insert_or_assign(std::move(key), out);
    }
    return out;
  }

  void check_target(const Graph& g, Vertex v, const ConstraintSet& beta) const {
    if (g.vertex_count() != root.vertex_count())
      throw std::invalid_argument("approx_prob: graph is not derived from the solver's root graph");
    if (!g.is_live(v)) throw std::invalid_argument("approx_prob: vertex " + std::to_string(v) + " is not live");
    if (beta.is_pinned(v)) throw std::invalid_argument("approx_prob: target vertex " + std::to_string(v) + " is pinned");
    for (Vertex u = 0; u < beta.vertex_count(); ++u)
      if (auto p = beta.pin(u); p && (*p > params.cap() || !g.is_live(u)))
        throw std::invalid_argument("approx_prob: invalid pin on vertex " + std::to_string(u));
  }
};

ApproxProbSolver::ApproxProbSolver(Graph root, Params params, ApproxOptions options)
    : impl_(std::make_unique<Impl>()) {
  impl_->root = std::move(root);
  impl_->params = params;
  impl_->options = options;
  if (impl_->options.threads == 0) impl_->options.threads = 1;
}

ApproxProbSolver::~ApproxProbSolver() = default;
ApproxProbSolver::ApproxProbSolver(ApproxProbSolver&&) noexcept = default;
ApproxProbSolver& ApproxProbSolver::operator=(ApproxProbSolver&&) noexcept = default;

std::vector<double> ApproxProbSolver::distribution(const Graph& g, DepthBudget k, Vertex v,
                                                   const ConstraintSet& beta) {
  if (k.k < 0) throw std::invalid_argument("approx_prob: depth must be nonnegative");
  impl_->check_target(g, v, beta);
  return impl_->compute(g, k.k, v, beta, true);
}

double ApproxProbSolver::approx_prob(const Graph& g, DepthBudget k, Vertex v, int nstar,
                                     const ConstraintSet& beta) {
  if (nstar < 0 || nstar > impl_->params.cap())
    throw std::invalid_argument("approx_prob: nstar outside [0, cap]");
  return distribution(g, k, v, beta)[nstar];
}

const Graph& ApproxProbSolver::root() const { return impl_->root; }
const Params& ApproxProbSolver::params() const { return impl_->params; }

ApproxStats ApproxProbSolver::stats() const {
  std::shared_lock lock(impl_->memo_mutex);
  return {impl_->calls.load(), impl_->hits.load(), impl_->memo.size()};
}

double approx_prob(const Graph& g, DepthBudget k, Vertex v, const Params& params, int nstar,
                   const ConstraintSet& beta, const ApproxOptions& options) {
  ApproxProbSolver solver(g, params, options);
  return solver.approx_prob(g, k, v, nstar, beta);
}

ApproxZResult approx_z_detailed(const Graph& g, DepthBudget k, const Params& params,
                                const ApproxOptions& options) {
  if (g.live_count() == 0) throw std::invalid_argument("approx_z: graph has no vertices");
  ApproxProbSolver solver(g, params, options);
  ConstraintSet beta(g.vertex_count());
  ApproxZResult out;
  double log_inverse = 0.0;
  for (Vertex v : g.live_vertices()) {
    const double y = solver.approx_prob(g, k, v, 0, beta);
    if (!(y > 0.0))
      throw std::logic_error("approx_z: value-0 marginal estimate is 0 at vertex " + std::to_string(v));
    out.marginals.push_back(y);
    log_inverse += std::log(y);
    beta.set(v, 0);
  }
  out.estimate = LogEstimate::from_log(-log_inverse);
  out.stats = solver.stats();
  return out;
}

LogEstimate approx_z(const Graph& g, DepthBudget k, const Params& params, const ApproxOptions& options) {
  return approx_z_detailed(g, k, params, options).estimate;
}

DepthBudget choose_depth(std::size_t m, const Params& params, ContractionBound c) {
  if (!(c.c >= 0.0 && c.c < 1.0))
    throw std::invalid_argument("choose_depth: contraction bound must lie in [0, 1), got " + std::to_string(c.c));
  if (m == 0) throw std::invalid_argument("choose_depth: m must be positive");
  if (c.c == 0.0) return {1};
  const double target = 1.0 / (static_cast<double>(params.width()) * static_cast<double>(m) * m);
  const double estimate = std::log(1.0 / target) / std::log(1.0 / c.c);
  int k = std::max(1, static_cast<int>(std::ceil(estimate - 1e-9)));
  while (std::pow(c.c, k) > target) ++k;
  while (k > 1 && std::pow(c.c, k - 1) <= target) --k;
  return {k};
}

}  // namespace polyvol
