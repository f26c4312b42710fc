#pragma once

#include <cstdint>
#include <limits>
#include <memory>
#include <optional>
#include <vector>

#include "polyvol/decay.hpp"
#include "polyvol/graph.hpp"
#include "polyvol/params.hpp"

namespace polyvol {

struct DepthBudget {
  int k = 0;
};

/// Natural-log estimate; log_value = -infinity encodes an exact zero.
struct LogEstimate {
  double log_value = -std::numeric_limits<double>::infinity();
  /// exp(log_value) when it is representable as a finite double.
  std::optional<double> value;

  static LogEstimate from_log(double log_value);
  bool is_zero() const { return log_value == -std::numeric_limits<double>::infinity(); }
};

struct ApproxOptions {
  /// With memoization off nothing is shared between calls: each child
  /// marginal y^j(n_1..n_j) is evaluated by its own recursive call.
  bool memoize = true;
  /// Recursive call wall; BudgetExceeded once exceeded.
  std::uint64_t max_calls = 200'000'000;
  unsigned threads = 1;
};

struct ApproxStats {
  std::uint64_t calls = 0;
  std::uint64_t memo_hits = 0;
  std::uint64_t memo_entries = 0;
};

/// Recursive marginal approximation with depth-limited unrolling of the
/// f_n recursion. One solver instance owns one memo table, valid for a single
/// root graph and parameter set.
class ApproxProbSolver {
 public:
  ApproxProbSolver(Graph root, Params params, ApproxOptions options = {});
  ~ApproxProbSolver();
  ApproxProbSolver(ApproxProbSolver&&) noexcept;
  ApproxProbSolver& operator=(ApproxProbSolver&&) noexcept;

  /// Estimated distribution of x_v over [0, cap] (zero-padded beyond N - b).
  /// g must be the root graph or one derived from it by vertex removal.
  std::vector<double> distribution(const Graph& g, DepthBudget k, Vertex v, const ConstraintSet& beta);

  double approx_prob(const Graph& g, DepthBudget k, Vertex v, int nstar, const ConstraintSet& beta);

  const Graph& root() const;
  const Params& params() const;
  ApproxStats stats() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

/// Single estimate of x(G, v <- nstar, beta). Throws std::invalid_argument if
/// v is removed or pinned, or nstar is outside [0, cap].
double approx_prob(const Graph& g, DepthBudget k, Vertex v, const Params& params, int nstar,
                   const ConstraintSet& beta, const ApproxOptions& options = {});

struct ApproxZResult {
  LogEstimate estimate;
  /// Per-step estimates of x(G, v_i <- 0, beta_{i-1}), in vertex order.
  std::vector<double> marginals;
  ApproxStats stats;
};

/// Telescoping estimate of Z(G): product of inverse value-0 marginals with
/// pins accumulating in ascending vertex order.
ApproxZResult approx_z_detailed(const Graph& g, DepthBudget k, const Params& params,
                                const ApproxOptions& options = {});

LogEstimate approx_z(const Graph& g, DepthBudget k, const Params& params,
                     const ApproxOptions& options = {});

/// Smallest k with c^k <= 1 / ((cap + 1) m^2). Requires 0 <= c < 1; c = 0
/// gives k = 1.
DepthBudget choose_depth(std::size_t m, const Params& params, ContractionBound c);

}  // namespace polyvol
