#pragma once

#include <span>
#include <stdexcept>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "polyvol/graph.hpp"
#include "polyvol/params.hpp"

namespace polyvol {

using BigCount = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

/// Raised when an exact enumeration or a recursive approximation would exceed
/// its configured work limit.
class BudgetExceeded : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct EnumerationBudget {
  /// Upper bound on log2 of the enumerated product space (free coordinates only).
  double max_log2_states = 24.0;
  unsigned threads = 1;
};

/// Inclusive integer interval.
struct IntRange {
  int lo = 0;
  int hi = -1;
  int size() const { return hi >= lo ? hi - lo + 1 : 0; }
  bool contains(int x) const { return lo <= x && x <= hi; }
  friend bool operator==(const IntRange&, const IntRange&) = default;
};

/// S_n = [0, min(N - n, cap)], the values a neighbor may take when the
/// center carries value n. Throws std::out_of_range unless 0 <= n <= cap.
IntRange s_set(int n, const Params& params);

/// x holds one value per live vertex, in ascending label order.
/// Throws std::invalid_argument on a length mismatch.
bool is_feasible(const Graph& g, const Params& params, std::span<const int> x);

/// Number of integer points x with x_v in box[v] for every live v and
/// x_u + x_v <= edge_limit on every live edge. `box` is indexed by label.
BigCount count_box(const Graph& g, std::span<const IntRange> box, int edge_limit,
                   const EnumerationBudget& budget = {});

/// Z(G, beta): lattice points of the discretized polytope consistent with the
/// pins. Infeasible pins give 0.
BigCount exact_count(const Graph& g, const Params& params, const ConstraintSet& beta,
                     const EnumerationBudget& budget = {});

/// Natural log of a positive count, exact to double precision even when the
/// count overflows a double. Returns -infinity for 0.
double log_of(const BigCount& value);

/// x(G, v <- n, beta) as an unreduced fraction; 0/0 reads as 0.
struct ExactMarginal {
  BigCount numerator;
  BigCount denominator;

  Rational value() const;
  double to_double() const;
};

ExactMarginal exact_marginal(const Graph& g, const Params& params, Vertex v, int n,
                             const ConstraintSet& beta, const EnumerationBudget& budget = {});

/// All marginals of v at once, n = 0..cap, sharing one denominator.
std::vector<ExactMarginal> exact_marginals(const Graph& g, const Params& params, Vertex v,
                                           const ConstraintSet& beta,
                                           const EnumerationBudget& budget = {});

}  // namespace polyvol
