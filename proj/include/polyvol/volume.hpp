#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "polyvol/counting.hpp"
#include "polyvol/lattice.hpp"

namespace polyvol {

/// Per-vertex upper bounds beta_i with A <= beta_i <= cap.
class UpperBoundSet {
 public:
  /// Throws std::invalid_argument if a bound leaves [A, cap].
  UpperBoundSet(std::vector<int> bounds, const Params& params);
  /// beta_i = cap for every vertex: the full discretized polytope.
  static UpperBoundSet full(std::size_t vertex_count, const Params& params);

  const std::vector<int>& bounds() const { return bounds_; }

 private:
  std::vector<int> bounds_;
};

/// |{x in Z^n : 0 <= x_i <= beta_i, x_i + x_j <= N on edges}|.
BigCount count_U(const Graph& g, const Params& params, const UpperBoundSet& bounds,
                 const EnumerationBudget& budget = {});

/// |{x in Z^n : 0 <= x_i <= beta_i - 1, x_i + x_j <= N - 2 on edges}|.
BigCount count_L(const Graph& g, const Params& params, const UpperBoundSet& bounds,
                 const EnumerationBudget& budget = {});

struct VolumeSandwich {
  BigCount lower_count;
  BigCount upper_count;
  /// max(0, 1 - m / A) * |U|; 0 when A = 0.
  double guaranteed_lower = 0.0;
};

VolumeSandwich sandwich(const Graph& g, const Params& params, const UpperBoundSet& bounds,
                        const EnumerationBudget& budget = {});

/// Closed-form volume of the unit-scale polytope for a single vertex or a
/// single edge. Throws std::invalid_argument for any other topology.
double exact_volume_small(const Graph& g, double alpha);

struct MonteCarloVolume {
  double estimate = 0.0;
  double stderr_ = 0.0;
};

/// Hit-or-miss estimate over the box [0, 1 - alpha]^m. Deterministic in seed;
/// samples are drawn in fixed chunks, each from its own substream, so the
/// result does not depend on the thread count.
MonteCarloVolume mc_volume(const Graph& g, double alpha, std::uint64_t samples, std::uint64_t seed,
                           unsigned threads = 1);

struct VolumeOptions {
  std::optional<int> N;
  std::optional<int> A;
  std::optional<int> depth;
  /// Replace the approximate counter with exact enumeration.
  bool exact_count = false;
  /// Largest N used when defaulting N = m^2 / alpha.
  int max_N = 4096;
  ApproxOptions approx;
  EnumerationBudget budget;
};

struct VolumeEstimate {
  LogEstimate log_volume;
  LogEstimate log_count;
  Params params;
  int depth = 0;
  double contraction = 0.0;
  std::optional<double> alpha_delta;
  std::vector<std::string> warnings;
  bool no_contraction_guarantee = false;
  bool discretization_capped = false;
};

/// Discretize, count, and rescale: log V = log Z - m log N.
///
/// Defaults: N = round(m^2 / alpha) capped at max_N (and nudged up until
/// 2 round(alpha N) < N), A = round(alpha N), and k = choose_depth when the
/// contraction bound is below 1. Without contraction the depth defaults to
/// the live vertex count, where the recursion bottoms out exactly, and a
/// warning is recorded.
VolumeEstimate volume_estimate(const Graph& g, double alpha, const VolumeOptions& options = {});

}  // namespace polyvol
