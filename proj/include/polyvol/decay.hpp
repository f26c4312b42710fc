#pragma once

#include <span>
#include <vector>

#include "polyvol/marginals.hpp"

namespace polyvol {

/// Upper bound c on the l1 norm of the gradient of f_n at a vertex with d
/// children. The recursion contracts when c < 1.
struct ContractionBound {
  double c = 0.0;
  bool contracts() const { return c < 1.0; }
};

/// 2d(1 - alpha)/alpha * (((1 - alpha)/alpha)^d - 1). Throws
/// std::invalid_argument unless 0 < alpha < 1/2 and d >= 0.
ContractionBound gradient_bound(int d, double alpha);

struct AlphaThreshold {
  int delta = 0;
  double alpha_delta = 0.0;
  double tol = 0.0;
  /// Final bracket; gradient_bound(delta, lo) > 1 >= gradient_bound(delta, hi).
  double lo = 0.0;
  double hi = 0.0;
  int iterations = 0;
};

/// Bisection for the alpha where gradient_bound(delta, alpha) crosses 1.
/// Throws std::runtime_error if the bracket fails its sign test.
AlphaThreshold alpha_threshold(int delta, double tol = 1e-9);

/// d f_n / d y^j(prefix) evaluated through the U/L decomposition with the A_j
/// and B_j products. Throws std::domain_error when L = 0.
double analytic_partial(int j, std::span<const int> prefix, int n, const MarginalTable<double>& t);

/// All partial derivatives of f_n, laid out like MarginalTable levels:
/// result[j - 1][i] is the partial for level j coordinate i. Coordinates in
/// absent slices are reported as 0.
std::vector<std::vector<double>> analytic_gradient(int n, const MarginalTable<double>& t);

/// sum over all coordinates of |analytic partial|, for every n in [0, cap].
std::vector<double> analytic_gradient_norm1_all(const MarginalTable<double>& t);

/// Central-difference l1 gradient norm of f_n with step h, perturbing each
/// present coordinate independently.
double fd_gradient_norm1(int n, const MarginalTable<double>& t, double h = 1e-6);

/// fd_gradient_norm1 for every n in [0, cap] from a single sweep.
std::vector<double> fd_gradient_norm1_all(const MarginalTable<double>& t, double h = 1e-6);

/// Bound on a single partial at level j, any prefix: cap / A^{j+1}.
double loose_partial_bound(int j, const Params& p);
/// Bound on a single partial at level j with prefix in [0, A]^j:
/// cap / A^{j+1} * ((cap / A)^j - 1).
double tight_partial_bound(int j, const Params& p);
/// Bound on the level-j block of the gradient: 2 cap / A * ((cap / A)^j - 1).
double slot_gradient_bound(int j, const Params& p);

}  // namespace polyvol
