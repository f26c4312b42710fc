#pragma once

#include <string>

namespace polyvol {

/// Discretization: each coordinate ranges over [0, cap] with cap = N - A, and
/// every edge sum is bounded by N. The restriction parameter is alpha = A / N.
struct Params {
  int N = 0;
  int A = 0;

  /// Throws std::invalid_argument unless N >= 1, A >= 0 and 2A < N.
  static Params make(int N, int A);

  /// A = round(alpha * N); same validation as make().
  static Params from_alpha(int N, double alpha);

  /// Like from_alpha, but when rounding would give 2A >= N the largest
  /// admissible A = ceil(N / 2) - 1 is used instead and `clamped` is set.
  static Params from_alpha_clamped(int N, double alpha, bool* clamped = nullptr);

  int cap() const { return N - A; }
  double alpha() const { return static_cast<double>(A) / N; }
  /// Number of lattice values per coordinate.
  int width() const { return cap() + 1; }

  std::string to_string() const;

  friend bool operator==(const Params&, const Params&) = default;
};

}  // namespace polyvol
