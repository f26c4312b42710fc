#include "polyvol/params.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace polyvol {

Params Params::make(int N, int A) {
  if (N < 1) throw std::invalid_argument("N must be positive, got " + std::to_string(N));
  if (A < 0) throw std::invalid_argument("A must be nonnegative, got " + std::to_string(A));
  if (2 * static_cast<long long>(A) >= N)
    throw std::invalid_argument("need 2A < N (alpha < 1/2), got N=" + std::to_string(N) +
                                " A=" + std::to_string(A));
  return Params{N, A};
}

Params Params::from_alpha(int N, double alpha) {
  if (!(alpha >= 0.0) || !std::isfinite(alpha))
    throw std::invalid_argument("alpha must be a finite nonnegative number");
  return make(N, static_cast<int>(std::lround(alpha * N)));
}

Params Params::from_alpha_clamped(int N, double alpha, bool* clamped) {
  if (!(alpha >= 0.0) || !std::isfinite(alpha))
    throw std::invalid_argument("alpha must be a finite nonnegative number");
  if (N < 1) throw std::invalid_argument("N must be positive, got " + std::to_string(N));
  const long long rounded = std::llround(alpha * N);
  const long long largest = (N + 1) / 2 - 1;
  if (clamped) *clamped = rounded > largest;
  return make(N, static_cast<int>(std::min(rounded, largest)));
}

std::string Params::to_string() const {
  return "N=" + std::to_string(N) + " A=" + std::to_string(A) + " cap=" + std::to_string(cap());
}

}  // namespace polyvol
