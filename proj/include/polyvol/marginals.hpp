#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "polyvol/graph.hpp"
#include "polyvol/lattice.hpp"
#include "polyvol/params.hpp"

namespace polyvol {

/// Tolerance for distribution invariants in floating point.
inline constexpr double kDistributionTol = 1e-12;

namespace detail {

template <typename Scalar>
bool le_tol(const Scalar& a, const Scalar& b, double tol) {
  if constexpr (std::is_floating_point_v<Scalar>)
    return a <= b + tol;
  else
    return a <= b;
}

template <typename Scalar>
bool eq_tol(const Scalar& a, const Scalar& b, double tol) {
  return le_tol(a, b, tol) && le_tol(b, a, tol);
}

inline std::size_t ipow(std::size_t base, int exp) {
  std::size_t out = 1;
  for (int i = 0; i < exp; ++i) out *= base;
  return out;
}

}  // namespace detail

/// Maximum pinned-neighbor value b of the target vertex. The target may only
/// take values in [0, min(cap, N - b)].
struct EffectiveCap {
  int b = 0;

  int top(const Params& p) const { return std::min(p.cap(), p.N - b); }
};

/// Conditional child marginals y^j(n_1..n_j), j = 1..d.
///
/// Level j stores width^j coordinates laid out lexicographically, so the
/// slice y^j(n_1..n_{j-1}, .) is the contiguous block at index
/// encode(n_1..n_{j-1}) * width. Slices absent from the table (prefixes whose
/// induced pins are infeasible) read as zero.
template <typename Scalar>
class MarginalTable {
 public:
  MarginalTable() = default;
  MarginalTable(Params params, int child_count) : params_(params), d_(child_count) {
    if (child_count < 0) throw std::invalid_argument("MarginalTable: negative child count");
    const std::size_t w = params.width();
    levels_.resize(d_);
    present_.resize(d_);
    for (int j = 1; j <= d_; ++j) {
      levels_[j - 1].assign(detail::ipow(w, j), Scalar(0));
      present_[j - 1].assign(detail::ipow(w, j - 1), 0);
    }
  }

  const Params& params() const { return params_; }
  int child_count() const { return d_; }
  int width() const { return params_.width(); }

  std::size_t slice_count(int j) const { return present_.at(j - 1).size(); }
  bool has_slice(int j, std::size_t slice) const { return present_.at(j - 1).at(slice) != 0; }

  std::span<const Scalar> slice(int j, std::size_t slice) const {
    return std::span<const Scalar>(levels_.at(j - 1)).subspan(slice * width(), width());
  }

  void set_slice(int j, std::size_t slice, std::span<const Scalar> values) {
    if (values.size() != static_cast<std::size_t>(width()))
      throw std::invalid_argument("set_slice: slice must have cap + 1 entries");
    std::copy(values.begin(), values.end(), levels_.at(j - 1).begin() + slice * width());
    present_.at(j - 1).at(slice) = 1;
  }

  /// y^j(prefix) for a prefix of length j; zero when the slice is absent.
  Scalar value(int j, std::span<const int> prefix) const {
    if (prefix.size() != static_cast<std::size_t>(j))
      throw std::invalid_argument("value: prefix length must equal j");
    const std::size_t idx = encode(prefix);
    return levels_.at(j - 1)[idx];
  }

  /// Raw coordinates of level j, for coordinate-wise perturbation.
  std::span<Scalar> level(int j) { return levels_.at(j - 1); }
  std::span<const Scalar> level(int j) const { return levels_.at(j - 1); }

  std::size_t encode(std::span<const int> digits) const {
    std::size_t idx = 0;
    for (int x : digits) {
      if (x < 0 || x >= width()) throw std::out_of_range("prefix value outside [0, cap]");
      idx = idx * width() + static_cast<std::size_t>(x);
    }
    return idx;
  }

  std::vector<int> decode(std::size_t idx, int length) const {
    std::vector<int> digits(length);
    for (int i = length - 1; i >= 0; --i) {
      digits[i] = static_cast<int>(idx % width());
      idx /= width();
    }
    return digits;
  }

  bool same_shape(const MarginalTable& other) const {
    return params_ == other.params_ && d_ == other.d_ && present_ == other.present_;
  }

  friend bool operator==(const MarginalTable&, const MarginalTable&) = default;

 private:
  Params params_{};
  int d_ = 0;
  std::vector<std::vector<Scalar>> levels_;
  std::vector<std::vector<std::uint8_t>> present_;
};

template <typename Scalar>
struct FeasibleProbabilityDistribution {
  std::vector<Scalar> w;
};

/// First violated invariant of a feasible probability distribution over
/// [0, cap] (sums to one, non-increasing, flat on [0, A]); nullopt if none.
template <typename Scalar>
std::optional<std::string> fpd_violation(std::span<const Scalar> w, const Params& p,
                                         double tol = kDistributionTol) {
  if (w.size() != static_cast<std::size_t>(p.width())) return "wrong length";
  Scalar sum(0);
  for (const auto& x : w) {
    if (!detail::le_tol(Scalar(0), x, tol)) return "negative entry";
    sum += x;
  }
  if (!detail::eq_tol(sum, Scalar(1), tol)) return "does not sum to 1";
  for (int k = 0; k + 1 <= p.cap(); ++k)
    if (!detail::le_tol(w[k + 1], w[k], tol)) return "increases at " + std::to_string(k);
  for (int k = 1; k <= p.A; ++k)
    if (!detail::eq_tol(w[k], w[0], tol)) return "not flat on [0, A] at " + std::to_string(k);
  return std::nullopt;
}

/// First violated invariant of a marginal table: every present slice is a
/// feasible probability distribution, and prefixes inside [0, A]^j agree.
template <typename Scalar>
std::optional<std::string> table_violation(const MarginalTable<Scalar>& t,
                                           double tol = kDistributionTol) {
  const Params& p = t.params();
  for (int j = 1; j <= t.child_count(); ++j) {
    std::optional<std::size_t> reference;
    for (std::size_t s = 0; s < t.slice_count(j); ++s) {
      if (!t.has_slice(j, s)) continue;
      if (auto bad = fpd_violation<Scalar>(t.slice(j, s), p, tol))
        return "level " + std::to_string(j) + " slice " + std::to_string(s) + ": " + *bad;
      auto digits = t.decode(s, j - 1);
      if (std::any_of(digits.begin(), digits.end(), [&](int x) { return x > p.A; })) continue;
      if (!reference) {
        reference = s;
        continue;
      }
      auto a = t.slice(j, *reference), b = t.slice(j, s);
      for (int i = 0; i <= p.A; ++i)
        if (!detail::eq_tol(a[i], b[i], tol))
          return "level " + std::to_string(j) + ": prefixes inside [0, A] disagree";
    }
  }
  return std::nullopt;
}

/// U(s) = sum over (n_1..n_d) in [0, s]^d of prod_j y^j(n_1..n_j), for every
/// s in [0, cap]. One pass: each tuple is credited to its maximum entry.
template <typename Scalar>
std::vector<Scalar> threshold_sums(const MarginalTable<Scalar>& t) {
  const int w = t.width();
  const int d = t.child_count();
  std::vector<Scalar> by_max(w, Scalar(0));
  if (d == 0) {
    by_max[0] = Scalar(1);
  } else {
    // Iterative DFS over prefixes; products[j] = prod_{i <= j} y^i.
    std::vector<int> digit(d, 0);
    std::vector<Scalar> product(d + 1, Scalar(1));
    std::vector<int> run_max(d + 1, 0);
    std::vector<std::size_t> index(d + 1, 0);
    auto descend = [&](auto&& self, int j) -> void {
      // j in [0, d): choose n_{j+1}
      const std::size_t base = index[j] * w;
      const bool present = t.has_slice(j + 1, index[j]);
      if (!present) return;
      auto lvl = t.level(j + 1);
      for (int x = 0; x < w; ++x) {
        const Scalar& y = lvl[base + x];
        if (y == Scalar(0)) continue;
        product[j + 1] = product[j] * y;
        run_max[j + 1] = std::max(run_max[j], x);
        index[j + 1] = base + x;
        if (j + 1 == d)
          by_max[run_max[j + 1]] += product[j + 1];
        else
          self(self, j + 1);
      }
    };
    descend(descend, 0);
  }
  for (int s = 1; s < w; ++s) by_max[s] += by_max[s - 1];
  return by_max;
}

/// U_n: numerator of f_n.
template <typename Scalar>
Scalar eval_U(int n, const MarginalTable<Scalar>& t) {
  auto range = s_set(n, t.params());
  return threshold_sums(t)[range.hi];
}

template <typename Scalar>
Scalar eval_L_from(const std::vector<Scalar>& sums, const Params& p, EffectiveCap ecap) {
  Scalar total(0);
  for (int m = 0; m <= ecap.top(p); ++m) total += sums[std::min(p.N - m, p.cap())];
  return total;
}

/// L = sum_{m=0}^{min(cap, N-b)} U_m.
template <typename Scalar>
Scalar eval_L(const MarginalTable<Scalar>& t, EffectiveCap ecap = {}) {
  return eval_L_from(threshold_sums(t), t.params(), ecap);
}

/// f_n = U_n / L, or 0 when n exceeds N - b or L vanishes.
template <typename Scalar>
Scalar eval_f(int n, const MarginalTable<Scalar>& t, EffectiveCap ecap = {}) {
  const Params& p = t.params();
  if (n < 0 || n > p.cap()) throw std::out_of_range("eval_f: n outside [0, cap]");
  if (n > ecap.top(p)) return Scalar(0);
  auto sums = threshold_sums(t);
  Scalar L = eval_L_from(sums, p, ecap);
  if (L == Scalar(0)) return Scalar(0);
  return sums[std::min(p.N - n, p.cap())] / L;
}

/// (f_0, ..., f_cap) from one pass over the table; throws std::logic_error if
/// the result is not a feasible probability distribution.
template <typename Scalar>
FeasibleProbabilityDistribution<Scalar> f_all(const MarginalTable<Scalar>& t,
                                              EffectiveCap ecap = {}) {
  const Params& p = t.params();
  auto sums = threshold_sums(t);
  Scalar L = eval_L_from(sums, p, ecap);
  FeasibleProbabilityDistribution<Scalar> out{std::vector<Scalar>(p.width(), Scalar(0))};
  if (L != Scalar(0))
    for (int n = 0; n <= ecap.top(p); ++n) out.w[n] = sums[std::min(p.N - n, p.cap())] / L;
  if (auto bad = fpd_violation<Scalar>(out.w, p))
    throw std::logic_error("f_all: closure violated (" + *bad + ")");
  return out;
}

/// B_j = prod_{i<j} y^i(n_1..n_i); prefix has length j - 1.
template <typename Scalar>
Scalar eval_B(int j, std::span<const int> prefix, const MarginalTable<Scalar>& t) {
  if (j < 1 || j > t.child_count()) throw std::out_of_range("eval_B: j outside [1, d]");
  if (prefix.size() != static_cast<std::size_t>(j - 1))
    throw std::invalid_argument("eval_B: prefix must have length j - 1");
  Scalar out(1);
  for (int i = 1; i < j; ++i) out *= t.value(i, prefix.first(i));
  return out;
}

/// A_j(n, n_1..n_j) = sum over n_{j+1..d} in S_n of prod_{i>j} y^i.
template <typename Scalar>
Scalar eval_A(int j, int n, std::span<const int> prefix, const MarginalTable<Scalar>& t) {
  if (j < 1 || j > t.child_count()) throw std::out_of_range("eval_A: j outside [1, d]");
  if (prefix.size() != static_cast<std::size_t>(j))
    throw std::invalid_argument("eval_A: prefix must have length j");
  const int top = s_set(n, t.params()).hi;
  const int d = t.child_count();
  const int w = t.width();
  auto rec = [&](auto&& self, int level, std::size_t index) -> Scalar {
    if (level == d) return Scalar(1);
    if (!t.has_slice(level + 1, index)) return Scalar(0);
    auto lvl = t.level(level + 1);
    Scalar total(0);
    for (int x = 0; x <= top; ++x) {
      const Scalar& y = lvl[index * w + x];
      if (y == Scalar(0)) continue;
      total += y * self(self, level + 1, index * w + x);
    }
    return total;
  };
  return rec(rec, j, t.encode(prefix));
}

/// Pointwise weight * y + (1 - weight) * z.
template <typename Scalar>
MarginalTable<Scalar> interpolate(const MarginalTable<Scalar>& y, const MarginalTable<Scalar>& z,
                                  const Scalar& weight) {
  if (!y.same_shape(z)) throw std::invalid_argument("interpolate: table shapes differ");
  if (weight < Scalar(0) || weight > Scalar(1))
    throw std::invalid_argument("interpolate: weight outside [0, 1]");
  if (weight == Scalar(1)) return y;
  if (weight == Scalar(0)) return z;
  MarginalTable<Scalar> out = y;
  for (int j = 1; j <= y.child_count(); ++j) {
    auto dst = out.level(j);
    auto a = y.level(j), b = z.level(j);
    for (std::size_t i = 0; i < dst.size(); ++i) dst[i] = weight * a[i] + (Scalar(1) - weight) * b[i];
  }
  return out;
}

template <typename To, typename From>
MarginalTable<To> convert_table(const MarginalTable<From>& src) {
  MarginalTable<To> out(src.params(), src.child_count());
  std::vector<To> buf(src.width());
  for (int j = 1; j <= src.child_count(); ++j)
    for (std::size_t s = 0; s < src.slice_count(j); ++s) {
      if (!src.has_slice(j, s)) continue;
      auto in = src.slice(j, s);
      for (std::size_t i = 0; i < in.size(); ++i) buf[i] = static_cast<To>(in[i]);
      out.set_slice(j, s, buf);
    }
  return out;
}

/// Deterministic valid table: each slice is flat on [0, A], then decreases by
/// Dirichlet-sampled steps, then is normalized. Prefix digits <= A are
/// interchangeable: two prefixes that agree after mapping them to 0 share a slice.
MarginalTable<double> random_fmd(std::uint64_t seed, int d, const Params& params);

/// Unpinned live neighbors of v in ascending order: the child slots of the
/// recursion at v.
std::vector<Vertex> child_slots(const Graph& g, Vertex v, const ConstraintSet& beta);

/// Whether pinning children[i] <- prefix[i] on top of beta keeps every pinned
/// edge within N (the graph is the one the children live in).
bool prefix_feasible(const Graph& g, const Params& params, const ConstraintSet& beta,
                     std::span<const Vertex> children, std::span<const int> prefix);

/// Table of exact child marginals: y^j(n_1..n_j) = x(G \ v, v_j <- n_j,
/// beta + {v_i <- n_i, i < j}). Infeasible prefixes are left absent.
MarginalTable<Rational> exact_child_table(const Graph& g, const Params& params, Vertex v,
                                          const ConstraintSet& beta,
                                          const EnumerationBudget& budget = {});

}  // namespace polyvol
