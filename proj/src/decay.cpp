#include "polyvol/decay.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace polyvol {

ContractionBound gradient_bound(int d, double alpha) {
  if (d < 0) throw std::invalid_argument("gradient_bound: d must be nonnegative");
  if (!(alpha > 0.0 && alpha < 0.5))
    throw std::invalid_argument("gradient_bound: alpha must lie in (0, 1/2)");
  if (d == 0) return {0.0};
  const double ratio = (1.0 - alpha) / alpha;
  // expm1 keeps the bracket accurate as ratio -> 1.
  const double bracket = std::expm1(d * std::log1p((1.0 - 2.0 * alpha) / alpha));
  return {2.0 * d * ratio * bracket};
}

AlphaThreshold alpha_threshold(int delta, double tol) {
  if (delta < 1) throw std::invalid_argument("alpha_threshold: delta must be at least 1");
  if (!(tol > 0.0)) throw std::invalid_argument("alpha_threshold: tol must be positive");
  auto g = [delta](double a) { return gradient_bound(delta, a).c; };

  double hi = 0.5 - 1e-12;
  double lo = 0.25;
  while (!(g(lo) > 1.0)) {
    lo /= 2.0;
    if (lo < 1e-300) throw std::runtime_error("alpha_threshold: could not bracket the root");
  }
  if (!(g(hi) < 1.0))
    throw std::runtime_error("alpha_threshold: bracket failed at upper end for delta=" + std::to_string(delta));

  AlphaThreshold out;
  out.delta = delta;
  out.tol = tol;
  while (hi - lo > tol) {
    const double mid = 0.5 * (lo + hi);
    if (g(mid) > 1.0)
      lo = mid;
    else
      hi = mid;
    ++out.iterations;
  }
  out.lo = lo;
  out.hi = hi;
  out.alpha_delta = 0.5 * (lo + hi);
  return out;
}

double analytic_partial(int j, std::span<const int> prefix, int n, const MarginalTable<double>& t) {
  const Params& p = t.params();
  if (j < 1 || j > t.child_count()) throw std::out_of_range("analytic_partial: j outside [1, d]");
  if (prefix.size() != static_cast<std::size_t>(j))
    throw std::invalid_argument("analytic_partial: prefix must have length j");
  const double L = eval_L(t);
  if (L == 0.0) throw std::domain_error("analytic_partial: L = 0");
  const double U = eval_U(n, t);

  auto inside = [&](int m) {
    const int top = s_set(m, p).hi;
    for (int x : prefix)
      if (x > top) return false;
    return true;
  };
  const double B = eval_B(j, prefix.first(j - 1), t);
  const double dU = inside(n) ? B * eval_A(j, n, prefix, t) : 0.0;
  double dL = 0.0;
  for (int m = 0; m <= p.cap(); ++m)
    if (inside(m)) dL += B * eval_A(j, m, prefix, t);
  return (L * dU - U * dL) / (L * L);
}

namespace {

// Shared pieces of every partial: B for each coordinate's prefix, A_j at each
// distinct threshold, and U/L. Thresholds min(N - m, cap) only span [A, cap].
struct GradientWorkspace {
  const MarginalTable<double>& t;
  Params p;
  int d, w, thresholds;
  std::vector<std::vector<double>> B;       // level j: per slice (prefix length j - 1)
  std::vector<std::vector<double>> A;       // level j: per coordinate x threshold
  std::vector<std::vector<int>> max_digit;  // level j: per coordinate
  std::vector<double> sums;                 // U by threshold
  std::vector<int> mult;                    // #m mapping to each threshold
  double L = 0.0;

  explicit GradientWorkspace(const MarginalTable<double>& table)
      : t(table), p(table.params()), d(table.child_count()), w(table.width()),
        thresholds(p.cap() - p.A + 1) {
    sums = threshold_sums(t);
    L = eval_L_from(sums, p, EffectiveCap{});
    if (L == 0.0) throw std::domain_error("analytic_gradient: L = 0");
    mult.assign(thresholds, 0);
    for (int m = 0; m <= p.cap(); ++m) ++mult[std::min(p.N - m, p.cap()) - p.A];

    B.resize(d);
    max_digit.resize(d);
    for (int j = 1; j <= d; ++j) {
      const std::size_t slices = t.slice_count(j);
      B[j - 1].assign(slices, 1.0);
      max_digit[j - 1].assign(slices * w, 0);
      for (std::size_t s = 0; s < slices; ++s) {
        int parent_max = 0;
        if (j > 1) {
          const std::size_t parent = s / w;
          B[j - 1][s] = B[j - 2][parent] * t.level(j - 1)[s];
          parent_max = max_digit[j - 2][s];
        }
        for (int x = 0; x < w; ++x) max_digit[j - 1][s * w + x] = std::max(parent_max, x);
      }
    }

    A.resize(d);
    for (int j = d; j >= 1; --j) {
      const std::size_t coords = t.level(j).size();
      A[j - 1].assign(coords * thresholds, 0.0);
      for (std::size_t c = 0; c < coords; ++c) {
        for (int s = 0; s < thresholds; ++s) {
          if (j == d) {
            A[j - 1][c * thresholds + s] = 1.0;
            continue;
          }
          double total = 0.0;
          if (t.has_slice(j + 1, c)) {
            const int top = p.A + s;
            auto lvl = t.level(j + 1);
            for (int x = 0; x <= top; ++x)
              total += lvl[c * w + x] * A[j][(c * w + x) * thresholds + s];
          }
          A[j - 1][c * thresholds + s] = total;
        }
      }
    }
  }

  std::vector<std::vector<double>> gradient(int n) const {
    const int sn = s_set(n, p).hi - p.A;
    const double U = sums[sn + p.A];
    std::vector<std::vector<double>> out(d);
    for (int j = 1; j <= d; ++j) {
      const std::size_t coords = t.level(j).size();
      out[j - 1].assign(coords, 0.0);
      for (std::size_t c = 0; c < coords; ++c) {
        const std::size_t slice = c / w;
        if (!t.has_slice(j, slice)) continue;
        const int mx = max_digit[j - 1][c];
        const double b = B[j - 1][slice];
        const double* a = &A[j - 1][c * thresholds];
        const double dU = mx <= sn + p.A ? b * a[sn] : 0.0;
        double dL = 0.0;
        for (int s = std::max(0, mx - p.A); s < thresholds; ++s) dL += mult[s] * a[s];
        dL *= b;
        out[j - 1][c] = (L * dU - U * dL) / (L * L);
      }
    }
    return out;
  }
};

std::vector<double> f_values(const MarginalTable<double>& t) {
  const Params& p = t.params();
  auto sums = threshold_sums(t);
  const double L = eval_L_from(sums, p, EffectiveCap{});
  std::vector<double> f(p.width());
  for (int n = 0; n <= p.cap(); ++n) f[n] = sums[std::min(p.N - n, p.cap())] / L;
  return f;
}

}  // namespace

std::vector<std::vector<double>> analytic_gradient(int n, const MarginalTable<double>& t) {
  if (n < 0 || n > t.params().cap()) throw std::out_of_range("analytic_gradient: n outside [0, cap]");
  return GradientWorkspace(t).gradient(n);
}

std::vector<double> analytic_gradient_norm1_all(const MarginalTable<double>& t) {
  const Params& p = t.params();
  std::vector<double> out(p.width(), 0.0);
  if (t.child_count() == 0) return out;
  GradientWorkspace ws(t);
  for (int n = 0; n <= p.cap(); ++n)
    for (const auto& level : ws.gradient(n))
      for (double g : level) out[n] += std::abs(g);
  return out;
}

std::vector<double> fd_gradient_norm1_all(const MarginalTable<double>& t, double h) {
  if (!(h > 0.0)) throw std::invalid_argument("fd_gradient_norm1: h must be positive");
  const Params& p = t.params();
  std::vector<double> out(p.width(), 0.0);
  MarginalTable<double> work = t;
  for (int j = 1; j <= t.child_count(); ++j) {
    auto coords = work.level(j);
    for (std::size_t c = 0; c < coords.size(); ++c) {
      if (!t.has_slice(j, c / t.width())) continue;
      const double original = coords[c];
      coords[c] = original + h;
      auto plus = f_values(work);
      coords[c] = original - h;
      auto minus = f_values(work);
      coords[c] = original;
      for (int n = 0; n <= p.cap(); ++n) out[n] += std::abs(plus[n] - minus[n]) / (2.0 * h);
    }
  }
  return out;
}

double fd_gradient_norm1(int n, const MarginalTable<double>& t, double h) {
  if (n < 0 || n > t.params().cap()) throw std::out_of_range("fd_gradient_norm1: n outside [0, cap]");
  return fd_gradient_norm1_all(t, h)[n];
}

double loose_partial_bound(int j, const Params& p) {
  return p.cap() / std::pow(static_cast<double>(p.A), j + 1);
}

double tight_partial_bound(int j, const Params& p) {
  const double ratio = static_cast<double>(p.cap()) / p.A;
  return loose_partial_bound(j, p) * (std::pow(ratio, j) - 1.0);
}

double slot_gradient_bound(int j, const Params& p) {
  const double ratio = static_cast<double>(p.cap()) / p.A;
  return 2.0 * ratio * (std::pow(ratio, j) - 1.0);
}

}  // namespace polyvol
