#include "polyvol/verify.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "polyvol/decay.hpp"
#include "polyvol/families.hpp"
#include "polyvol/lattice.hpp"
#include "polyvol/rng.hpp"
#include "polyvol/volume.hpp"

namespace polyvol::verify {

void PropertyResult::record(bool pass, const std::string& what) {
  ++checked;
  if (!pass) {
    if (failed == 0) first_failure = what;
    ++failed;
  }
}

bool SuiteResult::ok() const {
  return std::all_of(properties.begin(), properties.end(), [](const auto& p) { return p.ok(); });
}

PropertyResult& SuiteResult::property(const std::string& name) {
  for (auto& p : properties)
    if (p.name == name) return p;
  PropertyResult fresh;
  fresh.name = name;
  properties.push_back(std::move(fresh));
  return properties.back();
}

std::vector<std::string> suite_names() { return {"marginals", "decay", "telescoping", "sandwich"}; }

DecayTableCheck check_decay_table(const MarginalTable<double>& t, bool with_fd, double h) {
  const Params& p = t.params();
  const int d = t.child_count();
  DecayTableCheck out;
  out.min_loose_slack = out.min_tight_slack = out.min_slot_slack = std::numeric_limits<double>::infinity();
  for (int j = 1; j <= d; ++j) out.coordinates += t.level(j).size();

  for (int n = 0; n <= p.cap(); ++n) {
    double norm = 0.0;
    if (d > 0) {
      auto grad = analytic_gradient(n, t);
      for (int j = 1; j <= d; ++j) {
        const double loose = loose_partial_bound(j, p);
        const double tight = tight_partial_bound(j, p);
        double slot = 0.0;
        for (std::size_t c = 0; c < grad[j - 1].size(); ++c) {
          const double g = std::abs(grad[j - 1][c]);
          slot += g;
          out.min_loose_slack = std::min(out.min_loose_slack, loose - g);
          auto digits = t.decode(c, j);
          if (std::all_of(digits.begin(), digits.end(), [&](int x) { return x <= p.A; }))
            out.min_tight_slack = std::min(out.min_tight_slack, tight - g);
        }
        out.min_slot_slack = std::min(out.min_slot_slack, slot_gradient_bound(j, p) - slot);
        norm += slot;
      }
    }
    out.max_analytic_norm = std::max(out.max_analytic_norm, norm);
  }

  if (with_fd) {
    auto fd = fd_gradient_norm1_all(t, h);
    for (int n = 0; n <= p.cap(); ++n) {
      out.max_fd_norm = std::max(out.max_fd_norm, fd[n]);
      // Re-derive the analytic total for this n for the gap.
      double analytic = 0.0;
      if (d > 0)
        for (const auto& level : analytic_gradient(n, t))
          for (double g : level) analytic += std::abs(g);
      out.max_fd_gap = std::max(out.max_fd_gap, std::abs(fd[n] - analytic));
    }
  }
  return out;
}

RecursionCheck check_exact_recursion(const Graph& g, const Params& params) {
  RecursionCheck out;
  const ConstraintSet none(g.vertex_count());
  for (Vertex v : g.live_vertices()) {
    auto table = exact_child_table(g, params, v, none);
    auto table_f = convert_table<double>(table);
    auto truth = exact_marginals(g, params, v, none);
    auto sums = threshold_sums(table);
    const Rational L = eval_L_from(sums, params, EffectiveCap{});
    for (int n = 0; n <= params.cap(); ++n) {
      const Rational f = L == 0 ? Rational(0) : sums[std::min(params.N - n, params.cap())] / L;
      const Rational x = truth[n].value();
      if (f != x) out.exact_match = false;
      const double ff = eval_f(n, table_f);
      out.max_float_error = std::max(out.max_float_error, std::abs(ff - static_cast<double>(x)));
      ++out.comparisons;
    }
  }
  return out;
}

bool check_telescoping(const Graph& g, const Params& params, std::span<const Vertex> order) {
  ConstraintSet beta(g.vertex_count());
  Rational product(1);
  for (Vertex v : order) {
    const Rational x = exact_marginal(g, params, v, 0, beta).value();
    if (x == 0) return false;
    product /= x;
    beta.set(v, 0);
  }
  return product == Rational(exact_count(g, params, ConstraintSet(g.vertex_count())));
}

namespace {

std::string describe(const Params& p, int d, std::uint64_t seed) {
  std::ostringstream os;
  os << p.to_string() << " d=" << d << " seed=" << seed;
  return os.str();
}

void marginals_suite(SuiteResult& r, const SuiteOptions& o) {
  const std::vector<Params> grid{Params::make(4, 1), Params::make(10, 4), Params::make(20, 9)};
  Rng pick(o.seed, 0x5eed);
  for (int trial = 0; trial < o.trials; ++trial) {
    for (const auto& p : grid) {
      for (int d = 0; d <= 3; ++d) {
        const std::uint64_t seed = o.seed * 1000003 + trial;
        auto t = random_fmd(seed, d, p);
        auto what = describe(p, d, seed);
        r.property("random_fmd_valid").record(!table_violation(t), what);

        FeasibleProbabilityDistribution<double> w;
        bool closed = true;
        try {
          w = f_all(t);
        } catch (const std::logic_error&) {
          closed = false;
        }
        r.property("closure").record(closed, what);
        if (!closed) continue;

        bool elem = true;
        double head = 0.0;
        for (int i = 0; i <= p.cap(); ++i) {
          elem = elem && w.w[i] <= 1.0 / p.A + kDistributionTol;
          if (i <= p.A) head += w.w[i];
        }
        r.property("element_bound").record(elem, what);
        r.property("head_mass_bound")
            .record(head >= static_cast<double>(p.A) / p.cap() - kDistributionTol && head <= 1.0 + kDistributionTol, what);

        const double L = eval_L(t);
        // L sums cap + 1 terms, each at most 1.
        bool upper = L <= p.width() + kDistributionTol && L >= p.A - kDistributionTol;
        for (int n = 0; n <= p.cap(); ++n) upper = upper && eval_U(n, t) <= 1.0 + kDistributionTol;
        r.property("upper_bounds").record(upper, what);

        for (int j = 1; j <= d; ++j) {
          std::vector<int> prefix(j), inside(j), other(j);
          for (int i = 0; i < j; ++i) {
            prefix[i] = static_cast<int>(pick.uniform() * p.width());
            inside[i] = static_cast<int>(pick.uniform() * (p.A + 1));
            other[i] = static_cast<int>(pick.uniform() * (p.A + 1));
          }
          const int n = static_cast<int>(pick.uniform() * p.width());
          const double a = eval_A(j, n, prefix, t);
          const double b = eval_B(j, std::span<const int>(prefix).first(j - 1), t);
          r.property("ab_bounds").record(a <= 1.0 + kDistributionTol &&
                                             b <= 1.0 / std::pow(p.A, j - 1) + kDistributionTol,
                                         what);
          const bool same = eval_A(j, n, inside, t) == eval_A(j, n, other, t) &&
                            eval_B(j, std::span<const int>(inside).first(j - 1), t) ==
                                eval_B(j, std::span<const int>(other).first(j - 1), t);
          r.property("ab_prefix_insensitivity").record(same, what);
        }

        auto z = random_fmd(seed + 7919, d, p);
        const double weight = pick.uniform();
        r.property("interpolation_valid").record(!table_violation(interpolate(t, z, weight)), what);
      }
    }
  }

  for (std::size_t m = 1; m <= 4; ++m)
    for (const auto& g : families::connected_graphs(m))
      for (int A : {1, 2}) {
        auto check = check_exact_recursion(g, Params::make(6, A));
        r.property("exact_recursion").record(check.exact_match && check.max_float_error <= 1e-12,
                                             "m=" + std::to_string(m) + " A=" + std::to_string(A));
      }
}

void decay_suite(SuiteResult& r, const SuiteOptions& o) {
  const std::vector<Params> grid{Params::make(10, 4), Params::make(20, 9)};
  for (const auto& p : grid)
    for (int d = 1; d <= 3; ++d)
      for (int trial = 0; trial < o.trials; ++trial) {
        const std::uint64_t seed = o.seed * 1000003 + trial;
        auto t = random_fmd(seed, d, p);
        auto c = check_decay_table(t);
        auto what = describe(p, d, seed);
        r.property("gradient_bound").record(c.max_analytic_norm <= gradient_bound(d, p.alpha()).c + 1e-4, what);
        r.property("fd_agreement").record(c.max_fd_gap <= 1e-5, what);
        r.property("loose_partial_bound").record(c.min_loose_slack >= -1e-9, what);
        r.property("tight_partial_bound").record(c.min_tight_slack >= -1e-9, what);
        r.property("slot_sum_bound").record(c.min_slot_slack >= -1e-9, what);
      }
  const double a3 = alpha_threshold(3, 1e-6).alpha_delta;
  r.property("alpha_3").record(a3 >= 0.4875 && a3 <= 0.4885, "alpha_3=" + std::to_string(a3));
}

void telescoping_suite(SuiteResult& r, const SuiteOptions& o) {
  Rng rng(o.seed, 0x7e1e);
  for (std::size_t m = 1; m <= 5; ++m)
    for (const auto& g : families::connected_graphs(m))
      for (int A : {1, 2}) {
        const Params p = Params::make(6, A);
        const std::string what = "m=" + std::to_string(m) + " edges=" + std::to_string(g.edge_count()) +
                                 " A=" + std::to_string(A);
        std::vector<Vertex> order = g.live_vertices();
        r.property("telescoping_identity").record(check_telescoping(g, p, order), what + " ascending");
        for (int trial = 0; trial < std::min(o.trials, 3); ++trial) {
          for (std::size_t i = order.size(); i > 1; --i)
            std::swap(order[i - 1], order[static_cast<std::size_t>(rng.uniform() * i)]);
          r.property("telescoping_identity").record(check_telescoping(g, p, order), what + " shuffled");
        }

        const ConstraintSet none(g.vertex_count());
        for (Vertex v : g.live_vertices()) {
          bool monotone = true, flat = true;
          BigCount previous = exact_count(g, p, none.with(v, 0));
          for (int n = 1; n <= p.cap(); ++n) {
            BigCount z = exact_count(g, p, none.with(v, n));
            monotone = monotone && z <= previous;
            if (n <= A) flat = flat && z == previous;
            previous = z;
          }
          r.property("monotone_in_pin").record(monotone, what);
          r.property("flat_below_A").record(flat, what);
          // Swapping one small pin for another leaves the count unchanged.
          if (g.live_count() >= 2) {
            const Vertex u = v == 0 ? 1 : 0;
            const BigCount base = exact_count(g, p, none.with(v, A).with(u, p.cap()));
            const BigCount swapped = exact_count(g, p, none.with(v, 0).with(u, p.cap()));
            r.property("canonicalization_invariance").record(base == swapped, what);
          }
        }
      }
}

void sandwich_suite(SuiteResult& r, const SuiteOptions& o) {
  const std::vector<Graph> graphs{families::edgeless(1), families::path(2)};
  for (const auto& g : graphs)
    for (int N : {4, 8, 16})
      for (double alpha : {0.25, 0.45}) {
        const Params p = Params::from_alpha_clamped(N, alpha);
        const auto s = sandwich(g, p, UpperBoundSet::full(g.vertex_count(), p));
        const double scaled = std::pow(N, g.live_count()) * exact_volume_small(g, p.alpha());
        const std::string what = "m=" + std::to_string(g.live_count()) + " " + p.to_string();
        r.property("sandwich_bracket")
            .record(static_cast<double>(s.lower_count) <= scaled + 1e-9 &&
                        scaled <= static_cast<double>(s.upper_count) + 1e-9,
                    what);
        r.property("guaranteed_lower_bound").record(s.guaranteed_lower <= scaled + 1e-9, what);
      }

  int excursions = 0;
  for (int trial = 0; trial < o.trials; ++trial) {
    auto mc = mc_volume(families::path(2), 0.25, 20000, o.seed * 7919 + trial);
    const bool inside = std::abs(mc.estimate - 0.4375) <= 4.0 * mc.stderr_;
    excursions += !inside;
    r.property("mc_agreement").record(inside || excursions <= 1, "trial " + std::to_string(trial));
  }
}

}  // namespace

SuiteResult run_suite(std::string_view name, const SuiteOptions& options) {
  SuiteResult r;
  r.suite = std::string(name);
  if (name == "marginals")
    marginals_suite(r, options);
  else if (name == "decay")
    decay_suite(r, options);
  else if (name == "telescoping")
    telescoping_suite(r, options);
  else if (name == "sandwich")
    sandwich_suite(r, options);
  else
    throw std::invalid_argument("unknown suite '" + std::string(name) + "'");
  return r;
}

}  // namespace polyvol::verify
