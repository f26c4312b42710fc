#include <cmath>

#include "doctest.h"
#include "oracles.hpp"
#include "polyvol/families.hpp"
#include "polyvol/marginals.hpp"
#include "polyvol/verify.hpp"

using namespace polyvol;

namespace {

template <typename Scalar>
MarginalTable<Scalar> uniform_table(const Params& p, int d, Scalar value) {
  MarginalTable<Scalar> t(p, d);
  std::vector<Scalar> slice(p.width(), value);
  for (int j = 1; j <= d; ++j)
    for (std::size_t s = 0; s < t.slice_count(j); ++s) t.set_slice(j, s, slice);
  return t;
}

}  // namespace

TEST_CASE("eval_f with no children is uniform") {
  const auto p = Params::make(4, 1);
  MarginalTable<double> t(p, 0);
  for (int n = 0; n <= p.cap(); ++n) {
    CHECK(eval_f(n, t) == doctest::Approx(0.25));
    CHECK(eval_U(n, t) == 1.0);
  }
  auto w = f_all(t).w;
  for (double x : w) CHECK(x == doctest::Approx(0.25));
}

TEST_CASE("eval_f on a uniform single slice") {
  const auto p = Params::make(4, 1);
  auto t = uniform_table<Rational>(p, 1, Rational(1, 4));
  CHECK(eval_f(0, t) == Rational(4, 13));
  CHECK(eval_f(3, t) == Rational(2, 13));
  CHECK(eval_U(0, t) == 1);
  CHECK(eval_L(t) == Rational(13, 4));
  auto w = f_all(t).w;
  const Rational expected[] = {Rational(4, 13), Rational(4, 13), Rational(3, 13), Rational(2, 13)};
  for (int n = 0; n <= 3; ++n) CHECK(w[n] == expected[n]);
  CHECK(w[0] == w[1]);
  CHECK_THROWS_AS(eval_f(4, t), std::out_of_range);
  CHECK_THROWS_AS(eval_f(-1, t), std::out_of_range);
}

TEST_CASE("effective cap restricts support and normalizer") {
  const auto p = Params::make(4, 1);
  auto t = uniform_table<Rational>(p, 1, Rational(1, 4));
  const EffectiveCap ecap{2};
  CHECK(ecap.top(p) == 2);
  CHECK(eval_f(3, t, ecap) == 0);
  // Normalizer over m = 0..2: |S_0| + |S_1| + |S_2| quarters.
  CHECK(eval_L(t, ecap) == Rational(11, 4));
  auto w = f_all(t, ecap).w;
  CHECK(w[0] == Rational(4, 11));
  CHECK(w[2] == Rational(3, 11));
  CHECK(w[3] == 0);
  CHECK(w[0] + w[1] + w[2] + w[3] == 1);
}

TEST_CASE("A and B trivial cases") {
  const auto p = Params::make(4, 1);
  auto t = uniform_table<double>(p, 2, 0.25);
  CHECK(eval_B(1, std::vector<int>{}, t) == 1.0);
  for (int n = 0; n <= 3; ++n) CHECK(eval_A(2, n, std::vector<int>{1, 2}, t) == 1.0);
  CHECK(eval_B(2, std::vector<int>{0}, t) == doctest::Approx(0.25));
  CHECK(eval_A(1, 2, std::vector<int>{0}, t) == doctest::Approx(0.75));
  auto t1 = uniform_table<double>(p, 1, 0.25);
  CHECK(eval_B(1, std::vector<int>{}, t1) <= 1.0);
  CHECK_THROWS(eval_A(3, 0, std::vector<int>{0, 0, 0}, t));
  CHECK_THROWS(eval_B(2, std::vector<int>{}, t));
}

TEST_CASE("distribution validators") {
  const auto p = Params::make(4, 1);
  CHECK_FALSE(fpd_violation<double>(std::vector<double>{0.25, 0.25, 0.25, 0.25}, p));
  CHECK(fpd_violation<double>(std::vector<double>{0.3, 0.2, 0.3, 0.2}, p));
  CHECK(fpd_violation<double>(std::vector<double>{0.4, 0.3, 0.2, 0.1}, p));
  CHECK(fpd_violation<double>(std::vector<double>{0.3, 0.3, 0.2, 0.1}, p));
  CHECK(fpd_violation<double>(std::vector<double>{0.5, 0.5}, p));

  MarginalTable<double> bad(p, 1);
  bad.set_slice(1, 0, std::vector<double>{0.1, 0.1, 0.4, 0.4});
  CHECK(table_violation(bad));
  MarginalTable<double> negative(p, 1);
  negative.set_slice(1, 0, std::vector<double>{0.5, 0.5, -0.5, 0.5});
  CHECK_THROWS_AS(f_all(negative), std::logic_error);
}

TEST_CASE("interpolate") {
  const auto p = Params::make(10, 4);
  auto y = random_fmd(1, 2, p);
  auto z = random_fmd(2, 2, p);
  CHECK(interpolate(y, z, 1.0) == y);
  CHECK(interpolate(y, z, 0.0) == z);
  CHECK_FALSE(table_violation(interpolate(y, z, 0.5)));
  CHECK_THROWS_AS(interpolate(y, random_fmd(1, 1, p), 0.5), std::invalid_argument);
  CHECK_THROWS_AS(interpolate(y, z, 1.5), std::invalid_argument);
}

TEST_CASE("random_fmd") {
  const auto p = Params::make(10, 4);
  CHECK(random_fmd(7, 3, p) == random_fmd(7, 3, p));
  CHECK_FALSE(random_fmd(7, 3, p) == random_fmd(8, 3, p));
  for (std::uint64_t seed = 0; seed < 100; ++seed) CHECK_FALSE(table_violation(random_fmd(seed, 2, p)));
  CHECK(random_fmd(3, 0, p).child_count() == 0);
}

TEST_CASE("bounds on random tables") {
  for (auto p : {Params::make(10, 4), Params::make(20, 9), Params::make(7, 2)})
    for (int d = 1; d <= 3; ++d)
      for (std::uint64_t seed = 0; seed < 20; ++seed) {
        auto t = random_fmd(seed, d, p);
        auto w = f_all(t).w;
        double head = 0.0;
        for (int i = 0; i <= p.cap(); ++i) {
          CHECK(w[i] <= 1.0 / p.A + 1e-12);
          if (i <= p.A) head += w[i];
        }
        CHECK(head >= static_cast<double>(p.A) / p.cap() - 1e-12);
        CHECK(head <= 1.0 + 1e-12);
        CHECK(eval_L(t) >= p.A);
        for (int n = 0; n <= p.cap(); ++n) CHECK(eval_U(n, t) <= 1.0 + 1e-12);

        for (int j = 1; j <= d; ++j) {
          std::vector<int> hi(j, p.cap()), a(j, 0), b(j, p.A);
          for (int n = 0; n <= p.cap(); ++n) {
            CHECK(eval_A(j, n, hi, t) <= 1.0 + 1e-12);
            CHECK(eval_A(j, n, a, t) == eval_A(j, n, b, t));
          }
          CHECK(eval_B(j, std::span<const int>(hi).first(j - 1), t) <= std::pow(1.0 / p.A, j - 1) + 1e-12);
          CHECK(eval_B(j, std::span<const int>(a).first(j - 1), t) ==
                eval_B(j, std::span<const int>(b).first(j - 1), t));
        }
      }
}

TEST_CASE("exact child marginals reproduce the exact marginal") {
  for (std::size_t m = 1; m <= 4; ++m)
    for (const auto& g : families::connected_graphs(m))
      for (int A : {1, 2}) {
        const Params p = Params::make(6, A);
        const auto inst = oracle::instance_of(g);
        for (Vertex v : g.live_vertices()) {
          auto table = exact_child_table(g, p, v, ConstraintSet(m));
          CHECK_FALSE(table_violation(table));
          auto tf = convert_table<double>(table);
          for (int n = 0; n <= p.cap(); ++n) {
            const double truth = oracle::marginal(inst, 6, A, static_cast<int>(v), n);
            CHECK(std::abs(static_cast<double>(eval_f(n, table)) - truth) <= 1e-12);
            CHECK(std::abs(eval_f(n, tf) - truth) <= 1e-12);
          }
        }
        auto check = verify::check_exact_recursion(g, p);
        CHECK(check.exact_match);
        CHECK(check.max_float_error <= 1e-12);
      }
}

TEST_CASE("exact child table under pins leaves infeasible slices absent") {
  const Params p = Params::make(6, 2);
  const auto g = families::path(3);
  // Pin a leaf high; the middle's other neighbor is the only child.
  auto beta = ConstraintSet(3).with(0, 4);
  auto t = exact_child_table(g, p, 1, beta);
  CHECK(t.child_count() == 1);
  CHECK(t.has_slice(1, 0));
  CHECK(child_slots(g, 1, beta) == std::vector<Vertex>{2});

  // Star center with two children: prefix n_1 = 4 forbids nothing, since leaves are not adjacent.
  auto star = families::star(2);
  auto ts = exact_child_table(star, p, 0, ConstraintSet(3));
  for (std::size_t s = 0; s < ts.slice_count(2); ++s) CHECK(ts.has_slice(2, s));
  // In K4 the children are adjacent, so the level-3 prefix (4, 4) breaks an edge.
  auto k4 = exact_child_table(families::complete(4), p, 0, ConstraintSet(4));
  CHECK_FALSE(k4.has_slice(3, k4.encode(std::vector<int>{4, 4})));
  CHECK(k4.has_slice(3, k4.encode(std::vector<int>{4, 2})));
  CHECK(k4.value(3, std::vector<int>{4, 4, 0}) == 0);
  CHECK_FALSE(table_violation(k4));
  CHECK(prefix_feasible(families::path(2), p, ConstraintSet(2), std::vector<Vertex>{0, 1}, std::vector<int>{4, 2}));
  CHECK_FALSE(prefix_feasible(families::path(2), p, ConstraintSet(2), std::vector<Vertex>{0, 1}, std::vector<int>{4, 3}));
}
