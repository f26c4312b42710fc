#include <cmath>

#include "doctest.h"
#include "oracles.hpp"
#include "polyvol/families.hpp"
#include "polyvol/lattice.hpp"

using namespace polyvol;

TEST_CASE("params validation") {
  CHECK_THROWS_AS(Params::make(0, 0), std::invalid_argument);
  CHECK_THROWS_AS(Params::make(4, 2), std::invalid_argument);
  CHECK_THROWS_AS(Params::make(4, -1), std::invalid_argument);
  const auto p = Params::make(10, 3);
  CHECK(p.cap() == 7);
  CHECK(p.cap() + p.A == p.N);
  CHECK(p.alpha() == doctest::Approx(0.3));
  CHECK(Params::from_alpha(40, 0.25) == Params::make(40, 10));
  CHECK_THROWS_AS(Params::from_alpha(10, 0.49), std::invalid_argument);
  bool clamped = false;
  CHECK(Params::from_alpha_clamped(10, 0.49, &clamped) == Params::make(10, 4));
  CHECK(clamped);
  CHECK(Params::from_alpha_clamped(4, 0.45) == Params::make(4, 1));
  CHECK(Params::from_alpha_clamped(16, 0.45, &clamped) == Params::make(16, 7));
  CHECK_FALSE(clamped);
}

TEST_CASE("s_set examples") {
  CHECK(s_set(5, Params::make(10, 3)) == IntRange{0, 5});
  CHECK(s_set(0, Params::make(10, 3)) == IntRange{0, 7});
  CHECK(s_set(2, Params::make(4, 1)) == IntRange{0, 2});
  CHECK_THROWS_AS(s_set(-1, Params::make(4, 1)), std::out_of_range);
  CHECK_THROWS_AS(s_set(4, Params::make(4, 1)), std::out_of_range);
}

TEST_CASE("is_feasible examples") {
  const auto e = families::path(2);
  const auto p = Params::make(4, 1);
  CHECK(is_feasible(e, p, std::vector<int>{3, 1}));
  CHECK_FALSE(is_feasible(e, p, std::vector<int>{3, 2}));
  CHECK_FALSE(is_feasible(e, p, std::vector<int>{0, 4}));
  CHECK_THROWS_AS(is_feasible(e, p, std::vector<int>{0}), std::invalid_argument);
}

TEST_CASE("exact_count examples") {
  const auto p = Params::make(4, 1);
  CHECK(exact_count(families::edgeless(1), p, ConstraintSet(1)) == 4);
  CHECK(exact_count(families::path(2), p, ConstraintSet(2)) == 13);
  CHECK(exact_count(families::path(2), p, ConstraintSet(2).with(0, 3)) == 2);
  CHECK(exact_count(families::path(2), p, ConstraintSet(2).with(0, 3).with(1, 2)) == 0);
}

TEST_CASE("exact_marginal examples") {
  const auto p = Params::make(4, 1);
  const auto e = families::path(2);
  CHECK(exact_marginal(e, p, 0, 0, ConstraintSet(2)).value() == Rational(4, 13));
  CHECK(exact_marginal(e, p, 0, 3, ConstraintSet(2)).value() == Rational(2, 13));
  for (int n = 0; n <= p.cap(); ++n)
    CHECK(exact_marginal(families::edgeless(1), p, 0, n, ConstraintSet(1)).value() == Rational(1, p.cap() + 1));
  // 0/0 reads as 0.
  auto dead = exact_marginal(e, p, 0, 0, ConstraintSet(2).with(0, 3).with(1, 3));
  CHECK(dead.denominator == 0);
  CHECK(dead.value() == 0);
  CHECK_THROWS_AS(exact_marginal(e, p, 0, 4, ConstraintSet(2)), std::out_of_range);
  CHECK_THROWS_AS(exact_marginal(e.remove_vertex(0), p, 0, 0, ConstraintSet(2)), std::out_of_range);
}

TEST_CASE("exact_count agrees with brute force on small connected graphs") {
  for (std::size_t m = 1; m <= 5; ++m)
    for (const auto& g : families::connected_graphs(m))
      for (int A : {1, 2}) {
        const auto inst = oracle::instance_of(g);
        CHECK(exact_count(g, Params::make(6, A), ConstraintSet(m)) == oracle::count(inst, 6, A));
      }
}

TEST_CASE("marginals sum to one and are monotone and flat") {
  for (std::size_t m = 1; m <= 4; ++m)
    for (const auto& g : families::connected_graphs(m))
      for (int A : {1, 2}) {
        const auto p = Params::make(6, A);
        for (Vertex v : g.live_vertices()) {
          auto all = exact_marginals(g, p, v, ConstraintSet(m));
          Rational sum(0);
          for (const auto& x : all) sum += x.value();
          CHECK(sum == 1);
          for (int n = 0; n < p.cap(); ++n) CHECK(all[n + 1].numerator <= all[n].numerator);
          for (int n = 1; n <= A; ++n) CHECK(all[n].numerator == all[0].numerator);
          for (int n = 0; n <= p.cap(); ++n) CHECK(all[n].value() == exact_marginal(g, p, v, n, ConstraintSet(m)).value());
        }
      }
}

TEST_CASE("pinned target marginal is a point mass") {
  const auto p = Params::make(6, 2);
  const auto g = families::path(3);
  const auto beta = ConstraintSet(3).with(1, 3);
  CHECK(exact_marginal(g, p, 1, 3, beta).value() == 1);
  CHECK(exact_marginal(g, p, 1, 2, beta).value() == 0);
}

TEST_CASE("enumeration budget") {
  const auto p = Params::make(64, 1);
  EnumerationBudget small;
  small.max_log2_states = 10;
  CHECK_THROWS_AS(exact_count(families::path(3), p, ConstraintSet(3), small), BudgetExceeded);
  // Pinned vertices do not count against the budget.
  CHECK_NOTHROW(exact_count(families::path(3), p, ConstraintSet(3).with(0, 0).with(2, 0), small));
}

TEST_CASE("threaded enumeration is identical") {
  const auto p = Params::make(12, 3);
  const auto g = families::cycle(5);
  EnumerationBudget one, four;
  four.threads = 4;
  CHECK(exact_count(g, p, ConstraintSet(5), one) == exact_count(g, p, ConstraintSet(5), four));
  CHECK(exact_count(g, p, ConstraintSet(5), one) == oracle::count(oracle::instance_of(g), 12, 3));
}

TEST_CASE("log_of") {
  CHECK(std::isinf(log_of(BigCount(0))));
  CHECK(log_of(BigCount(13)) == doctest::Approx(std::log(13.0)));
  BigCount huge = BigCount(1) << 3000;
  CHECK(log_of(huge) == doctest::Approx(3000 * std::log(2.0)).epsilon(1e-12));
  CHECK(log_of(huge * 3) == doctest::Approx(3000 * std::log(2.0) + std::log(3.0)).epsilon(1e-12));
}
