#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "polyvol/graph.hpp"
#include "polyvol/marginals.hpp"

// Invariant checks shared by the `verify` subcommand and the test suites.
namespace polyvol::verify {

struct PropertyResult {
  std::string name;
  std::uint64_t checked = 0;
  std::uint64_t failed = 0;
  std::string first_failure;

  bool ok() const { return failed == 0; }
  void record(bool pass, const std::string& what);
};

struct SuiteResult {
  std::string suite;
  std::vector<PropertyResult> properties;

  bool ok() const;
  PropertyResult& property(const std::string& name);
};

struct SuiteOptions {
  std::uint64_t seed = 0;
  int trials = 20;
};

std::vector<std::string> suite_names();

/// Throws std::invalid_argument for an unknown suite name.
SuiteResult run_suite(std::string_view name, const SuiteOptions& options);

/// Gradient checks on one table, aggregated over every n in [0, cap].
struct DecayTableCheck {
  double max_analytic_norm = 0.0;
  double max_fd_norm = 0.0;
  double max_fd_gap = 0.0;
  /// Smallest bound - |partial| seen; negative means a violation.
  double min_loose_slack = 0.0;
  double min_tight_slack = 0.0;
  double min_slot_slack = 0.0;
  std::size_t coordinates = 0;
};

DecayTableCheck check_decay_table(const MarginalTable<double>& t, bool with_fd = true, double h = 1e-6);

/// f_n over the exact child marginals of G \ v against exact_marginal(G, v, n),
/// for every live vertex and n, pin-free.
struct RecursionCheck {
  bool exact_match = true;
  double max_float_error = 0.0;
  std::size_t comparisons = 0;
};

RecursionCheck check_exact_recursion(const Graph& g, const Params& params);

/// prod_k x(G, v_k <- 0 | beta_{k-1})^{-1} == Z(G), in rational arithmetic.
bool check_telescoping(const Graph& g, const Params& params, std::span<const Vertex> order);

}  // namespace polyvol::verify
