#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "polyvol/counting.hpp"
#include "polyvol/decay.hpp"
#include "polyvol/graph.hpp"
#include "polyvol/lattice.hpp"
#include "polyvol/verify.hpp"
#include "polyvol/volume.hpp"

using nlohmann::json;
using namespace polyvol;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitFailure = 1;
constexpr int kExitUsage = 2;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Report {
  std::string subcommand;
  json input_digest = nullptr;
  json parameters = {{"N", nullptr}, {"A", nullptr}, {"alpha", nullptr}, {"k", nullptr}, {"c", nullptr}};
  json results = json::object();
  std::vector<std::string> warnings;
  std::vector<std::string> errors;
  std::vector<std::string> violations;
  double seconds = 0.0;

  json to_json() const {
    return {{"subcommand", subcommand.empty() ? json(nullptr) : json(subcommand)},
            {"input_digest", input_digest},
            {"parameters", parameters},
            {"results", results},
            {"timing", {{"wall_seconds", seconds}}},
            {"warnings", warnings},
            {"errors", errors},
            {"violations", violations}};
  }
};

std::string fnv1a64(const std::string& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[32];
  std::snprintf(buf, sizeof buf, "fnv1a64:%016llx", static_cast<unsigned long long>(h));
  return buf;
}

json finite_or_null(double x) { return std::isfinite(x) ? json(x) : json(nullptr); }

json log_estimate(const LogEstimate& e) { return e.is_zero() ? json(nullptr) : json(e.log_value); }

Graph load_graph(const std::string& path, Report& r) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw UsageError("cannot open graph file '" + path + "'");
  std::ostringstream text;
  text << in.rdbuf();
  r.input_digest = fnv1a64(text.str());
  try {
    return parse_edge_list(text.str());
  } catch (const std::exception& e) {
    throw UsageError(path + ": " + e.what());
  }
}

double contraction_of(const Graph& g, const Params& p) {
  const int delta = static_cast<int>(g.max_degree());
  if (delta == 0) return 0.0;
  if (p.A == 0) return std::numeric_limits<double>::infinity();
  return gradient_bound(delta, p.alpha()).c;
}

Params resolve_params(std::optional<int> N, std::optional<int> A, std::optional<double> alpha) {
  if (!N) throw UsageError("--N is required");
  try {
    if (A) return Params::make(*N, *A);
    if (alpha) return Params::from_alpha(*N, *alpha);
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  throw UsageError("one of --A or --alpha is required");
}

int resolve_depth(std::optional<int> depth, const Graph& g, const Params& p, double c, Report& r) {
  if (depth) {
    if (*depth < 0) throw UsageError("--depth must be nonnegative");
    return *depth;
  }
  if (c < 1.0) return choose_depth(g.live_count(), p, ContractionBound{c}).k;
  r.warnings.push_back("no contraction guarantee (c = " + std::to_string(c) +
                       "); depth defaults to the vertex count");
  return static_cast<int>(g.live_count());
}

void echo_params(Report& r, const Params& p, std::optional<int> k, double c) {
  r.parameters["N"] = p.N;
  r.parameters["A"] = p.A;
  r.parameters["alpha"] = p.alpha();
  r.parameters["k"] = k ? json(*k) : json(nullptr);
  r.parameters["c"] = finite_or_null(c);
}

std::string fraction(const Rational& q) {
  return boost::multiprecision::numerator(q).str() + "/" + boost::multiprecision::denominator(q).str();
}

// --- subcommands -----------------------------------------------------------

struct AlphaArgs {
  int delta = 0;
  double tol = 1e-9;
};

void run_alpha(const AlphaArgs& a, Report& r) {
  if (a.delta < 1) throw UsageError("--delta must be at least 1");
  if (!(a.tol > 0.0)) throw UsageError("--tol must be positive");
  const auto t = alpha_threshold(a.delta, a.tol);
  r.parameters["delta"] = a.delta;
  r.parameters["tol"] = a.tol;
  r.parameters["alpha"] = t.alpha_delta;
  r.results = {{"alpha_delta", t.alpha_delta},
               {"bracket", {t.lo, t.hi}},
               {"iterations", t.iterations},
               {"scaled_gap", static_cast<double>(a.delta) * a.delta * (0.5 - t.alpha_delta)}};
  std::cerr << "alpha_" << a.delta << " = " << t.alpha_delta << "\n";
}

struct CountArgs {
  std::string graph;
  std::optional<int> N, A, depth;
  std::optional<double> alpha;
  bool exact = false;
  bool no_memo = false;
};

void run_count(const CountArgs& a, unsigned threads, Report& r) {
  const Graph g = load_graph(a.graph, r);
  const Params p = resolve_params(a.N, a.A, a.alpha);
  const double c = contraction_of(g, p);
  const int k = resolve_depth(a.depth, g, p, c, r);
  echo_params(r, p, k, c);
  r.parameters["memoize"] = !a.no_memo;

  ApproxOptions opts;
  opts.memoize = !a.no_memo;
  opts.threads = threads;
  const auto z = approx_z_detailed(g, DepthBudget{k}, p, opts);
  r.results["log_z"] = log_estimate(z.estimate);
  r.results["z"] = z.estimate.value ? json(*z.estimate.value) : json(nullptr);
  r.results["calls"] = z.stats.calls;
  std::cerr << "log Z~ = " << z.estimate.log_value << "\n";

  if (a.exact) {
    EnumerationBudget budget;
    budget.threads = threads;
    const BigCount exact = exact_count(g, p, ConstraintSet(g.vertex_count()), budget);
    const double log_exact = log_of(exact);
    r.results["z_exact"] = exact.str();
    r.results["log_z_exact"] = finite_or_null(log_exact);
    r.results["ratio"] = finite_or_null(std::exp(z.estimate.log_value - log_exact));
    std::cerr << "Z = " << exact.str() << ", ratio " << std::exp(z.estimate.log_value - log_exact) << "\n";
  }
}

struct ProbArgs {
  std::string graph;
  std::optional<int> N, A, depth;
  std::optional<double> alpha;
  long long vertex = -1;
  int value = -1;
  std::vector<std::string> pins;
  bool exact = false;
};

ConstraintSet parse_pins(const std::vector<std::string>& pins, const Graph& g, const Params& p) {
  ConstraintSet beta(g.vertex_count());
  for (const auto& item : pins) {
    const auto eq = item.find('=');
    if (eq == std::string::npos) throw UsageError("--pin expects u=value, got '" + item + "'");
    long long u = -1, val = -1;
    try {
      std::size_t used = 0;
      u = std::stoll(item.substr(0, eq), &used);
      if (used != eq) throw std::invalid_argument("");
      val = std::stoll(item.substr(eq + 1), &used);
      if (used != item.size() - eq - 1) throw std::invalid_argument("");
    } catch (const std::exception&) {
      throw UsageError("--pin expects u=value, got '" + item + "'");
    }
    if (u < 0 || static_cast<std::size_t>(u) >= g.vertex_count()) throw UsageError("--pin vertex out of range: " + item);
    if (val < 0 || val > p.cap()) throw UsageError("--pin value outside [0, cap]: " + item);
    if (beta.is_pinned(static_cast<Vertex>(u))) throw UsageError("vertex pinned twice: " + item);
    beta.set(static_cast<Vertex>(u), static_cast<int>(val));
  }
  return beta;
}

void run_prob(const ProbArgs& a, unsigned threads, Report& r) {
  const Graph g = load_graph(a.graph, r);
  const Params p = resolve_params(a.N, a.A, a.alpha);
  if (a.vertex < 0 || static_cast<std::size_t>(a.vertex) >= g.vertex_count())
    throw UsageError("--vertex out of range");
  if (a.value < 0 || a.value > p.cap())
    throw UsageError("--value " + std::to_string(a.value) + " outside [0, cap = " + std::to_string(p.cap()) + "]");
  const Vertex v = static_cast<Vertex>(a.vertex);
  const ConstraintSet beta = parse_pins(a.pins, g, p);
  if (beta.is_pinned(v)) throw UsageError("the target vertex may not be pinned");

  const double c = contraction_of(g, p);
  const int k = resolve_depth(a.depth, g, p, c, r);
  echo_params(r, p, k, c);
  r.parameters["vertex"] = v;
  r.parameters["value"] = a.value;
  json pins = json::object();
  for (Vertex u = 0; u < g.vertex_count(); ++u)
    if (auto pin = beta.pin(u)) pins[std::to_string(u)] = *pin;
  r.parameters["pins"] = pins;

  ApproxOptions opts;
  opts.threads = threads;
  const double estimate = approx_prob(g, DepthBudget{k}, v, p, a.value, beta, opts);
  r.results["probability"] = estimate;
  std::cerr << "x~(v" << v << " <- " << a.value << ") = " << estimate << "\n";

  if (a.exact) {
    EnumerationBudget budget;
    budget.threads = threads;
    try {
      const auto x = exact_marginal(g, p, v, a.value, beta, budget);
      const double exact = x.to_double();
      const double err = std::abs(estimate - exact);
      r.results["exact_probability"] = exact;
      r.results["exact_fraction"] = fraction(x.value());
      r.results["abs_error"] = err;
      const double bound = std::pow(c, k);
      r.results["error_bound"] = finite_or_null(bound);
      if (c < 1.0 && err > bound + 1e-12)
        r.violations.push_back("marginal error " + std::to_string(err) + " exceeds c^k = " + std::to_string(bound));
      std::cerr << "exact " << fraction(x.value()) << ", error " << err << "\n";
    } catch (const BudgetExceeded& e) {
      r.warnings.push_back(std::string("exact marginal skipped: ") + e.what());
    }
  }
}

struct VolumeArgs {
  std::string graph;
  std::optional<double> alpha;
  std::optional<int> N, A, depth;
  std::optional<std::uint64_t> mc;
  std::uint64_t seed = 0;
  bool exact_count = false;
  int max_N = 4096;
};

void run_volume(const VolumeArgs& a, unsigned threads, Report& r) {
  const Graph g = load_graph(a.graph, r);
  double alpha = 0.0;
  VolumeOptions opts;
  opts.N = a.N;
  opts.depth = a.depth;
  opts.exact_count = a.exact_count;
  opts.max_N = a.max_N;
  opts.approx.threads = threads;
  opts.budget.threads = threads;
  if (a.A) {
    if (!a.N) throw UsageError("--A requires --N");
    opts.A = a.A;
    alpha = static_cast<double>(*a.A) / *a.N;
  } else if (a.alpha) {
    alpha = *a.alpha;
  } else {
    throw UsageError("one of --alpha or --A is required");
  }
  if (!(alpha > 0.0 && alpha < 0.5)) throw UsageError("alpha must lie in (0, 1/2)");
  if (a.depth && *a.depth < 0) throw UsageError("--depth must be nonnegative");

  VolumeEstimate est;
  try {
    est = volume_estimate(g, alpha, opts);
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  echo_params(r, est.params, est.depth, est.contraction);
  r.parameters["requested_alpha"] = alpha;
  r.parameters["exact_count"] = a.exact_count;
  r.warnings.insert(r.warnings.end(), est.warnings.begin(), est.warnings.end());

  r.results["log_volume"] = log_estimate(est.log_volume);
  r.results["volume"] = est.log_volume.value ? json(*est.log_volume.value) : json(nullptr);
  r.results["log_z"] = log_estimate(est.log_count);
  r.results["alpha_delta"] = est.alpha_delta ? json(*est.alpha_delta) : json(nullptr);
  r.results["no_contraction_guarantee"] = est.no_contraction_guarantee;
  r.results["discretization_capped"] = est.discretization_capped;
  std::cerr << "volume ~ " << std::exp(est.log_volume.log_value) << " (N=" << est.params.N << ", A=" << est.params.A
            << ", k=" << est.depth << ")\n";

  const Params& p = est.params;
  const double scale = static_cast<double>(g.live_count()) * std::log(p.N);
  try {
    const auto s = sandwich(g, p, UpperBoundSet::full(g.vertex_count(), p), opts.budget);
    r.results["sandwich"] = {{"lower_count", s.lower_count.str()},
                             {"upper_count", s.upper_count.str()},
                             {"guaranteed_lower", s.guaranteed_lower},
                             {"lower_volume", std::exp(log_of(s.lower_count) - scale)},
                             {"upper_volume", std::exp(log_of(s.upper_count) - scale)}};
  } catch (const BudgetExceeded& e) {
    r.results["sandwich"] = nullptr;
    r.warnings.push_back(std::string("sandwich counts skipped: ") + e.what());
  }

  if (a.mc) {
    if (*a.mc == 0) throw UsageError("--mc must be positive");
    const auto mc = mc_volume(g, alpha, *a.mc, a.seed, threads);
    r.parameters["mc_samples"] = *a.mc;
    r.parameters["seed"] = a.seed;
    r.results["mc"] = {{"estimate", mc.estimate}, {"stderr", mc.stderr_}};
    std::cerr << "monte carlo " << mc.estimate << " +- " << mc.stderr_ << "\n";
  }
}

struct VerifyArgs {
  std::string suite;
  std::uint64_t seed = 0;
  int trials = 20;
};

void run_verify(const VerifyArgs& a, Report& r) {
  if (a.trials < 1) throw UsageError("--trials must be positive");
  r.parameters["suite"] = a.suite;
  r.parameters["seed"] = a.seed;
  r.parameters["trials"] = a.trials;
  verify::SuiteResult s;
  try {
    s = verify::run_suite(a.suite, {a.seed, a.trials});
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  json props = json::array();
  for (const auto& p : s.properties) {
    props.push_back({{"name", p.name}, {"checked", p.checked}, {"failed", p.failed},
                     {"first_failure", p.ok() ? json(nullptr) : json(p.first_failure)}});
    std::cerr << (p.ok() ? "  ok   " : "  FAIL ") << p.name << " " << p.checked - p.failed << "/" << p.checked << "\n";
    if (!p.ok()) r.violations.push_back(p.name + ": " + p.first_failure);
  }
  r.results["suite"] = s.suite;
  r.results["passed"] = s.ok();
  r.results["properties"] = props;
}

unsigned default_threads() {
  if (const char* env = std::getenv("POLYVOL_THREADS")) {
    try {
      const long n = std::stol(env);
      if (n >= 1) return static_cast<unsigned>(n);
    } catch (const std::exception&) {
    }
  }
  return 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Volume approximation for restricted independent-set polytopes"};
  app.require_subcommand(1);
  unsigned threads = default_threads();
  app.add_option("--threads", threads, "Worker threads (default: $POLYVOL_THREADS or 1)")
      ->check(CLI::PositiveNumber);

  AlphaArgs alpha_args;
  auto* alpha_cmd = app.add_subcommand("alpha", "Contraction threshold alpha_delta for a maximum degree");
  alpha_cmd->add_option("--delta", alpha_args.delta, "Maximum degree")->required();
  alpha_cmd->add_option("--tol", alpha_args.tol, "Bisection tolerance");

  CountArgs count_args;
  auto* count_cmd = app.add_subcommand("count", "Approximate the lattice count Z(G)");
  count_cmd->add_option("--graph", count_args.graph, "Edge-list file")->required();
  count_cmd->add_option("--N", count_args.N, "Relaxation parameter");
  count_cmd->add_option("--A", count_args.A, "Integer restriction A (wins over --alpha)");
  count_cmd->add_option("--alpha", count_args.alpha, "Restriction parameter, rounded to A");
  count_cmd->add_option("--depth", count_args.depth, "Recursion depth k");
  count_cmd->add_flag("--exact", count_args.exact, "Also enumerate Z exactly");
  count_cmd->add_flag("--no-memo", count_args.no_memo, "Disable memoization");

  ProbArgs prob_args;
  auto* prob_cmd = app.add_subcommand("prob", "Approximate a single marginal x(G, v <- n, beta)");
  prob_cmd->add_option("--graph", prob_args.graph, "Edge-list file")->required();
  prob_cmd->add_option("--vertex", prob_args.vertex, "Target vertex")->required();
  prob_cmd->add_option("--value", prob_args.value, "Target value n")->required();
  prob_cmd->add_option("--N", prob_args.N, "Relaxation parameter");
  prob_cmd->add_option("--A", prob_args.A, "Integer restriction A (wins over --alpha)");
  prob_cmd->add_option("--alpha", prob_args.alpha, "Restriction parameter, rounded to A");
  prob_cmd->add_option("--depth", prob_args.depth, "Recursion depth k");
  prob_cmd->add_option("--pin", prob_args.pins, "Constraint u=value (repeatable)");
  prob_cmd->add_flag("--exact", prob_args.exact, "Also compute the exact marginal");

  VolumeArgs volume_args;
  auto* volume_cmd = app.add_subcommand("volume", "Estimate Vol(P_IS(G, alpha))");
  volume_cmd->add_option("--graph", volume_args.graph, "Edge-list file")->required();
  volume_cmd->add_option("--alpha", volume_args.alpha, "Restriction parameter");
  volume_cmd->add_option("--N", volume_args.N, "Relaxation parameter (default m^2 / alpha)");
  volume_cmd->add_option("--A", volume_args.A, "Integer restriction A (wins over --alpha; needs --N)");
  volume_cmd->add_option("--depth", volume_args.depth, "Recursion depth k");
  volume_cmd->add_option("--mc", volume_args.mc, "Monte Carlo cross-check sample count");
  volume_cmd->add_option("--seed", volume_args.seed, "Monte Carlo seed");
  volume_cmd->add_option("--max-N", volume_args.max_N, "Cap on the default N")->check(CLI::PositiveNumber);
  volume_cmd->add_flag("--exact-count", volume_args.exact_count, "Count lattice points exactly");

  VerifyArgs verify_args;
  auto* verify_cmd = app.add_subcommand("verify", "Run an invariant suite");
  verify_cmd->add_option("--suite", verify_args.suite, "Suite name")
      ->required()
      ->check(CLI::IsMember(verify::suite_names()));
  verify_cmd->add_option("--seed", verify_args.seed, "Seed");
  verify_cmd->add_option("--trials", verify_args.trials, "Trials per configuration");

  Report report;
  int code = kExitOk;
  const auto start = std::chrono::steady_clock::now();
  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    report.subcommand = app.get_subcommands().empty() ? "" : app.get_subcommands().front()->get_name();
    report.errors.push_back(e.what());
    std::cerr << "usage error: " << e.what() << "\n";
    std::cout << report.to_json().dump(2) << "\n";
    return kExitUsage;
  }

  report.subcommand = app.get_subcommands().front()->get_name();
  try {
    if (*alpha_cmd)
      run_alpha(alpha_args, report);
    else if (*count_cmd)
      run_count(count_args, threads, report);
    else if (*prob_cmd)
      run_prob(prob_args, threads, report);
    else if (*volume_cmd)
      run_volume(volume_args, threads, report);
    else if (*verify_cmd)
      run_verify(verify_args, report);
  } catch (const UsageError& e) {
    report.errors.push_back(e.what());
    std::cerr << "usage error: " << e.what() << "\n";
    code = kExitUsage;
  } catch (const std::exception& e) {
    report.errors.push_back(e.what());
    std::cerr << "error: " << e.what() << "\n";
    code = kExitFailure;
  }
  report.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  if (code == kExitOk && !report.violations.empty()) code = kExitFailure;
  for (const auto& w : report.warnings) std::cerr << "warning: " << w << "\n";
  std::cout << report.to_json().dump(2) << "\n";
  return code;
}
