#include "polyvol/volume.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <thread>

#include "polyvol/decay.hpp"
#include "polyvol/rng.hpp"

namespace polyvol {

UpperBoundSet::UpperBoundSet(std::vector<int> bounds, const Params& params) : bounds_(std::move(bounds)) {
  for (std::size_t i = 0; i < bounds_.size(); ++i)
    if (bounds_[i] < params.A || bounds_[i] > params.cap())
      throw std::invalid_argument("upper bound " + std::to_string(bounds_[i]) + " on vertex " +
                                  std::to_string(i) + " outside [A, cap] = [" + std::to_string(params.A) +
                                  ", " + std::to_string(params.cap()) + "]");
}

UpperBoundSet UpperBoundSet::full(std::size_t vertex_count, const Params& params) {
  return UpperBoundSet(std::vector<int>(vertex_count, params.cap()), params);
}

namespace {

std::vector<IntRange> box_of(const Graph& g, const UpperBoundSet& bounds, int shrink) {
  if (bounds.bounds().size() != g.vertex_count())
    throw std::invalid_argument("upper bound set must have one entry per vertex");
  std::vector<IntRange> box;
  box.reserve(g.vertex_count());
  for (int b : bounds.bounds()) box.push_back({0, b - shrink});
  return box;
}

}  // namespace

BigCount count_U(const Graph& g, const Params& params, const UpperBoundSet& bounds,
                 const EnumerationBudget& budget) {
  return count_box(g, box_of(g, bounds, 0), params.N, budget);
}

BigCount count_L(const Graph& g, const Params& params, const UpperBoundSet& bounds,
                 const EnumerationBudget& budget) {
  return count_box(g, box_of(g, bounds, 1), params.N - 2, budget);
}

VolumeSandwich sandwich(const Graph& g, const Params& params, const UpperBoundSet& bounds,
                        const EnumerationBudget& budget) {
  VolumeSandwich out;
  out.lower_count = count_L(g, params, bounds, budget);
  out.upper_count = count_U(g, params, bounds, budget);
  if (params.A > 0) {
    const double factor = 1.0 - static_cast<double>(g.live_count()) / params.A;
    out.guaranteed_lower = std::max(0.0, factor) * static_cast<double>(out.upper_count);
  }
  return out;
}

double exact_volume_small(const Graph& g, double alpha) {
  if (!(alpha >= 0.0 && alpha < 1.0)) throw std::invalid_argument("exact_volume_small: alpha outside [0, 1)");
  const double side = 1.0 - alpha;
  if (g.live_count() == 1 && g.edge_count() == 0) return side;
  if (g.live_count() == 2 && g.edge_count() == 1) {
    const double corner = std::max(0.0, 1.0 - 2.0 * alpha);
    return side * side - corner * corner / 2.0;
  }
  throw std::invalid_argument("exact_volume_small: only a single vertex or a single edge is supported");
}

MonteCarloVolume mc_volume(const Graph& g, double alpha, std::uint64_t samples, std::uint64_t seed,
                           unsigned threads) {
  if (samples == 0) throw std::invalid_argument("mc_volume: samples must be positive");
  if (!(alpha >= 0.0 && alpha < 1.0)) throw std::invalid_argument("mc_volume: alpha outside [0, 1)");
  const double side = 1.0 - alpha;
  const auto live = g.live_vertices();
  const auto edges = g.edges();
  const double box = std::pow(side, static_cast<double>(live.size()));

  constexpr std::uint64_t kChunk = 1 << 16;
  const std::uint64_t chunks = (samples + kChunk - 1) / kChunk;
  std::vector<std::uint64_t> hits(chunks, 0);
  auto run_chunk = [&](std::uint64_t c) {
    Rng rng(seed, c);
    std::vector<double> x(g.vertex_count(), 0.0);
    const std::uint64_t begin = c * kChunk;
    const std::uint64_t end = std::min(samples, begin + kChunk);
    std::uint64_t local = 0;
    for (std::uint64_t s = begin; s < end; ++s) {
      for (Vertex v : live) x[v] = side * rng.uniform();
      bool inside = true;
      for (auto [u, v] : edges)
        if (x[u] + x[v] > 1.0) {
          inside = false;
          break;
        }
      local += inside;
    }
    hits[c] = local;
  };

  const unsigned workers = std::max(1u, std::min<unsigned>(threads, chunks));
  if (workers == 1) {
    for (std::uint64_t c = 0; c < chunks; ++c) run_chunk(c);
  } else {
    std::vector<std::jthread> pool;
    for (unsigned w = 0; w < workers; ++w)
      pool.emplace_back([&, w] {
        for (std::uint64_t c = w; c < chunks; c += workers) run_chunk(c);
      });
  }

  std::uint64_t total = 0;
  for (auto h : hits) total += h;
  const double p = static_cast<double>(total) / static_cast<double>(samples);
  return {box * p, box * std::sqrt(p * (1.0 - p) / static_cast<double>(samples))};
}

VolumeEstimate volume_estimate(const Graph& g, double alpha, const VolumeOptions& options) {
  if (!(alpha > 0.0 && alpha < 0.5)) throw std::invalid_argument("volume_estimate: alpha must lie in (0, 1/2)");
  const std::size_t m = g.live_count();
  if (m == 0) throw std::invalid_argument("volume_estimate: graph has no vertices");

  VolumeEstimate out;
  int N = 0;
  if (options.N) {
    N = *options.N;
  } else {
    const double ideal = std::round(static_cast<double>(m) * m / alpha);
    N = static_cast<int>(std::min<double>(ideal, options.max_N));
    if (ideal > options.max_N) {
      out.discretization_capped = true;
      out.warnings.push_back("discretization error above its target: N capped at " +
                             std::to_string(options.max_N) + " (ideal " + std::to_string(static_cast<long long>(ideal)) + ")");
    }
  }
  if (options.A) {
    out.params = Params::make(N, *options.A);
  } else {
    if (!options.N)
      while (2 * std::llround(alpha * N) >= N) ++N;
    out.params = Params::from_alpha(N, alpha);
  }
  const Params& p = out.params;

  const int delta = static_cast<int>(g.max_degree());
  if (delta >= 1) out.alpha_delta = alpha_threshold(delta).alpha_delta;
  if (delta == 0)
    out.contraction = 0.0;
  else if (p.A == 0)
    out.contraction = std::numeric_limits<double>::infinity();
  else
    out.contraction = gradient_bound(delta, p.alpha()).c;

  if (!(out.contraction < 1.0)) {
    out.no_contraction_guarantee = true;
    out.warnings.push_back("no contraction guarantee: alpha = " + std::to_string(p.alpha()) +
                           " is not above alpha_delta" +
                           (out.alpha_delta ? " = " + std::to_string(*out.alpha_delta) : std::string()));
  }

  if (options.depth)
    out.depth = *options.depth;
  else if (!out.no_contraction_guarantee)
    out.depth = choose_depth(m, p, ContractionBound{out.contraction}).k;
  else
    out.depth = static_cast<int>(m);

  if (options.exact_count) {
    const BigCount z = exact_count(g, p, ConstraintSet(g.vertex_count()), options.budget);
    out.log_count = LogEstimate::from_log(log_of(z));
  } else {
    out.log_count = approx_z(g, DepthBudget{out.depth}, p, options.approx);
  }
  out.log_volume = LogEstimate::from_log(out.log_count.log_value - static_cast<double>(m) * std::log(p.N));
  return out;
}

}  // namespace polyvol
