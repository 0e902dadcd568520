#pragma once

#include <cstdint>
#include <utility>

#include "tncarve/embedding.hpp"
#include "tncarve/netgraph.hpp"
#include "tncarve/rng.hpp"

namespace tncarve {

// Knobs for the experiment-graph sampler.  mu_log is the natural-log mean
// of the bond distribution; each edge draws its own sigma uniformly from
// [0, sigma_max].  memory_cap_log2 bounds log2 Bs of accepted graphs.
struct GenConfig {
  std::size_t L = 5;
  double mu_log = 0.0;
  double sigma_max = 0.0;
  double memory_cap_log2 = 36.0;
  std::size_t max_rejects = 1000;
  std::uint64_t seed = 0;
};

// Rejection accounting for sample(); attempts counts every draw including
// the accepted one.
struct SampleStats {
  std::size_t attempts = 0;
  std::size_t rejected_biconnectivity = 0;
  std::size_t rejected_width = 0;
};

struct SigmaEstimate {
  double sigma_max = 0.0;
  double acceptance = 0.0;  // measured rate at the returned sigma_max
};

// L x L grid with unit placeholder weights, row-major vertex ids named
// g0..g{L*L-1}, and the canonical planar embedding of the drawing (the
// rotation lists neighbours clockwise).  Its face count is (L-1)^2 + 1.
std::pair<NetworkGraph, Embedding> grid(std::size_t L);

// Reweight g: every edge independently gets max(1, round(exp(N(mu_log,
// sigma_e)))) with sigma_e ~ Uniform(0, cfg.sigma_max).  Topology, ids and
// names are preserved; the draw order is the edge-id order, so results are
// reproducible for a given rng state.
NetworkGraph lognormal_weights(const NetworkGraph& g, const GenConfig& cfg, Rng& rng);

// Natural log of the largest integer d for which the uniform-d L x L grid
// still fits the width cap, located by growing and then bisecting d with
// one game decision per probe.
double calibrate_mu(std::size_t L, double memory_cap_log2);

// Draw lognormal grids until one (a) stays biconnected after removing its
// unit bonds and (b) has log2 Bs within cfg.memory_cap_log2, the width
// measured on the simplified graph.  Throws RejectionBudgetExhausted after
// cfg.max_rejects failed draws.
NetworkGraph sample(const GenConfig& cfg, Rng& rng, SampleStats* stats = nullptr);

// Largest sigma_max (scanned upward in 0.1 steps, capped at 6.0) whose
// Monte-Carlo acceptance rate stays at or above min_acceptance, together
// with the measured rate.  Deterministic for a given seed.
SigmaEstimate estimate_sigma_max(const GenConfig& cfg, std::uint64_t seed,
                                 double min_acceptance = 0.01,
                                 std::size_t draws = 200);

}  // namespace tncarve
