#include "tncarve/netgen.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <string>
#include <vector>

#include "tncarve/embedding.hpp"
#include "tncarve/errors.hpp"
#include "tncarve/netgraph.hpp"
#include "tncarve/ratcatcher.hpp"

namespace tncarve {

namespace {

void check_config(const GenConfig& cfg) {
  if (cfg.L < 2) throw MalformedInput("grid side must be at least 2");
  if (cfg.sigma_max < 0.0) throw MalformedInput("sigma_max must be non-negative");
  if (cfg.memory_cap_log2 <= 0.0) throw MalformedInput("memory cap must be positive");
}

NetworkGraph reweight(const NetworkGraph& g, const std::vector<std::uint64_t>& w) {
  std::vector<std::string> names;
  names.reserve(g.vertex_count());
  for (VertexId v = 0; v < g.vertex_count(); ++v) names.push_back(g.name(v));
  std::vector<Edge> edges;
  edges.reserve(g.edge_count());
  for (EdgeId e = 0; e < g.edge_count(); ++e)
    edges.push_back({g.edge(e).u, g.edge(e).v, w[e]});
  return NetworkGraph(std::move(names), std::move(edges));
}

double uniform_grid_width(const NetworkGraph& base, const Embedding& emb,
                          std::uint64_t d) {
  std::vector<std::uint64_t> w(base.edge_count(), d);
  return carving_width(reweight(base, w), emb).carw;
}

}  // namespace

std::pair<NetworkGraph, Embedding> grid(std::size_t L) {
  if (L < 2) throw MalformedInput("grid side must be at least 2");
  const auto vid = [L](std::size_t r, std::size_t c) {
    return static_cast<VertexId>(r * L + c);
  };
  std::vector<std::string> names(L * L);
  for (std::size_t i = 0; i < L * L; ++i) names[i] = "g" + std::to_string(i);

  // Edges in row-major order: the rightward bond, then the downward bond.
  std::vector<Edge> edges;
  std::vector<std::vector<EdgeId>> right(L, std::vector<EdgeId>(L, 0));
  std::vector<std::vector<EdgeId>> down(L, std::vector<EdgeId>(L, 0));
  for (std::size_t r = 0; r < L; ++r)
    for (std::size_t c = 0; c < L; ++c) {
      if (c + 1 < L) {
        right[r][c] = static_cast<EdgeId>(edges.size());
        edges.push_back({vid(r, c), vid(r, c + 1), 1});
      }
      if (r + 1 < L) {
        down[r][c] = static_cast<EdgeId>(edges.size());
        edges.push_back({vid(r, c), vid(r + 1, c), 1});
      }
    }
  NetworkGraph g(std::move(names), std::move(edges));

  // Clockwise rotation of the drawing: up, right, down, left.
  std::vector<std::vector<EdgeId>> rotation(L * L);
  for (std::size_t r = 0; r < L; ++r)
    for (std::size_t c = 0; c < L; ++c) {
      auto& rot = rotation[vid(r, c)];
      if (r > 0) rot.push_back(down[r - 1][c]);
      if (c + 1 < L) rot.push_back(right[r][c]);
      if (r + 1 < L) rot.push_back(down[r][c]);
      if (c > 0) rot.push_back(right[r][c - 1]);
    }
  Embedding emb(g, std::move(rotation));
  if (emb.face_count() != (L - 1) * (L - 1) + 1)
    throw InternalInvariant("grid embedding has an unexpected face count");
  return {std::move(g), std::move(emb)};
}

NetworkGraph lognormal_weights(const NetworkGraph& g, const GenConfig& cfg, Rng& rng) {
  check_config(cfg);
  std::vector<std::uint64_t> w(g.edge_count());
  for (EdgeId e = 0; e < g.edge_count(); ++e) {
    const double sigma = rng.uniform(0.0, cfg.sigma_max);
    // Clamp before rounding: an extreme tail draw must stay representable;
    // the width cap rejects such graphs anyway.
    const double x = std::min(std::exp(cfg.mu_log + sigma * rng.normal()), 4.0e18);
    w[e] = static_cast<std::uint64_t>(std::max(1.0, std::round(x)));
  }
  return reweight(g, w);
}

double calibrate_mu(std::size_t L, double memory_cap_log2) {
  if (L < 2) throw MalformedInput("grid side must be at least 2");
  if (memory_cap_log2 <= 0.0) throw MalformedInput("memory cap must be positive");
  auto [base, emb] = grid(L);
  auto fits = [&](std::uint64_t d) {
    return uniform_grid_width(base, emb, d) <= memory_cap_log2 + 1e-9;
  };
  // Width grows monotonically in d and d = 1 always fits (width 0).
  std::uint64_t lo = 1, hi = 2;
  while (fits(hi)) {
    lo = hi;
    if (hi > (std::uint64_t{1} << 62)) break;
    hi *= 2;
  }
  while (hi - lo > 1) {
    const std::uint64_t mid = lo + (hi - lo) / 2;
    if (fits(mid))
      lo = mid;
    else
      hi = mid;
  }
  return std::log(static_cast<double>(lo));
}

NetworkGraph sample(const GenConfig& cfg, Rng& rng, SampleStats* stats) {
  check_config(cfg);
  auto [base, emb] = grid(cfg.L);
  SampleStats local;
  SampleStats& st = stats ? *stats : local;
  st = {};
  while (st.attempts < cfg.max_rejects) {
    ++st.attempts;
    NetworkGraph g = lognormal_weights(base, cfg, rng);

    // Criterion 1: biconnected once the unit bonds are gone.
    std::vector<std::string> names;
    for (VertexId v = 0; v < g.vertex_count(); ++v) names.push_back(g.name(v));
    std::vector<Edge> heavy;
    for (EdgeId e = 0; e < g.edge_count(); ++e)
      if (g.edge(e).w >= 2) heavy.push_back(g.edge(e));
    NetworkGraph stripped(std::move(names), std::move(heavy));
    if (!is_biconnected(stripped)) {
      ++st.rejected_biconnectivity;
      continue;
    }

    // Criterion 2: the simplified graph's width fits the memory cap.
    NetworkGraph s = simplify(g);
    if (carving_width(s, planar_embedding(s)).carw > cfg.memory_cap_log2 + 1e-9) {
      ++st.rejected_width;
      continue;
    }
    return g;
  }
  std::ostringstream msg;
  msg << "no acceptable graph in " << cfg.max_rejects << " draws (L=" << cfg.L
      << ", mu=" << cfg.mu_log << ", sigma_max=" << cfg.sigma_max << "): "
      << st.rejected_biconnectivity << " failed biconnectivity, "
      << st.rejected_width << " failed the width cap";
  throw RejectionBudgetExhausted(msg.str());
}

SigmaEstimate estimate_sigma_max(const GenConfig& cfg, std::uint64_t seed,
                                 double min_acceptance, std::size_t draws) {
  check_config(cfg);
  if (draws == 0) throw MalformedInput("estimate_sigma_max needs draws >= 1");
  auto [base, emb] = grid(cfg.L);

  auto acceptance = [&](double sigma, std::uint64_t probe_seed) {
    GenConfig probe = cfg;
    probe.sigma_max = sigma;
    Rng rng(probe_seed);
    std::size_t ok = 0;
    for (std::size_t i = 0; i < draws; ++i) {
      NetworkGraph g = lognormal_weights(base, probe, rng);
      std::vector<std::string> names;
      for (VertexId v = 0; v < g.vertex_count(); ++v) names.push_back(g.name(v));
      std::vector<Edge> heavy;
      for (EdgeId e = 0; e < g.edge_count(); ++e)
        if (g.edge(e).w >= 2) heavy.push_back(g.edge(e));
      NetworkGraph stripped(std::move(names), std::move(heavy));
      if (!is_biconnected(stripped)) continue;
      NetworkGraph s = simplify(g);
      if (carving_width(s, planar_embedding(s)).carw > cfg.memory_cap_log2 + 1e-9)
        continue;
      ++ok;
    }
    return static_cast<double>(ok) / static_cast<double>(draws);
  };

  SigmaEstimate best;
  best.sigma_max = 0.0;
  best.acceptance = acceptance(0.0, derive_seed(seed, 0));
  for (std::size_t j = 1; j <= 60; ++j) {
    const double sigma = 0.1 * static_cast<double>(j);
    const double rate = acceptance(sigma, derive_seed(seed, j));
    if (rate < min_acceptance) break;
    best.sigma_max = sigma;
    best.acceptance = rate;
  }
  return best;
}

}  // namespace tncarve
