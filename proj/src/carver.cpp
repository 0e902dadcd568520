#include "tncarve/carver.hpp"

#include <algorithm>
#include <future>
#include <numeric>
#include <sstream>

#include "tncarve/errors.hpp"
#include "tncarve/ratcatcher.hpp"
#include "tncarve/rng.hpp"

namespace tncarve {

namespace {

// Slack over the width target absorbing the bisection lattice (<= 1e-9)
// and float noise; far below the gap between distinct achievable widths
// for realistic bond dimensions.
constexpr double kWidthSlack = 4e-9;

}  // namespace

bool eligible(const NetworkGraph& minor, EdgeId e, double target_carw) {
  if (minor.log2w(e) > target_carw + kWidthSlack) return false;

  NetworkGraph next = contract_edge(minor, e);
  if (is_biconnected(minor)) {
    if (!is_biconnected(next)) return false;
  } else {
    if (!is_connected(next)) return false;
  }
  if (next.vertex_count() < 3) {
    // The 2-vertex minor's width is its single cut: every remaining bond
    // (contract_edge has already merged the parallels into one).
    double cut = 0.0;
    for (EdgeId i = 0; i < next.edge_count(); ++i) cut += next.log2w(i);
    return cut <= target_carw + kWidthSlack;
  }

  Embedding emb = planar_embedding(next);
  return Ratcatcher(next, emb).decide(target_carw + kWidthSlack);
}

FreeContractionTree decompose(const NetworkGraph& g, const Embedding& emb,
                              double target_carw, std::uint64_t seed,
                              ContractionHistory* history) {
  const std::size_t n = g.vertex_count();
  if (n < 2) throw EmptyGraph("decompose needs at least two tensors");
  if (emb.rotation().size() != n)
    throw NotPlanarEmbedding("embedding does not belong to this graph");
  Embedding(g, emb.rotation());  // re-validate, throws NotPlanarEmbedding

  auto shared = std::make_shared<const NetworkGraph>(g);
  if (history) {
    history->initial = shared;
    history->steps.clear();
  }

  TreeShape shape;
  shape.leaves = n;
  if (n == 2) {
    shape.arcs.push_back({0, 1});
    return label_tree(shared, shape);
  }

  Rng rng(seed);
  NetworkGraph cur = g;
  std::vector<NodeId> node_of(n);  // current minor vertex -> tree node
  std::iota(node_of.begin(), node_of.end(), NodeId{0});
  NodeId next_internal = static_cast<NodeId>(n);
  std::vector<EdgeId> order;

  while (cur.vertex_count() > 2) {
    // Uniform choice among eligible edges: scan a fresh random permutation
    // and take the first edge that passes; edges failing now are simply
    // retested after the next contraction.
    order.resize(cur.edge_count());
    std::iota(order.begin(), order.end(), EdgeId{0});
    for (std::size_t i = order.size(); i > 1; --i)
      std::swap(order[i - 1], order[rng.below(i)]);

    EdgeId chosen = 0;
    bool found = false;
    for (EdgeId e : order)
      if (eligible(cur, e, target_carw)) {
        chosen = e;
        found = true;
        break;
      }
    if (!found) {
      std::ostringstream msg;
      msg << "no eligible edge in a minor with " << cur.vertex_count()
          << " vertices and " << cur.edge_count() << " edges at width target "
          << target_carw << " (the target is below the graph's carving width,"
          << " or an invariant broke)";
      throw NoEligibleEdge(msg.str());
    }

    const VertexId a = std::min(cur.edge(chosen).u, cur.edge(chosen).v);
    const VertexId b = std::max(cur.edge(chosen).u, cur.edge(chosen).v);
    NetworkGraph next = contract_edge(cur, chosen);

    // contract_edge drops vertex b and keeps the order of the others, so
    // ids above b shift down by one and the merged vertex lands on a.
    shape.arcs.push_back({node_of[a], next_internal});
    shape.arcs.push_back({node_of[b], next_internal});
    std::vector<NodeId> next_node_of(next.vertex_count());
    for (VertexId x = 0; x < next.vertex_count(); ++x)
      next_node_of[x] = x == a ? next_internal : node_of[x < b ? x : x + 1];
    node_of = std::move(next_node_of);
    ++next_internal;

    if (history) history->steps.push_back({chosen, next});
    cur = std::move(next);
  }
  shape.arcs.push_back({node_of[0], node_of[1]});

  FreeContractionTree tree = label_tree(shared, shape);
  const Metrics met = metrics(tree);
  if (met.log2_bs > target_carw + 1e-6)
    throw InternalInvariant("assembled tree exceeds the width target");
  return tree;
}

std::pair<FreeContractionTree, Metrics> best_of(const NetworkGraph& g,
                                                const Embedding& emb,
                                                std::size_t n_runs,
                                                std::uint64_t seed,
                                                std::size_t workers) {
  if (n_runs == 0) throw MalformedInput("best_of needs at least one run");
  const double target = carving_width(g, emb).carw;

  struct Candidate {
    std::size_t index;
    FreeContractionTree tree;
    Metrics met;
  };
  // (Ct, Bt, run index), smaller is better.
  auto better = [](const Candidate& l, const Candidate& r) {
    if (l.met.ct != r.met.ct) return l.met.ct < r.met.ct;
    if (l.met.bt != r.met.bt) return l.met.bt < r.met.bt;
    return l.index < r.index;
  };
  auto run_range = [&](std::size_t begin, std::size_t end) -> Candidate {
    Candidate best;
    bool have = false;
    for (std::size_t i = begin; i < end; ++i) {
      Candidate c{i, decompose(g, emb, target, derive_seed(seed, i)), {}};
      c.met = metrics(c.tree);
      if (!have || better(c, best)) {
        best = std::move(c);
        have = true;
      }
    }
    return best;
  };

  Candidate best;
  if (workers <= 1 || n_runs == 1) {
    best = run_range(0, n_runs);
  } else {
    const std::size_t k = std::min(workers, n_runs);
    const std::size_t chunk = (n_runs + k - 1) / k;
    std::vector<std::future<Candidate>> parts;
    for (std::size_t w = 0; w < k; ++w) {
      const std::size_t begin = w * chunk;
      const std::size_t end = std::min(n_runs, begin + chunk);
      if (begin >= end) break;
      parts.push_back(std::async(std::launch::async, run_range, begin, end));
    }
    best = parts.front().get();
    for (std::size_t w = 1; w < parts.size(); ++w) {
      Candidate c = parts[w].get();
      if (better(c, best)) best = std::move(c);
    }
  }
  return {std::move(best.tree), best.met};
}

}  // namespace tncarve
