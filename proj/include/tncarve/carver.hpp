#pragma once

#include <cstdint>
#include <memory>
#include <utility>
#include <vector>

#include "tncarve/ctree.hpp"
#include "tncarve/embedding.hpp"
#include "tncarve/netgraph.hpp"

namespace tncarve {

// One step of an edge-contraction run: the edge contracted (an id in the
// minor that preceded the step) and the minor that resulted.
struct HistoryStep {
  EdgeId contracted = 0;
  NetworkGraph minor;
};

// Full record of a run.  Every minor is simple and connected, biconnected
// while it still has >= 3 vertices, and has carving width at most the
// width target; the last minor has exactly 2 vertices.
struct ContractionHistory {
  std::shared_ptr<const NetworkGraph> initial;
  std::vector<HistoryStep> steps;
};

// Whether contracting e keeps the minor on track for a width target:
//   1. the edge's log2 weight does not exceed the target,
//   2. the contracted minor stays biconnected while it has >= 3 vertices
//      (when the current minor is already not biconnected, which only
//      happens for degraded inputs outside decompose's precondition, the
//      requirement relaxes to staying connected),
//   3. the contracted minor's carving width does not exceed the target,
//      settled by a single pursuit-game decision at target + lattice slack.
bool eligible(const NetworkGraph& minor, EdgeId e, double target_carw);

// Build a width-optimal free contraction tree by contracting a uniformly
// chosen eligible edge until two vertices remain, then expanding the run
// into cherries: each contraction u+v becomes an internal node with u's
// and v's subtrees as children, and the final two survivors join by the
// root arc.  target_carw must be the carving width of g (lattice
// semantics); the edge choice is driven deterministically by seed.  When
// history is non-null the full run is recorded there.
//
// Throws NoEligibleEdge if some minor has no eligible edge; with a correct
// target on a biconnected planar graph this cannot happen and would
// indicate an internal defect, so the message carries diagnostics.
FreeContractionTree decompose(const NetworkGraph& g, const Embedding& emb,
                              double target_carw, std::uint64_t seed,
                              ContractionHistory* history = nullptr);

// Run decompose n_runs times with per-run seeds derived from seed and keep
// the tree minimizing exact Ct, breaking ties by smaller Bt and then by
// lowest run index.  workers > 1 fans the independent runs out over that
// many threads; the index tie-break keeps the result identical either way.
std::pair<FreeContractionTree, Metrics> best_of(const NetworkGraph& g,
                                                const Embedding& emb,
                                                std::size_t n_runs,
                                                std::uint64_t seed,
                                                std::size_t workers = 1);

}  // namespace tncarve
