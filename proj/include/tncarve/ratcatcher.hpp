#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <vector>

#include "tncarve/embedding.hpp"
#include "tncarve/netgraph.hpp"

namespace tncarve {

struct CarvingWidthResult {
  double carw = 0.0;   // log2 domain
  mpz_class bs = 1;    // 2^carw
  bool bs_exact = false;  // true when all weights are powers of two
  double error_bound = 0.0;  // quantization slack on carw (0 on the exact lattice)
  std::size_t decision_calls = 0;
  double elapsed_seconds = 0.0;
};

// Decision procedure for "carving width of a planar network < k" (k in the
// log2 domain), phrased as a pursuit game on the embedded graph.
//
// The pursuer patrols the edges of the graph; two patrol positions are
// adjacent when their edges are consecutive around a common face, i.e. the
// position graph is the medial graph of the embedding.  While the pursuer
// patrols edge x, an edge e is noisy when some closed curve in the sphere
// crossing both x and e has total crossed log-weight below k.  With d the
// shortest-path distance between faces of the planar dual (edge lengths
// log2 w) the cheapest such curve costs
//     2 * log2 w(x)                                          for e = x,
//     log2 w(x) + log2 w(e) + min over the two pairings of
//       d(side of x, side of e) + d(other side, other side)  otherwise.
// The evader sits on vertices and may roam its connected component of the
// quiet subgraph; it is caught when that component has shrunk into the two
// endpoints of the patrolled edge.  Vertices whose own boundary weight
// reaches k are unconditional havens, checked up front: their leaf cut
// appears in every carving.  A state is a pair (position, quiet
// component); the evader survives if the greatest fixed point of "some
// response to every adjacent position survives" is nonempty, which happens
// exactly when the carving width is at least k.
class Ratcatcher {
 public:
  // Re-validates that emb's rotation system belongs to g; throws
  // NotPlanarEmbedding otherwise.  All k-independent structure (dual
  // distances, incidences, position adjacency) is precomputed here.
  Ratcatcher(const NetworkGraph& g, const Embedding& emb);

  // True iff carving width < k.  Pure; safe to call concurrently.
  bool decide(double k) const;

  std::size_t position_count() const { return pos_adj_.size(); }
  std::size_t face_count() const { return nfaces_; }

 private:
  std::size_t nverts_ = 0;
  std::size_t nfaces_ = 0;
  std::vector<std::pair<VertexId, VertexId>> ends_;  // per edge
  std::vector<double> elen_;                         // per edge, log2 w
  std::vector<std::array<FaceId, 2>> sides_;         // per edge
  std::vector<std::vector<EdgeId>> vertex_edges_;    // simple incidence
  std::vector<double> vertex_boundary_;              // log2 w(delta(v))
  double max_vertex_boundary_ = 0.0;
  std::vector<std::vector<double>> face_dist_;       // face x face, dual metric
  std::vector<std::vector<std::uint32_t>> pos_adj_;  // medial adjacency, per edge
};

// Modified binary search for the exact carving width: the lower bound
// starts at the largest single-edge log weight, the upper bound grows
// exponentially until the decision flips, and the flip point is then
// bisected.  With power-of-two weights every achievable cut sum is an
// integer, so the search runs on the integer lattice and the result is
// exact; otherwise it bisects down to the eps lattice and reports the
// residual interval as error_bound.
CarvingWidthResult carving_width(const NetworkGraph& g, const Embedding& emb,
                                 double eps = 1e-9);

}  // namespace tncarve
