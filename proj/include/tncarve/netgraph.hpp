#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <gmpxx.h>

#include "tncarve/errors.hpp"

namespace tncarve {

using VertexId = std::uint32_t;
using EdgeId = std::uint32_t;

// An index shared by two tensors.  Weight = bond dimension (>= 1).
struct Edge {
  VertexId u = 0;
  VertexId v = 0;
  std::uint64_t w = 1;

  VertexId other(VertexId x) const { return x == u ? v : u; }
  bool touches(VertexId x) const { return x == u || x == v; }
};

// A set of edges together with the product of their bond dimensions,
// carried exactly (arbitrary precision) and in the log2 domain.  Cut
// weights grow multiplicatively, so both views are needed: the exact one
// for cost accounting, the log one for width search.
struct CutSet {
  std::vector<EdgeId> edges;  // strictly increasing
  mpz_class weight = 1;
  double log2_weight = 0.0;

  bool operator==(const CutSet& o) const { return edges == o.edges; }
};

// Undirected weighted multigraph of a tensor network.  Vertices carry the
// sorted list of original tensor names they were merged from, so minors
// produced by contract_edge stay traceable to the input network.  Free
// (dangling) indices are recorded per vertex and only participate in
// simplification and tensor I/O, never in cuts.
class NetworkGraph {
 public:
  NetworkGraph() = default;
  NetworkGraph(std::vector<std::string> names, std::vector<Edge> edges);

  std::size_t vertex_count() const { return parts_.size(); }
  std::size_t edge_count() const { return edges_.size(); }

  const std::vector<Edge>& edges() const { return edges_; }
  const Edge& edge(EdgeId e) const;
  // Edges incident to v, in insertion order.  Loops appear twice.
  const std::vector<EdgeId>& incident(VertexId v) const;
  std::optional<EdgeId> find_edge(VertexId u, VertexId v) const;
  std::size_t degree(VertexId v) const { return incident(v).size(); }

  // Vertex names: a vertex is identified by the sorted concatenation of the
  // input tensor names it absorbed.
  const std::string& name(VertexId v) const { return names_[v]; }
  const std::vector<std::string>& parts(VertexId v) const { return parts_[v]; }
  std::optional<VertexId> find_vertex(const std::string& name) const;
  VertexId vertex(const std::string& name) const;  // throws NoSuchVertex

  // Dangling-index dimensions attached to v (possibly empty).
  const std::vector<std::uint64_t>& free_dims(VertexId v) const;
  void set_free_dims(VertexId v, std::vector<std::uint64_t> dims);
  bool has_free_indices() const;

  double log2w(EdgeId e) const { return log2w_[e]; }

  bool is_simple() const;  // no loops, no parallel edges

 private:
  friend NetworkGraph contract_edge(const NetworkGraph&, EdgeId);

  void rebuild_adjacency();

  std::vector<std::string> names_;                   // display names
  std::vector<std::vector<std::string>> parts_;      // sorted constituents
  std::vector<std::vector<std::uint64_t>> free_;     // dangling dims per vertex
  std::vector<Edge> edges_;
  std::vector<double> log2w_;
  std::vector<std::vector<EdgeId>> adj_;
};

bool is_connected(const NetworkGraph& g);

// True iff g has >= 3 vertices, is connected and has no articulation vertex;
// for exactly two vertices, true iff at least one edge joins them.
bool is_biconnected(const NetworkGraph& g);

// Canonicalization applied before any width computation:
//   * parallel edges merge into one edge whose weight is the product,
//   * loops disappear,
//   * weight-1 edges are dropped unless removing one would disconnect the
//     graph (a weight-1 bridge stays: the contraction tree still has to
//     mention both endpoints),
//   * free indices are stripped,
//   * isolated vertices that result are removed.
// Throws EmptyGraph if nothing remains.
NetworkGraph simplify(const NetworkGraph& g);

// Edges with one endpoint in xs and the other in ys; sets must be disjoint
// (OverlappingSets otherwise).  Vertices outside both sets are ignored.
CutSet cut_set(const NetworkGraph& g, const std::vector<VertexId>& xs,
               const std::vector<VertexId>& ys);

// delta(X): edges leaving xs.
CutSet boundary(const NetworkGraph& g, const std::vector<VertexId>& xs);

// Weight of the 3-cut delta(X,Y,Z) for a partition of all vertices into
// three (possibly empty) blocks; throws BadPartition unless the blocks are
// disjoint and cover the vertex set.
CutSet cut_weight3(const NetworkGraph& g, const std::vector<VertexId>& xs,
                const std::vector<VertexId>& ys, const std::vector<VertexId>& zs);

// The minor g/e: endpoints of e merge into one vertex named by the sorted
// union of their parts; loops vanish, parallel edges merge by weight
// product.  The result is simple if g was.
NetworkGraph contract_edge(const NetworkGraph& g, EdgeId e);

mpz_class pow2_mpz(unsigned long k);

}  // namespace tncarve
