#pragma once

#include <array>
#include <memory>
#include <utility>
#include <vector>

#include "tncarve/netgraph.hpp"

namespace tncarve {

using NodeId = int;
using ArcId = int;

// Unlabeled contraction-tree skeleton over the vertices of a graph.  Nodes
// 0..leaves-1 are leaves mapped to the like-numbered graph vertex; higher
// ids are internal.  Free shapes have leaves-2 ternary internal nodes,
// rooted shapes leaves-1 with a binary root.
struct TreeShape {
  std::size_t leaves = 0;
  std::vector<std::pair<NodeId, NodeId>> arcs;

  std::size_t node_count() const { return leaves + (leaves >= 2 ? arcs.size() + 1 - leaves : 0); }
};

// Contraction complexity summary.  Bs: heaviest intermediate tensor (max
// arc weight).  Bt: most expensive single pairwise contraction (max node
// weight).  Ct: total multiply-add count (sum of node weights).  For the
// degenerate 2-leaf tree (no internal node) Bt = Ct = the single arc's
// weight, i.e. the one contraction actually performed.
struct Metrics {
  mpz_class bs = 1, bt = 1, ct = 0;
  double log2_bs = 0.0, log2_bt = 0.0;
  std::size_t leaves = 0;
};

// Free (unrooted) contraction tree with 2-cut arc labels and 3-cut node
// labels, immutable once built.  Keeps a shared handle on the network so
// labels stay interpretable.
class FreeContractionTree {
 public:
  const NetworkGraph& graph() const { return *g_; }
  std::shared_ptr<const NetworkGraph> graph_ptr() const { return g_; }

  std::size_t leaves() const { return leaves_; }
  std::size_t node_count() const { return adj_.size(); }
  std::size_t arc_count() const { return arcs_.size(); }
  bool is_leaf(NodeId n) const { return n < static_cast<NodeId>(leaves_); }

  const std::pair<NodeId, NodeId>& arc(ArcId a) const { return arcs_[a]; }
  const std::vector<std::pair<NodeId, NodeId>>& arcs() const { return arcs_; }
  // Arcs incident to a node (1 for leaves, 3 for internal nodes).
  const std::vector<ArcId>& incident_arcs(NodeId n) const { return adj_[n]; }

  const CutSet& arc_cut(ArcId a) const { return arc_cut_[a]; }
  // For leaves this is the incident-edge cut; for internal nodes the 3-cut.
  const CutSet& node_cut(NodeId n) const { return node_cut_[n]; }

  ArcId leaf_arc(VertexId v) const;
  // Leaves on the arc(a).first side of arc a, as sorted graph vertices.
  const std::vector<VertexId>& arc_side(ArcId a) const { return side_[a]; }

  TreeShape shape() const;

 private:
  friend FreeContractionTree label_tree(std::shared_ptr<const NetworkGraph> g,
                                        const TreeShape& shape);

  std::shared_ptr<const NetworkGraph> g_;
  std::size_t leaves_ = 0;
  std::vector<std::pair<NodeId, NodeId>> arcs_;
  std::vector<std::vector<ArcId>> adj_;
  std::vector<CutSet> arc_cut_;
  std::vector<CutSet> node_cut_;
  std::vector<std::vector<VertexId>> side_;
};

// Rooted variant: every node except the root has an arc to its parent, the
// root is binary, and children are kept in a definite order (contraction
// sequences read operands from it).
class RootedContractionTree {
 public:
  // Builds from an explicit children structure: leaves are 0..n-1 (mapped
  // to graph vertices), children[i] = {-1,-1} for leaves.  Throws
  // BadShape/BadLeafMap on malformed input.
  RootedContractionTree(std::shared_ptr<const NetworkGraph> g,
                        std::vector<std::array<NodeId, 2>> children, NodeId root);

  const NetworkGraph& graph() const { return *g_; }
  std::shared_ptr<const NetworkGraph> graph_ptr() const { return g_; }

  std::size_t leaves() const { return leaves_; }
  std::size_t node_count() const { return children_.size(); }
  NodeId root() const { return root_; }
  bool is_leaf(NodeId n) const { return n < static_cast<NodeId>(leaves_); }
  NodeId parent(NodeId n) const { return parent_[n]; }
  const std::array<NodeId, 2>& children(NodeId n) const { return children_[n]; }

  // Cut between the subtree's leaves and the rest; for the root this is the
  // empty cut (weight 1, matching cs(root) = 1).
  const CutSet& arc_above(NodeId n) const { return arc_above_[n]; }
  // Leaf: incident edges; internal: 3-cut of (left, right, rest); root: the
  // 2-cut between its two child subtrees.
  const CutSet& node_cut(NodeId n) const { return node_cut_[n]; }
  // Sorted graph vertices in the subtree rooted at n.
  const std::vector<VertexId>& subtree_vertices(NodeId n) const { return leaves_below_[n]; }

 private:
  std::shared_ptr<const NetworkGraph> g_;
  std::size_t leaves_ = 0;
  NodeId root_ = -1;
  std::vector<std::array<NodeId, 2>> children_;
  std::vector<NodeId> parent_;
  std::vector<CutSet> arc_above_;
  std::vector<CutSet> node_cut_;
  std::vector<std::vector<VertexId>> leaves_below_;
};

// Computes all arc and node labels for a given skeleton.  The shape must be
// a free full binary tree whose leaves biject onto V(g); throws BadShape or
// BadLeafMap otherwise.  Labels are verified against the node-weight
// identity before returning.
FreeContractionTree label_tree(std::shared_ptr<const NetworkGraph> g,
                               const TreeShape& shape);

Metrics metrics(const FreeContractionTree& t);
Metrics metrics(const RootedContractionTree& t);

// Subdivides arc a with a new binary root; both new arcs and the root node
// inherit lab(a).  Children throughout the result are ordered by smallest
// contained vertex id, so rooting is deterministic.
RootedContractionTree root_at(const FreeContractionTree& t, ArcId a);

// Inverse of root_at: splices out the root.
FreeContractionTree unroot(const RootedContractionTree& t);

// Splits an arc of globally minimal weight (tie: smallest arc id); returns
// the rooted tree and the chosen arc.  Ct(rooted) = Ct(free) + w(arc).
std::pair<RootedContractionTree, ArcId> optimal_root(const FreeContractionTree& t);

// w(n)^2 = w(a)w(a')w(a'') for every internal node, exact.
bool node_weight_identity_check(const FreeContractionTree& t);
bool node_weight_identity_check(const RootedContractionTree& t);

// Tree of bags over E(g): coverage, pairwise-incidence, and running
// intersection are the validity conditions.
struct TreeDecomposition {
  std::vector<std::vector<NodeId>> adj;
  std::vector<std::vector<EdgeId>> bags;
};

// Throws InvalidDecomposition if any of the three properties fails.
void validate_tree_decomposition(const TreeDecomposition& td, const NetworkGraph& g);

mpz_class weighted_width(const TreeDecomposition& td, const NetworkGraph& g);

// Bags = node labels (leaf bags kept: they never raise the width).
TreeDecomposition to_tree_decomposition(const FreeContractionTree& t);

// Rebuilds a free ctree from an arbitrary tree-decomposition of the
// network's line graph without increasing the weighted width: attach a leaf
// per vertex at the smallest-index admissible bag, relabel along leaf-leaf
// paths, contract empty and degree-2 nodes, then split high-degree nodes
// greedily by smallest label-union weight.
FreeContractionTree from_tree_decomposition(const TreeDecomposition& td,
                                            std::shared_ptr<const NetworkGraph> g);

}  // namespace tncarve
