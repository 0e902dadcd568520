#include "tncarve/ctree.hpp"

#include <algorithm>
#include <functional>

#include <boost/dynamic_bitset.hpp>

namespace tncarve {

namespace {

using EdgeBits = boost::dynamic_bitset<>;

CutSet cut_from_bits(const NetworkGraph& g, const EdgeBits& bits) {
  CutSet c;
  for (std::size_t e = bits.find_first(); e != EdgeBits::npos; e = bits.find_next(e)) {
    c.edges.push_back(static_cast<EdgeId>(e));
    c.weight *= mpz_class(static_cast<unsigned long>(g.edge(static_cast<EdgeId>(e)).w));
    c.log2_weight += g.log2w(static_cast<EdgeId>(e));
  }
  return c;
}

EdgeBits crossing_bits(const NetworkGraph& g, const std::vector<char>& in_x) {
  EdgeBits bits(g.edge_count());
  for (EdgeId e = 0; e < g.edge_count(); ++e)
    if (in_x[g.edge(e).u] != in_x[g.edge(e).v]) bits.set(e);
  return bits;
}

void check_identity(const CutSet& node, const CutSet& a, const CutSet& b, const CutSet& c) {
  if (node.weight * node.weight != a.weight * b.weight * c.weight)
    throw InternalInvariant("node weight identity w(n)^2 = w(a)w(a')w(a'') failed");
}

}  // namespace

ArcId FreeContractionTree::leaf_arc(VertexId v) const {
  if (v >= leaves_) throw NoSuchVertex("no leaf for vertex id " + std::to_string(v));
  return adj_[v].front();
}

TreeShape FreeContractionTree::shape() const { return TreeShape{leaves_, arcs_}; }

FreeContractionTree label_tree(std::shared_ptr<const NetworkGraph> g,
                               const TreeShape& shape) {
  const std::size_t n = g->vertex_count();
  if (shape.leaves != n)
    throw BadLeafMap("tree has " + std::to_string(shape.leaves) + " leaves for " +
                     std::to_string(n) + " vertices");
  if (n < 2) throw BadShape("contraction trees need at least 2 leaves");
  const std::size_t nodes = 2 * n - 2;
  if (shape.arcs.size() != nodes - 1)
    throw BadShape("free tree on " + std::to_string(n) + " leaves must have " +
                   std::to_string(nodes - 1) + " arcs");

  FreeContractionTree t;
  t.g_ = std::move(g);
  t.leaves_ = n;
  t.arcs_.reserve(shape.arcs.size());
  for (auto [a, b] : shape.arcs) {
    if (a < 0 || b < 0 || a >= static_cast<NodeId>(nodes) || b >= static_cast<NodeId>(nodes) || a == b)
      throw BadShape("arc endpoints out of range");
    t.arcs_.emplace_back(std::min(a, b), std::max(a, b));
  }
  std::sort(t.arcs_.begin(), t.arcs_.end());
  if (std::adjacent_find(t.arcs_.begin(), t.arcs_.end()) != t.arcs_.end())
    throw BadShape("duplicate arc");

  t.adj_.assign(nodes, {});
  for (ArcId a = 0; a < static_cast<ArcId>(t.arcs_.size()); ++a) {
    t.adj_[t.arcs_[a].first].push_back(a);
    t.adj_[t.arcs_[a].second].push_back(a);
  }
  for (std::size_t v = 0; v < nodes; ++v) {
    const std::size_t want = v < n ? 1 : 3;
    if (t.adj_[v].size() != want)
      throw BadShape("node " + std::to_string(v) + " has degree " +
                     std::to_string(t.adj_[v].size()));
  }

  // Root the skeleton at leaf 0 and collect, per node, the leaves of its
  // subtree; this orients every arc and yields the partitions.
  std::vector<NodeId> parent(nodes, -1), order;
  order.reserve(nodes);
  {
    std::vector<NodeId> stack{0};
    std::vector<char> seen(nodes, 0);
    seen[0] = 1;
    while (!stack.empty()) {
      NodeId x = stack.back();
      stack.pop_back();
      order.push_back(x);
      for (ArcId a : t.adj_[x]) {
        NodeId y = t.arcs_[a].first == x ? t.arcs_[a].second : t.arcs_[a].first;
        if (!seen[y]) {
          seen[y] = 1;
          parent[y] = x;
          stack.push_back(y);
        }
      }
    }
    if (order.size() != nodes) throw BadShape("arcs do not form a tree");
  }
  std::vector<std::vector<char>> below(nodes, std::vector<char>(n, 0));
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    NodeId x = *it;
    if (t.is_leaf(x)) below[x][x] = 1;
    if (parent[x] >= 0)
      for (std::size_t v = 0; v < n; ++v)
        if (below[x][v]) below[parent[x]][v] = 1;
  }

  std::vector<EdgeBits> arc_bits(t.arcs_.size());
  t.arc_cut_.resize(t.arcs_.size());
  t.side_.resize(t.arcs_.size());
  for (ArcId a = 0; a < static_cast<ArcId>(t.arcs_.size()); ++a) {
    auto [p, q] = t.arcs_[a];
    NodeId child = parent[q] == p ? q : p;
    std::vector<char> in_first(n);
    for (std::size_t v = 0; v < n; ++v)
      in_first[v] = (t.arcs_[a].first == child) == static_cast<bool>(below[child][v]);
    arc_bits[a] = crossing_bits(*t.g_, in_first);
    t.arc_cut_[a] = cut_from_bits(*t.g_, arc_bits[a]);
    for (std::size_t v = 0; v < n; ++v)
      if (in_first[v]) t.side_[a].push_back(static_cast<VertexId>(v));
  }

  t.node_cut_.resize(nodes);
  for (std::size_t x = 0; x < nodes; ++x) {
    EdgeBits bits(t.g_->edge_count());
    for (ArcId a : t.adj_[x]) bits |= arc_bits[a];
    t.node_cut_[x] = cut_from_bits(*t.g_, bits);
    if (!t.is_leaf(static_cast<NodeId>(x)))
      check_identity(t.node_cut_[x], t.arc_cut_[t.adj_[x][0]], t.arc_cut_[t.adj_[x][1]],
                     t.arc_cut_[t.adj_[x][2]]);
  }
  return t;
}

RootedContractionTree::RootedContractionTree(std::shared_ptr<const NetworkGraph> g,
                                             std::vector<std::array<NodeId, 2>> children,
                                             NodeId root)
    : g_(std::move(g)), root_(root), children_(std::move(children)) {
  const std::size_t n = g_->vertex_count();
  leaves_ = n;
  if (n < 2) throw BadShape("contraction trees need at least 2 leaves");
  const std::size_t nodes = 2 * n - 1;
  if (children_.size() != nodes)
    throw BadShape("rooted tree on " + std::to_string(n) + " leaves must have " +
                   std::to_string(nodes) + " nodes");
  if (root_ < static_cast<NodeId>(n) || root_ >= static_cast<NodeId>(nodes))
    throw BadShape("root must be an internal node");

  parent_.assign(nodes, -1);
  for (std::size_t x = 0; x < nodes; ++x) {
    const bool leaf = x < n;
    const auto& ch = children_[x];
    if (leaf) {
      if (ch[0] != -1 || ch[1] != -1) throw BadShape("leaf with children");
      continue;
    }
    for (NodeId c : ch) {
      if (c < 0 || c >= static_cast<NodeId>(nodes) || c == static_cast<NodeId>(x))
        throw BadShape("bad child id");
      if (parent_[c] != -1) throw BadShape("node with two parents");
      parent_[c] = static_cast<NodeId>(x);
    }
    if (ch[0] == ch[1]) throw BadShape("duplicate child");
  }
  if (parent_[root_] != -1) throw BadShape("root has a parent");
  for (std::size_t x = 0; x < nodes; ++x)
    if (static_cast<NodeId>(x) != root_ && parent_[x] == -1)
      throw BadShape("disconnected node " + std::to_string(x));

  // Postorder accumulation of subtree leaf sets; the parent checks above
  // make cycles impossible once connectivity holds.
  leaves_below_.assign(nodes, {});
  std::function<void(NodeId)> fill = [&](NodeId x) {
    if (is_leaf(x)) {
      leaves_below_[x] = {static_cast<VertexId>(x)};
      return;
    }
    for (NodeId c : children_[x]) fill(c);
    std::merge(leaves_below_[children_[x][0]].begin(), leaves_below_[children_[x][0]].end(),
               leaves_below_[children_[x][1]].begin(), leaves_below_[children_[x][1]].end(),
               std::back_inserter(leaves_below_[x]));
  };
  fill(root_);
  if (leaves_below_[root_].size() != n ||
      std::adjacent_find(leaves_below_[root_].begin(), leaves_below_[root_].end()) !=
          leaves_below_[root_].end())
    throw BadLeafMap("leaves do not biject onto graph vertices");

  std::vector<EdgeBits> above_bits(nodes);
  arc_above_.resize(nodes);
  node_cut_.resize(nodes);
  for (std::size_t x = 0; x < nodes; ++x) {
    std::vector<char> in(n, 0);
    for (VertexId v : leaves_below_[x]) in[v] = 1;
    above_bits[x] = x == static_cast<std::size_t>(root_) ? EdgeBits(g_->edge_count())
                                                         : crossing_bits(*g_, in);
    arc_above_[x] = cut_from_bits(*g_, above_bits[x]);
  }
  for (std::size_t x = 0; x < nodes; ++x) {
    EdgeBits bits = above_bits[x];
    if (!is_leaf(static_cast<NodeId>(x)))
      bits |= above_bits[children_[x][0]] | above_bits[children_[x][1]];
    node_cut_[x] = cut_from_bits(*g_, bits);
    if (!is_leaf(static_cast<NodeId>(x)))
      check_identity(node_cut_[x], arc_above_[x], arc_above_[children_[x][0]],
                     arc_above_[children_[x][1]]);
  }
}

namespace {

Metrics metrics_impl(const std::vector<const CutSet*>& arcs,
                     const std::vector<const CutSet*>& internal_nodes, std::size_t leaves) {
  Metrics m;
  m.leaves = leaves;
  for (const CutSet* a : arcs)
    if (a->weight > m.bs) {
      m.bs = a->weight;
      m.log2_bs = a->log2_weight;
    }
  if (internal_nodes.empty()) {
    // 2-leaf degenerate tree: report the single contraction's cost.
    m.bt = m.bs;
    m.log2_bt = m.log2_bs;
    m.ct = m.bs;
    return m;
  }
  for (const CutSet* nd : internal_nodes) {
    if (nd->weight > m.bt) {
      m.bt = nd->weight;
      m.log2_bt = nd->log2_weight;
    }
    m.ct += nd->weight;
  }
  return m;
}

}  // namespace

Metrics metrics(const FreeContractionTree& t) {
  std::vector<const CutSet*> arcs, nodes;
  for (ArcId a = 0; a < static_cast<ArcId>(t.arc_count()); ++a) arcs.push_back(&t.arc_cut(a));
  for (NodeId x = static_cast<NodeId>(t.leaves()); x < static_cast<NodeId>(t.node_count()); ++x)
    nodes.push_back(&t.node_cut(x));
  return metrics_impl(arcs, nodes, t.leaves());
}

Metrics metrics(const RootedContractionTree& t) {
  std::vector<const CutSet*> arcs, nodes;
  for (NodeId x = 0; x < static_cast<NodeId>(t.node_count()); ++x) {
    if (x != t.root()) arcs.push_back(&t.arc_above(x));
    if (!t.is_leaf(x)) nodes.push_back(&t.node_cut(x));
  }
  return metrics_impl(arcs, nodes, t.leaves());
}

RootedContractionTree root_at(const FreeContractionTree& t, ArcId a) {
  if (a < 0 || a >= static_cast<ArcId>(t.arc_count())) throw NoSuchArc(std::to_string(a));
  const std::size_t n = t.leaves();
  const NodeId root = static_cast<NodeId>(2 * n - 2);

  // Minimum vertex per free subtree hanging away from the split arc: used
  // to order children deterministically.
  std::function<VertexId(NodeId, NodeId)> min_leaf = [&](NodeId x, NodeId from) -> VertexId {
    if (t.is_leaf(x)) return static_cast<VertexId>(x);
    VertexId best = static_cast<VertexId>(n);
    for (ArcId ia : t.incident_arcs(x)) {
      NodeId y = t.arc(ia).first == x ? t.arc(ia).second : t.arc(ia).first;
      if (y == from) continue;
      best = std::min(best, min_leaf(y, x));
    }
    return best;
  };

  std::vector<std::array<NodeId, 2>> children(2 * n - 1, {-1, -1});
  NodeId next_internal = static_cast<NodeId>(n);
  // Maps a free node (entered from `from`) to its id in the rooted tree,
  // assigning internal ids in postorder.
  std::function<NodeId(NodeId, NodeId)> build = [&](NodeId x, NodeId from) -> NodeId {
    if (t.is_leaf(x)) return x;
    std::vector<NodeId> kids;
    for (ArcId ia : t.incident_arcs(x)) {
      NodeId y = t.arc(ia).first == x ? t.arc(ia).second : t.arc(ia).first;
      if (y != from) kids.push_back(y);
    }
    if (min_leaf(kids[0], x) > min_leaf(kids[1], x)) std::swap(kids[0], kids[1]);
    NodeId l = build(kids[0], x), r = build(kids[1], x);
    NodeId id = next_internal++;
    children[id] = {l, r};
    return id;
  };

  auto [p, q] = t.arc(a);
  if (min_leaf(p, q) > min_leaf(q, p)) std::swap(p, q);
  NodeId l = build(p, q), r = build(q, p);
  if (next_internal != root) throw InternalInvariant("rooted id assignment out of sync");
  children[root] = {l, r};
  return RootedContractionTree(t.graph_ptr(), std::move(children), root);
}

FreeContractionTree unroot(const RootedContractionTree& t) {
  const std::size_t n = t.leaves();
  TreeShape shape;
  shape.leaves = n;
  if (n == 2) {
    shape.arcs = {{0, 1}};
    return label_tree(t.graph_ptr(), shape);
  }
  // Compact internal ids (root removed) onto n..2n-3, keeping order.
  std::vector<NodeId> remap(t.node_count(), -1);
  NodeId next = static_cast<NodeId>(n);
  for (NodeId x = 0; x < static_cast<NodeId>(t.node_count()); ++x) {
    if (x == t.root()) continue;
    remap[x] = t.is_leaf(x) ? x : next++;
  }
  for (NodeId x = 0; x < static_cast<NodeId>(t.node_count()); ++x) {
    if (t.is_leaf(x) || x == t.root()) continue;
    for (NodeId c : t.children(x)) shape.arcs.emplace_back(remap[x], remap[c]);
  }
  shape.arcs.emplace_back(remap[t.children(t.root())[0]], remap[t.children(t.root())[1]]);
  return label_tree(t.graph_ptr(), shape);
}

std::pair<RootedContractionTree, ArcId> optimal_root(const FreeContractionTree& t) {
  ArcId best = 0;
  for (ArcId a = 1; a < static_cast<ArcId>(t.arc_count()); ++a)
    if (t.arc_cut(a).weight < t.arc_cut(best).weight) best = a;
  return {root_at(t, best), best};
}

bool node_weight_identity_check(const FreeContractionTree& t) {
  for (NodeId x = static_cast<NodeId>(t.leaves()); x < static_cast<NodeId>(t.node_count()); ++x) {
    mpz_class prod = 1;
    for (ArcId a : t.incident_arcs(x)) prod *= t.arc_cut(a).weight;
    if (t.node_cut(x).weight * t.node_cut(x).weight != prod) return false;
  }
  return true;
}

bool node_weight_identity_check(const RootedContractionTree& t) {
  for (NodeId x = 0; x < static_cast<NodeId>(t.node_count()); ++x) {
    if (t.is_leaf(x)) continue;
    mpz_class prod = t.arc_above(x).weight;
    for (NodeId c : t.children(x)) prod *= t.arc_above(c).weight;
    if (t.node_cut(x).weight * t.node_cut(x).weight != prod) return false;
  }
  return true;
}

}  // namespace tncarve
