#include <algorithm>
#include <map>
#include <set>

#include <boost/dynamic_bitset.hpp>

#include "tncarve/ctree.hpp"

namespace tncarve {

namespace {

using EdgeBits = boost::dynamic_bitset<>;

mpz_class bits_weight(const NetworkGraph& g, const EdgeBits& bits) {
  mpz_class w = 1;
  for (std::size_t e = bits.find_first(); e != EdgeBits::npos; e = bits.find_next(e))
    w *= mpz_class(static_cast<unsigned long>(g.edge(static_cast<EdgeId>(e)).w));
  return w;
}

std::vector<EdgeBits> bag_bits(const TreeDecomposition& td, const NetworkGraph& g) {
  std::vector<EdgeBits> bits(td.bags.size(), EdgeBits(g.edge_count()));
  for (std::size_t b = 0; b < td.bags.size(); ++b)
    for (EdgeId e : td.bags[b]) {
      if (e >= g.edge_count())
        throw InvalidDecomposition("bag " + std::to_string(b) + " references edge " +
                                   std::to_string(e));
      if (bits[b].test(e))
        throw InvalidDecomposition("bag " + std::to_string(b) + " repeats edge " +
                                   std::to_string(e));
      bits[b].set(e);
    }
  return bits;
}

}  // namespace

void validate_tree_decomposition(const TreeDecomposition& td, const NetworkGraph& g) {
  const std::size_t nn = td.bags.size();
  if (nn == 0 || td.adj.size() != nn)
    throw InvalidDecomposition("node/bag tables disagree or are empty");

  std::size_t half_arcs = 0;
  for (std::size_t x = 0; x < nn; ++x) {
    std::set<NodeId> seen;
    for (NodeId y : td.adj[x]) {
      if (y < 0 || y >= static_cast<NodeId>(nn) || y == static_cast<NodeId>(x) ||
          !seen.insert(y).second)
        throw InvalidDecomposition("bad adjacency at node " + std::to_string(x));
      if (std::find(td.adj[y].begin(), td.adj[y].end(), static_cast<NodeId>(x)) ==
          td.adj[y].end())
        throw InvalidDecomposition("asymmetric adjacency at node " + std::to_string(x));
    }
    half_arcs += td.adj[x].size();
  }
  if (half_arcs != 2 * (nn - 1)) throw InvalidDecomposition("node count and arc count disagree");
  {
    std::vector<char> seen(nn, 0);
    std::vector<NodeId> stack{0};
    seen[0] = 1;
    std::size_t reached = 0;
    while (!stack.empty()) {
      NodeId x = stack.back();
      stack.pop_back();
      ++reached;
      for (NodeId y : td.adj[x])
        if (!seen[y]) {
          seen[y] = 1;
          stack.push_back(y);
        }
    }
    if (reached != nn) throw InvalidDecomposition("bag tree is disconnected");
  }

  const auto bits = bag_bits(td, g);

  // Property 1: every index is covered by some bag.
  EdgeBits covered(g.edge_count());
  for (const auto& b : bits) covered |= b;
  if (!covered.all() && g.edge_count() > 0)
    throw InvalidDecomposition("property 1: some edge of the network appears in no bag");

  // Property 2: indices sharing a tensor appear together in some bag.
  std::vector<EdgeBits> bags_of(g.edge_count(), EdgeBits(nn));
  for (std::size_t b = 0; b < nn; ++b)
    for (std::size_t e = bits[b].find_first(); e != EdgeBits::npos; e = bits[b].find_next(e))
      bags_of[e].set(b);
  for (VertexId v = 0; v < g.vertex_count(); ++v) {
    const auto& inc = g.incident(v);
    for (std::size_t i = 0; i < inc.size(); ++i)
      for (std::size_t j = i + 1; j < inc.size(); ++j) {
        EdgeId e = inc[i], f = inc[j];
        if (e == f) continue;
        if (!(bags_of[e] & bags_of[f]).any())
          throw InvalidDecomposition("property 2: incident edges " + std::to_string(e) + "," +
                                     std::to_string(f) + " share no bag");
      }
  }

  // Property 3: bags holding a given index induce a connected subtree.
  for (EdgeId e = 0; e < g.edge_count(); ++e) {
    const std::size_t total = bags_of[e].count();
    if (total == 0) continue;
    std::vector<char> seen(nn, 0);
    std::vector<NodeId> stack{static_cast<NodeId>(bags_of[e].find_first())};
    seen[stack[0]] = 1;
    std::size_t reached = 0;
    while (!stack.empty()) {
      NodeId x = stack.back();
      stack.pop_back();
      ++reached;
      for (NodeId y : td.adj[x])
        if (!seen[y] && bags_of[e].test(y)) {
          seen[y] = 1;
          stack.push_back(y);
        }
    }
    if (reached != total)
      throw InvalidDecomposition("property 3: bags holding edge " + std::to_string(e) +
                                 " are disconnected");
  }
}

mpz_class weighted_width(const TreeDecomposition& td, const NetworkGraph& g) {
  mpz_class best = 1;
  for (const auto& b : bag_bits(td, g)) best = std::max(best, bits_weight(g, b));
  return best;
}

TreeDecomposition to_tree_decomposition(const FreeContractionTree& t) {
  TreeDecomposition td;
  td.adj.assign(t.node_count(), {});
  td.bags.resize(t.node_count());
  for (ArcId a = 0; a < static_cast<ArcId>(t.arc_count()); ++a) {
    auto [x, y] = t.arc(a);
    td.adj[x].push_back(y);
    td.adj[y].push_back(x);
  }
  for (NodeId x = 0; x < static_cast<NodeId>(t.node_count()); ++x)
    td.bags[x] = t.node_cut(x).edges;
  return td;
}

namespace {

// Mutable tree with maintained node and arc labels used while massaging a
// decomposition into ctree shape.
struct WorkTree {
  std::vector<std::set<int>> nb;
  std::vector<char> alive;
  std::vector<EdgeBits> hd;
  std::map<std::pair<int, int>, EdgeBits> arc;
  std::size_t edge_bits;

  explicit WorkTree(std::size_t bits) : edge_bits(bits) {}

  int add_node() {
    nb.emplace_back();
    alive.push_back(1);
    hd.emplace_back(edge_bits);
    return static_cast<int>(nb.size()) - 1;
  }
  static std::pair<int, int> key(int x, int y) { return {std::min(x, y), std::max(x, y)}; }
  void link(int x, int y, EdgeBits label) {
    nb[x].insert(y);
    nb[y].insert(x);
    arc[key(x, y)] = std::move(label);
  }
  EdgeBits unlink(int x, int y) {
    nb[x].erase(y);
    nb[y].erase(x);
    auto it = arc.find(key(x, y));
    EdgeBits label = std::move(it->second);
    arc.erase(it);
    return label;
  }
};

}  // namespace

FreeContractionTree from_tree_decomposition(const TreeDecomposition& td,
                                            std::shared_ptr<const NetworkGraph> g) {
  validate_tree_decomposition(td, *g);
  const std::size_t n = g->vertex_count();
  const std::size_t nb_bags = td.bags.size();
  if (n < 2) throw BadShape("contraction trees need at least 2 leaves");
  const mpz_class ww_in = weighted_width(td, *g);

  WorkTree wt(g->edge_count());
  for (std::size_t b = 0; b < nb_bags; ++b) wt.add_node();
  for (std::size_t x = 0; x < nb_bags; ++x)
    for (NodeId y : td.adj[x])
      if (static_cast<std::size_t>(y) > x) wt.link(static_cast<int>(x), y, EdgeBits(wt.edge_bits));

  // Step 1a: attach one leaf per network vertex at the smallest-index bag
  // containing all its incident indices (exists by the Helly property once
  // the decomposition validates).
  const auto bits = bag_bits(td, *g);
  std::vector<int> leaf_node(n, -1);
  for (VertexId v = 0; v < n; ++v) {
    EdgeBits need(wt.edge_bits);
    for (EdgeId e : g->incident(v))
      if (g->edge(e).u != g->edge(e).v) need.set(e);
    int at = -1;
    for (std::size_t b = 0; b < nb_bags; ++b)
      if (need.is_subset_of(bits[b])) {
        at = static_cast<int>(b);
        break;
      }
    if (at < 0) throw InternalInvariant("no admissible bag for a leaf despite validation");
    leaf_node[v] = wt.add_node();
    wt.hd[leaf_node[v]] = need;
    wt.link(at, leaf_node[v], EdgeBits(wt.edge_bits));
  }
  auto is_leaf = [&](int x) { return x >= static_cast<int>(nb_bags) && x < static_cast<int>(nb_bags + n); };

  // Step 1b: refill every internal bag and arc by marking, per edge {u,v},
  // the whole leaf(u)..leaf(v) path.
  for (EdgeId e = 0; e < g->edge_count(); ++e) {
    const auto& ed = g->edge(e);
    if (ed.u == ed.v) continue;
    const int src = leaf_node[ed.u], dst = leaf_node[ed.v];
    std::vector<int> par(wt.nb.size(), -2);
    std::vector<int> stack{src};
    par[src] = -1;
    while (par[dst] == -2) {
      if (stack.empty()) throw InternalInvariant("leaf pair unreachable in bag tree");
      int x = stack.back();
      stack.pop_back();
      for (int y : wt.nb[x])
        if (par[y] == -2) {
          par[y] = x;
          stack.push_back(y);
        }
    }
    for (int x = dst; x != -1; x = par[x]) {
      wt.hd[x].set(e);
      if (par[x] != -1) wt.arc[WorkTree::key(x, par[x])].set(e);
    }
  }

  // Step 1c: prune to ctree skeleton shape. Dangling label-free branches
  // disappear tip-first, degree-2 nodes are spliced out, and any surviving
  // empty-bag hub folds into its smallest neighbor.
  bool changed = true;
  while (changed) {
    changed = false;
    for (std::size_t x = 0; x < wt.nb.size(); ++x) {
      if (!wt.alive[x] || is_leaf(static_cast<int>(x))) continue;
      const std::size_t deg = wt.nb[x].size();
      if (deg == 1) {
        if (wt.hd[x].any())
          throw InternalInvariant("degree-1 bag node carries a nonempty label");
        wt.unlink(static_cast<int>(x), *wt.nb[x].begin());
        wt.alive[x] = 0;
        changed = true;
      } else if (deg == 2) {
        int p = *wt.nb[x].begin(), q = *std::next(wt.nb[x].begin());
        if (wt.unlink(static_cast<int>(x), p) != wt.hd[x] ||
            wt.unlink(static_cast<int>(x), q) != wt.hd[x])
          throw InternalInvariant("degree-2 bag node with unbalanced arc labels");
        wt.alive[x] = 0;
        wt.link(p, q, wt.hd[x]);
        changed = true;
      } else if (!wt.hd[x].any()) {
        int s = *wt.nb[x].begin();
        std::vector<int> rest(std::next(wt.nb[x].begin()), wt.nb[x].end());
        wt.unlink(static_cast<int>(x), s);
        for (int y : rest) wt.link(s, y, wt.unlink(static_cast<int>(x), y));
        wt.alive[x] = 0;
        changed = true;
      }
    }
  }

  // Step 3: split nodes of degree > 3, peeling off the pair of arcs with
  // the smallest label-union weight each time.
  for (std::size_t x = 0; x < wt.nb.size(); ++x) {
    while (wt.alive[x] && !is_leaf(static_cast<int>(x)) && wt.nb[x].size() > 3) {
      std::vector<int> ns(wt.nb[x].begin(), wt.nb[x].end());
      std::pair<int, int> pick{-1, -1};
      mpz_class pick_w = -1;
      EdgeBits pick_bits;
      for (std::size_t i = 0; i < ns.size(); ++i)
        for (std::size_t j = i + 1; j < ns.size(); ++j) {
          EdgeBits u = wt.arc[WorkTree::key(static_cast<int>(x), ns[i])] |
                       wt.arc[WorkTree::key(static_cast<int>(x), ns[j])];
          mpz_class w = bits_weight(*g, u);
          if (pick_w < 0 || w < pick_w) {
            pick_w = w;
            pick = {ns[i], ns[j]};
            pick_bits = u;
          }
        }
      int m1 = wt.add_node();
      wt.hd[m1] = pick_bits;
      wt.link(m1, pick.first, wt.unlink(static_cast<int>(x), pick.first));
      wt.link(m1, pick.second, wt.unlink(static_cast<int>(x), pick.second));
      EdgeBits rest(wt.edge_bits);
      for (int y : wt.nb[x]) rest |= wt.arc[WorkTree::key(static_cast<int>(x), y)];
      wt.hd[x] = rest;
      wt.link(m1, static_cast<int>(x), pick_bits & rest);
    }
  }

  // Assemble the shape: leaves keep their vertex ids, surviving internal
  // nodes are packed in ascending working-id order.
  TreeShape shape;
  shape.leaves = n;
  std::vector<NodeId> remap(wt.nb.size(), -1);
  NodeId next = static_cast<NodeId>(n);
  for (VertexId v = 0; v < n; ++v) remap[leaf_node[v]] = static_cast<NodeId>(v);
  for (std::size_t x = 0; x < wt.nb.size(); ++x)
    if (wt.alive[x] && !is_leaf(static_cast<int>(x))) remap[x] = next++;
  for (const auto& [k, label] : wt.arc) {
    (void)label;
    shape.arcs.emplace_back(remap[k.first], remap[k.second]);
  }

  FreeContractionTree out = label_tree(std::move(g), shape);

  // The labels maintained through pruning and splitting must agree with
  // the ground-truth relabeling, and the width must not have grown.
  for (std::size_t x = 0; x < wt.nb.size(); ++x) {
    if (!wt.alive[x] || is_leaf(static_cast<int>(x))) continue;
    EdgeBits expect(wt.edge_bits);
    NodeId nx = remap[x];
    for (EdgeId e : out.node_cut(nx).edges) expect.set(e);
    if (expect != wt.hd[x])
      throw InternalInvariant("maintained bag label diverged from relabeling");
    if (out.node_cut(nx).weight > ww_in)
      throw InternalInvariant("conversion grew the weighted width");
  }
  for (const auto& [k, label] : wt.arc) {
    ArcId a = -1;
    auto want = std::make_pair(std::min(remap[k.first], remap[k.second]),
                               std::max(remap[k.first], remap[k.second]));
    for (ArcId i = 0; i < static_cast<ArcId>(out.arc_count()); ++i)
      if (out.arc(i) == want) a = i;
    if (a < 0) throw InternalInvariant("arc lost between assembly and relabeling");
    EdgeBits expect(wt.edge_bits);
    for (EdgeId e : out.arc_cut(a).edges) expect.set(e);
    if (expect != label) throw InternalInvariant("maintained arc label diverged from relabeling");
  }
  return out;
}

}  // namespace tncarve
