#include "tncarve/netgraph.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <set>

namespace tncarve {

namespace {

double log2_u64(std::uint64_t w) { return std::log2(static_cast<double>(w)); }

void accumulate(CutSet& c, EdgeId e, std::uint64_t w) {
  c.edges.push_back(e);
  c.weight *= mpz_class(static_cast<unsigned long>(w));
  c.log2_weight += log2_u64(w);
}

}  // namespace

NetworkGraph::NetworkGraph(std::vector<std::string> names, std::vector<Edge> edges)
    : names_(std::move(names)), edges_(std::move(edges)) {
  if (names_.empty()) throw EmptyGraph("network has no vertices");
  std::set<std::string> seen;
  for (const auto& n : names_) {
    if (n.empty()) throw MalformedInput("empty vertex name");
    if (!seen.insert(n).second) throw MalformedInput("duplicate vertex name: " + n);
  }
  parts_.reserve(names_.size());
  for (const auto& n : names_) parts_.push_back({n});
  free_.assign(names_.size(), {});
  log2w_.reserve(edges_.size());
  for (const auto& e : edges_) {
    if (e.u >= names_.size() || e.v >= names_.size())
      throw NoSuchVertex("edge endpoint out of range");
    if (e.w == 0) throw MalformedInput("bond dimension must be positive");
    log2w_.push_back(log2_u64(e.w));
  }
  rebuild_adjacency();
}

void NetworkGraph::rebuild_adjacency() {
  adj_.assign(parts_.size(), {});
  for (EdgeId e = 0; e < edges_.size(); ++e) {
    adj_[edges_[e].u].push_back(e);
    if (edges_[e].v != edges_[e].u) adj_[edges_[e].v].push_back(e);
    else adj_[edges_[e].u].push_back(e);  // loop listed twice
  }
}

const Edge& NetworkGraph::edge(EdgeId e) const {
  if (e >= edges_.size()) throw NoSuchEdge("edge id " + std::to_string(e));
  return edges_[e];
}

const std::vector<EdgeId>& NetworkGraph::incident(VertexId v) const {
  if (v >= adj_.size()) throw NoSuchVertex("vertex id " + std::to_string(v));
  return adj_[v];
}

std::optional<EdgeId> NetworkGraph::find_edge(VertexId u, VertexId v) const {
  if (u >= adj_.size() || v >= adj_.size()) return std::nullopt;
  for (EdgeId e : adj_[u])
    if (edges_[e].touches(u) && edges_[e].other(u) == v) return e;
  return std::nullopt;
}

std::optional<VertexId> NetworkGraph::find_vertex(const std::string& name) const {
  for (VertexId v = 0; v < names_.size(); ++v)
    if (names_[v] == name) return v;
  return std::nullopt;
}

VertexId NetworkGraph::vertex(const std::string& name) const {
  if (auto v = find_vertex(name)) return *v;
  throw NoSuchVertex(name);
}

const std::vector<std::uint64_t>& NetworkGraph::free_dims(VertexId v) const {
  if (v >= free_.size()) throw NoSuchVertex("vertex id " + std::to_string(v));
  return free_[v];
}

void NetworkGraph::set_free_dims(VertexId v, std::vector<std::uint64_t> dims) {
  if (v >= free_.size()) throw NoSuchVertex("vertex id " + std::to_string(v));
  for (auto d : dims)
    if (d == 0) throw MalformedInput("free index dimension must be positive");
  free_[v] = std::move(dims);
}

bool NetworkGraph::has_free_indices() const {
  for (const auto& f : free_)
    if (!f.empty()) return true;
  return false;
}

bool NetworkGraph::is_simple() const {
  std::set<std::pair<VertexId, VertexId>> seen;
  for (const auto& e : edges_) {
    if (e.u == e.v) return false;
    auto key = std::minmax(e.u, e.v);
    if (!seen.insert({key.first, key.second}).second) return false;
  }
  return true;
}

bool is_connected(const NetworkGraph& g) {
  const std::size_t n = g.vertex_count();
  if (n == 0) return false;
  std::vector<char> vis(n, 0);
  std::vector<VertexId> stack{0};
  vis[0] = 1;
  std::size_t count = 1;
  while (!stack.empty()) {
    VertexId v = stack.back();
    stack.pop_back();
    for (EdgeId e : g.incident(v)) {
      VertexId u = g.edge(e).other(v);
      if (!vis[u]) {
        vis[u] = 1;
        ++count;
        stack.push_back(u);
      }
    }
  }
  return count == n;
}

bool is_biconnected(const NetworkGraph& g) {
  const std::size_t n = g.vertex_count();
  if (n < 2) return false;
  if (!is_connected(g)) return false;
  if (n == 2) return g.edge_count() > 0;

  // Iterative Tarjan lowpoint: any articulation vertex disqualifies.
  std::vector<int> depth(n, -1), low(n, 0), parent(n, -1);
  struct Frame {
    VertexId v;
    std::size_t next_edge;
  };
  std::vector<Frame> stack{{0, 0}};
  depth[0] = 0;
  low[0] = 0;
  std::size_t root_children = 0;
  while (!stack.empty()) {
    Frame& f = stack.back();
    const auto& inc = g.incident(f.v);
    if (f.next_edge < inc.size()) {
      EdgeId e = inc[f.next_edge++];
      VertexId u = g.edge(e).other(f.v);
      if (u == f.v) continue;  // loop
      if (depth[u] < 0) {
        parent[u] = static_cast<int>(f.v);
        depth[u] = depth[f.v] + 1;
        low[u] = depth[u];
        if (f.v == 0) ++root_children;
        stack.push_back({u, 0});
      } else if (static_cast<int>(u) != parent[f.v]) {
        low[f.v] = std::min(low[f.v], depth[u]);
      } else {
        // A parallel edge back to the parent also counts as a back edge;
        // consume the first such occurrence as the tree edge only.
        if (std::count_if(inc.begin(), inc.begin() + f.next_edge,
                          [&](EdgeId x) { return g.edge(x).other(f.v) == u; }) > 1)
          low[f.v] = std::min(low[f.v], depth[u]);
      }
    } else {
      stack.pop_back();
      if (!stack.empty()) {
        VertexId p = stack.back().v;
        low[p] = std::min(low[p], low[f.v]);
        if (p != 0 && low[f.v] >= depth[p]) return false;  // articulation
      }
    }
  }
  return root_children <= 1;
}

NetworkGraph simplify(const NetworkGraph& g) {
  // Merge parallel edges (weight product) and drop loops.
  std::map<std::pair<VertexId, VertexId>, std::uint64_t> merged;
  for (const auto& e : g.edges()) {
    if (e.u == e.v) continue;
    auto key = std::minmax(e.u, e.v);
    auto [it, fresh] = merged.try_emplace({key.first, key.second}, e.w);
    if (!fresh) {
      if (__builtin_mul_overflow(it->second, e.w, &it->second))
        throw TooLarge("parallel bond dimension product overflows 64 bits");
    }
  }

  std::vector<std::pair<std::pair<VertexId, VertexId>, std::uint64_t>> kept(
      merged.begin(), merged.end());

  // Drop weight-1 edges that are not bridges of the remaining edge set
  // (evaluated one at a time, in key order, so the outcome is deterministic).
  // Weight-1 bridges survive: the contraction tree still has to mention both
  // endpoints.
  auto component_count = [&](std::size_t skip) {
    // Union-find over vertices touched by kept edges.
    std::vector<VertexId> uf(g.vertex_count());
    for (VertexId v = 0; v < uf.size(); ++v) uf[v] = v;
    std::function<VertexId(VertexId)> find = [&](VertexId x) {
      while (uf[x] != x) x = uf[x] = uf[uf[x]];
      return x;
    };
    std::size_t comps = 0;
    std::vector<char> present(g.vertex_count(), 0);
    for (std::size_t i = 0; i < kept.size(); ++i) {
      for (VertexId v : {kept[i].first.first, kept[i].first.second})
        if (!present[v]) {
          present[v] = 1;
          ++comps;
        }
      if (i == skip) continue;
      VertexId a = find(kept[i].first.first), b = find(kept[i].first.second);
      if (a != b) {
        uf[a] = b;
        --comps;
      }
    }
    return comps;
  };
  for (std::size_t i = 0; i < kept.size();) {
    if (kept[i].second == 1 && component_count(i) == component_count(kept.size()))
      kept.erase(kept.begin() + static_cast<std::ptrdiff_t>(i));
    else
      ++i;
  }

  // Rebuild on the vertices that still carry an edge.
  std::vector<char> used(g.vertex_count(), 0);
  for (const auto& [uv, w] : kept) used[uv.first] = used[uv.second] = 1;
  std::vector<std::string> names;
  std::vector<VertexId> remap(g.vertex_count(), 0);
  for (VertexId v = 0; v < g.vertex_count(); ++v)
    if (used[v]) {
      remap[v] = static_cast<VertexId>(names.size());
      names.push_back(g.name(v));
    }
  if (names.empty()) throw EmptyGraph("network is empty after simplification");
  std::vector<Edge> edges;
  edges.reserve(kept.size());
  for (const auto& [uv, w] : kept)
    edges.push_back({remap[uv.first], remap[uv.second], w});
  NetworkGraph out(std::move(names), std::move(edges));
  // Simplification strips free indices: out keeps none.
  return out;
}

CutSet cut_set(const NetworkGraph& g, const std::vector<VertexId>& xs,
               const std::vector<VertexId>& ys) {
  std::vector<int> side(g.vertex_count(), 0);
  for (VertexId v : xs) {
    if (v >= g.vertex_count()) throw NoSuchVertex(std::to_string(v));
    side[v] = 1;
  }
  for (VertexId v : ys) {
    if (v >= g.vertex_count()) throw NoSuchVertex(std::to_string(v));
    if (side[v] == 1) throw OverlappingSets("vertex " + g.name(v) + " on both sides");
    side[v] = 2;
  }
  CutSet c;
  for (EdgeId e = 0; e < g.edge_count(); ++e) {
    const Edge& ed = g.edge(e);
    if (side[ed.u] + side[ed.v] == 3) accumulate(c, e, ed.w);
  }
  return c;
}

CutSet boundary(const NetworkGraph& g, const std::vector<VertexId>& xs) {
  std::vector<char> in(g.vertex_count(), 0);
  for (VertexId v : xs) {
    if (v >= g.vertex_count()) throw NoSuchVertex(std::to_string(v));
    in[v] = 1;
  }
  CutSet c;
  for (EdgeId e = 0; e < g.edge_count(); ++e) {
    const Edge& ed = g.edge(e);
    if (in[ed.u] != in[ed.v]) accumulate(c, e, ed.w);
  }
  return c;
}

CutSet cut_weight3(const NetworkGraph& g, const std::vector<VertexId>& xs,
                const std::vector<VertexId>& ys, const std::vector<VertexId>& zs) {
  std::vector<int> block(g.vertex_count(), 0);
  auto place = [&](const std::vector<VertexId>& s, int b) {
    for (VertexId v : s) {
      if (v >= g.vertex_count()) throw NoSuchVertex(std::to_string(v));
      if (block[v] != 0) throw BadPartition("vertex " + g.name(v) + " in two blocks");
      block[v] = b;
    }
  };
  place(xs, 1);
  place(ys, 2);
  place(zs, 3);
  for (VertexId v = 0; v < g.vertex_count(); ++v)
    if (block[v] == 0) throw BadPartition("vertex " + g.name(v) + " not covered");
  CutSet c;
  for (EdgeId e = 0; e < g.edge_count(); ++e) {
    const Edge& ed = g.edge(e);
    if (block[ed.u] != block[ed.v]) accumulate(c, e, ed.w);
  }
  return c;
}

NetworkGraph contract_edge(const NetworkGraph& g, EdgeId e) {
  const Edge& ed = g.edge(e);
  if (ed.u == ed.v) throw NoSuchEdge("cannot contract a loop");
  VertexId a = std::min(ed.u, ed.v), b = std::max(ed.u, ed.v);

  NetworkGraph out;
  out.names_.reserve(g.vertex_count() - 1);
  out.parts_.reserve(g.vertex_count() - 1);
  std::vector<VertexId> remap(g.vertex_count());
  for (VertexId v = 0; v < g.vertex_count(); ++v) {
    if (v == b) {
      remap[v] = 0;  // patched below
      continue;
    }
    remap[v] = static_cast<VertexId>(out.names_.size());
    if (v == a) {
      std::vector<std::string> merged(g.parts(a));
      merged.insert(merged.end(), g.parts(b).begin(), g.parts(b).end());
      std::sort(merged.begin(), merged.end());
      std::string name;
      for (const auto& p : merged) name += p;
      out.names_.push_back(std::move(name));
      out.parts_.push_back(std::move(merged));
    } else {
      out.names_.push_back(g.name(v));
      out.parts_.push_back(g.parts(v));
    }
  }
  remap[b] = remap[a];
  out.free_.assign(out.names_.size(), {});

  // Remap endpoints; merge the parallels this creates; drop new loops.
  std::map<std::pair<VertexId, VertexId>, std::uint64_t> merged;
  for (EdgeId i = 0; i < g.edge_count(); ++i) {
    const Edge& x = g.edge(i);
    VertexId u = remap[x.u], v = remap[x.v];
    if (u == v) continue;
    auto key = std::minmax(u, v);
    auto [it, fresh] = merged.try_emplace({key.first, key.second}, x.w);
    if (!fresh) {
      if (__builtin_mul_overflow(it->second, x.w, &it->second))
        throw TooLarge("contracted bond dimension product overflows 64 bits");
    }
  }
  for (const auto& [uv, w] : merged) {
    out.edges_.push_back({uv.first, uv.second, w});
    out.log2w_.push_back(log2_u64(w));
  }
  out.rebuild_adjacency();
  return out;
}

mpz_class pow2_mpz(unsigned long k) {
  mpz_class r;
  mpz_ui_pow_ui(r.get_mpz_t(), 2, k);
  return r;
}

}  // namespace tncarve
