#include "tncarve/embedding.hpp"

#include <algorithm>
#include <set>

#include <boost/graph/adjacency_list.hpp>
#include <boost/graph/boyer_myrvold_planar_test.hpp>

namespace tncarve {

Embedding::Embedding(const NetworkGraph& g, std::vector<std::vector<EdgeId>> rotation)
    : rotation_(std::move(rotation)) {
  const std::size_t n = g.vertex_count();
  const std::size_t m = g.edge_count();
  if (!g.is_simple()) throw NotPlanarEmbedding("rotation system requires a simple graph");
  if (!is_connected(g)) throw NotPlanarEmbedding("rotation system requires a connected graph");
  if (rotation_.size() != n) throw NotPlanarEmbedding("rotation has wrong vertex count");

  // Each rotation entry must list exactly the incident edges, once each.
  std::vector<std::vector<std::size_t>> pos(n);  // pos[v][e]: index of e in rotation_[v]
  for (VertexId v = 0; v < n; ++v) {
    pos[v].assign(m, static_cast<std::size_t>(-1));
    for (std::size_t i = 0; i < rotation_[v].size(); ++i) {
      EdgeId e = rotation_[v][i];
      if (e >= m || !g.edge(e).touches(v))
        throw NotPlanarEmbedding("rotation at " + g.name(v) + " lists a non-incident edge");
      if (pos[v][e] != static_cast<std::size_t>(-1))
        throw NotPlanarEmbedding("rotation at " + g.name(v) + " repeats an edge");
      pos[v][e] = i;
    }
    if (rotation_[v].size() != g.degree(v))
      throw NotPlanarEmbedding("rotation at " + g.name(v) + " misses incident edges");
  }

  if (m == 0) {
    if (n != 1) throw NotPlanarEmbedding("edgeless graph with several vertices");
    faces_.push_back({});
    face_vertices_.push_back({0});
    return;
  }

  // Trace faces: arriving at h along e, continue along the cyclic successor
  // of e in rotation(h).
  sides_.assign(m, {0, 0});
  std::vector<int> face_of(2 * m, -1);
  for (std::size_t start = 0; start < 2 * m; ++start) {
    if (face_of[start] >= 0) continue;
    const FaceId f = static_cast<FaceId>(faces_.size());
    faces_.push_back({});
    std::size_t d = start;
    do {
      face_of[d] = static_cast<int>(f);
      EdgeId e = static_cast<EdgeId>(d / 2);
      int dir = static_cast<int>(d % 2);
      faces_[f].push_back({e, dir});
      VertexId head = dir == 0 ? g.edge(e).v : g.edge(e).u;
      const auto& rot = rotation_[head];
      EdgeId next = rot[(pos[head][e] + 1) % rot.size()];
      int next_dir = g.edge(next).u == head ? 0 : 1;
      d = 2 * static_cast<std::size_t>(next) + static_cast<std::size_t>(next_dir);
    } while (d != start);
  }
  for (EdgeId e = 0; e < m; ++e)
    sides_[e] = {static_cast<FaceId>(face_of[2 * e]),
                 static_cast<FaceId>(face_of[2 * e + 1])};

  if (n + faces_.size() != m + 2)
    throw NotPlanarEmbedding("rotation system violates Euler's formula");

  face_vertices_.reserve(faces_.size());
  for (const auto& walk : faces_) {
    std::set<VertexId> vs;
    for (const Dart& dd : walk) vs.insert(dd.dir == 0 ? g.edge(dd.e).u : g.edge(dd.e).v);
    face_vertices_.emplace_back(vs.begin(), vs.end());
  }
}

namespace {

using BoostGraph =
    boost::adjacency_list<boost::vecS, boost::vecS, boost::undirectedS,
                          boost::no_property,
                          boost::property<boost::edge_index_t, int>>;

BoostGraph to_boost(const NetworkGraph& g, bool dedupe) {
  BoostGraph bg(g.vertex_count());
  std::set<std::pair<VertexId, VertexId>> seen;
  for (EdgeId e = 0; e < g.edge_count(); ++e) {
    const Edge& ed = g.edge(e);
    if (dedupe) {
      if (ed.u == ed.v) continue;
      auto key = std::minmax(ed.u, ed.v);
      if (!seen.insert({key.first, key.second}).second) continue;
    }
    boost::add_edge(ed.u, ed.v, static_cast<int>(e), bg);
  }
  return bg;
}

}  // namespace

Embedding planar_embedding(const NetworkGraph& g) {
  if (!g.is_simple())
    throw MalformedInput("planar_embedding requires a simple graph (run simplify first)");
  if (!is_connected(g))
    throw MalformedInput("planar_embedding requires a connected graph");

  if (g.edge_count() == 0) return Embedding(g, {{}});

  BoostGraph bg = to_boost(g, /*dedupe=*/false);
  using EdgeDesc = boost::graph_traits<BoostGraph>::edge_descriptor;
  std::vector<std::vector<EdgeDesc>> order(g.vertex_count());
  bool ok = boost::boyer_myrvold_planarity_test(
      boost::boyer_myrvold_params::graph = bg,
      boost::boyer_myrvold_params::embedding = boost::make_iterator_property_map(
          order.begin(), boost::get(boost::vertex_index, bg)));
  if (!ok) throw NotPlanar("graph admits no planar embedding");

  auto index = boost::get(boost::edge_index, bg);
  std::vector<std::vector<EdgeId>> rotation(g.vertex_count());
  for (VertexId v = 0; v < g.vertex_count(); ++v) {
    rotation[v].reserve(order[v].size());
    for (const EdgeDesc& ed : order[v])
      rotation[v].push_back(static_cast<EdgeId>(boost::get(index, ed)));
  }
  return Embedding(g, std::move(rotation));
}

bool is_planar(const NetworkGraph& g) {
  BoostGraph bg = to_boost(g, /*dedupe=*/true);
  return boost::boyer_myrvold_planarity_test(bg);
}

}  // namespace tncarve
