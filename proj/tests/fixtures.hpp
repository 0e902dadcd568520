#pragma once

#include <memory>
#include <random>
#include <string>
#include <vector>

#include "tncarve/embedding.hpp"
#include "tncarve/netgraph.hpp"

namespace tncarve::testing {

// Triangle A-B-C with w(AB)=2, w(BC)=3, w(AC)=4.  Edge ids 0,1,2.
inline NetworkGraph triangle() {
  return NetworkGraph({"A", "B", "C"}, {{0, 1, 2}, {1, 2, 3}, {0, 2, 4}});
}

// Path A-B-C with w(AB)=2, w(BC)=3.
inline NetworkGraph path_abc() {
  return NetworkGraph({"A", "B", "C"}, {{0, 1, 2}, {1, 2, 3}});
}

// The 2x3 grid of the worked figure: vertices A B C / D E F, edges
// a={A,B} b={B,C} c={A,D} d={B,E} e={C,F} f={D,E} g={E,F}, ids 0..6.
inline NetworkGraph fig_grid(std::vector<std::uint64_t> w = {2, 2, 2, 2, 2, 2, 2}) {
  return NetworkGraph({"A", "B", "C", "D", "E", "F"},
                      {{0, 1, w[0]},
                       {1, 2, w[1]},
                       {0, 3, w[2]},
                       {1, 4, w[3]},
                       {2, 5, w[4]},
                       {3, 4, w[5]},
                       {4, 5, w[6]}});
}

inline NetworkGraph cycle(std::size_t n, std::uint64_t w = 2) {
  std::vector<std::string> names;
  std::vector<Edge> edges;
  for (std::size_t i = 0; i < n; ++i) {
    names.push_back(std::string(1, static_cast<char>('A' + i)));
    edges.push_back({static_cast<VertexId>(i), static_cast<VertexId>((i + 1) % n), w});
  }
  return NetworkGraph(std::move(names), std::move(edges));
}

// Random connected simple graph: a random spanning tree plus extra edges,
// weights uniform in [2, wmax].
inline NetworkGraph random_connected(std::mt19937_64& rng, std::size_t n, double extra_p = 0.4,
                                     std::uint64_t wmax = 4) {
  std::vector<std::string> names;
  for (std::size_t i = 0; i < n; ++i) names.push_back("v" + std::to_string(i));
  std::vector<Edge> edges;
  std::vector<std::vector<char>> present(n, std::vector<char>(n, 0));
  auto weight = [&] { return 2 + rng() % (wmax - 1); };
  for (std::size_t i = 1; i < n; ++i) {
    std::size_t j = rng() % i;
    edges.push_back({static_cast<VertexId>(j), static_cast<VertexId>(i), weight()});
    present[i][j] = present[j][i] = 1;
  }
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      if (!present[i][j] && std::uniform_real_distribution<>(0, 1)(rng) < extra_p)
        edges.push_back({static_cast<VertexId>(i), static_cast<VertexId>(j), weight()});
  return NetworkGraph(std::move(names), std::move(edges));
}

inline std::shared_ptr<const NetworkGraph> share(NetworkGraph g) {
  return std::make_shared<const NetworkGraph>(std::move(g));
}

// r x c grid, row-major vertex names "g<i>", uniform weight w.
inline NetworkGraph grid_graph(std::size_t r, std::size_t c, std::uint64_t w = 2) {
  std::vector<std::string> names;
  std::vector<Edge> edges;
  for (std::size_t i = 0; i < r * c; ++i) names.push_back("g" + std::to_string(i));
  for (std::size_t i = 0; i < r; ++i)
    for (std::size_t j = 0; j < c; ++j) {
      const VertexId v = static_cast<VertexId>(i * c + j);
      if (j + 1 < c) edges.push_back({v, v + 1, w});
      if (i + 1 < r) edges.push_back({v, static_cast<VertexId>(v + c), w});
    }
  return NetworkGraph(std::move(names), std::move(edges));
}

// Random connected simple planar graph: a random spanning tree plus random
// extra edges, each kept only if the graph stays planar and simple.
inline NetworkGraph random_planar(std::mt19937_64& rng, std::size_t n, int extra_tries = 8,
                                  std::uint64_t wmin = 2, std::uint64_t wmax = 4) {
  std::vector<std::string> names;
  for (std::size_t i = 0; i < n; ++i) names.push_back("v" + std::to_string(i));
  std::vector<Edge> edges;
  std::vector<std::vector<char>> present(n, std::vector<char>(n, 0));
  auto weight = [&] { return wmin + (wmax > wmin ? rng() % (wmax - wmin + 1) : 0); };
  for (std::size_t i = 1; i < n; ++i) {
    std::size_t j = rng() % i;
    edges.push_back({static_cast<VertexId>(j), static_cast<VertexId>(i), weight()});
    present[i][j] = present[j][i] = 1;
  }
  for (int t = 0; t < extra_tries && n >= 2; ++t) {
    std::size_t i = rng() % n, j = rng() % n;
    if (i == j || present[i][j]) continue;
    auto trial = edges;
    trial.push_back({static_cast<VertexId>(std::min(i, j)),
                     static_cast<VertexId>(std::max(i, j)), weight()});
    if (is_planar(NetworkGraph(names, trial))) {
      edges = std::move(trial);
      present[i][j] = present[j][i] = 1;
    }
  }
  return NetworkGraph(std::move(names), std::move(edges));
}

// Rejection-sampled biconnected variant of random_planar (more extra-edge
// attempts make biconnectivity likely; bounded retries keep failures loud).
inline NetworkGraph random_biconnected_planar(std::mt19937_64& rng, std::size_t n,
                                              std::uint64_t wmin = 2,
                                              std::uint64_t wmax = 4) {
  for (int attempt = 0; attempt < 1000; ++attempt) {
    NetworkGraph g = random_planar(rng, n, static_cast<int>(6 * n), wmin, wmax);
    if (is_biconnected(g)) return g;
  }
  throw std::runtime_error("random_biconnected_planar: rejection budget spent");
}

// Uniform-ish random free full binary tree skeleton on n leaves, built by
// subdividing a random arc with each newly inserted leaf.
template <typename Shape>
Shape random_tree_shape(std::mt19937_64& rng, std::size_t n) {
  Shape shape;
  shape.leaves = n;
  if (n == 2) {
    shape.arcs = {{0, 1}};
    return shape;
  }
  // Work on arcs over final ids: leaves 0..n-1, internal n..2n-3.
  int next_internal = static_cast<int>(n);
  shape.arcs = {{0, next_internal}, {1, next_internal}, {2, next_internal}};
  ++next_internal;
  for (std::size_t leaf = 3; leaf < n; ++leaf) {
    std::size_t pick = rng() % shape.arcs.size();
    auto [x, y] = shape.arcs[pick];
    int mid = next_internal++;
    shape.arcs[pick] = {x, mid};
    shape.arcs.push_back({y, mid});
    shape.arcs.push_back({static_cast<int>(leaf), mid});
  }
  return shape;
}

}  // namespace tncarve::testing
