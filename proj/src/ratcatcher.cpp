#include "tncarve/ratcatcher.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <queue>

#include "tncarve/errors.hpp"

namespace tncarve {

Ratcatcher::Ratcatcher(const NetworkGraph& g, const Embedding& emb) {
  if (emb.rotation().size() != g.vertex_count())
    throw NotPlanarEmbedding("embedding does not belong to this graph");
  // Re-trace from the rotation system so a stale or foreign embedding
  // cannot slip through; this also re-checks Euler's formula.
  Embedding checked(g, emb.rotation());

  nverts_ = g.vertex_count();
  nfaces_ = checked.face_count();
  const std::size_t ne = g.edge_count();
  ends_.resize(ne);
  elen_.resize(ne);
  sides_.resize(ne);
  for (EdgeId e = 0; e < ne; ++e) {
    ends_[e] = {g.edge(e).u, g.edge(e).v};
    elen_[e] = g.log2w(e);
    sides_[e] = checked.sides(e);
  }
  vertex_edges_.assign(nverts_, {});
  vertex_boundary_.assign(nverts_, 0.0);
  for (EdgeId e = 0; e < ne; ++e) {
    vertex_edges_[ends_[e].first].push_back(e);
    vertex_edges_[ends_[e].second].push_back(e);
    vertex_boundary_[ends_[e].first] += elen_[e];
    vertex_boundary_[ends_[e].second] += elen_[e];
  }
  max_vertex_boundary_ = 0.0;
  for (double b : vertex_boundary_) max_vertex_boundary_ = std::max(max_vertex_boundary_, b);

  // All-pairs dual distances by Dijkstra from every face.
  std::vector<std::vector<std::pair<FaceId, double>>> dual(nfaces_);
  for (EdgeId e = 0; e < ne; ++e) {
    auto [f1, f2] = sides_[e];
    if (f1 == f2) continue;  // a bridge never separates its two sides
    dual[f1].push_back({f2, elen_[e]});
    dual[f2].push_back({f1, elen_[e]});
  }
  face_dist_.resize(nfaces_);
  for (FaceId s = 0; s < nfaces_; ++s) {
    auto& d = face_dist_[s];
    d.assign(nfaces_, std::numeric_limits<double>::infinity());
    d[s] = 0.0;
    using Item = std::pair<double, FaceId>;
    std::priority_queue<Item, std::vector<Item>, std::greater<>> pq;
    pq.push({0.0, s});
    while (!pq.empty()) {
      auto [dist, f] = pq.top();
      pq.pop();
      if (dist > d[f]) continue;
      for (auto [to, len] : dual[f])
        if (dist + len < d[to]) {
          d[to] = dist + len;
          pq.push({d[to], to});
        }
    }
  }

  // Positions are edges; neighbours are the edges consecutive around a
  // common face (medial-graph adjacency), read off the face walks.
  pos_adj_.assign(ne, {});
  for (FaceId f = 0; f < nfaces_; ++f) {
    const auto walk = checked.face(f);
    const std::size_t m = walk.size();
    for (std::size_t i = 0; i < m; ++i) {
      const EdgeId a = walk[i].e;
      const EdgeId b = walk[(i + 1) % m].e;
      if (a == b) continue;
      pos_adj_[a].push_back(b);
      pos_adj_[b].push_back(a);
    }
  }
  for (auto& adj : pos_adj_) {
    std::sort(adj.begin(), adj.end());
    adj.erase(std::unique(adj.begin(), adj.end()), adj.end());
  }
}

bool Ratcatcher::decide(double k) const {
  // A vertex whose boundary already weighs k or more is a permanent haven:
  // its leaf cut appears in every carving.
  if (max_vertex_boundary_ >= k) return false;

  const std::size_t npos = pos_adj_.size();
  const std::size_t ne = ends_.size();

  // Quiet components per position.  From patrol edge x, edge e stays quiet
  // unless a closed curve cheaper than k crosses both x and e.
  std::vector<std::vector<int>> comp(npos);  // vertex -> component
  std::vector<std::vector<std::vector<VertexId>>> members(npos);
  std::vector<std::size_t> state_base(npos + 1, 0);
  std::vector<char> edge_quiet(ne);
  std::vector<VertexId> stack;
  for (std::size_t x = 0; x < npos; ++x) {
    const auto [f1, f2] = sides_[x];
    const double wx = elen_[x];
    for (EdgeId e = 0; e < ne; ++e) {
      if (e == x) {
        edge_quiet[e] = !(2.0 * wx < k);
        continue;
      }
      const auto [g1, g2] = sides_[e];
      const double straight = face_dist_[f1][g1] + face_dist_[f2][g2];
      const double crossed = face_dist_[f1][g2] + face_dist_[f2][g1];
      edge_quiet[e] = !(wx + elen_[e] + std::min(straight, crossed) < k);
    }
    auto& cx = comp[x];
    cx.assign(nverts_, -1);
    for (VertexId s = 0; s < nverts_; ++s) {
      if (cx[s] >= 0) continue;
      const int id = static_cast<int>(members[x].size());
      members[x].emplace_back();
      cx[s] = id;
      stack.assign(1, s);
      while (!stack.empty()) {
        VertexId v = stack.back();
        stack.pop_back();
        members[x][id].push_back(v);
        for (EdgeId e : vertex_edges_[v]) {
          if (!edge_quiet[e]) continue;
          VertexId w = ends_[e].first == v ? ends_[e].second : ends_[e].first;
          if (cx[w] < 0) {
            cx[w] = id;
            stack.push_back(w);
          }
        }
      }
    }
    state_base[x + 1] = state_base[x] + members[x].size();
  }
  const std::size_t nstates = state_base[npos];

  // Initial deletions: a component confined to the endpoints of the
  // patrolled edge is cornered.
  std::vector<char> alive(nstates, 1);
  std::vector<std::size_t> dead_queue;
  for (std::size_t x = 0; x < npos; ++x) {
    const auto [u, v] = ends_[x];
    for (std::size_t c = 0; c < members[x].size(); ++c) {
      bool cornered = true;
      for (VertexId w : members[x][c])
        if (w != u && w != v) {
          cornered = false;
          break;
        }
      if (cornered) {
        alive[state_base[x] + c] = 0;
        dead_queue.push_back(state_base[x] + c);
      }
    }
  }

  // Response structure: state (x, c) survives while, for every adjacent
  // position y, at least one component of y meeting c is alive.  cnt holds
  // the live response count per (state, move slot); rev maps a response
  // state back to the (state, slot) pairs it supports.
  std::vector<std::vector<std::size_t>> cnt(nstates);
  std::vector<std::vector<std::pair<std::size_t, std::size_t>>> rev(nstates);
  std::vector<int> stamp;
  for (std::size_t x = 0; x < npos; ++x) {
    for (std::size_t c = 0; c < members[x].size(); ++c) {
      const std::size_t s = state_base[x] + c;
      cnt[s].assign(pos_adj_[x].size(), 0);
      for (std::size_t slot = 0; slot < pos_adj_[x].size(); ++slot) {
        const std::size_t y = pos_adj_[x][slot];
        stamp.assign(members[y].size(), 0);
        for (VertexId v : members[x][c]) {
          const int r = comp[y][v];
          if (stamp[r]) continue;
          stamp[r] = 1;
          cnt[s][slot] += 1;
          rev[state_base[y] + r].push_back({s, slot});
        }
      }
    }
  }

  // Greatest fixed point by cascading deletion.
  while (!dead_queue.empty()) {
    const std::size_t d = dead_queue.back();
    dead_queue.pop_back();
    for (auto [s, slot] : rev[d]) {
      if (!alive[s]) continue;
      if (--cnt[s][slot] == 0) {
        alive[s] = 0;
        dead_queue.push_back(s);
      }
    }
  }

  for (char a : alive)
    if (a) return false;  // the evader escapes forever: carving width >= k
  return true;
}

CarvingWidthResult carving_width(const NetworkGraph& g, const Embedding& emb, double eps) {
  const auto t0 = std::chrono::steady_clock::now();
  CarvingWidthResult out;
  auto finish = [&](double carw, bool pow2) {
    out.carw = carw;
    out.bs_exact = pow2;
    if (pow2) {
      out.bs = 1;
      mpz_mul_2exp(out.bs.get_mpz_t(), out.bs.get_mpz_t(),
                   static_cast<unsigned long>(std::llround(carw)));
    } else {
      out.bs = mpz_class(std::floor(std::exp2(carw) + 0.5));
    }
    out.elapsed_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return out;
  };

  bool pow2 = true;
  for (EdgeId e = 0; e < g.edge_count(); ++e) {
    const std::uint64_t w = g.edge(e).w;
    if ((w & (w - 1)) != 0) pow2 = false;
  }
  if (g.vertex_count() == 2) return finish(g.log2w(0), pow2);

  Ratcatcher rc(g, emb);
  auto decide = [&](double k) {
    ++out.decision_calls;
    return rc.decide(k);
  };

  double lb = 0.0;
  for (EdgeId e = 0; e < g.edge_count(); ++e) lb = std::max(lb, g.log2w(e));

  if (pow2) {
    // Every cut sum is an integer; decide(lb) is false by the edge bound.
    long lo = std::llround(lb);
    long step = 1;
    long hi = lo + step;
    while (!decide(static_cast<double>(hi))) {
      lo = hi;
      step *= 2;
      hi = lo + step;
    }
    while (hi - lo > 1) {
      const long mid = lo + (hi - lo) / 2;
      if (decide(static_cast<double>(mid)))
        hi = mid;
      else
        lo = mid;
    }
    return finish(static_cast<double>(lo), true);
  }

  double lo = lb;
  double span = 1.0;
  double hi = lo + span;
  while (!decide(hi)) {
    lo = hi;
    span *= 2.0;
    hi = lo + span;
  }
  while (hi - lo > eps) {
    const double mid = lo + (hi - lo) / 2.0;
    if (decide(mid))
      hi = mid;
    else
      lo = mid;
  }
  out.error_bound = hi - lo;
  return finish(lo, false);
}

}  // namespace tncarve
