#include "tncarve/oracle.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstring>

#include "tncarve/rng.hpp"

namespace tncarve {

namespace {

void enumerate_rec(std::size_t inserted, std::size_t n,
                   std::vector<std::pair<NodeId, NodeId>>& arcs, NodeId next_internal,
                   const std::function<void(const TreeShape&)>& visit) {
  if (inserted == n) {
    visit(TreeShape{n, arcs});
    return;
  }
  const std::size_t narcs = arcs.size();
  for (std::size_t i = 0; i < narcs; ++i) {
    auto [x, y] = arcs[i];
    arcs[i] = {x, next_internal};
    arcs.push_back({y, next_internal});
    arcs.push_back({static_cast<NodeId>(inserted), next_internal});
    enumerate_rec(inserted + 1, n, arcs, next_internal + 1, visit);
    arcs.pop_back();
    arcs.pop_back();
    arcs[i] = {x, y};
  }
}

}  // namespace

void enumerate_free_trees(std::size_t n, const std::function<void(const TreeShape&)>& visit) {
  if (n < 2) throw BadShape("contraction trees need at least 2 leaves");
  std::vector<std::pair<NodeId, NodeId>> arcs{{0, 1}};
  enumerate_rec(2, n, arcs, static_cast<NodeId>(n), visit);
}

mpz_class double_factorial(long k) {
  mpz_class r = 1;
  for (long i = k; i > 1; i -= 2) r *= i;
  return r;
}

BruteWidth brute_cw(const NetworkGraph& g) {
  const std::size_t n = g.vertex_count();
  if (n < 2) throw BadShape("carving needs at least 2 vertices");
  if (n > 9) throw TooLarge("free-tree enumeration is capped at 9 leaves");

  BruteWidth out;
  double best = std::numeric_limits<double>::infinity();

  std::vector<std::vector<std::pair<ArcId, NodeId>>> adj;
  std::vector<std::uint32_t> mask;
  std::vector<NodeId> order, parent_node;
  std::vector<ArcId> parent_arc;

  auto eval = [&](const TreeShape& shape) {
    const std::size_t nodes = 2 * n - 2;
    adj.assign(nodes, {});
    for (ArcId a = 0; a < static_cast<ArcId>(shape.arcs.size()); ++a) {
      adj[shape.arcs[a].first].push_back({a, shape.arcs[a].second});
      adj[shape.arcs[a].second].push_back({a, shape.arcs[a].first});
    }
    mask.assign(nodes, 0);
    parent_node.assign(nodes, -1);
    parent_arc.assign(nodes, -1);
    order.clear();
    order.push_back(0);
    for (std::size_t head = 0; head < order.size(); ++head) {
      NodeId x = order[head];
      for (auto [a, y] : adj[x])
        if (y != parent_node[x]) {
          parent_node[y] = x;
          parent_arc[y] = a;
          order.push_back(y);
        }
    }
    for (auto it = order.rbegin(); it != order.rend(); ++it) {
      NodeId x = *it;
      if (x < static_cast<NodeId>(n)) mask[x] |= 1u << x;
      if (parent_node[x] >= 0) mask[parent_node[x]] |= mask[x];
    }
    double load = 0.0;
    for (NodeId x = 1; x < static_cast<NodeId>(nodes); ++x) {
      double cut = 0.0;
      for (EdgeId e = 0; e < g.edge_count(); ++e) {
        const Edge& ed = g.edge(e);
        if (((mask[x] >> ed.u) & 1u) != ((mask[x] >> ed.v) & 1u)) cut += g.log2w(e);
      }
      load = std::max(load, cut);
    }
    if (load < best) {
      best = load;
      out.best = shape;
    }
  };

  enumerate_free_trees(n, eval);
  out.carw = best;
  auto sp = std::make_shared<const NetworkGraph>(g);
  FreeContractionTree t = label_tree(sp, out.best);
  out.bs = metrics(t).bs;
  return out;
}

double carving_width_dp(const NetworkGraph& g) {
  const std::size_t n = g.vertex_count();
  if (n < 2) throw BadShape("carving needs at least 2 vertices");
  if (n > 16) throw TooLarge("subset DP is capped at 16 vertices");

  const std::uint32_t full = (1u << n) - 1;
  std::vector<double> bnd(full + 1, 0.0);
  for (std::uint32_t s = 1; s <= full; ++s) {
    double c = 0.0;
    for (EdgeId e = 0; e < g.edge_count(); ++e) {
      const Edge& ed = g.edge(e);
      if (((s >> ed.u) & 1u) != ((s >> ed.v) & 1u)) c += g.log2w(e);
    }
    bnd[s] = c;
  }

  std::vector<double> f(full + 1, 0.0);
  for (std::uint32_t s = 1; s <= full; ++s) {
    if ((s & (s - 1)) == 0) {
      f[s] = bnd[s];
      continue;
    }
    const std::uint32_t low = s & (0u - s);
    const std::uint32_t rem = s ^ low;
    double inner = std::numeric_limits<double>::infinity();
    // X runs over submasks of s containing the lowest bit, X != s.
    for (std::uint32_t t = (rem - 1) & rem;; t = (t - 1) & rem) {
      std::uint32_t x = low | t;
      inner = std::min(inner, std::max(f[x], f[s ^ x]));
      if (t == 0) break;
    }
    f[s] = std::max(bnd[s], inner);
  }
  return f[full];
}

namespace {

using u128 = unsigned __int128;

template <typename Cost>
struct CtDp {
  const NetworkGraph& g;
  std::vector<std::uint64_t> dmask;  // boundary edge mask per subset
  std::vector<Cost> cost;
  std::vector<std::uint32_t> choice;

  Cost edge_product(std::uint64_t mask) const {
    Cost p = 1;
    while (mask) {
      int e = __builtin_ctzll(mask);
      mask &= mask - 1;
      p *= g.edge(static_cast<EdgeId>(e)).w;
    }
    return p;
  }

  void run(double budget_seconds) {
    const std::size_t n = g.vertex_count();
    const std::uint32_t full = (1u << n) - 1;
    dmask.assign(full + 1, 0);
    std::vector<std::uint64_t> inc(n, 0);
    for (EdgeId e = 0; e < g.edge_count(); ++e) {
      if (g.edge(e).u == g.edge(e).v) continue;
      inc[g.edge(e).u] ^= 1ull << e;
      inc[g.edge(e).v] ^= 1ull << e;
    }
    for (std::uint32_t s = 1; s <= full; ++s) {
      std::uint32_t low = s & (0u - s);
      dmask[s] = dmask[s ^ low] ^ inc[static_cast<std::size_t>(__builtin_ctz(s))];
    }
    cost.assign(full + 1, 0);
    choice.assign(full + 1, 0);
    const auto t0 = std::chrono::steady_clock::now();
    for (std::uint32_t s = 1; s <= full; ++s) {
      if ((s & (s - 1)) == 0) continue;
      if (budget_seconds > 0.0 &&
          std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count() >
              budget_seconds)
        throw TooLarge("time budget for the exact cost search exceeded");
      const std::uint32_t low = s & (0u - s);
      const std::uint32_t rem = s ^ low;
      bool first = true;
      Cost best = 0;
      for (std::uint32_t t = (rem - 1) & rem;; t = (t - 1) & rem) {
        std::uint32_t x = low | t;
        Cost cand = cost[x] + cost[s ^ x] + edge_product(dmask[x] | dmask[s ^ x]);
        if (first || cand < best) {
          best = cand;
          choice[s] = x;
          first = false;
        }
        if (t == 0) break;
      }
      cost[s] = best;
    }
  }
};

NodeId build_witness(std::uint32_t s, const std::vector<std::uint32_t>& choice,
                     std::vector<std::array<NodeId, 2>>& children, NodeId& next) {
  if ((s & (s - 1)) == 0) return static_cast<NodeId>(__builtin_ctz(s));
  NodeId l = build_witness(choice[s], choice, children, next);
  NodeId r = build_witness(s ^ choice[s], choice, children, next);
  NodeId id = next++;
  children[id] = {l, r};
  return id;
}

}  // namespace

ExactCt exact_min_ct(std::shared_ptr<const NetworkGraph> g, double budget_seconds) {
  const std::size_t n = g->vertex_count();
  if (n < 2) throw BadShape("contraction needs at least 2 tensors");
  if (n > 20) throw TooLarge("exact cost subset DP is capped at 20 vertices");
  if (g->edge_count() > 64) throw TooLarge("exact cost subset DP is capped at 64 edges");

  // Every candidate cost is at most (n-1) * product of all edge weights;
  // if that provably fits u128, run the fast path, else exact big ints.
  double total_log2 = 0.0;
  for (EdgeId e = 0; e < g->edge_count(); ++e) total_log2 += g->log2w(e);
  const std::uint32_t full = (1u << n) - 1;

  std::vector<std::uint32_t> choice;
  mpz_class best;
  if (total_log2 + std::log2(static_cast<double>(n)) < 126.0) {
    CtDp<u128> dp{*g, {}, {}, {}};
    dp.run(budget_seconds);
    u128 v = dp.cost[full];
    best = mpz_class(static_cast<unsigned long>(v >> 64));
    best <<= 64;
    best += mpz_class(static_cast<unsigned long>(v & ~0ull));
    choice = std::move(dp.choice);
  } else {
    CtDp<mpz_class> dp{*g, {}, {}, {}};
    dp.run(budget_seconds);
    best = dp.cost[full];
    choice = std::move(dp.choice);
  }

  std::vector<std::array<NodeId, 2>> children(2 * n - 1, {-1, -1});
  NodeId next = static_cast<NodeId>(n);
  build_witness(full, choice, children, next);
  RootedContractionTree tree(std::move(g), std::move(children),
                             static_cast<NodeId>(2 * n - 2));
  if (metrics(tree).ct != best) throw InternalInvariant("witness cost disagrees with DP value");
  return {std::move(best), std::move(tree)};
}

namespace {

std::uint64_t checked_entry_count(const std::vector<std::uint64_t>& dims) {
  double est = 1.0;
  std::uint64_t p = 1;
  for (std::uint64_t d : dims) {
    est *= static_cast<double>(d);
    p *= d;
  }
  if (est > 1e8) throw TooLarge("tensor would exceed the validation size cap");
  return p;
}

void validate_tensor(const NetworkGraph& g, VertexId v, const DenseTensor& t) {
  std::vector<EdgeId> want = g.incident(v);
  std::sort(want.begin(), want.end());
  if (t.labels != want)
    throw DimensionMismatch("tensor labels at " + g.name(v) + " do not match incident edges");
  if (t.dims.size() != t.labels.size())
    throw DimensionMismatch("label/dimension arity mismatch at " + g.name(v));
  for (std::size_t i = 0; i < t.labels.size(); ++i)
    if (t.dims[i] != g.edge(t.labels[i]).w)
      throw DimensionMismatch("dimension of edge " + std::to_string(t.labels[i]) + " at " +
                              g.name(v) + " should be " + std::to_string(g.edge(t.labels[i]).w));
  std::uint64_t want_len = 1;
  for (std::uint64_t d : t.dims) want_len *= d;
  if (t.values.size() != want_len)
    throw DimensionMismatch("value count at " + g.name(v) + " should be " +
                            std::to_string(want_len));
}

std::vector<std::uint64_t> strides_of(const DenseTensor& t) {
  std::vector<std::uint64_t> s(t.dims.size(), 1);
  for (std::size_t i = t.dims.size(); i-- > 1;) s[i - 1] = s[i] * t.dims[i];
  return s;
}

DenseTensor contract_pair(const NetworkGraph& g, const DenseTensor& a, const DenseTensor& b,
                          const mpz_class& expect_cost) {
  std::vector<EdgeId> shared, out_labels;
  std::set_intersection(a.labels.begin(), a.labels.end(), b.labels.begin(), b.labels.end(),
                        std::back_inserter(shared));
  std::set_symmetric_difference(a.labels.begin(), a.labels.end(), b.labels.begin(),
                                b.labels.end(), std::back_inserter(out_labels));

  DenseTensor r;
  r.labels = out_labels;
  for (EdgeId e : out_labels) r.dims.push_back(g.edge(e).w);
  std::vector<std::uint64_t> shared_dims;
  for (EdgeId e : shared) shared_dims.push_back(g.edge(e).w);
  const std::uint64_t n_out = checked_entry_count(r.dims);
  std::uint64_t n_shared = 1;
  for (std::uint64_t d : shared_dims) n_shared *= d;
  if (static_cast<double>(n_out) * static_cast<double>(n_shared) > 1e9)
    throw TooLarge("contraction would exceed the validation work cap");
  if (mpz_class(static_cast<unsigned long>(n_out)) *
          mpz_class(static_cast<unsigned long>(n_shared)) !=
      expect_cost)
    throw InternalInvariant("multiply-add count disagrees with the step cost");

  const auto sa = strides_of(a), sb = strides_of(b);
  // Positions of each loop label inside a and b.
  auto position = [](const std::vector<EdgeId>& labels, EdgeId e) -> int {
    auto it = std::lower_bound(labels.begin(), labels.end(), e);
    return it != labels.end() && *it == e ? static_cast<int>(it - labels.begin()) : -1;
  };
  struct LoopVar {
    std::uint64_t dim;
    std::uint64_t stride_a = 0, stride_b = 0;
  };
  std::vector<LoopVar> out_vars, shared_vars;
  for (std::size_t i = 0; i < out_labels.size(); ++i) {
    LoopVar lv{r.dims[i], 0, 0};
    if (int p = position(a.labels, out_labels[i]); p >= 0) lv.stride_a = sa[p];
    if (int p = position(b.labels, out_labels[i]); p >= 0) lv.stride_b = sb[p];
    out_vars.push_back(lv);
  }
  for (std::size_t i = 0; i < shared.size(); ++i) {
    LoopVar lv{shared_dims[i]};
    lv.stride_a = sa[position(a.labels, shared[i])];
    lv.stride_b = sb[position(b.labels, shared[i])];
    shared_vars.push_back(lv);
  }

  r.values.assign(n_out, {0.0, 0.0});
  std::vector<std::uint64_t> od(out_vars.size(), 0), sd(shared_vars.size(), 0);
  for (std::uint64_t oi = 0; oi < n_out; ++oi) {
    std::uint64_t base_a = 0, base_b = 0;
    for (std::size_t i = 0; i < out_vars.size(); ++i) {
      base_a += od[i] * out_vars[i].stride_a;
      base_b += od[i] * out_vars[i].stride_b;
    }
    std::complex<double> acc{0.0, 0.0};
    std::fill(sd.begin(), sd.end(), 0);
    for (std::uint64_t si = 0; si < n_shared; ++si) {
      std::uint64_t oa = base_a, ob = base_b;
      for (std::size_t i = 0; i < shared_vars.size(); ++i) {
        oa += sd[i] * shared_vars[i].stride_a;
        ob += sd[i] * shared_vars[i].stride_b;
      }
      acc += a.values[oa] * b.values[ob];
      for (std::size_t i = shared_vars.size(); i-- > 0;) {
        if (++sd[i] < shared_vars[i].dim) break;
        sd[i] = 0;
      }
    }
    r.values[oi] = acc;
    for (std::size_t i = out_vars.size(); i-- > 0;) {
      if (++od[i] < out_vars[i].dim) break;
      od[i] = 0;
    }
  }
  return r;
}

}  // namespace

std::map<VertexId, DenseTensor> make_random_tensors(const NetworkGraph& g, std::uint64_t seed) {
  Rng rng(seed);
  std::map<VertexId, DenseTensor> out;
  for (VertexId v = 0; v < g.vertex_count(); ++v) {
    DenseTensor t;
    t.labels = g.incident(v);
    std::sort(t.labels.begin(), t.labels.end());
    for (EdgeId e : t.labels) t.dims.push_back(g.edge(e).w);
    const std::uint64_t len = checked_entry_count(t.dims);
    t.values.reserve(len);
    for (std::uint64_t i = 0; i < len; ++i)
      t.values.push_back({rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0)});
    out.emplace(v, std::move(t));
  }
  return out;
}

std::complex<double> execute(const NetworkGraph& g,
                             const std::map<VertexId, DenseTensor>& tensors,
                             const ContractionSequence& seq) {
  if (!g.is_simple())
    throw DimensionMismatch("numeric execution requires a simplified network");
  verify_sequence(g, seq);

  std::map<std::vector<VertexId>, DenseTensor> resident;
  auto obtain = [&](const std::vector<VertexId>& operand) -> DenseTensor {
    auto it = resident.find(operand);
    if (it != resident.end()) {
      DenseTensor t = std::move(it->second);
      resident.erase(it);
      return t;
    }
    auto tit = tensors.find(operand[0]);  // singleton: verified upstream
    if (tit == tensors.end())
      throw DimensionMismatch("no tensor supplied for " + g.name(operand[0]));
    validate_tensor(g, operand[0], tit->second);
    return tit->second;
  };

  for (const ContractionStep& s : seq.steps) {
    DenseTensor a = obtain(s.left), b = obtain(s.right);
    resident.emplace(s.result, contract_pair(g, a, b, s.cost));
  }
  const DenseTensor& last = resident.at(seq.steps.back().result);
  if (!last.labels.empty()) throw InternalInvariant("final tensor is not a scalar");
  return last.values[0];
}

std::complex<double> full_contraction_reference(const NetworkGraph& g,
                                                const std::map<VertexId, DenseTensor>& tensors,
                                                double cap) {
  if (!g.is_simple())
    throw DimensionMismatch("numeric execution requires a simplified network");
  double est = 1.0;
  for (EdgeId e = 0; e < g.edge_count(); ++e) est *= static_cast<double>(g.edge(e).w);
  if (est > cap) throw TooLarge("joint assignment count exceeds the cap");

  struct VertexView {
    const DenseTensor* t;
    std::vector<std::uint64_t> strides;  // per incident label, sorted label order
  };
  std::vector<VertexView> views;
  for (VertexId v = 0; v < g.vertex_count(); ++v) {
    auto it = tensors.find(v);
    if (it == tensors.end()) throw DimensionMismatch("no tensor supplied for " + g.name(v));
    validate_tensor(g, v, it->second);
    views.push_back({&it->second, strides_of(it->second)});
  }

  std::vector<std::uint64_t> digit(g.edge_count(), 0);
  std::complex<double> sum{0.0, 0.0};
  const std::uint64_t total = static_cast<std::uint64_t>(est);
  for (std::uint64_t it = 0; it < total; ++it) {
    std::complex<double> prod{1.0, 0.0};
    for (VertexId v = 0; v < g.vertex_count(); ++v) {
      const VertexView& vw = views[v];
      std::uint64_t off = 0;
      for (std::size_t i = 0; i < vw.t->labels.size(); ++i)
        off += digit[vw.t->labels[i]] * vw.strides[i];
      prod *= vw.t->values[off];
    }
    sum += prod;
    for (std::size_t e = g.edge_count(); e-- > 0;) {
      if (++digit[e] < g.edge(e).w) break;
      digit[e] = 0;
    }
  }
  return sum;
}

}  // namespace tncarve
