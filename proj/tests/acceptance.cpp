// Acceptance gate: one self-contained binary, one verdict line per criterion.
//
// Each criterion prints exactly one line
//     criterion N: PASS — <evidence>
// or  criterion N: FAIL — <evidence>
// and the process exit code is the number of failed criteria.  All
// tolerances are pinned here as constants; everything that can be compared
// exactly (arbitrary-precision weights, power-of-two widths, counting
// identities) is compared exactly.

#include <gmpxx.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <complex>
#include <cstdint>
#include <cstdio>
#include <exception>
#include <functional>
#include <map>
#include <memory>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "fixtures.hpp"
#include "tncarve/carver.hpp"
#include "tncarve/ctree.hpp"
#include "tncarve/embedding.hpp"
#include "tncarve/errors.hpp"
#include "tncarve/netgen.hpp"
#include "tncarve/netgraph.hpp"
#include "tncarve/oracle.hpp"
#include "tncarve/ratcatcher.hpp"
#include "tncarve/rng.hpp"
#include "tncarve/sequencer.hpp"

using namespace tncarve;
using namespace tncarve::testing;

namespace {

// ---- pinned tolerances -----------------------------------------------------
constexpr double kWidthEps = 1e-9;       // |log2 Bs(tree) - carw| bound (c2)
constexpr double kNumericRelTol = 1e-8;  // relative error, numeric execution (c7)
constexpr double kMedianRhoMax = 3.0;    // median Ct ratio vs exact optimum (c9)
// ----------------------------------------------------------------------------

double now_minus(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// Envelope bounds relating the three tree metrics, accumulated over every
// contraction tree the run produces on graphs with all bond dimensions >= 2
// and >= 3 tensors:
//   Bs <= Bt,   Bt^2 <= Bs^3  (i.e. log2 Bt <= 1.5 log2 Bs),
//   Bt + 4(n-3) <= Ct <= (n-2) Bt.
// All four comparisons are exact (arbitrary precision).
struct EnvelopeAccumulator {
  std::size_t checked = 0;
  std::size_t violations = 0;
  std::string first_violation;

  void add(const NetworkGraph& g, const Metrics& m) {
    if (m.leaves < 3) return;
    for (EdgeId e = 0; e < static_cast<EdgeId>(g.edge_count()); ++e)
      if (g.edge(e).w < 2) return;
    ++checked;
    const long n = static_cast<long>(m.leaves);
    const mpz_class bt_sq = m.bt * m.bt;
    const mpz_class bs_cu = m.bs * m.bs * m.bs;
    std::string why;
    if (m.bs > m.bt) why = "bs > bt";
    else if (bt_sq > bs_cu) why = "bt^2 > bs^3";
    else if (m.bt + 4 * (n - 3) > m.ct) why = "bt + 4(n-3) > ct";
    else if (m.ct > (n - 2) * m.bt) why = "ct > (n-2)*bt";
    if (!why.empty()) {
      ++violations;
      if (first_violation.empty())
        why += " (n=" + std::to_string(n) + ", bs=" + m.bs.get_str() + ", bt=" + m.bt.get_str() +
               ", ct=" + m.ct.get_str() + ")",
            first_violation = why;
    }
  }
};

EnvelopeAccumulator g_envelope;

// Copy of a graph with every bond dimension redrawn from {2, 4, 8}.
NetworkGraph reweight_pow2(const NetworkGraph& g, std::mt19937_64& rng) {
  std::vector<std::string> names;
  for (std::size_t v = 0; v < g.vertex_count(); ++v)
    names.push_back(g.parts(static_cast<VertexId>(v)).front());
  std::vector<Edge> edges;
  for (EdgeId e = 0; e < static_cast<EdgeId>(g.edge_count()); ++e) {
    Edge ed = g.edge(e);
    ed.w = 1ull << (1 + rng() % 3);
    edges.push_back(ed);
  }
  return NetworkGraph(std::move(names), std::move(edges));
}

// Memory score of a schedule, recomputed independently of the sequencer:
//   cs(node)  = weight of the cut between the node's subtree and the rest
//               (1 at the root, where that cut is empty),
//   CS(leaf)  = cs(leaf),
//   CS(node)  = max(cs(node), min(CS(l) + cs(r), cs(l) + CS(r))).
mpz_class memory_score_reference(const RootedContractionTree& t) {
  std::function<std::pair<mpz_class, mpz_class>(NodeId)> go =
      [&](NodeId n) -> std::pair<mpz_class, mpz_class> {
    mpz_class cs = t.arc_above(n).weight;
    if (t.is_leaf(n)) return {cs, cs};
    auto [csl_big, csl] = go(t.children(n)[0]);
    auto [csr_big, csr] = go(t.children(n)[1]);
    mpz_class keep_left = csl_big + csr;
    mpz_class keep_right = csl + csr_big;
    mpz_class best_order = std::min(keep_left, keep_right);
    mpz_class cs_big = std::max(cs, best_order);
    return {cs_big, cs};
  };
  return go(t.root()).first;
}

struct Verdict {
  bool pass = false;
  std::string detail;
};

Verdict run_guarded(const std::function<Verdict()>& body) {
  try {
    return body();
  } catch (const std::exception& e) {
    return {false, std::string("unexpected exception: ") + e.what()};
  }
}

// ---- criterion 1: exact agreement with exhaustive width search --------------
Verdict criterion1() {
  const auto t0 = std::chrono::steady_clock::now();
  std::mt19937_64 rng(101);
  std::vector<NetworkGraph> corpus;
  for (std::size_t r = 1; r <= 2; ++r)
    for (std::size_t c = 2; c <= 4; ++c)
      for (int variant = 0; variant < 3; ++variant)
        corpus.push_back(reweight_pow2(grid_graph(r, c), rng));
  for (std::size_t n = 3; n <= 7; ++n)
    for (int variant = 0; variant < 3; ++variant)
      corpus.push_back(reweight_pow2(cycle(n), rng));
  for (int i = 0; i < 200; ++i) {
    const std::size_t n = 3 + rng() % 5;  // 3..7
    corpus.push_back(reweight_pow2(random_planar(rng, n), rng));
  }

  std::size_t mismatches = 0;
  std::string first;
  for (const NetworkGraph& g : corpus) {
    const Embedding emb = planar_embedding(g);
    const CarvingWidthResult cw = carving_width(g, emb);
    const BruteWidth bw = brute_cw(g);
    const bool ok =
        cw.bs == bw.bs && cw.carw == bw.carw && cw.bs_exact && cw.error_bound == 0.0;
    if (!ok) {
      ++mismatches;
      if (first.empty())
        first = " first: n=" + std::to_string(g.vertex_count()) + " carw=" +
                std::to_string(cw.carw) + " vs " + std::to_string(bw.carw);
    }
  }
  char buf[256];
  std::snprintf(buf, sizeof buf,
                "game-search width == exhaustive width (exact bs and carw) on %zu "
                "power-of-two graphs, %zu mismatches, %.1fs",
                corpus.size(), mismatches, now_minus(t0));
  return {mismatches == 0, buf + first};
}

// ---- criterion 2: carver meets the computed width on generated graphs -------
Verdict criterion2() {
  const auto t0 = std::chrono::steady_clock::now();
  std::size_t graphs = 0, bad_width = 0, bad_minor = 0;
  double max_dev = 0.0;
  for (std::size_t half = 0; half < 2; ++half) {
    GenConfig cfg;
    cfg.L = half == 0 ? 3 : 4;
    cfg.mu_log = calibrate_mu(cfg.L, cfg.memory_cap_log2);
    cfg.sigma_max = 1.0;
    for (int i = 0; i < 50; ++i) {
      Rng rng(derive_seed(2202, half * 50 + i));
      const NetworkGraph raw = sample(cfg, rng);
      auto net = std::make_shared<const NetworkGraph>(simplify(raw));
      const Embedding emb = planar_embedding(*net);
      const CarvingWidthResult cw = carving_width(*net, emb);
      ContractionHistory hist;
      const FreeContractionTree tree =
          decompose(*net, emb, cw.carw, derive_seed(2203, half * 50 + i), &hist);
      const Metrics met = metrics(tree);
      g_envelope.add(*net, met);
      ++graphs;
      max_dev = std::max(max_dev, std::abs(met.log2_bs - cw.carw));
      if (std::abs(met.log2_bs - cw.carw) > kWidthEps) ++bad_width;
      std::vector<const NetworkGraph*> minors = {hist.initial.get()};
      for (const HistoryStep& s : hist.steps) minors.push_back(&s.minor);
      for (const NetworkGraph* m : minors) {
        const bool ok =
            m->vertex_count() >= 3 ? is_biconnected(*m) : m->edge_count() >= 1;
        if (!ok) ++bad_minor;
      }
    }
  }
  char buf[320];
  std::snprintf(buf, sizeof buf,
                "%zu generated graphs (L=3,4): max |log2 bs - carw| = %.3g (eps %.0e), "
                "%zu width misses, %zu non-biconnected minors, %.1fs",
                graphs, max_dev, kWidthEps, bad_width, bad_minor, now_minus(t0));
  return {bad_width == 0 && bad_minor == 0, buf};
}

// ---- criterion 3: node-weight identity on random labeled trees --------------
Verdict criterion3() {
  const auto t0 = std::chrono::steady_clock::now();
  std::mt19937_64 rng(303);
  std::size_t trees = 0, internal_nodes = 0, bad = 0;
  for (int i = 0; i < 1000; ++i) {
    const std::size_t n = 3 + rng() % 6;  // 3..8
    auto g = share(random_connected(rng, n));
    const FreeContractionTree t = label_tree(g, random_tree_shape<TreeShape>(rng, n));
    g_envelope.add(*g, metrics(t));
    ++trees;
    if (!node_weight_identity_check(t)) ++bad;
    for (NodeId nd = static_cast<NodeId>(n); nd < static_cast<NodeId>(t.node_count()); ++nd) {
      const auto& arcs = t.incident_arcs(nd);
      if (arcs.size() != 3) {
        ++bad;
        continue;
      }
      const mpz_class lhs = t.node_cut(nd).weight * t.node_cut(nd).weight;
      const mpz_class rhs =
          t.arc_cut(arcs[0]).weight * t.arc_cut(arcs[1]).weight * t.arc_cut(arcs[2]).weight;
      ++internal_nodes;
      if (lhs != rhs) ++bad;
    }
  }
  char buf[256];
  std::snprintf(buf, sizeof buf,
                "w(node)^2 == w(a)w(a')w(a'') exactly at %zu internal nodes over %zu "
                "random labeled trees, %zu violations, %.1fs",
                internal_nodes, trees, bad, now_minus(t0));
  return {bad == 0, buf};
}

// ---- criterion 4: metric envelope over every tree produced ------------------
Verdict criterion4() {
  char buf[320];
  std::snprintf(buf, sizeof buf,
                "bs<=bt, bt^2<=bs^3, bt+4(n-3)<=ct<=(n-2)bt held on %zu trees "
                "accumulated across the run, %zu violations%s%s",
                g_envelope.checked, g_envelope.violations,
                g_envelope.first_violation.empty() ? "" : "; first: ",
                g_envelope.first_violation.c_str());
  return {g_envelope.violations == 0 && g_envelope.checked >= 1000, buf};
}

// ---- criterion 5: tree-decomposition round trip ------------------------------
Verdict criterion5() {
  const auto t0 = std::chrono::steady_clock::now();
  std::mt19937_64 rng(505);
  std::size_t cases = 0, bad = 0;
  std::string first;
  for (int i = 0; i < 200; ++i) {
    const std::size_t n = 3 + rng() % 6;
    auto g = share(random_connected(rng, n));
    const FreeContractionTree t = label_tree(g, random_tree_shape<TreeShape>(rng, n));
    const Metrics met = metrics(t);
    g_envelope.add(*g, met);
    ++cases;
    try {
      const TreeDecomposition td = to_tree_decomposition(t);
      validate_tree_decomposition(td, *g);
      if (weighted_width(td, *g) != met.bt) throw InvalidDecomposition("width != bt");
      const FreeContractionTree back = from_tree_decomposition(td, g);
      const Metrics met2 = metrics(back);
      g_envelope.add(*g, met2);
      if (met2.bt > met.bt) throw InvalidDecomposition("round trip increased width");
    } catch (const std::exception& e) {
      ++bad;
      if (first.empty()) first = std::string(" first: ") + e.what();
    }
  }
  char buf[256];
  std::snprintf(buf, sizeof buf,
                "%zu round trips: decomposition valid, weighted width == bt, rebuilt "
                "width never larger; %zu failures, %.1fs",
                cases, bad, now_minus(t0));
  return {bad == 0, buf + first};
}

// ---- criterion 6: memory score against an independent recursion -------------
Verdict criterion6() {
  const auto t0 = std::chrono::steady_clock::now();
  std::mt19937_64 rng(606);
  std::size_t cases = 0, bad = 0;
  for (int i = 0; i < 1000; ++i) {
    const std::size_t n = 3 + rng() % 6;
    auto g = share(random_connected(rng, n));
    const FreeContractionTree t = label_tree(g, random_tree_shape<TreeShape>(rng, n));
    g_envelope.add(*g, metrics(t));
    const RootedContractionTree rt = root_at(t, static_cast<ArcId>(rng() % t.arc_count()));
    const ContractionSequence seq = sequence(rt);
    ++cases;
    if (seq.cs_alg1 != memory_score_reference(rt)) ++bad;
  }

  // Worked 3-tensor fixture: path A-B-C with dims 2 and 3.  The optimal
  // rooting contracts A into B first: memory score 4, executed peak 11,
  // total cost 8.
  auto g = share(path_abc());
  const auto [rt, arc] = optimal_root(label_tree(g, brute_cw(*g).best));
  (void)arc;
  const ContractionSequence seq = sequence(rt);
  const bool fixture_ok = seq.cs_alg1 == 4 && seq.peak == 11 && seq.ct == 8 &&
                          simulate_peak(*g, seq) == 11;
  char buf[256];
  std::snprintf(buf, sizeof buf,
                "memory score == independent recursion on %zu random rooted trees "
                "(%zu mismatches); 3-tensor fixture cs=4 peak=11 ct=8 %s, %.1fs",
                cases, bad, fixture_ok ? "ok" : "WRONG", now_minus(t0));
  return {bad == 0 && fixture_ok, buf};
}

// ---- criterion 7: numeric execution matches direct summation ----------------
Verdict criterion7() {
  const auto t0 = std::chrono::steady_clock::now();
  std::mt19937_64 rng(707);
  std::size_t cases = 0, bad = 0;
  double max_rel = 0.0;
  std::string first;
  for (int i = 0; i < 100; ++i) {
    const std::size_t n = 3 + rng() % 4;  // 3..6
    auto g = share(random_connected(rng, n, 0.4, /*wmax=*/3));
    const auto tensors = make_random_tensors(*g, rng());
    auto schedule = [&] {
      const FreeContractionTree t = label_tree(g, random_tree_shape<TreeShape>(rng, n));
      return sequence(root_at(t, static_cast<ArcId>(rng() % t.arc_count())));
    };
    ++cases;
    try {
      const std::complex<double> want = full_contraction_reference(*g, tensors);
      const std::complex<double> got1 = execute(*g, tensors, schedule());
      const std::complex<double> got2 = execute(*g, tensors, schedule());
      const double denom = std::max(1e-300, std::abs(want));
      const double rel =
          std::max(std::abs(got1 - want), std::abs(got2 - want)) / denom;
      max_rel = std::max(max_rel, rel);
      if (rel > kNumericRelTol) ++bad;
    } catch (const std::exception& e) {
      ++bad;
      if (first.empty()) first = std::string(" first: ") + e.what();
    }
  }
  char buf[256];
  std::snprintf(buf, sizeof buf,
                "%zu networks, two schedules each vs direct summation: max relative "
                "error %.2e (tol %.0e), %zu failures, %.1fs",
                cases, max_rel, kNumericRelTol, bad, now_minus(t0));
  return {bad == 0, buf + first};
}

// Shared state between criteria 8 and 9: every (heuristic Ct, exact Ct) pair
// observed in the run.
struct CtPair {
  mpz_class heuristic, exact;
};
std::vector<CtPair> g_ct_pairs;

// ---- criterion 9: median optimality ratio on generated 4x4 networks ---------
Verdict criterion9() {
  const auto t0 = std::chrono::steady_clock::now();
  GenConfig cfg;
  cfg.L = 4;
  cfg.mu_log = calibrate_mu(4, cfg.memory_cap_log2);
  cfg.sigma_max = 1.0;
  const int requested = 100;
  std::vector<double> rhos;
  std::size_t sample_failures = 0, exact_skipped = 0;
  for (int i = 0; i < requested; ++i) {
    try {
      Rng rng(derive_seed(909, static_cast<std::uint64_t>(i)));
      const NetworkGraph raw = sample(cfg, rng);
      auto net = std::make_shared<const NetworkGraph>(simplify(raw));
      const Embedding emb = planar_embedding(*net);
      const auto [tree, met] = best_of(*net, emb, 32, derive_seed(910, i), 4);
      g_envelope.add(*net, met);
      const ContractionSequence seq = sequence(optimal_root(tree).first);
      ExactCt ex = [&] {
        try {
          return exact_min_ct(net, 300.0);
        } catch (const TooLarge&) {
          ++exact_skipped;
          throw;
        }
      }();
      g_ct_pairs.push_back({seq.ct, ex.ct});
      rhos.push_back(mpq_class(seq.ct, ex.ct).get_d());
    } catch (const TooLarge&) {
      continue;
    } catch (const RejectionBudgetExhausted&) {
      ++sample_failures;
    }
    if ((i + 1) % 10 == 0)
      std::fprintf(stderr, "[acceptance] criterion 9: %d/%d graphs, %.0fs elapsed\n", i + 1,
                   requested, now_minus(t0));
  }
  std::vector<double> sorted = rhos;
  std::sort(sorted.begin(), sorted.end());
  double median = 0.0, worst = 0.0;
  if (!sorted.empty()) {
    const std::size_t m = sorted.size();
    median = m % 2 ? sorted[m / 2] : 0.5 * (sorted[m / 2 - 1] + sorted[m / 2]);
    worst = sorted.back();
  }
  char buf[320];
  std::snprintf(buf, sizeof buf,
                "%zu/%d generated 4x4 networks solved (%zu sampling failures, %zu exact "
                "timeouts): median ct ratio %.4f (max %.4f, threshold %.1f), %.0fs",
                rhos.size(), requested, sample_failures, exact_skipped, median, worst,
                kMedianRhoMax, now_minus(t0));
  return {rhos.size() >= 20 && median <= kMedianRhoMax, buf};
}

// ---- criterion 8: exact optimum never beaten ---------------------------------
Verdict criterion8() {
  const auto t0 = std::chrono::steady_clock::now();
  std::mt19937_64 rng(808);
  for (int i = 0; i < 30; ++i) {
    const std::size_t n = 4 + rng() % 7;  // 4..10
    auto g = share(random_biconnected_planar(rng, n));
    const Embedding emb = planar_embedding(*g);
    const auto [tree, met] = best_of(*g, emb, 16, rng(), 2);
    g_envelope.add(*g, met);
    const ContractionSequence seq = sequence(optimal_root(tree).first);
    const ExactCt ex = exact_min_ct(g);
    g_ct_pairs.push_back({seq.ct, ex.ct});
  }
  std::size_t violations = 0;
  for (const CtPair& p : g_ct_pairs)
    if (p.heuristic < p.exact) ++violations;
  char buf[256];
  std::snprintf(buf, sizeof buf,
                "exact optimum <= heuristic ct on all %zu solved instances "
                "(30 random planar + generated corpus), %zu violations, %.1fs",
                g_ct_pairs.size(), violations, now_minus(t0));
  return {violations == 0 && !g_ct_pairs.empty(), buf};
}

// ---- criterion 10: tree-shape counting identities ----------------------------
Verdict criterion10() {
  const long expected_rooted[] = {3, 15, 105, 945, 10395};
  bool ok = true;
  std::string counts;
  for (std::size_t n = 3; n <= 7; ++n) {
    std::size_t shapes = 0;
    bool arcs_ok = true;
    enumerate_free_trees(n, [&](const TreeShape& s) {
      ++shapes;
      if (s.arcs.size() != 2 * n - 3) arcs_ok = false;
    });
    const mpz_class rooted = mpz_class(static_cast<unsigned long>(shapes)) *
                             static_cast<unsigned long>(2 * n - 3);
    const bool here = arcs_ok && shapes == double_factorial(2 * static_cast<long>(n) - 5) &&
                      rooted == double_factorial(2 * static_cast<long>(n) - 3) &&
                      rooted == expected_rooted[n - 3];
    ok = ok && here;
    counts += (n > 3 ? ", " : "") + rooted.get_str() + (here ? "" : "(!)");
  }
  return {ok, "free shapes x (2n-3) arcs per shape = (2n-3)!! for n=3..7: " + counts +
                  " == 3, 15, 105, 945, 10395"};
}

}  // namespace

int main() {
  const auto t0 = std::chrono::steady_clock::now();
  std::vector<Verdict> v(11);
  v[1] = run_guarded(criterion1);
  v[2] = run_guarded(criterion2);
  v[3] = run_guarded(criterion3);
  v[5] = run_guarded(criterion5);
  v[6] = run_guarded(criterion6);
  v[7] = run_guarded(criterion7);
  v[9] = run_guarded(criterion9);
  v[8] = run_guarded(criterion8);   // consumes criterion 9's corpus as well
  v[4] = run_guarded(criterion4);   // envelope accumulated by everything above
  v[10] = run_guarded(criterion10);

  int failures = 0;
  for (int i = 1; i <= 10; ++i) {
    std::printf("criterion %d: %s — %s\n", i, v[i].pass ? "PASS" : "FAIL",
                v[i].detail.c_str());
    if (!v[i].pass) ++failures;
  }
  std::printf("acceptance: %d/10 criteria passed in %.0fs\n", 10 - failures, now_minus(t0));
  return failures;
}
