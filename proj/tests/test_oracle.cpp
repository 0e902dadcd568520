#include <algorithm>
#include <cmath>
#include <complex>
#include <map>
#include <set>

#include "doctest.h"
#include "fixtures.hpp"
#include "tncarve/ctree.hpp"
#include "tncarve/oracle.hpp"
#include "tncarve/rng.hpp"
#include "tncarve/sequencer.hpp"

using namespace tncarve;
using namespace tncarve::testing;

namespace {

std::map<VertexId, DenseTensor> ones_tensors(const NetworkGraph& g) {
  std::map<VertexId, DenseTensor> out;
  for (VertexId v = 0; v < g.vertex_count(); ++v) {
    DenseTensor t;
    t.labels = g.incident(v);
    std::sort(t.labels.begin(), t.labels.end());
    std::uint64_t len = 1;
    for (EdgeId e : t.labels) {
      t.dims.push_back(g.edge(e).w);
      len *= g.edge(e).w;
    }
    t.values.assign(len, {1.0, 0.0});
    out.emplace(v, std::move(t));
  }
  return out;
}

double rel_err(std::complex<double> a, std::complex<double> b) {
  return std::abs(a - b) / std::max(1.0, std::abs(b));
}

}  // namespace

TEST_CASE("double factorial") {
  CHECK(double_factorial(-1) == 1);
  CHECK(double_factorial(0) == 1);
  CHECK(double_factorial(1) == 1);
  CHECK(double_factorial(3) == 3);
  CHECK(double_factorial(5) == 15);
  CHECK(double_factorial(7) == 105);
  CHECK(double_factorial(9) == 945);
  CHECK(double_factorial(11) == 10395);
}

TEST_CASE("free tree enumeration count matches the closed form") {
  for (std::size_t n = 2; n <= 8; ++n) {
    mpz_class count = 0;
    enumerate_free_trees(n, [&](const TreeShape& s) {
      REQUIRE(s.leaves == n);
      REQUIRE(s.arcs.size() == 2 * n - 3);
      ++count;
    });
    CHECK(count == double_factorial(2 * static_cast<long>(n) - 5));
  }
}

TEST_CASE("enumeration induces the expected rooted tree counts") {
  // Each free tree on n leaves yields one rooted tree per arc (2n-3 of
  // them), all distinct, giving (2n-3)!! rooted trees in total.
  const long expected[] = {3, 15, 105, 945, 10395};
  for (std::size_t n = 3; n <= 7; ++n) {
    long frees = 0;
    enumerate_free_trees(n, [&](const TreeShape&) { ++frees; });
    CHECK(frees * (2 * static_cast<long>(n) - 3) == expected[n - 3]);
  }
}

TEST_CASE("enumerated shapes are distinct and labelable") {
  std::set<std::vector<std::pair<NodeId, NodeId>>> seen;
  std::mt19937_64 rng(42);
  auto g = share(random_connected(rng, 5));
  enumerate_free_trees(5, [&](const TreeShape& s) {
    std::vector<std::pair<NodeId, NodeId>> canon;
    for (auto [x, y] : s.arcs) canon.push_back({std::min(x, y), std::max(x, y)});
    std::sort(canon.begin(), canon.end());
    CHECK(seen.insert(canon).second);
    FreeContractionTree t = label_tree(g, s);  // validates the shape
    CHECK(t.leaves() == 5);
  });
  CHECK(seen.size() == 15);
}

TEST_CASE("brute force carving width fixtures") {
  SUBCASE("single edge") {
    NetworkGraph g({"A", "B"}, {{0, 1, 8}});
    BruteWidth bw = brute_cw(g);
    CHECK(bw.carw == doctest::Approx(3.0));
    CHECK(bw.bs == 8);
  }
  SUBCASE("uniform 4-cycle") {
    BruteWidth bw = brute_cw(cycle(4));
    CHECK(bw.carw == doctest::Approx(2.0));
    CHECK(bw.bs == 4);
  }
  SUBCASE("path") {
    BruteWidth bw = brute_cw(path_abc());
    CHECK(bw.carw == doctest::Approx(std::log2(6.0)));
    CHECK(bw.bs == 6);
  }
  SUBCASE("triangle: every tree exposes the heaviest vertex boundary") {
    BruteWidth bw = brute_cw(triangle());
    CHECK(bw.bs == 12);
  }
  SUBCASE("2x3 grid, uniform bond 2") {
    BruteWidth bw = brute_cw(fig_grid());
    CHECK(bw.carw == doctest::Approx(3.0));
    CHECK(bw.bs == 8);
  }
  SUBCASE("size guard") {
    CHECK_THROWS_AS(brute_cw(cycle(10)), TooLarge);
  }
}

TEST_CASE("subset DP width agrees with brute force") {
  CHECK(carving_width_dp(path_abc()) == doctest::Approx(std::log2(6.0)));
  CHECK(carving_width_dp(cycle(4)) == doctest::Approx(2.0));
  CHECK(carving_width_dp(fig_grid()) == doctest::Approx(3.0));

  std::mt19937_64 rng(2026);
  for (int i = 0; i < 30; ++i) {
    std::size_t n = 2 + i % 6;
    NetworkGraph g = random_connected(rng, n, 0.5, 5);
    CAPTURE(i);
    CHECK(brute_cw(g).carw == doctest::Approx(carving_width_dp(g)).epsilon(1e-12));
  }
  CHECK_THROWS_AS(carving_width_dp(cycle(17)), TooLarge);
}

TEST_CASE("exact contraction cost fixtures") {
  SUBCASE("path") {
    auto g = share(path_abc());
    ExactCt r = exact_min_ct(g);
    CHECK(r.ct == 8);
    CHECK(metrics(r.tree).ct == 8);
    ContractionSequence seq = sequence(r.tree);
    verify_sequence(*g, seq);
    CHECK(seq.ct == 8);
  }
  SUBCASE("triangle") {
    auto g = share(triangle());
    ExactCt r = exact_min_ct(g);
    CHECK(r.ct == 30);
    CHECK(metrics(r.tree).ct == 30);
  }
  SUBCASE("single edge") {
    auto g = share(NetworkGraph({"A", "B"}, {{0, 1, 5}}));
    ExactCt r = exact_min_ct(g);
    CHECK(r.ct == 5);
    CHECK(r.tree.leaves() == 2);
  }
}

TEST_CASE("exact minimum lower-bounds every rooted tree") {
  std::mt19937_64 rng(7);
  for (int i = 0; i < 40; ++i) {
    std::size_t n = 3 + i % 6;
    auto g = share(random_connected(rng, n, 0.4, 4));
    ExactCt r = exact_min_ct(g);
    FreeContractionTree t = label_tree(g, random_tree_shape<TreeShape>(rng, n));
    ArcId a = static_cast<ArcId>(rng() % t.arc_count());
    CAPTURE(i);
    CHECK(metrics(root_at(t, a)).ct >= r.ct);
    CHECK(metrics(optimal_root(t).first).ct >= r.ct);
  }
}

TEST_CASE("exact cost guards") {
  SUBCASE("too many vertices") {
    std::vector<std::string> names;
    std::vector<Edge> edges;
    for (int i = 0; i < 21; ++i) {
      names.push_back("v" + std::to_string(i));
      if (i) edges.push_back({static_cast<VertexId>(i - 1), static_cast<VertexId>(i), 2});
    }
    CHECK_THROWS_AS(exact_min_ct(share(NetworkGraph(names, edges))), TooLarge);
  }
  SUBCASE("too many edges") {
    std::vector<std::string> names;
    std::vector<Edge> edges;
    for (int i = 0; i < 12; ++i) names.push_back("v" + std::to_string(i));
    for (int i = 0; i < 12; ++i)
      for (int j = i + 1; j < 12; ++j)
        edges.push_back({static_cast<VertexId>(i), static_cast<VertexId>(j), 2});
    CHECK_THROWS_AS(exact_min_ct(share(NetworkGraph(names, edges))), TooLarge);
  }
  SUBCASE("exhausted time budget") {
    std::mt19937_64 rng(9);
    auto g = share(random_connected(rng, 16, 0.2, 3));
    CHECK_THROWS_AS(exact_min_ct(g, 1e-9), TooLarge);
  }
}

TEST_CASE("all-ones tensors contract to the joint assignment count") {
  auto tri = share(triangle());
  auto tens = ones_tensors(*tri);
  CHECK(full_contraction_reference(*tri, tens).real() == doctest::Approx(24.0));
  enumerate_free_trees(3, [&](const TreeShape& s) {
    ContractionSequence seq = sequence(optimal_root(label_tree(tri, s)).first);
    std::complex<double> z = execute(*tri, tens, seq);
    CHECK(z.real() == doctest::Approx(24.0));
    CHECK(z.imag() == doctest::Approx(0.0));
  });

  auto p = share(path_abc());
  CHECK(full_contraction_reference(*p, ones_tensors(*p)).real() == doctest::Approx(6.0));
}

TEST_CASE("random tensors execute to the reference value") {
  std::mt19937_64 rng(555);
  for (int i = 0; i < 100; ++i) {
    std::size_t n = 2 + i % 5;
    auto g = share(random_connected(rng, n, 0.4, 3));
    auto tens = make_random_tensors(*g, derive_seed(777, static_cast<std::uint64_t>(i)));
    FreeContractionTree t = label_tree(g, random_tree_shape<TreeShape>(rng, n));
    ContractionSequence seq = sequence(optimal_root(t).first);
    std::complex<double> got = execute(*g, tens, seq);
    std::complex<double> want = full_contraction_reference(*g, tens);
    CAPTURE(i);
    CHECK(rel_err(got, want) <= 1e-8);

    // A second, generally different contraction order reaches the same scalar.
    ContractionSequence seq2 = sequence(root_at(t, static_cast<ArcId>(rng() % t.arc_count())));
    CHECK(rel_err(execute(*g, tens, seq2), got) <= 1e-8);
  }
}

TEST_CASE("random tensors are deterministic in the seed") {
  NetworkGraph g = triangle();
  auto a = make_random_tensors(g, 11);
  auto b = make_random_tensors(g, 11);
  auto c = make_random_tensors(g, 12);
  CHECK(a.at(0).values == b.at(0).values);
  CHECK(a.at(0).values != c.at(0).values);
  for (auto& [v, t] : a) {
    for (auto z : t.values) {
      CHECK(std::abs(z.real()) <= 1.0);
      CHECK(std::abs(z.imag()) <= 1.0);
    }
  }
}

TEST_CASE("numeric execution validates its inputs") {
  auto g = share(triangle());
  auto tens = ones_tensors(*g);
  ContractionSequence seq;
  enumerate_free_trees(3, [&](const TreeShape& s) {
    if (seq.steps.empty()) seq = sequence(optimal_root(label_tree(g, s)).first);
  });

  SUBCASE("missing tensor") {
    auto bad = tens;
    bad.erase(1);
    CHECK_THROWS_AS(execute(*g, bad, seq), DimensionMismatch);
    CHECK_THROWS_AS(full_contraction_reference(*g, bad), DimensionMismatch);
  }
  SUBCASE("wrong dimension") {
    auto bad = tens;
    bad.at(0).dims[0] += 1;
    CHECK_THROWS_AS(execute(*g, bad, seq), DimensionMismatch);
  }
  SUBCASE("wrong labels") {
    auto bad = tens;
    std::reverse(bad.at(0).labels.begin(), bad.at(0).labels.end());
    CHECK_THROWS_AS(execute(*g, bad, seq), DimensionMismatch);
  }
  SUBCASE("wrong value count") {
    auto bad = tens;
    bad.at(2).values.pop_back();
    CHECK_THROWS_AS(execute(*g, bad, seq), DimensionMismatch);
  }
  SUBCASE("parallel edges are rejected") {
    NetworkGraph multi({"A", "B"}, {{0, 1, 2}, {0, 1, 3}});
    CHECK_THROWS_AS(full_contraction_reference(multi, {}), DimensionMismatch);
  }
  SUBCASE("assignment cap") {
    CHECK_THROWS_AS(full_contraction_reference(*g, tens, 10.0), TooLarge);
  }
}

TEST_CASE("lightest-tensor and cheapest-step optima can be disjoint") {
  // Search for a weighted K4 where no tree minimizing the heaviest
  // intermediate (bs) also minimizes the most expensive step (bt): the two
  // quality measures genuinely disagree.
  std::mt19937_64 rng(31337);
  bool found = false;
  for (int trial = 0; trial < 2000 && !found; ++trial) {
    std::vector<Edge> edges;
    for (int i = 0; i < 4; ++i)
      for (int j = i + 1; j < 4; ++j)
        edges.push_back({static_cast<VertexId>(i), static_cast<VertexId>(j), 2 + rng() % 15});
    auto g = share(NetworkGraph({"A", "B", "C", "D"}, edges));
    std::vector<Metrics> ms;
    enumerate_free_trees(4, [&](const TreeShape& s) { ms.push_back(metrics(label_tree(g, s))); });
    mpz_class best_bs = ms[0].bs, best_bt = ms[0].bt;
    for (const Metrics& m : ms) {
      best_bs = std::min(best_bs, m.bs);
      best_bt = std::min(best_bt, m.bt);
    }
    bool disjoint = true;
    for (const Metrics& m : ms)
      if (m.bs == best_bs && m.bt == best_bt) disjoint = false;
    found = disjoint;
  }
  CHECK(found);
}
