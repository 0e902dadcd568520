// Drives the installed command-line binary end to end: bench CSV aggregate
// rows are recomputed here from the record rows and must match the emitted
// strings exactly; worker count must not change any non-timing output; the
// worked examples (six-tensor grid, complete graph on five tensors, single
// bond) must behave as documented, including exit codes.

#include <sys/wait.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <memory>
#include <string>
#include <vector>

#include "doctest.h"
#include "fixtures.hpp"
#include "json.hpp"
#include "tncarve/ctree.hpp"
#include "tncarve/io.hpp"
#include "tncarve/netgraph.hpp"
#include "tncarve/oracle.hpp"
#include "tncarve/ratcatcher.hpp"
#include "tncarve/sequencer.hpp"

using namespace tncarve;
using namespace tncarve::testing;
namespace fs = std::filesystem;

namespace {

int run_cli(const std::string& args) {
  const std::string cmd = std::string(TNCARVE_CLI_PATH) + " " + args;
  const int status = std::system(cmd.c_str());
  REQUIRE(status != -1);
  REQUIRE(WIFEXITED(status));
  return WEXITSTATUS(status);
}

fs::path test_dir() {
  const fs::path dir = fs::temp_directory_path() / "tncarve_cli_test";
  fs::create_directories(dir);
  return dir;
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      cells.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  cells.push_back(cur);
  return cells;
}

std::vector<std::vector<std::string>> read_csv(const fs::path& p) {
  std::vector<std::vector<std::string>> rows;
  std::string text = read_text_file(p.string());
  std::string line;
  for (char c : text) {
    if (c == '\n') {
      if (!line.empty()) rows.push_back(split_csv_line(line));
      line.clear();
    } else {
      line += c;
    }
  }
  if (!line.empty()) rows.push_back(split_csv_line(line));
  return rows;
}

std::string fmt17(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

bool is_aggregate_label(const std::string& s) {
  return s == "mean" || s == "median" || s == "stddev";
}

}  // namespace

TEST_CASE("bench CSV aggregates match an independent recomputation") {
  const fs::path dir = test_dir();
  const fs::path csv = dir / "bench.csv";
  REQUIRE(run_cli("--seed 7 bench --L 3 -n 4 -o " + csv.string() + " 2>/dev/null") == 0);

  const auto rows = read_csv(csv);
  REQUIRE(rows.size() >= 2);
  CHECK(rows[0] == std::vector<std::string>{"L", "seed", "carw", "cw_time_s", "avg_ec_time_s",
                                            "ratcon_time_s", "ratcon_ct", "exact_ct", "rho"});

  std::vector<std::vector<std::string>> records;
  std::vector<std::vector<std::string>> aggregates;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    REQUIRE(rows[i].size() == 9);
    (is_aggregate_label(rows[i][1]) ? aggregates : records).push_back(rows[i]);
  }
  REQUIRE(records.size() == 4);
  REQUIRE(aggregates.size() == 3);  // one L value -> mean, median, stddev

  // rho >= 1 on every solved record (the heuristic can never beat the exact
  // optimum), and parseable numbers everywhere in this small configuration.
  for (const auto& r : records) {
    CHECK(std::stod(r[8]) >= 1.0);
    CHECK(std::stod(r[7]) <= std::stod(r[6]));
  }

  // Recompute each aggregate column: mean sums in record order, the median
  // and the squared deviations run over the sorted values, stddev uses the
  // n-1 denominator (0 for a single record), nulls are skipped.
  for (std::size_t col = 2; col < 9; ++col) {
    std::vector<double> xs;
    for (const auto& r : records)
      if (r[col] != "null") xs.push_back(std::stod(r[col]));
    std::string want_mean = "null", want_median = "null", want_stddev = "null";
    if (!xs.empty()) {
      double sum = 0.0;
      for (double x : xs) sum += x;
      const double mean = sum / static_cast<double>(xs.size());
      std::sort(xs.begin(), xs.end());
      const std::size_t n = xs.size();
      const double median = n % 2 ? xs[n / 2] : (xs[n / 2 - 1] + xs[n / 2]) / 2.0;
      double stddev = 0.0;
      if (n >= 2) {
        double ss = 0.0;
        for (double x : xs) ss += (x - mean) * (x - mean);
        stddev = std::sqrt(ss / static_cast<double>(n - 1));
      }
      want_mean = fmt17(mean);
      want_median = fmt17(median);
      want_stddev = fmt17(stddev);
    }
    for (const auto& a : aggregates) {
      const std::string& want =
          a[1] == "mean" ? want_mean : a[1] == "median" ? want_median : want_stddev;
      CHECK(a[col] == want);
    }
  }
}

TEST_CASE("bench output does not depend on the worker count") {
  const fs::path dir = test_dir();
  const fs::path a = dir / "bench_w1.csv";
  const fs::path b = dir / "bench_w4.csv";
  REQUIRE(run_cli("--seed 7 --workers 1 bench --L 3 -n 3 -o " + a.string() + " 2>/dev/null") == 0);
  REQUIRE(run_cli("--seed 7 --workers 4 bench --L 3 -n 3 -o " + b.string() + " 2>/dev/null") == 0);
  const auto ra = read_csv(a);
  const auto rb = read_csv(b);
  REQUIRE(ra.size() == rb.size());
  for (std::size_t i = 0; i < ra.size(); ++i) {
    REQUIRE(ra[i].size() == rb[i].size());
    for (std::size_t c = 0; c < ra[i].size(); ++c) {
      if (c >= 3 && c <= 5) continue;  // wall-clock columns
      CHECK(ra[i][c] == rb[i][c]);
    }
  }
}

TEST_CASE("bench rows without an exact baseline carry null through aggregation") {
  const fs::path dir = test_dir();
  const fs::path csv = dir / "bench_null.csv";
  // A one-millisecond budget guarantees the 16-tensor exact baseline aborts.
  REQUIRE(run_cli("--seed 9 bench --L 4 -n 1 --budget 0.001 -o " + csv.string() +
                  " 2>/dev/null") == 0);
  const auto rows = read_csv(csv);
  REQUIRE(rows.size() == 5);  // header + 1 record + 3 aggregates
  const auto& rec = rows[1];
  CHECK(rec[7] == "null");
  CHECK(rec[8] == "null");
  CHECK(rec[2] != "null");
  for (std::size_t i = 2; i < rows.size(); ++i) {
    CHECK(rows[i][7] == "null");
    CHECK(rows[i][8] == "null");
    if (rows[i][1] == "stddev") CHECK(rows[i][2] == "0");  // single record
    if (rows[i][1] == "mean") CHECK(rows[i][2] == rec[2]);
  }
}

TEST_CASE("pipeline on the six-tensor grid reaches the exhaustive optimum") {
  const fs::path dir = test_dir();
  NetworkGraph g = fig_grid();
  const fs::path gpath = dir / "fig.json";
  save_graph(g, gpath.string());
  REQUIRE(run_cli("--seed 5 pipeline " + gpath.string() + " -N 10 -o " + dir.string() +
                  " >/dev/null 2>&1") == 0);

  auto net = share(simplify(g));
  const ContractionSequence seq = load_sequence((dir / "fig.seq.json").string(), *net);
  verify_sequence(*net, seq);

  // Exhaustive baseline: over every width-optimal free tree, the best
  // optimally-rooted schedule cost.
  const BruteWidth bw = brute_cw(*net);
  mpz_class best_ct = -1;
  enumerate_free_trees(net->vertex_count(), [&](const TreeShape& shape) {
    const FreeContractionTree t = label_tree(net, shape);
    if (metrics(t).bs != bw.bs) return;
    const mpz_class ct = sequence(optimal_root(t).first).ct;
    if (best_ct < 0 || ct < best_ct) best_ct = ct;
  });
  REQUIRE(best_ct > 0);
  CHECK(seq.ct == best_ct);

  // The emitted tree reproduces the emitted sequence.
  const auto [tree, is_free] = load_tree((dir / "fig.tree.json").string(), net);
  CHECK_FALSE(is_free);
  CHECK(sequence(tree).ct == seq.ct);
}

TEST_CASE("a single-bond network schedules in one step") {
  const fs::path dir = test_dir();
  NetworkGraph g({"A", "B"}, {{0, 1, 3}});
  const fs::path gpath = dir / "bond.json";
  save_graph(g, gpath.string());
  REQUIRE(run_cli("pipeline " + gpath.string() + " -o " + dir.string() +
                  " >/dev/null 2>&1") == 0);
  auto net = share(simplify(g));
  const ContractionSequence seq = load_sequence((dir / "bond.seq.json").string(), *net);
  REQUIRE(seq.steps.size() == 1);
  CHECK(seq.ct == 3);
  CHECK(seq.steps[0].cost == 3);
}

TEST_CASE("width subcommand agrees with the library") {
  const fs::path dir = test_dir();
  std::mt19937_64 rng(77);
  NetworkGraph g = random_biconnected_planar(rng, 7);
  const fs::path gpath = dir / "rand.json";
  save_graph(g, gpath.string());
  const fs::path out = dir / "width.json";
  REQUIRE(run_cli("width " + gpath.string() + " > " + out.string() + " 2>/dev/null") == 0);

  const NetworkGraph s = simplify(g);
  const CarvingWidthResult cw = carving_width(s, planar_embedding(s));
  const auto j = nlohmann::json::parse(read_text_file(out.string()));
  CHECK(j.at("carw").get<double>() == doctest::Approx(cw.carw).epsilon(1e-12));
  CHECK(j.at("bs").get<std::string>() == cw.bs.get_str());
}

TEST_CASE("failure exit codes are stable") {
  const fs::path dir = test_dir();

  // Non-planar input: complete graph on five tensors.
  std::vector<std::string> names = {"A", "B", "C", "D", "E"};
  std::vector<Edge> edges;
  for (VertexId i = 0; i < 5; ++i)
    for (VertexId j = i + 1; j < 5; ++j) edges.push_back({i, j, 2});
  const fs::path k5 = dir / "k5.json";
  save_graph(NetworkGraph(names, edges), k5.string());
  CHECK(run_cli("width " + k5.string() + " >/dev/null 2>&1") == 2);

  // Missing and malformed files are I/O-domain failures.
  CHECK(run_cli("width " + (dir / "no_such_file.json").string() + " >/dev/null 2>&1") == 3);
  const fs::path bad = dir / "bad.json";
  write_text_file(bad.string(), "{\"vertices\": [\n");
  CHECK(run_cli("width " + bad.string() + " >/dev/null 2>&1") == 3);

  // Usage errors come back as 1.
  CHECK(run_cli("width >/dev/null 2>&1") == 1);
  CHECK(run_cli("--no-such-flag >/dev/null 2>&1") == 1);
}
