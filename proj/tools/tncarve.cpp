// Command-line front end: loads tensor-network graph files, canonicalizes
// them, and exposes width computation, decomposition search, contraction
// scheduling, verification, exact baselines, graph generation, and the
// benchmark harness.  Exit codes: 0 success, 1 usage error, 2 non-planar
// input, 3 input/output or sampling-budget failure, 4 internal invariant
// violation.
#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <complex>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <future>
#include <iostream>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "tncarve/carver.hpp"
#include "tncarve/ctree.hpp"
#include "tncarve/embedding.hpp"
#include "tncarve/errors.hpp"
#include "tncarve/io.hpp"
#include "tncarve/netgen.hpp"
#include "tncarve/netgraph.hpp"
#include "tncarve/oracle.hpp"
#include "tncarve/ratcatcher.hpp"
#include "tncarve/rng.hpp"
#include "tncarve/sequencer.hpp"

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;
using namespace tncarve;

namespace {

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// A graph ready for width work: canonicalized network plus an embedding.
// The file's rotation is honored when simplification left the edge list
// untouched; otherwise a fresh embedding is computed.
struct Prepared {
  std::shared_ptr<const NetworkGraph> net;
  Embedding emb;
  double simplify_seconds = 0.0;
  double embed_seconds = 0.0;
};

Prepared prepare(const GraphFile& f) {
  auto t0 = std::chrono::steady_clock::now();
  auto net = std::make_shared<const NetworkGraph>(simplify(f.graph));
  const double simplify_s = seconds_since(t0);

  auto same_edges = [&] {
    if (net->vertex_count() != f.graph.vertex_count()) return false;
    if (net->edge_count() != f.graph.edge_count()) return false;
    for (EdgeId e = 0; e < net->edge_count(); ++e) {
      const Edge &a = net->edge(e), &b = f.graph.edge(e);
      if (a.u != b.u || a.v != b.v || a.w != b.w) return false;
    }
    for (VertexId v = 0; v < net->vertex_count(); ++v)
      if (net->name(v) != f.graph.name(v)) return false;
    return true;
  };

  t0 = std::chrono::steady_clock::now();
  Embedding emb = (f.rotation && same_edges()) ? Embedding(*net, *f.rotation)
                                               : planar_embedding(*net);
  return {std::move(net), std::move(emb), simplify_s, seconds_since(t0)};
}

// ------------------------------------------------------------- output ----

void emit(const json& obj, const std::string& format) {
  if (format == "csv") {
    std::string header, row;
    bool first = true;
    for (auto it = obj.begin(); it != obj.end(); ++it) {
      if (!it->is_primitive()) continue;  // nested objects stay json-only
      if (!first) {
        header += ',';
        row += ',';
      }
      first = false;
      header += it.key();
      row += it->is_string() ? it->get<std::string>() : it->dump();
    }
    std::cout << header << '\n' << row << '\n';
  } else {
    std::cout << obj.dump(2) << '\n';
  }
}

std::string fmt_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

// ------------------------------------------------------------ commands ---

struct GlobalOpts {
  std::uint64_t seed = 0;
  std::size_t workers = 1;
  double eps = 1e-9;
  std::string format;  // "", "json" or "csv"

  std::string fmt(const std::string& dflt = "json") const {
    return format.empty() ? dflt : format;
  }
};

int cmd_simplify(const GlobalOpts&, const std::string& in, const std::string& out) {
  GraphFile f = load_graph(in);
  NetworkGraph s = simplify(f.graph);
  const std::string text = graph_to_json(s);
  if (out.empty())
    std::cout << text;
  else
    write_text_file(out, text);
  return 0;
}

int cmd_width(const GlobalOpts& go, const std::string& in, bool exact_pow2) {
  Prepared p = prepare(load_graph(in));
  CarvingWidthResult r = carving_width(*p.net, p.emb, go.eps);
  if (exact_pow2 && !r.bs_exact)
    throw MalformedInput(
        "--exact-pow2 requires every bond dimension to be a power of two");
  json out;
  out["carw"] = r.carw;
  out["bs"] = r.bs.get_str();
  out["bs_exact"] = r.bs_exact;
  out["error_bound"] = r.error_bound;
  out["decision_calls"] = r.decision_calls;
  out["elapsed_seconds"] = r.elapsed_seconds;
  emit(out, go.fmt());
  return 0;
}

int cmd_decompose(const GlobalOpts& go, const std::string& in, std::size_t restarts,
                  const std::string& out_tree) {
  Prepared p = prepare(load_graph(in));
  auto t0 = std::chrono::steady_clock::now();
  auto [tree, met] = best_of(*p.net, p.emb, restarts, go.seed, go.workers);
  const double carve_s = seconds_since(t0);
  if (!out_tree.empty()) save_tree(tree, out_tree);
  json out;
  out["leaves"] = met.leaves;
  out["bs"] = met.bs.get_str();
  out["bt"] = met.bt.get_str();
  out["ct"] = met.ct.get_str();
  out["log2_bs"] = met.log2_bs;
  out["log2_bt"] = met.log2_bt;
  out["restarts"] = restarts;
  out["elapsed_seconds"] = carve_s;
  if (!out_tree.empty()) out["tree_file"] = out_tree;
  emit(out, go.fmt());
  return 0;
}

int cmd_sequence(const GlobalOpts& go, const std::string& gin, const std::string& tin,
                 const std::string& out_seq) {
  Prepared p = prepare(load_graph(gin));
  auto [rooted, is_free] = load_tree(tin, p.net);
  std::optional<RootedContractionTree> schedule;
  if (is_free) {
    auto [r, arc] = optimal_root(unroot(rooted));
    schedule.emplace(std::move(r));
  } else {
    schedule.emplace(std::move(rooted));
  }
  ContractionSequence seq = sequence(*schedule);
  verify_sequence(*p.net, seq);
  if (!out_seq.empty()) save_sequence(*p.net, seq, out_seq);
  json out;
  out["steps"] = seq.steps.size();
  out["ct"] = seq.ct.get_str();
  out["cs_alg1"] = seq.cs_alg1.get_str();
  out["peak"] = seq.peak.get_str();
  out["flops_lower_bound"] = flops_lower_bound(seq.ct).get_str();
  out["rerooted"] = is_free;
  if (!out_seq.empty()) out["sequence_file"] = out_seq;
  emit(out, go.fmt());
  return 0;
}

int cmd_verify(const GlobalOpts& go, const std::string& gin, const std::string& sin,
               bool numeric, double tol) {
  Prepared p = prepare(load_graph(gin));
  ContractionSequence seq = load_sequence(sin, *p.net);
  verify_sequence(*p.net, seq);  // throws MalformedSequence on any defect
  json out;
  out["valid"] = true;
  out["steps"] = seq.steps.size();
  out["ct"] = seq.ct.get_str();
  out["peak"] = seq.peak.get_str();
  if (numeric) {
    auto tensors = make_random_tensors(*p.net, go.seed);
    const std::complex<double> got = execute(*p.net, tensors, seq);
    const std::complex<double> want = full_contraction_reference(*p.net, tensors);
    const double rel = std::abs(got - want) / std::max(1e-300, std::abs(want));
    out["numeric_seed"] = go.seed;
    out["relative_error"] = rel;
    if (!(rel <= tol)) {
      out["valid"] = false;
      emit(out, go.fmt());
      throw MalformedSequence("numeric check failed: relative error " +
                              fmt_double(rel) + " exceeds " + fmt_double(tol));
    }
  }
  emit(out, go.fmt());
  return 0;
}

int cmd_exact(const GlobalOpts& go, const std::string& in, double budget,
              const std::string& out_tree) {
  Prepared p = prepare(load_graph(in));
  auto t0 = std::chrono::steady_clock::now();
  ExactCt r = exact_min_ct(p.net, budget);
  const double elapsed = seconds_since(t0);
  if (!out_tree.empty()) save_tree(r.tree, out_tree);
  Metrics met = metrics(r.tree);
  json out;
  out["ct"] = r.ct.get_str();
  out["bs"] = met.bs.get_str();
  out["bt"] = met.bt.get_str();
  out["elapsed_seconds"] = elapsed;
  if (!out_tree.empty()) out["tree_file"] = out_tree;
  emit(out, go.fmt());
  return 0;
}

// ------------------------------------------------------------- generate --

int cmd_generate(const GlobalOpts& go, std::size_t L, std::size_t count,
                 const std::string& out_dir, const std::string& mu_arg,
                 const std::string& sigma_arg, double cap, std::size_t max_rejects,
                 double min_acceptance, std::size_t est_draws) {
  GenConfig cfg;
  cfg.L = L;
  cfg.memory_cap_log2 = cap;
  cfg.max_rejects = max_rejects;
  cfg.seed = go.seed;
  cfg.mu_log = (mu_arg == "auto") ? calibrate_mu(L, cap) : std::stod(mu_arg);

  json sigma_meta;
  if (sigma_arg == "auto") {
    SigmaEstimate est =
        estimate_sigma_max(cfg, derive_seed(go.seed, std::uint64_t{1} << 32),
                           min_acceptance, est_draws);
    cfg.sigma_max = est.sigma_max;
    sigma_meta = {{"requested", "auto"},
                  {"acceptance", est.acceptance},
                  {"min_acceptance", min_acceptance},
                  {"draws", est_draws}};
  } else {
    cfg.sigma_max = std::stod(sigma_arg);
  }

  fs::create_directories(out_dir);
  auto [base, emb] = grid(L);
  const auto rotation = emb.rotation();

  json graphs = json::array();
  for (std::size_t i = 0; i < count; ++i) {
    Rng rng(derive_seed(go.seed, i));
    SampleStats st;
    NetworkGraph g = sample(cfg, rng, &st);
    char name[32];
    std::snprintf(name, sizeof name, "graph_%03zu.json", i);
    const std::string path = (fs::path(out_dir) / name).string();
    save_graph(g, path, &rotation);
    graphs.push_back({{"file", name},
                      {"seed", derive_seed(go.seed, i)},
                      {"attempts", st.attempts},
                      {"rejected_biconnectivity", st.rejected_biconnectivity},
                      {"rejected_width", st.rejected_width}});
  }

  json manifest;
  manifest["config"] = {{"L", cfg.L},
                        {"mu_log", cfg.mu_log},
                        {"sigma_max", cfg.sigma_max},
                        {"memory_cap_log2", cfg.memory_cap_log2},
                        {"max_rejects", cfg.max_rejects},
                        {"seed", go.seed},
                        {"count", count}};
  if (!sigma_meta.is_null()) manifest["sigma_estimate"] = sigma_meta;
  manifest["graphs"] = std::move(graphs);
  const std::string mpath = (fs::path(out_dir) / "manifest.json").string();
  write_text_file(mpath, manifest.dump(2) + "\n");

  json out;
  out["manifest"] = mpath;
  out["count"] = count;
  out["mu_log"] = cfg.mu_log;
  out["sigma_max"] = cfg.sigma_max;
  emit(out, go.fmt());
  return 0;
}

// ---------------------------------------------------------------- bench --

struct BenchRecord {
  std::size_t L = 0;
  std::uint64_t seed = 0;  // generation seed of this sample
  bool failed = false;
  double carw = 0.0;
  double cw_time_s = 0.0;
  double avg_ec_time_s = 0.0;
  double ratcon_time_s = 0.0;
  mpz_class ratcon_ct = 0;
  std::optional<mpz_class> exact_ct;
  std::optional<double> rho;
};

std::vector<std::size_t> parse_l_range(const std::string& text) {
  const auto colon = text.find(':');
  std::size_t lo, hi;
  if (colon == std::string::npos) {
    lo = hi = std::stoul(text);
  } else {
    lo = std::stoul(text.substr(0, colon));
    hi = std::stoul(text.substr(colon + 1));
  }
  std::vector<std::size_t> ls;
  for (std::size_t l = lo; l <= hi; ++l) ls.push_back(l);
  return ls;
}

BenchRecord bench_one(std::size_t L, std::uint64_t gseed, std::uint64_t cseed,
                      const GenConfig& cfg, std::size_t restarts, double budget) {
  BenchRecord rec;
  rec.L = L;
  rec.seed = gseed;
  try {
    Rng rng(gseed);
    NetworkGraph raw = sample(cfg, rng);

    auto t_all = std::chrono::steady_clock::now();
    auto net = std::make_shared<const NetworkGraph>(simplify(raw));
    Embedding emb = planar_embedding(*net);

    auto t0 = std::chrono::steady_clock::now();
    CarvingWidthResult cw = carving_width(*net, emb);
    rec.cw_time_s = seconds_since(t0);
    rec.carw = cw.carw;

    t0 = std::chrono::steady_clock::now();
    auto [tree, met] = best_of(*net, emb, restarts, cseed);
    rec.avg_ec_time_s = seconds_since(t0) / static_cast<double>(restarts);

    auto [rooted, arc] = optimal_root(tree);
    ContractionSequence seq = sequence(rooted);
    rec.ratcon_time_s = seconds_since(t_all);
    rec.ratcon_ct = seq.ct;

    try {
      ExactCt ex = exact_min_ct(net, budget);
      rec.exact_ct = ex.ct;
      if (seq.ct < ex.ct)
        throw InternalInvariant("schedule beats the exact optimum: " +
                                seq.ct.get_str() + " < " + ex.ct.get_str());
      rec.rho = mpz_class(seq.ct).get_d() / ex.ct.get_d();
    } catch (const TooLarge&) {
      // No exact baseline at this size/budget; the row keeps null fields.
    }
  } catch (const InternalInvariant&) {
    throw;
  } catch (const std::exception& e) {
    rec.failed = true;
    std::cerr << "bench: L=" << L << " seed=" << gseed << " failed: " << e.what()
              << '\n';
  }
  return rec;
}

// Mean/median/sample-stddev over the values present; empty input yields
// nulls.  Kept deliberately simple so tests can recompute it bit-for-bit.
struct Aggregate {
  std::optional<double> mean, median, stddev;
};

Aggregate aggregate(std::vector<double> xs) {
  Aggregate a;
  if (xs.empty()) return a;
  double sum = 0.0;
  for (double x : xs) sum += x;
  const double mean = sum / static_cast<double>(xs.size());
  a.mean = mean;
  std::sort(xs.begin(), xs.end());
  const std::size_t n = xs.size();
  a.median = (n % 2 == 1) ? xs[n / 2] : (xs[n / 2 - 1] + xs[n / 2]) / 2.0;
  if (n >= 2) {
    double ss = 0.0;
    for (double x : xs) ss += (x - mean) * (x - mean);
    a.stddev = std::sqrt(ss / static_cast<double>(n - 1));
  } else {
    a.stddev = 0.0;
  }
  return a;
}

int cmd_bench(const GlobalOpts& go, const std::string& l_range, std::size_t samples,
              std::size_t restarts, double budget, double sigma_max, double cap,
              std::size_t max_rejects, const std::string& out_csv) {
  const std::vector<std::size_t> ls = parse_l_range(l_range);

  // One CLI seed fans out into per-sample generation and carver streams.
  struct Job {
    std::size_t L;
    std::uint64_t gseed, cseed;
    GenConfig cfg;
  };
  std::vector<Job> jobs;
  for (std::size_t L : ls) {
    GenConfig cfg;
    cfg.L = L;
    cfg.memory_cap_log2 = cap;
    cfg.sigma_max = sigma_max;
    cfg.max_rejects = max_rejects;
    cfg.mu_log = calibrate_mu(L, cap);
    const std::uint64_t lbase = derive_seed(go.seed, L);
    for (std::size_t s = 0; s < samples; ++s)
      jobs.push_back({L, derive_seed(lbase, 2 * s), derive_seed(lbase, 2 * s + 1), cfg});
  }

  std::vector<BenchRecord> recs(jobs.size());
  const std::size_t workers = std::max<std::size_t>(1, go.workers);
  if (workers == 1 || jobs.size() <= 1) {
    for (std::size_t i = 0; i < jobs.size(); ++i)
      recs[i] = bench_one(jobs[i].L, jobs[i].gseed, jobs[i].cseed, jobs[i].cfg,
                          restarts, budget);
  } else {
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
      for (;;) {
        const std::size_t i = next.fetch_add(1);
        if (i >= jobs.size()) return;
        recs[i] = bench_one(jobs[i].L, jobs[i].gseed, jobs[i].cseed, jobs[i].cfg,
                            restarts, budget);
      }
    };
    std::vector<std::future<void>> pool;
    for (std::size_t w = 0; w < std::min(workers, jobs.size()); ++w)
      pool.push_back(std::async(std::launch::async, worker));
    for (auto& f : pool) f.get();
  }

  std::sort(recs.begin(), recs.end(), [](const BenchRecord& a, const BenchRecord& b) {
    return a.L != b.L ? a.L < b.L : a.seed < b.seed;
  });

  // CSV assembly: per-graph rows then mean/median/stddev rows per L (the
  // label sits in the seed column).  Failed rows keep only L and seed.
  std::vector<std::string> lines;
  lines.push_back("L,seed,carw,cw_time_s,avg_ec_time_s,ratcon_time_s,ratcon_ct,exact_ct,rho");
  json jrecords = json::array();
  auto null_or = [](const std::optional<double>& v) {
    return v ? fmt_double(*v) : std::string("null");
  };
  for (const BenchRecord& r : recs) {
    std::string line = std::to_string(r.L) + ',' + std::to_string(r.seed);
    json jr{{"L", r.L}, {"seed", r.seed}};
    if (r.failed) {
      line += ",null,null,null,null,null,null,null";
      jr["failed"] = true;
    } else {
      line += ',' + fmt_double(r.carw) + ',' + fmt_double(r.cw_time_s) + ',' +
              fmt_double(r.avg_ec_time_s) + ',' + fmt_double(r.ratcon_time_s) + ',' +
              r.ratcon_ct.get_str() + ',' +
              (r.exact_ct ? r.exact_ct->get_str() : std::string("null")) + ',' +
              null_or(r.rho);
      jr["carw"] = r.carw;
      jr["cw_time_s"] = r.cw_time_s;
      jr["avg_ec_time_s"] = r.avg_ec_time_s;
      jr["ratcon_time_s"] = r.ratcon_time_s;
      jr["ratcon_ct"] = r.ratcon_ct.get_str();
      jr["exact_ct"] = r.exact_ct ? json(r.exact_ct->get_str()) : json();
      jr["rho"] = r.rho ? json(*r.rho) : json();
    }
    lines.push_back(std::move(line));
    jrecords.push_back(std::move(jr));
  }

  json jaggregates = json::array();
  for (std::size_t L : ls) {
    std::vector<double> carw, cwt, ect, rct, ctv, exv, rho;
    for (const BenchRecord& r : recs) {
      if (r.L != L || r.failed) continue;
      carw.push_back(r.carw);
      cwt.push_back(r.cw_time_s);
      ect.push_back(r.avg_ec_time_s);
      rct.push_back(r.ratcon_time_s);
      ctv.push_back(mpz_class(r.ratcon_ct).get_d());
      if (r.exact_ct) exv.push_back(mpz_class(*r.exact_ct).get_d());
      if (r.rho) rho.push_back(*r.rho);
    }
    const Aggregate a_carw = aggregate(carw), a_cwt = aggregate(cwt),
                    a_ect = aggregate(ect), a_rct = aggregate(rct),
                    a_ct = aggregate(ctv), a_ex = aggregate(exv),
                    a_rho = aggregate(rho);
    auto row = [&](const char* label, auto pick) {
      std::string line = std::to_string(L) + ',' + label;
      json jr{{"L", L}, {"stat", label}};
      auto cell = [&](const char* key, const Aggregate& agg) {
        const std::optional<double> v = pick(agg);
        line += ',' + (v ? fmt_double(*v) : std::string("null"));
        jr[key] = v ? json(*v) : json();
      };
      cell("carw", a_carw);
      cell("cw_time_s", a_cwt);
      cell("avg_ec_time_s", a_ect);
      cell("ratcon_time_s", a_rct);
      cell("ratcon_ct", a_ct);
      cell("exact_ct", a_ex);
      cell("rho", a_rho);
      lines.push_back(std::move(line));
      jaggregates.push_back(std::move(jr));
    };
    row("mean", [](const Aggregate& a) { return a.mean; });
    row("median", [](const Aggregate& a) { return a.median; });
    row("stddev", [](const Aggregate& a) { return a.stddev; });
  }

  std::string csv;
  for (const std::string& l : lines) csv += l + '\n';
  if (!out_csv.empty()) write_text_file(out_csv, csv);

  if (go.fmt("csv") == "json") {
    json out;
    out["records"] = std::move(jrecords);
    out["aggregates"] = std::move(jaggregates);
    std::cout << out.dump(2) << '\n';
  } else if (out_csv.empty()) {
    std::cout << csv;
  }
  return 0;
}

// ------------------------------------------------------------- pipeline --

int cmd_pipeline(const GlobalOpts& go, const std::string& in, std::size_t restarts,
                 const std::string& out_dir) {
  GraphFile f = load_graph(in);
  Prepared p = prepare(f);

  auto t0 = std::chrono::steady_clock::now();
  CarvingWidthResult cw = carving_width(*p.net, p.emb, go.eps);
  const double width_s = seconds_since(t0);

  t0 = std::chrono::steady_clock::now();
  auto [tree, met] = best_of(*p.net, p.emb, restarts, go.seed, go.workers);
  const double carve_s = seconds_since(t0);

  t0 = std::chrono::steady_clock::now();
  auto [rooted, root_arc] = optimal_root(tree);
  ContractionSequence seq = sequence(rooted);
  const double sequence_s = seconds_since(t0);

  // Re-validate everything the pipeline promises before writing artifacts.
  if (!node_weight_identity_check(tree) || !node_weight_identity_check(rooted))
    throw InternalInvariant("node-weight identity failed on the final tree");
  if (met.log2_bs > cw.carw + std::max(go.eps, 1e-6))
    throw InternalInvariant("decomposition width " + std::to_string(met.log2_bs) +
                            " exceeds carving width " + std::to_string(cw.carw));
  verify_sequence(*p.net, seq);

  fs::create_directories(out_dir.empty() ? "." : out_dir);
  const std::string stem = fs::path(in).stem().string();
  const fs::path dir = out_dir.empty() ? fs::path(".") : fs::path(out_dir);
  const std::string tree_file = (dir / (stem + ".tree.json")).string();
  const std::string seq_file = (dir / (stem + ".seq.json")).string();
  save_tree(rooted, tree_file);
  save_sequence(*p.net, seq, seq_file);

  json out;
  out["carw"] = cw.carw;
  out["bs"] = met.bs.get_str();
  out["bt"] = met.bt.get_str();
  out["ct"] = seq.ct.get_str();
  out["cs_alg1"] = seq.cs_alg1.get_str();
  out["peak"] = seq.peak.get_str();
  out["steps"] = seq.steps.size();
  out["tree_file"] = tree_file;
  out["sequence_file"] = seq_file;
  out["timings"] = {{"simplify_s", p.simplify_seconds},
                    {"embed_s", p.embed_seconds},
                    {"width_s", width_s},
                    {"carve_s", carve_s},
                    {"sequence_s", sequence_s}};
  emit(out, go.fmt());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "tncarve: contraction planning for planar tensor networks via carving "
      "decompositions"};
  app.require_subcommand(0, 1);

  GlobalOpts go;
  app.add_option("--seed", go.seed, "root seed for all randomized phases");
  app.add_option("--workers", go.workers, "max concurrent jobs")->check(CLI::PositiveNumber);
  app.add_option("--eps", go.eps, "width bisection tolerance (log2 domain)")
      ->check(CLI::PositiveNumber);
  app.add_option("--format", go.format, "output format")
      ->check(CLI::IsMember({"json", "csv"}));

  std::function<int()> action;

  // simplify
  {
    auto* sub = app.add_subcommand("simplify", "canonicalize a graph file");
    sub->fallthrough();
    auto in = std::make_shared<std::string>();
    auto out = std::make_shared<std::string>();
    sub->add_option("graph", *in, "input graph file")->required();
    sub->add_option("-o,--out", *out, "output file (stdout if omitted)");
    sub->callback([&, in, out] { action = [&, in, out] { return cmd_simplify(go, *in, *out); }; });
  }
  // width
  {
    auto* sub = app.add_subcommand("width", "compute the carving width");
    sub->fallthrough();
    auto in = std::make_shared<std::string>();
    auto pow2 = std::make_shared<bool>(false);
    sub->add_option("graph", *in, "input graph file")->required();
    sub->add_flag("--exact-pow2", *pow2,
                  "require power-of-two dimensions and an exact result");
    sub->callback([&, in, pow2] { action = [&, in, pow2] { return cmd_width(go, *in, *pow2); }; });
  }
  // decompose
  {
    auto* sub = app.add_subcommand("decompose", "search for a contraction tree");
    sub->fallthrough();
    auto in = std::make_shared<std::string>();
    auto out = std::make_shared<std::string>();
    auto n = std::make_shared<std::size_t>(100);
    sub->add_option("graph", *in, "input graph file")->required();
    sub->add_option("-N,--restarts", *n, "independent randomized restarts")
        ->check(CLI::PositiveNumber);
    sub->add_option("-o,--out", *out, "tree output file");
    sub->callback([&, in, out, n] {
      action = [&, in, out, n] { return cmd_decompose(go, *in, *n, *out); };
    });
  }
  // sequence
  {
    auto* sub = app.add_subcommand("sequence", "emit a contraction schedule for a tree");
    sub->fallthrough();
    auto gin = std::make_shared<std::string>();
    auto tin = std::make_shared<std::string>();
    auto out = std::make_shared<std::string>();
    sub->add_option("graph", *gin, "input graph file")->required();
    sub->add_option("tree", *tin, "contraction tree file")->required();
    sub->add_option("-o,--out", *out, "sequence output file");
    sub->callback([&, gin, tin, out] {
      action = [&, gin, tin, out] { return cmd_sequence(go, *gin, *tin, *out); };
    });
  }
  // verify
  {
    auto* sub = app.add_subcommand("verify", "validate a schedule against its graph");
    sub->fallthrough();
    auto gin = std::make_shared<std::string>();
    auto sin = std::make_shared<std::string>();
    auto numeric = std::make_shared<bool>(false);
    auto tol = std::make_shared<double>(1e-8);
    sub->add_option("graph", *gin, "input graph file")->required();
    sub->add_option("sequence", *sin, "sequence file")->required();
    sub->add_flag("--numeric", *numeric, "also execute on random tensors");
    sub->add_option("--tol", *tol, "numeric relative tolerance");
    sub->callback([&, gin, sin, numeric, tol] {
      action = [&, gin, sin, numeric, tol] {
        return cmd_verify(go, *gin, *sin, *numeric, *tol);
      };
    });
  }
  // exact
  {
    auto* sub = app.add_subcommand("exact", "exact minimum total contraction cost");
    sub->fallthrough();
    auto in = std::make_shared<std::string>();
    auto out = std::make_shared<std::string>();
    auto budget = std::make_shared<double>(0.0);
    sub->add_option("graph", *in, "input graph file")->required();
    sub->add_option("--budget", *budget, "abort after this many seconds (0 = off)");
    sub->add_option("-o,--out", *out, "witness tree output file");
    sub->callback([&, in, out, budget] {
      action = [&, in, out, budget] { return cmd_exact(go, *in, *budget, *out); };
    });
  }
  // generate
  {
    auto* sub = app.add_subcommand("generate", "sample grid networks with lognormal bonds");
    sub->fallthrough();
    auto L = std::make_shared<std::size_t>(5);
    auto n = std::make_shared<std::size_t>(30);
    auto out = std::make_shared<std::string>();
    auto mu = std::make_shared<std::string>("auto");
    auto sigma = std::make_shared<std::string>("1.0");
    auto cap = std::make_shared<double>(36.0);
    auto rejects = std::make_shared<std::size_t>(1000);
    auto minacc = std::make_shared<double>(0.01);
    auto draws = std::make_shared<std::size_t>(200);
    sub->add_option("-L,--side", *L, "grid side length")->check(CLI::Range(std::size_t{2}, std::size_t{64}));
    sub->add_option("-n,--count", *n, "number of graphs");
    sub->add_option("-o,--out", *out, "output directory")->required();
    sub->add_option("--mu", *mu, "natural-log mean, or 'auto' to calibrate");
    sub->add_option("--sigma-max", *sigma, "spread ceiling, or 'auto' to estimate");
    sub->add_option("--cap", *cap, "memory cap (log2 of the largest tensor)");
    sub->add_option("--max-rejects", *rejects, "sampling budget per graph");
    sub->add_option("--min-acceptance", *minacc, "threshold for --sigma-max auto");
    sub->add_option("--est-draws", *draws, "Monte-Carlo draws for --sigma-max auto");
    sub->callback([&, L, n, out, mu, sigma, cap, rejects, minacc, draws] {
      action = [&, L, n, out, mu, sigma, cap, rejects, minacc, draws] {
        return cmd_generate(go, *L, *n, *out, *mu, *sigma, *cap, *rejects, *minacc,
                            *draws);
      };
    });
  }
  // bench
  {
    auto* sub = app.add_subcommand("bench", "generation + decomposition benchmark table");
    sub->fallthrough();
    auto lrange = std::make_shared<std::string>("3:4");
    auto samples = std::make_shared<std::size_t>(20);
    auto restarts = std::make_shared<std::size_t>(100);
    auto budget = std::make_shared<double>(600.0);
    auto sigma = std::make_shared<double>(1.0);
    auto cap = std::make_shared<double>(36.0);
    auto rejects = std::make_shared<std::size_t>(1000);
    auto out = std::make_shared<std::string>();
    sub->add_option("--L,--l-range", *lrange, "grid sides, 'lo:hi' inclusive or one value");
    sub->add_option("-n,--samples", *samples, "samples per side");
    sub->add_option("-N,--restarts", *restarts, "carver restarts per graph")
        ->check(CLI::PositiveNumber);
    sub->add_option("--budget", *budget, "seconds allowed per exact baseline (0 = off)");
    sub->add_option("--sigma-max", *sigma, "bond-spread ceiling for generation");
    sub->add_option("--cap", *cap, "memory cap (log2)");
    sub->add_option("--max-rejects", *rejects, "sampling budget per graph");
    sub->add_option("-o,--out", *out, "CSV output file (stdout if omitted)");
    sub->callback([&, lrange, samples, restarts, budget, sigma, cap, rejects, out] {
      action = [&, lrange, samples, restarts, budget, sigma, cap, rejects, out] {
        return cmd_bench(go, *lrange, *samples, *restarts, *budget, *sigma, *cap,
                         *rejects, *out);
      };
    });
  }
  // pipeline
  {
    auto* sub = app.add_subcommand(
        "pipeline", "simplify, embed, measure width, decompose, root, schedule");
    sub->fallthrough();
    auto in = std::make_shared<std::string>();
    auto out = std::make_shared<std::string>();
    auto n = std::make_shared<std::size_t>(100);
    sub->add_option("graph", *in, "input graph file")->required();
    sub->add_option("-N,--restarts", *n, "independent randomized restarts")
        ->check(CLI::PositiveNumber);
    sub->add_option("-o,--out", *out, "output directory (default: current)");
    sub->callback([&, in, out, n] {
      action = [&, in, out, n] { return cmd_pipeline(go, *in, *n, *out); };
    });
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 1;
  }

  if (!action) {
    std::cout << app.help();
    return 1;
  }
  try {
    return action();
  } catch (const NotPlanar& e) {
    std::cerr << e.what() << '\n';
    return 2;
  } catch (const NotPlanarEmbedding& e) {
    std::cerr << e.what() << '\n';
    return 2;
  } catch (const InternalInvariant& e) {
    std::cerr << "internal invariant violation\n" << e.what() << '\n';
    return 4;
  } catch (const std::runtime_error& e) {
    std::cerr << e.what() << '\n';
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "unexpected failure: " << e.what() << '\n';
    return 4;
  }
}
