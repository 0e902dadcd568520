#pragma once

#include <complex>
#include <functional>
#include <map>

#include "tncarve/ctree.hpp"
#include "tncarve/sequencer.hpp"

namespace tncarve {

// Visits every free full binary tree skeleton on n leaves exactly once, by
// iterative leaf insertion (leaf k subdivides each existing arc in turn).
// There are (2n-5)!! of them.
void enumerate_free_trees(std::size_t n, const std::function<void(const TreeShape&)>& visit);

// k!! for odd k (1 for k <= 0).
mpz_class double_factorial(long k);

struct BruteWidth {
  double carw = 0.0;  // log2 of the best achievable max arc weight
  mpz_class bs = 1;   // that weight, exact
  TreeShape best;
};

// Exhaustive minimum over all free trees of the heaviest arc load.
// Throws TooLarge for n > 9.
BruteWidth brute_cw(const NetworkGraph& g);

// Subset-DP exact carving width (log2 domain), no tree enumeration:
// f(S) = max(B(S), min over proper splits X of max(f(X), f(S without X))).
// Independent of both brute_cw and the game-based solver.  Throws TooLarge
// for n > 16.
double carving_width_dp(const NetworkGraph& g);

struct ExactCt {
  mpz_class ct;
  RootedContractionTree tree;  // witness achieving ct
};

// Minimum total contraction cost over all rooted trees, by subset DP:
// cost(S) = min over bipartitions S = X + Y of
//   cost(X) + cost(Y) + w(delta(X,Y)) * w(delta(S, V-S)).
// Outer products are allowed; the result is a valid lower bound for every
// tree-shaped schedule and matches the unrestricted optimum.  Requires
// n <= 20 and at most 64 edges (TooLarge otherwise); an optional positive
// time budget in seconds aborts long runs with TooLarge.
ExactCt exact_min_ct(std::shared_ptr<const NetworkGraph> g, double budget_seconds = 0.0);

// Dense complex tensor for numeric validation: labels are the sorted
// incident edge ids, values row-major over the labels in that order.
struct DenseTensor {
  std::vector<EdgeId> labels;
  std::vector<std::uint64_t> dims;
  std::vector<std::complex<double>> values;
};

// One tensor per vertex, entries uniform in [-1,1] x [-1,1]i, reproducible
// from the seed.
std::map<VertexId, DenseTensor> make_random_tensors(const NetworkGraph& g, std::uint64_t seed);

// Executes the sequence on real data by naive pairwise index-merge
// contractions.  Validates the sequence first, checks every tensor against
// the network (DimensionMismatch), and asserts that each step performs
// exactly step.cost multiply-adds.  Returns the final scalar.
std::complex<double> execute(const NetworkGraph& g,
                             const std::map<VertexId, DenseTensor>& tensors,
                             const ContractionSequence& seq);

// Order-free ground truth: the full nested sum over all joint index
// assignments.  Throws TooLarge if the assignment count exceeds cap.
std::complex<double> full_contraction_reference(const NetworkGraph& g,
                                                const std::map<VertexId, DenseTensor>& tensors,
                                                double cap = 1e8);

}  // namespace tncarve
