#pragma once

#include <vector>

#include "tncarve/ctree.hpp"

namespace tncarve {

// One pairwise contraction.  Operands and result are sorted vertex-id
// sets of the original network; cost is the 3-cut weight (multiply-add
// count), size the 2-cut weight of the result.
struct ContractionStep {
  std::vector<VertexId> left, right, result;
  mpz_class cost, size;
};

// Full contraction schedule: n-1 steps in execution order, with the exact
// total time, the memory score the scheduling heuristic reports for the
// root, and the peak residency an actual execution would reach.
struct ContractionSequence {
  std::vector<ContractionStep> steps;
  mpz_class ct = 0;
  mpz_class cs_alg1 = 0;
  mpz_class peak = 0;
};

// Emits the schedule for a rooted tree using the memory heuristic: at each
// internal node the child whose first-evaluation total cs+CS is smaller is
// evaluated first (ties go left), and the reported score is
// CS(n) = max(cs(n), min(CS_l + cs_r, cs_l + CS_r)) with cs = weight of
// the arc above (1 at the root) and CS(leaf) = weight of the leaf's
// incident-edge cut.  The score deliberately follows that recursion even
// though it can undercount true peak residency; the `peak` field carries
// the simulated truth alongside.
ContractionSequence sequence(const RootedContractionTree& t);

// Ground-truth residency meter: singleton tensors materialize immediately
// before first use (size = product of incident bond dimensions); during a
// step the operands and the result are co-resident; operands are freed
// right after.  Returns the max residency reached.  Throws
// MalformedSequence if an operand is neither a singleton nor the result of
// an earlier step, or if operands overlap.
mpz_class simulate_peak(const NetworkGraph& g, const ContractionSequence& seq);

// Full structural and numeric validation of a sequence against its
// network: n-1 steps, operand availability, results as stated, exact
// costs/sizes, final result = all vertices, and totals (ct, peak)
// matching recomputation.  Throws MalformedSequence with a diagnostic.
void verify_sequence(const NetworkGraph& g, const ContractionSequence& seq);

// 8 arithmetic instructions per complex multiply-add.
mpz_class flops_lower_bound(const mpz_class& ct);

}  // namespace tncarve
