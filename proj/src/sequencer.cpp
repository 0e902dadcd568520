#include "tncarve/sequencer.hpp"

#include <algorithm>
#include <map>

namespace tncarve {

namespace {

struct SubResult {
  std::vector<ContractionStep> steps;
  mpz_class cs_score;  // CS(node)
};

SubResult emit(const RootedContractionTree& t, NodeId node) {
  if (t.is_leaf(node)) return {{}, t.node_cut(node).weight};

  NodeId l = t.children(node)[0], r = t.children(node)[1];
  SubResult ls = emit(t, l), rs = emit(t, r);
  const mpz_class cs_l = t.arc_above(l).weight, cs_r = t.arc_above(r).weight;
  const mpz_class lfirst = cs_l + rs.cs_score;
  const mpz_class rfirst = cs_r + ls.cs_score;

  SubResult out;
  if (lfirst <= rfirst) {
    out.steps = std::move(ls.steps);
    out.steps.insert(out.steps.end(), rs.steps.begin(), rs.steps.end());
  } else {
    out.steps = std::move(rs.steps);
    out.steps.insert(out.steps.end(), ls.steps.begin(), ls.steps.end());
  }
  out.steps.push_back({t.subtree_vertices(l), t.subtree_vertices(r), t.subtree_vertices(node),
                       t.node_cut(node).weight, t.arc_above(node).weight});
  out.cs_score = std::max(t.arc_above(node).weight, std::min(lfirst, rfirst));
  return out;
}

}  // namespace

ContractionSequence sequence(const RootedContractionTree& t) {
  ContractionSequence seq;
  SubResult root = emit(t, t.root());
  seq.steps = std::move(root.steps);
  seq.cs_alg1 = root.cs_score;
  for (const ContractionStep& s : seq.steps) seq.ct += s.cost;
  seq.peak = simulate_peak(t.graph(), seq);
  return seq;
}

mpz_class simulate_peak(const NetworkGraph& g, const ContractionSequence& seq) {
  std::map<std::vector<VertexId>, mpz_class> resident;
  mpz_class total = 0, peak = 0;

  auto obtain = [&](const std::vector<VertexId>& operand) {
    if (resident.count(operand)) return;
    if (operand.size() == 1 && operand[0] < g.vertex_count()) {
      mpz_class size = boundary(g, operand).weight;
      resident.emplace(operand, size);
      total += size;
      return;
    }
    throw MalformedSequence("operand is neither resident nor a singleton tensor");
  };

  for (const ContractionStep& s : seq.steps) {
    for (VertexId v : s.left)
      if (std::binary_search(s.right.begin(), s.right.end(), v))
        throw MalformedSequence("operands overlap on vertex " + std::to_string(v));
    obtain(s.left);
    obtain(s.right);
    std::vector<VertexId> result;
    std::merge(s.left.begin(), s.left.end(), s.right.begin(), s.right.end(),
               std::back_inserter(result));
    mpz_class result_size = boundary(g, result).weight;
    peak = std::max(peak, mpz_class(total + result_size));
    total -= resident.at(s.left) + resident.at(s.right);
    resident.erase(s.left);
    resident.erase(s.right);
    total += result_size;
    resident.emplace(std::move(result), std::move(result_size));
  }
  return peak;
}

void verify_sequence(const NetworkGraph& g, const ContractionSequence& seq) {
  const std::size_t n = g.vertex_count();
  if (n < 2) throw MalformedSequence("network has fewer than 2 tensors");
  if (seq.steps.size() != n - 1)
    throw MalformedSequence("expected " + std::to_string(n - 1) + " steps, got " +
                            std::to_string(seq.steps.size()));

  auto sorted_unique = [](const std::vector<VertexId>& xs) {
    return std::is_sorted(xs.begin(), xs.end()) &&
           std::adjacent_find(xs.begin(), xs.end()) == xs.end();
  };

  mpz_class ct = 0;
  std::size_t pos = 0;
  for (const ContractionStep& s : seq.steps) {
    ++pos;
    const std::string at = "step " + std::to_string(pos) + ": ";
    if (s.left.empty() || s.right.empty()) throw MalformedSequence(at + "empty operand");
    if (!sorted_unique(s.left) || !sorted_unique(s.right) || !sorted_unique(s.result))
      throw MalformedSequence(at + "operand lists must be sorted and duplicate-free");
    for (VertexId v : s.result)
      if (v >= n) throw MalformedSequence(at + "unknown vertex id " + std::to_string(v));
    std::vector<VertexId> joined;
    std::merge(s.left.begin(), s.left.end(), s.right.begin(), s.right.end(),
               std::back_inserter(joined));
    if (joined != s.result || !sorted_unique(joined))
      throw MalformedSequence(at + "result is not the disjoint union of the operands");

    std::vector<VertexId> rest;
    for (VertexId v = 0; v < n; ++v)
      if (!std::binary_search(joined.begin(), joined.end(), v)) rest.push_back(v);
    mpz_class cost = cut_weight3(g, s.left, s.right, rest).weight;
    if (cost != s.cost)
      throw MalformedSequence(at + "cost " + s.cost.get_str() + " should be " + cost.get_str());
    mpz_class size = boundary(g, s.result).weight;
    if (size != s.size)
      throw MalformedSequence(at + "size " + s.size.get_str() + " should be " + size.get_str());
    ct += cost;
  }
  if (seq.steps.back().result.size() != n)
    throw MalformedSequence("final step does not produce the full network");
  if (ct != seq.ct)
    throw MalformedSequence("total ct " + seq.ct.get_str() + " should be " + ct.get_str());

  mpz_class peak = simulate_peak(g, seq);  // also checks availability order
  if (peak != seq.peak)
    throw MalformedSequence("peak " + seq.peak.get_str() + " should be " + peak.get_str());
}

mpz_class flops_lower_bound(const mpz_class& ct) { return 8 * ct; }

}  // namespace tncarve
