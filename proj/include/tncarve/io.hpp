#pragma once

#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "tncarve/ctree.hpp"
#include "tncarve/netgraph.hpp"
#include "tncarve/sequencer.hpp"

namespace tncarve {

// JSON file formats.  All loaders throw MalformedInput with a field-path
// diagnostic ("edges[3].w: ...") prefixed by the origin (usually the file
// name); file-system failures throw IoError.  Exact integers that may
// exceed 64 bits (costs, sizes, totals) travel as decimal strings.

// ---------------------------------------------------------------- files --
std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& text);

// ---------------------------------------------------------------- graphs --
// {"vertices": ["A", ...],
//  "edges":    [{"u": "A", "v": "B", "w": 2}, ...],
//  "free":     [{"v": "A", "dims": [2, 3]}, ...]            (optional)
//  "rotation": {"A": [0, 1], ...}}                           (optional)
// Weights are positive integers; rotation lists hold indices into "edges"
// in counterclockwise order around the vertex.
struct GraphFile {
  NetworkGraph graph;
  // Per-vertex rotation system, present iff the file carried one.
  std::optional<std::vector<std::vector<EdgeId>>> rotation;
};

GraphFile parse_graph_json(const std::string& text,
                           const std::string& origin = "<input>");
GraphFile load_graph(const std::string& path);
std::string graph_to_json(const NetworkGraph& g,
                          const std::vector<std::vector<EdgeId>>* rotation = nullptr);
void save_graph(const NetworkGraph& g, const std::string& path,
                const std::vector<std::vector<EdgeId>>* rotation = nullptr);

// ----------------------------------------------------------------- trees --
// {"free": bool, "root": node} with node = {"leaf": "A"} or
// {"children": [node, node]}.  Leaves carry vertex names; cut labels are
// never serialized (they are recomputed against the graph on load).  Free
// trees are stored rooted at their first arc and flagged "free": true.
std::string tree_to_json(const RootedContractionTree& t);
std::string tree_to_json(const FreeContractionTree& t);

// Returns the rooted structure stored in the file plus the free flag; a
// free file's rooting is arbitrary, so callers wanting the free tree
// should unroot() the result.
std::pair<RootedContractionTree, bool> parse_tree_json(
    const std::string& text, std::shared_ptr<const NetworkGraph> g,
    const std::string& origin = "<input>");
std::pair<RootedContractionTree, bool> load_tree(
    const std::string& path, std::shared_ptr<const NetworkGraph> g);
void save_tree(const RootedContractionTree& t, const std::string& path);
void save_tree(const FreeContractionTree& t, const std::string& path);

// ------------------------------------------------------------- sequences --
// {"steps": [{"l": ["B"], "r": ["C"], "cost": "6", "size": "2"}, ...],
//  "ct": "8", "cs_alg1": "4", "peak": "11"}
// Operands are vertex-name lists of the target network; each step's result
// is their union and is not stored.
std::string sequence_to_json(const NetworkGraph& g, const ContractionSequence& seq);
ContractionSequence parse_sequence_json(const std::string& text,
                                        const NetworkGraph& g,
                                        const std::string& origin = "<input>");
ContractionSequence load_sequence(const std::string& path, const NetworkGraph& g);
void save_sequence(const NetworkGraph& g, const ContractionSequence& seq,
                   const std::string& path);

}  // namespace tncarve
