#include "tncarve/io.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include "json.hpp"

namespace tncarve {

using ordered_json = nlohmann::ordered_json;

namespace {

[[noreturn]] void fail(const std::string& origin, const std::string& path,
                       const std::string& msg) {
  throw MalformedInput(origin + ": " + (path.empty() ? msg : path + ": " + msg));
}

ordered_json parse_text(const std::string& text, const std::string& origin) {
  try {
    return ordered_json::parse(text);
  } catch (const ordered_json::parse_error& e) {
    throw MalformedInput(origin + ": " + e.what());
  }
}

const ordered_json& need(const ordered_json& obj, const char* key,
                         const std::string& origin, const std::string& path) {
  auto it = obj.find(key);
  if (it == obj.end()) fail(origin, path, std::string("missing field '") + key + "'");
  return *it;
}

std::string need_string(const ordered_json& v, const std::string& origin,
                        const std::string& path) {
  if (!v.is_string()) fail(origin, path, "expected a string");
  return v.get<std::string>();
}

std::uint64_t need_positive_int(const ordered_json& v, const std::string& origin,
                                const std::string& path) {
  if (v.is_number_unsigned()) {
    auto x = v.get<std::uint64_t>();
    if (x >= 1) return x;
  } else if (v.is_number_integer()) {
    auto x = v.get<std::int64_t>();
    if (x >= 1) return static_cast<std::uint64_t>(x);
  }
  fail(origin, path, "expected a positive integer, got " + v.dump());
}

mpz_class need_mpz(const ordered_json& v, const std::string& origin,
                   const std::string& path) {
  if (v.is_number_unsigned() || v.is_number_integer()) {
    if (v.is_number_integer() && !v.is_number_unsigned() && v.get<std::int64_t>() < 0)
      fail(origin, path, "expected a non-negative integer");
    return mpz_class(v.dump());
  }
  if (v.is_string()) {
    const std::string s = v.get<std::string>();
    if (!s.empty() && std::all_of(s.begin(), s.end(),
                                  [](unsigned char c) { return std::isdigit(c); }))
      return mpz_class(s);
  }
  fail(origin, path, "expected a decimal-integer string");
}

std::string idx(const char* base, std::size_t i, const char* field = nullptr) {
  std::ostringstream os;
  os << base << '[' << i << ']';
  if (field) os << '.' << field;
  return os.str();
}

std::vector<VertexId> names_to_sorted_ids(const ordered_json& arr,
                                          const NetworkGraph& g,
                                          const std::string& origin,
                                          const std::string& path) {
  if (!arr.is_array() || arr.empty()) fail(origin, path, "expected a non-empty array");
  std::vector<VertexId> ids;
  for (std::size_t i = 0; i < arr.size(); ++i) {
    const std::string name = need_string(arr[i], origin, path + "[" + std::to_string(i) + "]");
    auto v = g.find_vertex(name);
    if (!v) fail(origin, path + "[" + std::to_string(i) + "]", "unknown vertex '" + name + "'");
    ids.push_back(*v);
  }
  std::sort(ids.begin(), ids.end());
  if (std::adjacent_find(ids.begin(), ids.end()) != ids.end())
    fail(origin, path, "repeated vertex");
  return ids;
}

ordered_json ids_to_names(const std::vector<VertexId>& ids, const NetworkGraph& g) {
  ordered_json arr = ordered_json::array();
  for (VertexId v : ids) arr.push_back(g.name(v));
  return arr;
}

}  // namespace

// ------------------------------------------------------------------ files --

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "' for reading");
  std::ostringstream buf;
  buf << in.rdbuf();
  if (in.bad()) throw IoError("read failure on '" + path + "'");
  return buf.str();
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  out << text;
  out.flush();
  if (!out.good()) throw IoError("write failure on '" + path + "'");
}

// ----------------------------------------------------------------- graphs --

GraphFile parse_graph_json(const std::string& text, const std::string& origin) {
  const ordered_json doc = parse_text(text, origin);
  if (!doc.is_object()) fail(origin, "", "top level must be an object");

  const ordered_json& jverts = need(doc, "vertices", origin, "");
  if (!jverts.is_array() || jverts.empty())
    fail(origin, "vertices", "expected a non-empty array of names");
  std::vector<std::string> names;
  std::map<std::string, VertexId> by_name;
  for (std::size_t i = 0; i < jverts.size(); ++i) {
    std::string n = need_string(jverts[i], origin, idx("vertices", i));
    if (n.empty()) fail(origin, idx("vertices", i), "vertex name must be non-empty");
    if (!by_name.emplace(n, static_cast<VertexId>(i)).second)
      fail(origin, idx("vertices", i), "duplicate vertex '" + n + "'");
    names.push_back(std::move(n));
  }

  const ordered_json& jedges = need(doc, "edges", origin, "");
  if (!jedges.is_array()) fail(origin, "edges", "expected an array");
  std::vector<Edge> edges;
  for (std::size_t i = 0; i < jedges.size(); ++i) {
    const ordered_json& je = jedges[i];
    if (!je.is_object()) fail(origin, idx("edges", i), "expected an object");
    auto endpoint = [&](const char* key) {
      const std::string n = need_string(need(je, key, origin, idx("edges", i)),
                                        origin, idx("edges", i, key));
      auto it = by_name.find(n);
      if (it == by_name.end())
        fail(origin, idx("edges", i, key), "unknown vertex '" + n + "'");
      return it->second;
    };
    const VertexId u = endpoint("u");
    const VertexId v = endpoint("v");
    const std::uint64_t w =
        need_positive_int(need(je, "w", origin, idx("edges", i)), origin, idx("edges", i, "w"));
    edges.push_back({u, v, w});
  }

  GraphFile out{NetworkGraph(std::move(names), std::move(edges)), std::nullopt};
  NetworkGraph& g = out.graph;

  if (auto itf = doc.find("free"); itf != doc.end()) {
    if (!itf->is_array()) fail(origin, "free", "expected an array");
    std::vector<bool> seen(g.vertex_count(), false);
    for (std::size_t i = 0; i < itf->size(); ++i) {
      const ordered_json& jf = (*itf)[i];
      if (!jf.is_object()) fail(origin, idx("free", i), "expected an object");
      const std::string n = need_string(need(jf, "v", origin, idx("free", i)),
                                        origin, idx("free", i, "v"));
      auto it = by_name.find(n);
      if (it == by_name.end())
        fail(origin, idx("free", i, "v"), "unknown vertex '" + n + "'");
      if (seen[it->second]) fail(origin, idx("free", i, "v"), "repeated vertex '" + n + "'");
      seen[it->second] = true;
      const ordered_json& jd = need(jf, "dims", origin, idx("free", i));
      if (!jd.is_array()) fail(origin, idx("free", i, "dims"), "expected an array");
      std::vector<std::uint64_t> dims;
      for (std::size_t k = 0; k < jd.size(); ++k)
        dims.push_back(need_positive_int(
            jd[k], origin, idx("free", i, "dims") + "[" + std::to_string(k) + "]"));
      g.set_free_dims(it->second, std::move(dims));
    }
  }

  if (auto itr = doc.find("rotation"); itr != doc.end()) {
    if (!itr->is_object()) fail(origin, "rotation", "expected an object keyed by vertex name");
    std::vector<std::vector<EdgeId>> rot(g.vertex_count());
    std::vector<bool> given(g.vertex_count(), false);
    for (auto it = itr->begin(); it != itr->end(); ++it) {
      auto vn = by_name.find(it.key());
      if (vn == by_name.end())
        fail(origin, "rotation", "unknown vertex '" + it.key() + "'");
      const ordered_json& jl = it.value();
      const std::string path = "rotation['" + it.key() + "']";
      if (!jl.is_array()) fail(origin, path, "expected an array of edge indices");
      std::vector<EdgeId> order;
      for (std::size_t k = 0; k < jl.size(); ++k) {
        const ordered_json& jv = jl[k];
        if (!jv.is_number_integer() && !jv.is_number_unsigned())
          fail(origin, path + "[" + std::to_string(k) + "]", "expected an edge index");
        auto e = jv.get<std::int64_t>();
        if (e < 0 || e >= static_cast<std::int64_t>(g.edge_count()))
          fail(origin, path + "[" + std::to_string(k) + "]", "edge index out of range");
        order.push_back(static_cast<EdgeId>(e));
      }
      auto expect = g.incident(vn->second);
      auto got = order;
      std::sort(expect.begin(), expect.end());
      std::sort(got.begin(), got.end());
      if (expect != got)
        fail(origin, path, "rotation must list exactly the incident edges");
      rot[vn->second] = std::move(order);
      given[vn->second] = true;
    }
    for (VertexId v = 0; v < g.vertex_count(); ++v)
      if (!given[v])
        fail(origin, "rotation", "missing vertex '" + g.name(v) + "'");
    out.rotation = std::move(rot);
  }
  return out;
}

GraphFile load_graph(const std::string& path) {
  return parse_graph_json(read_text_file(path), path);
}

std::string graph_to_json(const NetworkGraph& g,
                          const std::vector<std::vector<EdgeId>>* rotation) {
  ordered_json doc;
  ordered_json jv = ordered_json::array();
  for (VertexId v = 0; v < g.vertex_count(); ++v) jv.push_back(g.name(v));
  doc["vertices"] = std::move(jv);
  ordered_json je = ordered_json::array();
  for (EdgeId e = 0; e < g.edge_count(); ++e) {
    const Edge& ed = g.edge(e);
    je.push_back({{"u", g.name(ed.u)}, {"v", g.name(ed.v)}, {"w", ed.w}});
  }
  doc["edges"] = std::move(je);
  if (g.has_free_indices()) {
    ordered_json jf = ordered_json::array();
    for (VertexId v = 0; v < g.vertex_count(); ++v)
      if (!g.free_dims(v).empty())
        jf.push_back({{"v", g.name(v)}, {"dims", g.free_dims(v)}});
    doc["free"] = std::move(jf);
  }
  if (rotation) {
    if (rotation->size() != g.vertex_count())
      throw MalformedInput("rotation size does not match the vertex count");
    ordered_json jr;
    for (VertexId v = 0; v < g.vertex_count(); ++v) jr[g.name(v)] = (*rotation)[v];
    doc["rotation"] = std::move(jr);
  }
  return doc.dump(2) + "\n";
}

void save_graph(const NetworkGraph& g, const std::string& path,
                const std::vector<std::vector<EdgeId>>* rotation) {
  write_text_file(path, graph_to_json(g, rotation));
}

// ------------------------------------------------------------------ trees --

namespace {

ordered_json node_to_json(const RootedContractionTree& t, NodeId n) {
  if (t.is_leaf(n)) return ordered_json{{"leaf", t.graph().name(static_cast<VertexId>(n))}};
  const auto& ch = t.children(n);
  return ordered_json{{"children", ordered_json::array({node_to_json(t, ch[0]),
                                                        node_to_json(t, ch[1])})}};
}

std::string tree_json(const RootedContractionTree& t, bool free_flag) {
  ordered_json doc;
  doc["free"] = free_flag;
  doc["root"] = node_to_json(t, t.root());
  return doc.dump(2) + "\n";
}

}  // namespace

std::string tree_to_json(const RootedContractionTree& t) { return tree_json(t, false); }

std::string tree_to_json(const FreeContractionTree& t) {
  return tree_json(root_at(t, 0), true);
}

std::pair<RootedContractionTree, bool> parse_tree_json(
    const std::string& text, std::shared_ptr<const NetworkGraph> g,
    const std::string& origin) {
  const ordered_json doc = parse_text(text, origin);
  if (!doc.is_object()) fail(origin, "", "top level must be an object");
  bool free_flag = false;
  if (auto it = doc.find("free"); it != doc.end()) {
    if (!it->is_boolean()) fail(origin, "free", "expected a boolean");
    free_flag = it->get<bool>();
  }
  const ordered_json& jroot = need(doc, "root", origin, "");

  const std::size_t n = g->vertex_count();
  std::vector<std::array<NodeId, 2>> children(n, {-1, -1});
  std::vector<bool> used(n, false);

  std::function<NodeId(const ordered_json&, const std::string&)> walk =
      [&](const ordered_json& jn, const std::string& path) -> NodeId {
    if (!jn.is_object()) fail(origin, path, "expected an object");
    const bool has_leaf = jn.contains("leaf");
    const bool has_children = jn.contains("children");
    if (has_leaf == has_children)
      fail(origin, path, "node needs exactly one of 'leaf' or 'children'");
    if (has_leaf) {
      const std::string name = need_string(jn["leaf"], origin, path + ".leaf");
      auto v = g->find_vertex(name);
      if (!v) fail(origin, path + ".leaf", "unknown vertex '" + name + "'");
      if (used[*v]) fail(origin, path + ".leaf", "vertex '" + name + "' appears twice");
      used[*v] = true;
      return static_cast<NodeId>(*v);
    }
    const ordered_json& jc = jn["children"];
    if (!jc.is_array() || jc.size() != 2)
      fail(origin, path + ".children", "expected exactly two children");
    const NodeId a = walk(jc[0], path + ".children[0]");
    const NodeId b = walk(jc[1], path + ".children[1]");
    children.push_back({a, b});
    return static_cast<NodeId>(children.size() - 1);
  };
  const NodeId root = walk(jroot, "root");
  for (VertexId v = 0; v < n; ++v)
    if (!used[v]) fail(origin, "root", "leaf for vertex '" + g->name(v) + "' is missing");
  return {RootedContractionTree(std::move(g), std::move(children), root), free_flag};
}

std::pair<RootedContractionTree, bool> load_tree(
    const std::string& path, std::shared_ptr<const NetworkGraph> g) {
  return parse_tree_json(read_text_file(path), std::move(g), path);
}

void save_tree(const RootedContractionTree& t, const std::string& path) {
  write_text_file(path, tree_to_json(t));
}

void save_tree(const FreeContractionTree& t, const std::string& path) {
  write_text_file(path, tree_to_json(t));
}

// -------------------------------------------------------------- sequences --

std::string sequence_to_json(const NetworkGraph& g, const ContractionSequence& seq) {
  ordered_json doc;
  ordered_json steps = ordered_json::array();
  for (const ContractionStep& s : seq.steps) {
    ordered_json js;
    js["l"] = ids_to_names(s.left, g);
    js["r"] = ids_to_names(s.right, g);
    js["cost"] = s.cost.get_str();
    js["size"] = s.size.get_str();
    steps.push_back(std::move(js));
  }
  doc["steps"] = std::move(steps);
  doc["ct"] = seq.ct.get_str();
  doc["cs_alg1"] = seq.cs_alg1.get_str();
  doc["peak"] = seq.peak.get_str();
  return doc.dump(2) + "\n";
}

ContractionSequence parse_sequence_json(const std::string& text,
                                        const NetworkGraph& g,
                                        const std::string& origin) {
  const ordered_json doc = parse_text(text, origin);
  if (!doc.is_object()) fail(origin, "", "top level must be an object");
  const ordered_json& jsteps = need(doc, "steps", origin, "");
  if (!jsteps.is_array()) fail(origin, "steps", "expected an array");

  ContractionSequence seq;
  for (std::size_t i = 0; i < jsteps.size(); ++i) {
    const ordered_json& js = jsteps[i];
    if (!js.is_object()) fail(origin, idx("steps", i), "expected an object");
    ContractionStep step;
    step.left = names_to_sorted_ids(need(js, "l", origin, idx("steps", i)), g,
                                    origin, idx("steps", i, "l"));
    step.right = names_to_sorted_ids(need(js, "r", origin, idx("steps", i)), g,
                                     origin, idx("steps", i, "r"));
    step.result.reserve(step.left.size() + step.right.size());
    std::merge(step.left.begin(), step.left.end(), step.right.begin(),
               step.right.end(), std::back_inserter(step.result));
    if (std::adjacent_find(step.result.begin(), step.result.end()) != step.result.end())
      fail(origin, idx("steps", i), "operands overlap");
    step.cost = need_mpz(need(js, "cost", origin, idx("steps", i)), origin,
                         idx("steps", i, "cost"));
    step.size = need_mpz(need(js, "size", origin, idx("steps", i)), origin,
                         idx("steps", i, "size"));
    seq.steps.push_back(std::move(step));
  }
  seq.ct = need_mpz(need(doc, "ct", origin, ""), origin, "ct");
  seq.cs_alg1 = need_mpz(need(doc, "cs_alg1", origin, ""), origin, "cs_alg1");
  seq.peak = need_mpz(need(doc, "peak", origin, ""), origin, "peak");
  return seq;
}

ContractionSequence load_sequence(const std::string& path, const NetworkGraph& g) {
  return parse_sequence_json(read_text_file(path), g, path);
}

void save_sequence(const NetworkGraph& g, const ContractionSequence& seq,
                   const std::string& path) {
  write_text_file(path, sequence_to_json(g, seq));
}

}  // namespace tncarve
