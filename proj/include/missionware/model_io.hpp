#pragma once

// JSON model documents:
//
//   {"nodes": [{"id", "kind", "label", "keywords", "attributes", "truth_table"}],
//    "edges": [{"from", "to", "kind", "label"}]}
//
// "attributes" may carry entry_point (bool) and severity (integer); every
// other attribute value is a string (bools and numbers are accepted and kept
// in their textual form). Truth tables are {"inputs": [...], "rows":
// {"010": false, ...}} with one key per input vector. Unknown keys are
// rejected. See docs/model-format.md.

#include <fstream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "missionware/error.hpp"
#include "missionware/sgraph.hpp"

namespace missionware {

using Json = nlohmann::ordered_json;

/// Unvalidated nodes and edges as read from a document.
struct ModelDocument {
  std::vector<Node> nodes;
  std::vector<Edge> edges;
};

namespace io {

inline void expect_keys(const Json& obj, std::initializer_list<std::string_view> allowed, std::string_view where) {
  if (!obj.is_object()) throw Error(ErrorCode::SchemaError, std::string(where), "expected an object");
  for (const auto& [key, value] : obj.items()) {
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end())
      throw Error(ErrorCode::SchemaError, std::string(where), "unknown key '" + key + "'");
  }
}

inline std::string require_string(const Json& obj, const char* key, std::string_view where) {
  auto it = obj.find(key);
  if (it == obj.end() || !it->is_string())
    throw Error(ErrorCode::SchemaError, std::string(where), std::string("missing string field '") + key + "'");
  return it->get<std::string>();
}

inline std::string optional_string(const Json& obj, const char* key, std::string_view where) {
  auto it = obj.find(key);
  if (it == obj.end()) return {};
  if (!it->is_string())
    throw Error(ErrorCode::SchemaError, std::string(where), std::string("field '") + key + "' must be a string");
  return it->get<std::string>();
}

inline std::vector<std::string> string_list(const Json& obj, const char* key, std::string_view where,
                                            bool required) {
  auto it = obj.find(key);
  if (it == obj.end()) {
    if (required)
      throw Error(ErrorCode::SchemaError, std::string(where), std::string("missing list field '") + key + "'");
    return {};
  }
  if (!it->is_array())
    throw Error(ErrorCode::SchemaError, std::string(where), std::string("field '") + key + "' must be a list");
  std::vector<std::string> out;
  for (const auto& v : *it) {
    if (!v.is_string())
      throw Error(ErrorCode::SchemaError, std::string(where), std::string("field '") + key + "' must hold strings");
    out.push_back(v.get<std::string>());
  }
  return out;
}

inline Json parse_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::SchemaError, path, "cannot open file");
  try {
    return Json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorCode::SchemaError, path, e.what());
  }
}

inline TruthTable parse_truth_table(const Json& j, const std::string& owner) {
  expect_keys(j, {"inputs", "rows"}, owner);
  TruthTable table;
  table.inputs = string_list(j, "inputs", owner, true);
  const auto n = table.inputs.size();
  if (n == 0 || n > TruthTable::kMaxInputs)
    throw Error(ErrorCode::TruthTableIncomplete, owner, "truth table needs 1..16 inputs");
  auto rows = j.find("rows");
  if (rows == j.end() || !rows->is_object()) throw Error(ErrorCode::SchemaError, owner, "truth table rows must be an object");
  const std::size_t total = std::size_t{1} << n;
  table.rows.assign(total, false);
  std::vector<bool> filled(total, false);
  for (const auto& [key, value] : rows->items()) {
    if (key.size() != n || key.find_first_not_of("01") != std::string::npos)
      throw Error(ErrorCode::TruthTableIncomplete, owner, "row key '" + key + "' is not an " + std::to_string(n) + "-bit string");
    if (!value.is_boolean()) throw Error(ErrorCode::SchemaError, owner, "row '" + key + "' must be a boolean");
    auto row = static_cast<std::uint32_t>(std::stoul(key, nullptr, 2));
    filled[row] = true;
    table.rows[row] = value.get<bool>();
  }
  for (std::uint32_t row = 0; row < total; ++row) {
    if (!filled[row])
      throw Error(ErrorCode::TruthTableIncomplete, owner, "missing row '" + TruthTable::row_key(row, n) + "'");
  }
  return table;
}

inline Node parse_node(const Json& j) {
  expect_keys(j, {"id", "kind", "label", "keywords", "attributes", "truth_table"}, "node");
  Node n;
  n.id = require_string(j, "id", "node");
  auto kind_text = require_string(j, "kind", n.id);
  auto kind = parse_node_kind(kind_text);
  if (!kind) throw Error(ErrorCode::SchemaError, n.id, "unknown node kind '" + kind_text + "'");
  n.kind = *kind;
  n.label = optional_string(j, "label", n.id);
  for (auto& k : string_list(j, "keywords", n.id, false)) n.keywords.insert(std::move(k));
  if (auto attrs = j.find("attributes"); attrs != j.end()) {
    if (!attrs->is_object()) throw Error(ErrorCode::SchemaError, n.id, "attributes must be an object");
    for (const auto& [key, value] : attrs->items()) {
      if (key == "entry_point") {
        if (!value.is_boolean()) throw Error(ErrorCode::SchemaError, n.id, "entry_point must be a boolean");
        n.entry_point = value.get<bool>();
      } else if (key == "severity") {
        if (!value.is_number_integer()) throw Error(ErrorCode::SchemaError, n.id, "severity must be an integer");
        n.severity = value.get<int>();
      } else if (value.is_string()) {
        n.attributes[key] = value.get<std::string>();
      } else if (value.is_boolean() || value.is_number()) {
        n.attributes[key] = value.dump();
      } else {
        throw Error(ErrorCode::SchemaError, n.id, "attribute '" + key + "' must be a scalar");
      }
    }
  }
  if (auto table = j.find("truth_table"); table != j.end()) n.truth_table = parse_truth_table(*table, n.id);
  return n;
}

inline Edge parse_edge(const Json& j) {
  expect_keys(j, {"from", "to", "kind", "label"}, "edge");
  Edge e;
  e.from = require_string(j, "from", "edge");
  e.to = require_string(j, "to", "edge");
  auto kind_text = require_string(j, "kind", e.from + "->" + e.to);
  auto kind = parse_edge_kind(kind_text);
  if (!kind) throw Error(ErrorCode::SchemaError, e.from + "->" + e.to, "unknown edge kind '" + kind_text + "'");
  e.kind = *kind;
  e.label = optional_string(j, "label", e.from + "->" + e.to);
  return e;
}

}  // namespace io

/// Reads nodes and edges without graph-level validation. Throws SchemaError
/// (or TruthTableIncomplete for malformed row sets).
inline ModelDocument parse_model_document(const Json& j) {
  io::expect_keys(j, {"nodes", "edges"}, "model");
  ModelDocument doc;
  for (const char* key : {"nodes", "edges"}) {
    auto it = j.find(key);
    if (it == j.end() || !it->is_array())
      throw Error(ErrorCode::SchemaError, "model", std::string("top-level '") + key + "' must be a list");
  }
  for (const auto& n : j["nodes"]) doc.nodes.push_back(io::parse_node(n));
  for (const auto& e : j["edges"]) doc.edges.push_back(io::parse_edge(e));
  return doc;
}

inline SGraph model_from_json(const Json& j) {
  auto doc = parse_model_document(j);
  return SGraph::build(std::move(doc.nodes), std::move(doc.edges));
}

inline SGraph load_model(const std::string& path) { return model_from_json(io::parse_file(path)); }

inline Json to_json(const TruthTable& t) {
  Json j;
  j["inputs"] = t.inputs;
  Json rows = Json::object();
  for (std::uint32_t row = 0; row < t.rows.size(); ++row) rows[TruthTable::row_key(row, t.arity())] = bool(t.rows[row]);
  j["rows"] = std::move(rows);
  return j;
}

inline Json to_json(const Node& n) {
  Json j;
  j["id"] = n.id;
  j["kind"] = to_string(n.kind);
  j["label"] = n.label;
  j["keywords"] = Json::array();
  for (const auto& k : n.keywords) j["keywords"].push_back(k);
  Json attrs = Json::object();
  for (const auto& [key, value] : n.attributes) attrs[key] = value;
  if (n.entry_point) attrs["entry_point"] = true;
  if (n.severity) attrs["severity"] = *n.severity;
  j["attributes"] = std::move(attrs);
  if (n.truth_table) j["truth_table"] = to_json(*n.truth_table);
  return j;
}

inline Json to_json(const Edge& e) {
  Json j;
  j["from"] = e.from;
  j["to"] = e.to;
  j["kind"] = to_string(e.kind);
  j["label"] = e.label;
  return j;
}

inline Json to_json(const SGraph& g) {
  Json j;
  j["nodes"] = Json::array();
  for (const auto& n : g.nodes()) j["nodes"].push_back(to_json(n));
  j["edges"] = Json::array();
  for (const auto& e : g.edges()) j["edges"].push_back(to_json(e));
  return j;
}

inline void save_model(const SGraph& g, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::SchemaError, path, "cannot write file");
  out << to_json(g).dump(2) << '\n';
}

}  // namespace missionware
