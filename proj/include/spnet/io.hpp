#pragma once

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <json.hpp>

#include "spnet/network.hpp"

namespace spnet {

using Json = nlohmann::ordered_json;

/// A network plus the workload that travelled with it, if any.
struct NetworkDocument {
  ActivityNetwork network;
  std::optional<Workload> workload;
};

inline Json rational_to_json(const Rational& r) { return format_rational(r); }

inline Rational rational_from_json(const Json& j) {
  if (j.is_string()) return parse_rational(j.get<std::string>());
  if (j.is_number_integer()) return Rational(j.get<long long>());
  if (j.is_number_float()) return parse_rational(j.dump());
  throw ParseError("duration must be a string or number, got " + j.dump());
}

inline Json workload_to_json(const Workload& t) {
  Json arr = Json::array();
  for (const auto& d : t.durations()) arr.push_back(rational_to_json(d));
  return arr;
}

inline Workload workload_from_json(const Json& j) {
  if (!j.is_array()) throw ParseError("workload must be an array");
  std::vector<Rational> d;
  for (const auto& x : j) d.push_back(rational_from_json(x));
  return Workload(std::move(d));
}

/// `{"n", "labels", "edges", "workload"?}`; edges are the transitive reduction.
inline Json network_to_json(const ActivityNetwork& g, const std::optional<Workload>& t = std::nullopt) {
  Json doc;
  doc["n"] = g.size();
  doc["labels"] = g.labels();
  Json edges = Json::array();
  for (auto [a, b] : transitive_reduction(g)) edges.push_back({a, b});
  doc["edges"] = std::move(edges);
  if (t) doc["workload"] = workload_to_json(*t);
  return doc;
}

inline NetworkDocument network_from_json(const Json& doc) {
  if (!doc.is_object()) throw ParseError("network document must be a JSON object");
  if (!doc.contains("n") || !doc["n"].is_number_integer()) throw ParseError("missing integer field 'n'");
  const int n = doc["n"].get<int>();
  std::vector<std::string> labels;
  if (doc.contains("labels")) {
    if (!doc["labels"].is_array()) throw ParseError("'labels' must be an array");
    for (const auto& l : doc["labels"]) {
      if (!l.is_string()) throw ParseError("labels must be strings");
      labels.push_back(l.get<std::string>());
    }
  }
  std::vector<Edge> edges;
  if (doc.contains("edges")) {
    if (!doc["edges"].is_array()) throw ParseError("'edges' must be an array");
    for (const auto& e : doc["edges"]) {
      if (!e.is_array() || e.size() != 2 || !e[0].is_number_integer() || !e[1].is_number_integer())
        throw ParseError("edge must be a pair of integers: " + e.dump());
      edges.emplace_back(e[0].get<int>(), e[1].get<int>());
    }
  }
  NetworkDocument out{ActivityNetwork::from_edges(n, edges, std::move(labels)), std::nullopt};
  if (doc.contains("workload")) {
    out.workload = workload_from_json(doc["workload"]);
    if (out.workload->size() != static_cast<std::size_t>(n))
      throw MissingDuration("workload has " + std::to_string(out.workload->size()) + " entries for " +
                            std::to_string(n) + " activities");
  }
  return out;
}

inline Json parse_json_text(const std::string& text) {
  try {
    return Json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(e.what());
  }
}

/// Reads a JSON document from a path, or stdin when path is "-".
inline Json read_json_file(const std::string& path) {
  std::stringstream buf;
  if (path == "-") {
    buf << std::cin.rdbuf();
  } else {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open '" + path + "'");
    buf << in.rdbuf();
  }
  return parse_json_text(buf.str());
}

/// Graphviz rendering of the transitive reduction.
inline std::string to_dot(const ActivityNetwork& g, const std::optional<Workload>& t = std::nullopt) {
  std::ostringstream out;
  out << "digraph network {\n  rankdir=TB;\n";
  for (int i = 0; i < g.size(); ++i) {
    out << "  n" << i << " [label=\"" << g.label(i);
    if (t) out << "\\n" << format_rational((*t)[i]);
    out << "\"];\n";
  }
  for (auto [a, b] : transitive_reduction(g)) out << "  n" << a << " -> n" << b << ";\n";
  out << "}\n";
  return out.str();
}

}  // namespace spnet
