#pragma once

// JSON documents for trees, weights, maps and functions. Layouts are
// described in docs/schema.md.

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "spectree/error.hpp"
#include "spectree/lpspace.hpp"
#include "spectree/selfmap.hpp"
#include "spectree/tree.hpp"
#include "spectree/weight.hpp"

namespace spectree::io {

using Json = nlohmann::ordered_json;

/// Finite doubles pass through; NaN and infinities become null.
inline Json number(double x) { return std::isfinite(x) ? Json(x) : Json(nullptr); }

inline Json number_list(std::span<const double> xs) {
  Json out = Json::array();
  for (double x : xs) out.push_back(number(x));
  return out;
}

namespace detail {

inline const Json& field(const Json& j, const std::string& key, const std::string& where) {
  if (!j.is_object()) throw ValidationError(where, "expected an object");
  auto it = j.find(key);
  if (it == j.end()) throw ValidationError(where + "." + key, "required field missing");
  return *it;
}

inline std::string id_string(const Json& j, const std::string& where) {
  if (j.is_string()) return j.get<std::string>();
  if (j.is_number_integer()) return std::to_string(j.get<long long>());
  throw ValidationError(where, "vertex id must be a string or integer");
}

} // namespace detail

// -- tree ------------------------------------------------------------------

inline Json tree_to_json(const Tree& t) {
  Json vertices = Json::array();
  for (const auto& e : tree_document(t))
    vertices.push_back({{"id", e.id}, {"parent", e.parent ? Json(*e.parent) : Json(nullptr)}});
  return {{"vertices", std::move(vertices)}};
}

inline Tree tree_from_json(const Json& j, const std::string& where = "tree") {
  const Json& list = detail::field(j, "vertices", where);
  if (!list.is_array()) throw ValidationError(where + ".vertices", "expected an array");
  std::vector<TreeDocumentEntry> entries;
  entries.reserve(list.size());
  for (std::size_t i = 0; i < list.size(); ++i) {
    const std::string at = where + ".vertices[" + std::to_string(i) + "]";
    const Json& e = list[i];
    TreeDocumentEntry entry{detail::id_string(detail::field(e, "id", at), at + ".id"), std::nullopt};
    auto p = e.find("parent");
    if (p != e.end() && !p->is_null()) entry.parent = detail::id_string(*p, at + ".parent");
    entries.push_back(std::move(entry));
  }
  try {
    return load_tree(entries);
  } catch (const ValidationError& e) {
    if (e.location().empty()) throw ValidationError(where, e.what());
    throw ValidationError(where + "." + e.location(), std::string(e.what()).substr(e.location().size() + 2));
  }
}

// -- weight ----------------------------------------------------------------

inline Json weight_to_json(const Tree& t, const Weight& w) {
  Json values = Json::object();
  for (std::uint32_t i = 0; i < t.size(); ++i) values[t.label(VertexId{i})] = w[VertexId{i}];
  return {{"weights", std::move(values)}};
}

inline Weight weight_from_json(const Tree& t, const Json& j, const std::string& where = "weight") {
  const Json& values = detail::field(j, "weights", where);
  if (!values.is_object()) throw ValidationError(where + ".weights", "expected an object keyed by vertex id");
  std::vector<std::pair<std::string, double>> doc;
  for (const auto& [id, value] : values.items()) {
    if (!value.is_number()) throw ValidationError(where + ".weights." + id, "value must be a number");
    doc.emplace_back(id, value.get<double>());
  }
  return load_weight(t, doc);
}

// -- map -------------------------------------------------------------------

/// Only vertices in the map's domain are listed; partial maps carry
/// `"partial": true`.
inline Json map_to_json(const Tree& t, const SelfMap& phi) {
  Json images = Json::object();
  for (VertexId v : phi.domain()) images[t.label(v)] = t.label(phi(v));
  Json out{{"map", std::move(images)}};
  if (!phi.is_total()) out["partial"] = true;
  return out;
}

inline SelfMap map_from_json(const Tree& t, const Json& j, const std::string& where = "map") {
  const Json& images = detail::field(j, "map", where);
  if (!images.is_object()) throw ValidationError(where + ".map", "expected an object keyed by vertex id");
  std::vector<std::pair<std::string, std::string>> doc;
  for (const auto& [id, image] : images.items()) doc.emplace_back(id, detail::id_string(image, where + ".map." + id));

  const bool partial = j.contains("partial") && j.at("partial").is_boolean() && j.at("partial").get<bool>();
  if (!partial) return load_map(t, doc);

  std::vector<VertexId> image(t.size()), domain;
  std::vector<bool> seen(t.size(), false);
  for (const auto& [from, to] : doc) {
    auto v = t.find(from);
    if (!v) throw ValidationError(where + ".map." + from, "not a vertex of the tree");
    auto u = t.find(to);
    if (!u) throw ValidationError(where + ".map." + from, "image '" + to + "' outside the vertex set");
    if (seen[v->index]) throw ValidationError(where + ".map." + from, "assigned twice");
    seen[v->index] = true;
    image[v->index] = *u;
    domain.push_back(*v);
  }
  if (domain.empty()) throw ValidationError(where + ".map", "partial map with an empty domain");
  return SelfMap(std::move(image), std::move(domain), MapKind::custom);
}

// -- function --------------------------------------------------------------

/// `{"function": {id: [re, im]}}`; vertices not listed are zero.
inline Json function_to_json(const Tree& t, const TreeFunction& f) {
  Json values = Json::object();
  for (std::uint32_t i = 0; i < t.size(); ++i) {
    const Scalar x = f[VertexId{i}];
    if (x != Scalar{}) values[t.label(VertexId{i})] = Json::array({number(x.real()), number(x.imag())});
  }
  return {{"function", std::move(values)}};
}

inline TreeFunction function_from_json(const Tree& t, const Json& j, const std::string& where = "function") {
  const Json& values = detail::field(j, "function", where);
  if (!values.is_object()) throw ValidationError(where + ".function", "expected an object keyed by vertex id");
  TreeFunction f(t.size());
  for (const auto& [id, value] : values.items()) {
    const std::string at = where + ".function." + id;
    auto v = t.find(id);
    if (!v) throw ValidationError(at, "not a vertex of the tree");
    if (value.is_number()) {
      f[*v] = value.get<double>();
    } else if (value.is_array() && value.size() == 2 && value[0].is_number() && value[1].is_number()) {
      f[*v] = Scalar(value[0].get<double>(), value[1].get<double>());
    } else {
      throw ValidationError(at, "expected a number or [re, im]");
    }
  }
  return f;
}

// -- files -----------------------------------------------------------------

inline Json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError(path.string(), "cannot open file");
  try {
    return Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw ValidationError(path.string(), std::string("malformed JSON: ") + e.what());
  }
}

inline std::string dump(const Json& j) { return j.dump(2) + "\n"; }

inline void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ValidationError(path.string(), "cannot open file for writing");
  out << text;
  if (!out) throw ValidationError(path.string(), "write failed");
}

} // namespace spectree::io
