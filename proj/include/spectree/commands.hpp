#pragma once

// Experiment documents and the analyze / spectrum / adversary commands.
// Every command is a pure function from a parsed document to a JSON report;
// the executable in tools/ only does argument parsing and file output.

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "spectree/compop.hpp"
#include "spectree/io.hpp"
#include "spectree/oracle.hpp"
#include "spectree/schatten.hpp"

namespace spectree::cli {

using io::Json;

inline constexpr int schema_version = 1;

/// Generated trees larger than this are rejected at build time.
inline constexpr std::size_t max_generated_vertices = 4'000'000;

struct Tolerances {
  double isometry_ratio = 1e-12;
  double compact_decay = 0.1;
  double cauchy = 1e-6;
};

struct OracleOptions {
  bool enabled = true;
  std::size_t max_vertices = oracle::default_max_vertices;
  std::size_t norm_search_samples = 32;
};

/// Parsed experiment document. Sources are kept in normalized JSON form
/// (defaults filled in, file paths absolute); documents referenced by path
/// are loaded during parsing.
struct AnalysisSpec {
  Json tree_source;
  Json weight_source;
  Json map_source;
  double p = 2.0;
  std::vector<std::size_t> depth_ladder;
  std::vector<double> schatten_exponents{1.0, 2.0};
  Tolerances tolerances;
  std::uint64_t seed = 1;
  OracleOptions oracle;

  std::optional<Tree> document_tree;
  std::optional<Json> weight_document;
  std::optional<Json> map_document;

  Json normalized() const {
    Json j;
    j["schema_version"] = schema_version;
    j["tree"] = tree_source;
    j["weight"] = weight_source;
    j["map"] = map_source;
    j["p"] = p;
    j["depth_ladder"] = depth_ladder;
    j["schatten_exponents"] = schatten_exponents;
    j["tolerances"] = {{"isometry_ratio", tolerances.isometry_ratio},
                       {"compact_decay", tolerances.compact_decay},
                       {"cauchy", tolerances.cauchy}};
    j["seed"] = seed;
    j["oracle"] = {{"enabled", oracle.enabled},
                   {"max_vertices", oracle.max_vertices},
                   {"norm_search_samples", oracle.norm_search_samples}};
    return j;
  }
};

namespace detail {

inline const Json* optional_field(const Json& j, const char* key) {
  auto it = j.find(key);
  return it == j.end() || it->is_null() ? nullptr : &*it;
}

inline std::string string_field(const Json& j, const char* key, const std::string& where) {
  const Json& v = io::detail::field(j, key, where);
  if (!v.is_string()) throw ValidationError(where + "." + key, "expected a string");
  return v.get<std::string>();
}

inline double number_value(const Json& v, const std::string& where) {
  if (!v.is_number()) throw ValidationError(where, "expected a number");
  const double x = v.get<double>();
  if (!std::isfinite(x)) throw ValidationError(where, "expected a finite number");
  return x;
}

inline std::size_t count_value(const Json& v, const std::string& where) {
  if (!v.is_number_integer() || v.get<long long>() < 0) throw ValidationError(where, "expected a non-negative integer");
  return v.get<std::size_t>();
}

inline std::filesystem::path resolve(const std::string& path, const std::filesystem::path& base) {
  std::filesystem::path p(path);
  if (p.is_relative()) p = base / p;
  return std::filesystem::weakly_canonical(p);
}

inline Json parse_tree_source(const Json& j, const std::filesystem::path& base, AnalysisSpec& spec) {
  const std::string kind = string_field(j, "kind", "tree");
  if (kind == "bary") {
    Json out{{"kind", "bary"}, {"branching", count_value(io::detail::field(j, "branching", "tree"), "tree.branching")}};
    if (out["branching"].get<std::size_t>() == 0)
      throw ValidationError("tree.branching", "must be at least 1 (terminal-free root)");
    if (const Json* until = optional_field(j, "branch_until")) {
      if (until->is_string()) {
        if (until->get<std::string>() != "sqrt")
          throw ValidationError("tree.branch_until", "expected an integer depth or \"sqrt\"");
        out["branch_until"] = "sqrt";
      } else {
        out["branch_until"] = count_value(*until, "tree.branch_until");
      }
    }
    return out;
  }
  if (kind == "file") {
    const auto path = resolve(string_field(j, "path", "tree"), base);
    spec.document_tree = io::tree_from_json(io::read_json_file(path), path.string());
    return {{"kind", "file"}, {"path", path.string()}};
  }
  if (kind == "inline") {
    spec.document_tree = io::tree_from_json(j, "tree");
    return {{"kind", "inline"}, {"vertices", j.at("vertices")}};
  }
  throw ValidationError("tree.kind", "unknown tree source '" + kind + "' (bary, file, inline)");
}

inline Json parse_weight_source(const Json& j, const std::filesystem::path& base, AnalysisSpec& spec) {
  const std::string family = string_field(j, "family", "weight");
  auto positive = [&](const char* key, double fallback) {
    const Json* v = optional_field(j, key);
    const double x = v ? number_value(*v, std::string("weight.") + key) : fallback;
    if (!(x > 0.0)) throw ValidationError(std::string("weight.") + key, "must be positive");
    return x;
  };
  if (family == "constant") return {{"family", "constant"}, {"c", positive("c", 1.0)}};
  if (family == "reciprocal_depth") return {{"family", "reciprocal_depth"}};
  if (family == "geometric") {
    if (!optional_field(j, "c")) throw ValidationError("weight.c", "required field missing");
    return {{"family", "geometric"}, {"c", positive("c", 1.0)}};
  }
  if (family == "file" || family == "inline") {
    if (!spec.document_tree)
      throw ValidationError("weight.family", "weight documents require a file or inline tree");
    Json doc;
    Json out{{"family", family}};
    if (family == "file") {
      const auto path = resolve(string_field(j, "path", "weight"), base);
      doc = io::read_json_file(path);
      out["path"] = path.string();
    } else {
      doc = Json{{"weights", io::detail::field(j, "weights", "weight")}};
      out["weights"] = doc["weights"];
    }
    io::weight_from_json(*spec.document_tree, doc);  // validates against the full tree
    spec.weight_document = std::move(doc);
    return out;
  }
  throw ValidationError("weight.family",
                        "unknown weight family '" + family + "' (constant, reciprocal_depth, geometric, file, inline)");
}

inline Json parse_map_source(const Json& j, const std::filesystem::path& base, AnalysisSpec& spec) {
  const std::string kind = string_field(j, "kind", "map");
  if (kind == "identity" || kind == "parent" || kind == "depth_square") return {{"kind", kind}};
  if (kind == "level_shift") {
    const Json* k = optional_field(j, "k");
    return {{"kind", "level_shift"}, {"k", k ? count_value(*k, "map.k") : std::size_t{1}}};
  }
  if (kind == "file" || kind == "inline") {
    if (!spec.document_tree) throw ValidationError("map.kind", "map documents require a file or inline tree");
    Json doc;
    Json out{{"kind", kind}};
    if (kind == "file") {
      const auto path = resolve(string_field(j, "path", "map"), base);
      doc = io::read_json_file(path);
      out["path"] = path.string();
    } else {
      doc = Json{{"map", io::detail::field(j, "map", "map")}};
      if (const Json* partial = optional_field(j, "partial")) doc["partial"] = *partial;
      out["map"] = doc["map"];
      if (doc.contains("partial")) out["partial"] = doc["partial"];
    }
    io::map_from_json(*spec.document_tree, doc);
    spec.map_document = std::move(doc);
    return out;
  }
  throw ValidationError("map.kind",
                        "unknown map '" + kind + "' (identity, parent, level_shift, depth_square, file, inline)");
}

} // namespace detail

/// Parses an experiment document; relative paths resolve against `base`.
inline AnalysisSpec parse_spec(const Json& j, const std::filesystem::path& base = std::filesystem::current_path()) {
  using detail::optional_field;
  if (!j.is_object()) throw ValidationError("spec", "expected a JSON object");
  const Json& version = io::detail::field(j, "schema_version", "spec");
  if (!version.is_number_integer() || version.get<int>() != schema_version)
    throw ValidationError("schema_version", "unsupported version (expected " + std::to_string(schema_version) + ")");

  AnalysisSpec spec;
  spec.tree_source = detail::parse_tree_source(io::detail::field(j, "tree", "spec"), base, spec);
  spec.weight_source = detail::parse_weight_source(io::detail::field(j, "weight", "spec"), base, spec);
  spec.map_source = detail::parse_map_source(io::detail::field(j, "map", "spec"), base, spec);

  if (const Json* p = optional_field(j, "p")) spec.p = detail::number_value(*p, "p");
  Exponent{spec.p};

  const Json& ladder = io::detail::field(j, "depth_ladder", "spec");
  if (!ladder.is_array() || ladder.empty()) throw ValidationError("depth_ladder", "expected a non-empty array");
  for (std::size_t i = 0; i < ladder.size(); ++i) {
    const std::size_t d = detail::count_value(ladder[i], "depth_ladder[" + std::to_string(i) + "]");
    if (!spec.depth_ladder.empty() && d <= spec.depth_ladder.back())
      throw ValidationError("depth_ladder[" + std::to_string(i) + "]", "depths must be strictly increasing");
    if (spec.document_tree && d > spec.document_tree->truncation_depth())
      throw ValidationError("depth_ladder[" + std::to_string(i) + "]",
                            "exceeds the document tree depth " + std::to_string(spec.document_tree->truncation_depth()));
    spec.depth_ladder.push_back(d);
  }

  if (const Json* qs = optional_field(j, "schatten_exponents")) {
    if (!qs->is_array()) throw ValidationError("schatten_exponents", "expected an array");
    spec.schatten_exponents.clear();
    for (std::size_t i = 0; i < qs->size(); ++i) {
      const std::string at = "schatten_exponents[" + std::to_string(i) + "]";
      const double q = detail::number_value((*qs)[i], at);
      if (q < 1.0) throw ValidationError(at, "schatten exponents must satisfy q >= 1");
      spec.schatten_exponents.push_back(q);
    }
  }

  if (const Json* tol = optional_field(j, "tolerances")) {
    auto read = [&](const char* key, double& into) {
      if (const Json* v = optional_field(*tol, key)) {
        into = detail::number_value(*v, std::string("tolerances.") + key);
        if (!(into > 0.0)) throw ValidationError(std::string("tolerances.") + key, "must be positive");
      }
    };
    read("isometry_ratio", spec.tolerances.isometry_ratio);
    read("compact_decay", spec.tolerances.compact_decay);
    read("cauchy", spec.tolerances.cauchy);
  }
  if (const Json* seed = optional_field(j, "seed")) {
    if (!seed->is_number_unsigned()) throw ValidationError("seed", "expected a non-negative integer");
    spec.seed = seed->get<std::uint64_t>();
  }
  if (const Json* o = optional_field(j, "oracle")) {
    if (const Json* e = optional_field(*o, "enabled")) {
      if (!e->is_boolean()) throw ValidationError("oracle.enabled", "expected a boolean");
      spec.oracle.enabled = e->get<bool>();
    }
    if (const Json* m = optional_field(*o, "max_vertices"))
      spec.oracle.max_vertices = detail::count_value(*m, "oracle.max_vertices");
    if (const Json* s = optional_field(*o, "norm_search_samples")) {
      spec.oracle.norm_search_samples = detail::count_value(*s, "oracle.norm_search_samples");
      if (spec.oracle.norm_search_samples == 0) throw ValidationError("oracle.norm_search_samples", "must be at least 1");
    }
  }
  return spec;
}

inline AnalysisSpec load_spec(const std::filesystem::path& path) {
  const auto doc = io::read_json_file(path);
  return parse_spec(doc, std::filesystem::absolute(path).parent_path());
}

// -- instances -------------------------------------------------------------

namespace detail {

inline std::size_t generated_size(std::size_t b, std::size_t depth, std::size_t branch_depth) {
  std::size_t level = 1, total = 1;
  for (std::size_t d = 0; d < depth; ++d) {
    if (d < branch_depth) {
      if (level > max_generated_vertices / b) return max_generated_vertices + 1;
      level *= b;
    }
    total += level;
    if (total > max_generated_vertices) return total;
  }
  return total;
}

inline std::size_t isqrt(std::size_t n) {
  auto r = static_cast<std::size_t>(std::sqrt(static_cast<double>(n)));
  while (r * r > n) --r;
  while ((r + 1) * (r + 1) <= n) ++r;
  return r;
}

} // namespace detail

/// Tree used at truncation depth `depth`, together with the index map back
/// into the document tree when there is one.
struct TruncatedTree {
  Tree tree;
  std::vector<VertexId> to_document;
};

inline TruncatedTree tree_at(const AnalysisSpec& spec, std::size_t depth) {
  if (spec.document_tree) {
    auto cut = truncate(*spec.document_tree, depth);
    return {std::move(cut.tree), std::move(cut.to_old)};
  }
  const std::size_t b = spec.tree_source.at("branching").get<std::size_t>();
  std::size_t branch = depth;
  if (auto it = spec.tree_source.find("branch_until"); it != spec.tree_source.end())
    branch = it->is_string() ? detail::isqrt(depth) : std::min(depth, it->get<std::size_t>());
  const std::size_t n = detail::generated_size(b, depth, branch);
  if (n > max_generated_vertices)
    throw ValidationError("depth_ladder", "generated tree at depth " + std::to_string(depth) + " exceeds " +
                                              std::to_string(max_generated_vertices) +
                                              " vertices; cap branching with tree.branch_until");
  return {build_bary_capped(b, depth, branch), {}};
}

inline Weight weight_at(const AnalysisSpec& spec, const TruncatedTree& t) {
  const std::string family = spec.weight_source.at("family").get<std::string>();
  if (family == "constant") return constant_weight(t.tree, spec.weight_source.at("c").get<double>());
  if (family == "reciprocal_depth") return reciprocal_depth_weight(t.tree);
  if (family == "geometric") return geometric_weight(t.tree, spec.weight_source.at("c").get<double>());
  const Weight full = io::weight_from_json(*spec.document_tree, *spec.weight_document);
  std::vector<double> values(t.tree.size());
  for (std::size_t i = 0; i < values.size(); ++i) values[i] = full[t.to_document[i]];
  return Weight(std::move(values), WeightFamily::custom);
}

inline SelfMap map_at(const AnalysisSpec& spec, const TruncatedTree& t) {
  const std::string kind = spec.map_source.at("kind").get<std::string>();
  if (kind == "identity") return identity_map(t.tree);
  if (kind == "parent") return parent_map(t.tree);
  if (kind == "level_shift") return level_shift_map(t.tree, spec.map_source.at("k").get<std::size_t>());
  if (kind == "depth_square") return depth_square_map(t.tree);

  const SelfMap full = io::map_from_json(*spec.document_tree, *spec.map_document);
  std::vector<std::optional<VertexId>> to_new(spec.document_tree->size());
  for (std::uint32_t i = 0; i < t.to_document.size(); ++i) to_new[t.to_document[i].index] = VertexId{i};
  std::vector<VertexId> image(t.tree.size()), domain;
  for (std::uint32_t i = 0; i < t.tree.size(); ++i) {
    const VertexId old = t.to_document[i];
    if (!full.defined(old)) continue;
    const auto target = to_new[full(old).index];
    if (!target)
      throw ValidationError("map." + t.tree.label(VertexId{i}),
                            "map not closed on tree: image '" + spec.document_tree->label(full(old)) +
                                "' lies below truncation depth " + std::to_string(t.tree.truncation_depth()));
    image[i] = *target;
    domain.push_back(VertexId{i});
  }
  if (domain.empty()) throw ValidationError("map", "no vertex of the truncated tree lies in the map's domain");
  if (domain.size() == image.size()) return SelfMap(std::move(image), MapKind::custom);
  return SelfMap(std::move(image), std::move(domain), MapKind::custom);
}

inline OperatorSpec build_instance(const AnalysisSpec& spec, std::size_t depth) {
  auto t = tree_at(spec, depth);
  auto w = weight_at(spec, t);
  auto phi = map_at(spec, t);
  return OperatorSpec(std::move(t.tree), std::move(w), std::move(phi), Exponent(spec.p));
}

// -- reports ---------------------------------------------------------------

inline Json conventions() {
  return {
      {"inner_product", "<f, g> = sum_v f(v) conj(g(v)) lambda(v); linear in f, conjugate-linear in g"},
      {"weight_positivity", "every weight value is strictly positive and finite"},
      {"truncation", "suprema are maxima and sums are partial sums over vertices of depth <= truncation_depth"},
      {"partial_maps", "C_phi f vanishes outside the domain of phi"},
      {"norm_exact", "max_u [lambda(phi^-1(u)) / lambda(u)]^(1/p) with preimage weights summed; derived, oracle-verified"},
  };
}

namespace detail {

inline Json label_or_null(const Tree& t, const std::optional<VertexId>& v) {
  return v ? Json(t.label(*v)) : Json(nullptr);
}

inline Json report_header(const char* command, const AnalysisSpec& spec) {
  Json j;
  j["schema_version"] = schema_version;
  j["command"] = command;
  j["conventions"] = conventions();
  j["spec"] = spec.normalized();
  j["depth_ladder"] = spec.depth_ladder;
  return j;
}

inline bool oracle_fits(const AnalysisSpec& spec, const OperatorSpec& op) {
  return spec.oracle.enabled && op.tree.size() <= spec.oracle.max_vertices;
}

inline Json oracle_skipped(const AnalysisSpec& spec, const OperatorSpec& op) {
  if (!spec.oracle.enabled) return {{"checked", false}, {"notice", "oracle disabled"}};
  return {{"checked", false},
          {"notice", "skipped: " + std::to_string(op.tree.size()) + " vertices exceed oracle.max_vertices = " +
                         std::to_string(spec.oracle.max_vertices)}};
}

} // namespace detail

inline Json boundedness_json(const OperatorSpec& op, const BoundednessReport& b) {
  return {{"beta", io::number(b.beta)},
          {"beta_argmax", op.tree.label(b.beta_argmax)},
          {"beta_finite", b.beta_finite},
          {"norm_exact", io::number(b.norm_exact)},
          {"norm_argmax", op.tree.label(b.norm_argmax)},
          {"norm_lower_bound", io::number(b.norm_lower_bound)},
          {"norm_upper_bound", io::number(b.norm_upper_bound)},
          {"injective", b.injective},
          {"multiplicity", b.multiplicity},
          {"truncation_depth", b.truncation_depth},
          {"effective_domain_depth", b.effective_domain_depth ? Json(*b.effective_domain_depth) : Json(nullptr)}};
}

inline Json isometry_json(const OperatorSpec& op, const IsometryVerdict& v) {
  Json shared = nullptr;
  if (v.shared_image) shared = Json::array({op.tree.label(v.shared_image->first), op.tree.label(v.shared_image->second)});
  return {{"is_isometry", v.is_isometry},
          {"bijective", v.bijective},
          {"frontier_only", v.frontier_only},
          {"non_hit", detail::label_or_null(op.tree, v.non_hit)},
          {"shared_image", shared},
          {"ratio_defect", detail::label_or_null(op.tree, v.ratio_defect)},
          {"defect_ratio", io::number(v.defect_ratio)},
          {"witness_vertex", detail::label_or_null(op.tree, v.witness_vertex)},
          {"witness_image_norm", io::number(v.witness_image_norm)},
          {"margin", io::number(v.margin)}};
}

inline Json compactness_json(const CompactnessProfile& c) {
  return {{"tail_sup", io::number_list(c.tail_sup)},
          {"image_depths", c.image_depths},
          {"tail_slope", io::number(c.tail_slope)},
          {"verdict", std::string(to_string(c.verdict))}};
}

inline Json cmd_analyze(const AnalysisSpec& spec) {
  Json report = detail::report_header("analyze", spec);
  Json depths = Json::array();
  std::vector<double> betas;
  for (std::size_t depth : spec.depth_ladder) {
    const OperatorSpec op = build_instance(spec, depth);
    const auto b = boundedness(op);
    betas.push_back(b.beta);

    Json entry;
    entry["truncation_depth"] = depth;
    entry["vertices"] = op.tree.size();
    entry["boundedness"] = boundedness_json(op, b);
    entry["isometry"] = isometry_json(op, isometry_check(op, spec.tolerances.isometry_ratio));
    const auto profile = compactness_profile(op, CompactnessCriteria{spec.tolerances.compact_decay});
    entry["compactness"] = compactness_json(profile);

    Json tails = Json::array();
    const std::size_t N = depth / 2;
    for (std::size_t n = N + 1; n <= depth; ++n)
      tails.push_back({{"N", N},
                       {"n", n},
                       {"value", io::number(tail_defect(op, n, N))},
                       {"bound", io::number(spectree::detail::pth_root(profile.tail_sup[N], op.p))}});
    entry["tail_defects"] = std::move(tails);

    if (detail::oracle_fits(spec, op)) {
      Json o{{"checked", true},
             {"norm_search", io::number(oracle::norm_search(op, spec.oracle.norm_search_samples, spec.seed))}};
      if (op.p.is_two()) o["sigma_max"] = io::number(oracle::svd_values(oracle::matrix_of(op)).front());
      entry["oracle"] = std::move(o);
    } else {
      entry["oracle"] = detail::oracle_skipped(spec, op);
    }
    depths.push_back(std::move(entry));
  }
  report["depths"] = std::move(depths);
  report["beta_trend"] = {{"values", io::number_list(betas)}, {"verdict", std::string(to_string(classify_trend(betas)))}};
  return report;
}

/// Short human-readable rendering of an analyze report.
inline std::string analyze_summary(const Json& report) {
  std::ostringstream os;
  os.precision(12);
  for (const auto& d : report.at("depths")) {
    const auto& b = d.at("boundedness");
    os << "depth " << d.at("truncation_depth").get<std::size_t>() << " (" << d.at("vertices").get<std::size_t>()
       << " vertices";
    if (!b.at("effective_domain_depth").is_null()) os << ", effective domain depth " << b.at("effective_domain_depth");
    os << ")\n";
    os << "  beta: " << b.at("beta") << " at vertex " << b.at("beta_argmax").get<std::string>() << "\n";
    os << "  norm: " << b.at("norm_exact") << " in [" << b.at("norm_lower_bound") << ", " << b.at("norm_upper_bound")
       << "]\n";
    const auto& iso = d.at("isometry");
    os << "  isometry: " << (iso.at("is_isometry").get<bool>() ? "true" : "false");
    if (!iso.at("witness_vertex").is_null())
      os << " (witness vertex " << iso.at("witness_vertex").get<std::string>() << ", margin " << iso.at("margin") << ")";
    if (iso.at("frontier_only").get<bool>()) os << " [misses only frontier vertices]";
    os << "\n";
    const auto& c = d.at("compactness");
    os << "  compactness: " << c.at("verdict").get<std::string>() << " (s_0 = " << c.at("tail_sup").front()
       << ", s_D = " << c.at("tail_sup").back() << ")\n";
  }
  os << "beta across ladder: " << report.at("beta_trend").at("verdict").get<std::string>() << "\n";
  return os.str();
}

// -- spectrum --------------------------------------------------------------

struct SpectrumOutput {
  Json report;
  /// Spectrum of the deepest ladder entry.
  std::string csv;
};

inline SpectrumOutput cmd_spectrum(const AnalysisSpec& spec) {
  if (spec.p != 2.0)
    throw DomainError("spectrum: singular values, Schatten sums and the trace are defined on L^2_lambda only; "
                      "the document sets p = " + io::Json(spec.p).dump() + ". Set \"p\": 2.");
  SpectrumOutput out;
  out.report = detail::report_header("spectrum", spec);
  Json depths = Json::array();
  std::vector<std::vector<double>> sums(spec.schatten_exponents.size());
  bool identity_holds = true;

  for (std::size_t di = 0; di < spec.depth_ladder.size(); ++di) {
    const std::size_t depth = spec.depth_ladder[di];
    const OperatorSpec op = build_instance(spec, depth);
    const auto r = spectral_report(op, spec.schatten_exponents);

    Json entry;
    entry["truncation_depth"] = depth;
    entry["vertices"] = op.tree.size();
    entry["hs_norm"] = io::number(r.hs_norm);
    Json qs = Json::array();
    for (std::size_t k = 0; k < r.schatten_sums.size(); ++k) {
      const auto& s = r.schatten_sums[k];
      qs.push_back({{"q", s.q},
                    {"diagonal_sum", io::number(s.diagonal_sum)},
                    {"singular_value_sum", io::number(s.singular_value_sum)}});
      sums[k].push_back(s.diagonal_sum);
      identity_holds = identity_holds &&
                       std::abs(s.diagonal_sum - s.singular_value_sum) <= 1e-10 * std::max(1.0, s.diagonal_sum);
    }
    entry["schatten_sums"] = std::move(qs);
    entry["trace"] = {{"diagonal_sum", io::number(r.trace.diagonal_sum)},
                      {"fixed_point_count", r.trace.fixed_point_count},
                      {"agree", r.trace.agree}};

    std::optional<std::vector<double>> dense;
    if (detail::oracle_fits(spec, op)) {
      const auto m = oracle::matrix_of(op);
      dense = oracle::svd_values(m);
      double worst = 0.0;
      for (std::size_t i = 0; i < dense->size(); ++i) worst = std::max(worst, std::abs((*dense)[i] - r.singular_values[i]));
      entry["oracle"] = {{"checked", true},
                         {"max_abs_deviation", io::number(worst)},
                         {"frobenius_squared", io::number(oracle::frobenius_squared(m))}};
    } else {
      entry["oracle"] = detail::oracle_skipped(spec, op);
    }
    depths.push_back(std::move(entry));

    if (di + 1 == spec.depth_ladder.size()) {
      std::ostringstream csv;
      csv << (dense ? "rank,sigma_analytic,sigma_oracle\n" : "rank,sigma_analytic\n");
      char buf[64];
      for (std::size_t i = 0; i < r.singular_values.size(); ++i) {
        csv << i + 1;
        std::snprintf(buf, sizeof buf, ",%.17g", r.singular_values[i]);
        csv << buf;
        if (dense) {
          std::snprintf(buf, sizeof buf, ",%.17g", (*dense)[i]);
          csv << buf;
        }
        csv << '\n';
      }
      out.csv = csv.str();
    }
  }
  out.report["depths"] = std::move(depths);

  Json conv = Json::array();
  for (std::size_t k = 0; k < spec.schatten_exponents.size(); ++k)
    conv.push_back({{"q", spec.schatten_exponents[k]},
                    {"partial_sums", io::number_list(sums[k])},
                    {"verdict", std::string(to_string(classify_partial_sums(spec.depth_ladder, sums[k],
                                                                            spec.tolerances.cauchy)))}});
  out.report["convergence"] = std::move(conv);
  out.report["observed_identity"] = {
      {"diagonal_sum_equals_singular_value_sum", identity_holds},
      {"note", "observed at every ladder depth; an identity of the truncation, not a claim about the infinite tree"}};
  return out;
}

inline std::string spectrum_summary(const Json& report) {
  std::ostringstream os;
  os.precision(12);
  for (const auto& d : report.at("depths")) {
    os << "depth " << d.at("truncation_depth").get<std::size_t>() << ": hs_norm " << d.at("hs_norm");
    for (const auto& s : d.at("schatten_sums")) os << ", S_" << s.at("q") << " sum " << s.at("diagonal_sum");
    const auto& tr = d.at("trace");
    os << "\n  trace " << tr.at("diagonal_sum") << ", fixed points " << tr.at("fixed_point_count")
       << (tr.at("agree").get<bool>() ? " (agree)" : " (DISAGREE)") << "\n";
    if (d.at("oracle").at("checked").get<bool>())
      os << "  oracle max deviation " << d.at("oracle").at("max_abs_deviation") << "\n";
  }
  for (const auto& c : report.at("convergence"))
    os << "q = " << c.at("q") << ": " << c.at("verdict").get<std::string>() << "\n";
  return os.str();
}

// -- adversary -------------------------------------------------------------

inline Json cmd_adversary(const AnalysisSpec& spec) {
  Json report = detail::report_header("adversary", spec);
  struct Side {
    const char* name = "";
    std::optional<Adversary> (*build)(const Tree&, const Weight&) = nullptr;
    Json ladder = Json::array();
    std::vector<double> betas;
    bool found_any = false;
  };
  Side sides[2];
  sides[0].name = "unbounded";
  sides[0].build = &adversary_unbounded;
  sides[1].name = "vanishing";
  sides[1].build = &adversary_vanishing;

  for (std::size_t depth : spec.depth_ladder) {
    auto t = tree_at(spec, depth);
    const Weight w = weight_at(spec, t);
    for (auto& side : sides) {
      auto adv = side.build(t.tree, w);
      Json entry{{"truncation_depth", depth}, {"found", adv.has_value()}};
      if (adv) {
        const OperatorSpec op(t.tree, w, adv->map, Exponent(spec.p));
        const double b = beta(op).value;
        side.betas.push_back(b);
        side.found_any = true;
        entry["beta"] = io::number(b);
        entry["norm_exact"] = io::number(norm_exact(op).value);
        Json pairs = Json::array();
        for (const auto& [from, to] : adv->pairs) pairs.push_back({t.tree.label(from), t.tree.label(to)});
        entry["transpositions"] = std::move(pairs);
      }
      side.ladder.push_back(std::move(entry));
    }
  }
  for (auto& side : sides) {
    report[side.name] = {{"found", side.found_any},
                         {"ladder", std::move(side.ladder)},
                         {"beta_trend", std::string(to_string(classify_trend(side.betas)))}};
  }
  report["map_format"] = "each transposition [a, b] sends a to b and b to a; every other vertex is fixed";
  report["verdict"] = sides[0].found_any || sides[1].found_any ? "adversary found" : "no adversary found";
  return report;
}

inline std::string adversary_summary(const Json& report) {
  std::ostringstream os;
  os.precision(12);
  for (const char* name : {"unbounded", "vanishing"}) {
    const auto& side = report.at(name);
    os << name << ": ";
    if (!side.at("found").get<bool>()) {
      os << "not found\n";
      continue;
    }
    for (const auto& e : side.at("ladder")) {
      os << "D=" << e.at("truncation_depth");
      if (e.at("found").get<bool>()) os << " beta " << e.at("beta");
      else os << " none";
      os << "; ";
    }
    os << side.at("beta_trend").get<std::string>() << "\n";
  }
  os << report.at("verdict").get<std::string>() << "\n";
  return os.str();
}

} // namespace spectree::cli
