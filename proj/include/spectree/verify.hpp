#pragma once

// Seeded property suites behind `spectree verify`. Each suite draws its own
// instances from the seed, so selecting one suite does not change what the
// others see.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "spectree/commands.hpp"
#include "spectree/compop.hpp"
#include "spectree/generators.hpp"
#include "spectree/oracle.hpp"
#include "spectree/schatten.hpp"

namespace spectree::verify {

using io::Json;

inline constexpr std::array<std::string_view, 9> suite_names{
    "tree", "lpspace", "boundedness", "isometry", "compactness", "schatten", "oracle", "adversary", "trace"};

/// Deliberate faults for exercising the failure path.
inline constexpr std::array<std::string_view, 1> injections{"isometry-perturb"};

struct Options {
  std::string suite = "all";
  std::uint64_t seed = 1;
  std::optional<std::string> inject;
};

/// A spec document that reproduces `op` with `spectree analyze`.
inline Json counterexample(const OperatorSpec& op, std::uint64_t seed) {
  Json map = io::map_to_json(op.tree, op.map);
  Json map_source{{"kind", "inline"}, {"map", map["map"]}};
  if (map.contains("partial")) map_source["partial"] = true;
  Json j;
  j["schema_version"] = cli::schema_version;
  j["tree"] = Json{{"kind", "inline"}, {"vertices", io::tree_to_json(op.tree)["vertices"]}};
  j["weight"] = Json{{"family", "inline"}, {"weights", io::weight_to_json(op.tree, op.weight)["weights"]}};
  j["map"] = std::move(map_source);
  j["p"] = op.p.value();
  j["depth_ladder"] = Json::array({op.tree.truncation_depth()});
  j["seed"] = seed;
  return j;
}

class SuiteRun {
public:
  SuiteRun(std::string name, std::uint64_t seed) : name_(std::move(name)), seed_(seed) {}

  /// Records one check. `op` and `witness` are attached to the violation.
  void check(bool ok, std::string_view what, std::size_t case_index, const std::string& detail = {},
             const OperatorSpec* op = nullptr, std::optional<std::string> witness = std::nullopt) {
    ++checks_;
    if (ok) return;
    ++failures_;
    if (violations_.size() >= max_recorded) return;
    Json v{{"check", what}, {"case", case_index}, {"detail", detail}};
    if (witness) v["witness_vertex"] = *witness;
    if (op) v["counterexample"] = counterexample(*op, seed_);
    violations_.push_back(std::move(v));
  }
  void next_case() { ++cases_; }

  bool passed() const { return failures_ == 0; }

  Json to_json() const {
    return {{"name", name_},   {"cases", cases_},           {"checks", checks_},
            {"failures", failures_}, {"violations", violations_}, {"passed", passed()}};
  }

private:
  static constexpr std::size_t max_recorded = 5;
  std::string name_;
  std::uint64_t seed_;
  std::size_t cases_ = 0, checks_ = 0, failures_ = 0;
  Json violations_ = Json::array();
};

namespace detail {

inline std::string fmt(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

inline bool close_rel(double a, double b, double rel) {
  return std::abs(a - b) <= rel * std::max({1.0, std::abs(a), std::abs(b)});
}

inline TreeFunction random_unit(gen::Rng& rng, const OperatorSpec& op) {
  auto f = gen::random_function(rng, op.tree.size());
  f *= 1.0 / norm_p(f, op.weight, op.p);
  return f;
}

inline void run_tree(SuiteRun& run, gen::Rng& rng) {
  for (std::size_t c = 0; c < 40; ++c) {
    run.next_case();
    const Tree t = c % 2 == 0 ? gen::random_bary_tree(rng, 600) : gen::random_irregular_tree(rng, 6, 3, 600);
    std::size_t level_total = 0;
    for (std::size_t n = 0; n <= t.truncation_depth(); ++n) level_total += t.level_size(n);
    run.check(level_total == t.size(), "levels partition the vertex set", c);
    bool consistent = true;
    for (std::uint32_t i = 1; i < t.size(); ++i) {
      const VertexId v{i};
      const VertexId p = *t.parent(v);
      const auto kids = t.children(p);
      consistent = consistent && t.depth(v) == t.depth(p) + 1 && std::find(kids.begin(), kids.end(), v) != kids.end();
    }
    run.check(consistent, "parent and child links agree with depth", c);
    run.check(t.terminal_violations().empty(), "generated trees have no terminal vertex above the frontier", c);
    const Tree back = io::tree_from_json(io::tree_to_json(t));
    bool same = back.size() == t.size();
    for (std::uint32_t i = 0; same && i < t.size(); ++i)
      same = back.parent(VertexId{i}) == t.parent(VertexId{i});
    run.check(same, "tree document round trip", c);
  }
}

inline void run_lpspace(SuiteRun& run, gen::Rng& rng) {
  for (std::size_t c = 0; c < 20; ++c) {
    run.next_case();
    const Tree t = gen::random_bary_tree(rng, 300);
    const Weight w = gen::random_weight(rng, t);
    const Exponent p = gen::random_exponent(rng);
    for (std::uint32_t i = 0; i < t.size(); ++i) {
      const double n = norm_p(basis_vector(t, w, VertexId{i}, p), w, p);
      run.check(std::abs(n - 1.0) <= 1e-12, "basis vectors have unit norm", c, "norm " + fmt(n));
    }
  }
  for (std::size_t c = 0; c < 1000; ++c) {
    run.next_case();
    const Tree t = gen::random_bary_tree(rng, 100, 4);
    const Weight w = gen::random_weight(rng, t);
    const Exponent p = gen::random_exponent(rng);
    const auto f = gen::random_function(rng, t.size());
    const VertexId v{static_cast<std::uint32_t>(gen::uniform_index(rng, 0, t.size() - 1))};
    const double bound = point_eval_norm(t, w, v, p);
    run.check(std::abs(f[v]) <= bound * norm_p(f, w, p) * (1 + 1e-12), "point evaluation bound", c);
    const auto fv = basis_vector(t, w, v, p);
    run.check(close_rel(std::abs(fv[v]), bound, 1e-12), "point evaluation bound attained at f_v", c);
  }
  for (std::size_t c = 0; c < 500; ++c) {
    run.next_case();
    const Tree t = gen::random_irregular_tree(rng, 5, 3, 200);
    const Weight w = gen::random_weight(rng, t);
    const Exponent p = gen::random_exponent(rng);
    const auto f = gen::random_function(rng, t.size());
    const std::size_t n = gen::uniform_index(rng, 0, t.truncation_depth());
    const auto af = project(t, f, n);
    const double nf = norm_p(f, w, p);
    run.check(norm_p(af, w, p) <= nf * (1 + 1e-12), "truncation projection contracts", c);
    run.check(norm_p(f - af, w, p) <= nf * (1 + 1e-12), "complementary projection contracts", c);
  }
}

inline void run_boundedness(SuiteRun& run, gen::Rng& rng) {
  for (std::size_t c = 0; c < 100; ++c) {
    run.next_case();
    const Tree t = gen::random_bary_tree(rng, 600);
    const std::size_t m = 1 + c % 4;
    const OperatorSpec op(t, gen::random_weight(rng, t), gen::random_bounded_multiplicity_map(rng, t, m),
                          gen::random_exponent(rng));
    const auto r = boundedness(op);
    run.check(r.norm_lower_bound <= r.norm_exact * (1 + 1e-10), "beta^(1/p) <= norm", c,
              fmt(r.norm_lower_bound) + " > " + fmt(r.norm_exact), &op);
    run.check(r.norm_exact <= r.norm_upper_bound * (1 + 1e-10), "norm <= (M beta)^(1/p)", c,
              fmt(r.norm_exact) + " > " + fmt(r.norm_upper_bound), &op);
    if (r.injective) {
      run.check(close_rel(r.norm_exact, r.norm_lower_bound, 1e-10), "injective: norm = beta^(1/p)", c,
                fmt(r.norm_exact) + " vs " + fmt(r.norm_lower_bound), &op);
      const auto b = bounds(op.weight);
      run.check(r.beta <= b.max / b.min * (1 + 1e-12), "injective: beta <= max/min weight", c, {}, &op);
    }
    const double found = oracle::norm_search(op, 16, c);
    run.check(found <= r.norm_exact + 1e-9 * std::max(1.0, r.norm_exact), "sampled norms stay below norm_exact", c,
              fmt(found) + " > " + fmt(r.norm_exact), &op);
    auto f = basis_vector(op.tree, op.weight, r.norm_argmax, op.p);
    const double attained = norm_p(apply(op, f), op.weight, op.p);
    run.check(close_rel(attained, r.norm_exact, 1e-10), "indicator of the argmax attains the norm", c,
              fmt(attained) + " vs " + fmt(r.norm_exact), &op, op.tree.label(r.norm_argmax));
  }
}

inline void run_isometry(SuiteRun& run, gen::Rng& rng, bool inject) {
  std::uniform_real_distribution<double> level(0.1, 10.0);
  bool injected = false;
  for (std::size_t c = 0; c < 40; ++c) {
    run.next_case();
    const Tree t = gen::random_bary_tree(rng, 200);
    const Exponent p = gen::random_exponent(rng);
    const auto phi = gen::random_bijection(rng, t);
    Weight w = constant_weight(t, level(rng));
    if (inject && !injected) {
      // The fault needs a vertex that phi moves; identity draws wait a case.
      for (std::uint32_t i = 0; i < t.size() && !injected; ++i)
        if (phi(VertexId{i}) != VertexId{i}) {
          w = w.with_value(VertexId{i}, w[VertexId{i}] * 1.01);
          injected = true;
        }
    }
    const OperatorSpec op(t, w, phi, p);
    const auto verdict = isometry_check(op);
    std::optional<std::string> witness;
    if (verdict.witness_vertex) witness = op.tree.label(*verdict.witness_vertex);
    run.check(verdict.is_isometry, "constant weight bijection is an isometry", c,
              verdict.is_isometry ? std::string() : "witness margin " + fmt(verdict.margin), &op, witness);
    if (verdict.is_isometry) {
      double worst = 0.0;
      for (int k = 0; k < 100; ++k)
        worst = std::max(worst, std::abs(norm_p(apply(op, random_unit(rng, op)), op.weight, op.p) - 1.0));
      run.check(worst < 1e-9, "isometry preserves random unit norms", c, "deviation " + fmt(worst), &op);
    }

    // One weight moved by 1% flips the verdict unless phi fixes that vertex
    // and nothing else involves it.
    const VertexId moved{static_cast<std::uint32_t>(gen::uniform_index(rng, 0, t.size() - 1))};
    const OperatorSpec bent(t, w.with_value(moved, w[moved] * 1.01), phi, p);
    const auto bv = isometry_check(bent);
    if (phi(moved) == moved) {
      run.check(bv.is_isometry == verdict.is_isometry, "perturbing a fixed point keeps the verdict", c, {}, &bent);
    } else {
      run.check(!bv.is_isometry && bv.witness.has_value(), "1% perturbation breaks the isometry", c, {}, &bent);
      if (bv.witness) {
        const double image = norm_p(apply(bent, *bv.witness), bent.weight, bent.p);
        run.check(std::abs(std::abs(image - 1.0) - bv.margin) <= 1e-12 && bv.margin > 1e-6,
                  "witness violates norm preservation by the reported margin", c, "margin " + fmt(bv.margin), &bent,
                  bent.tree.label(*bv.witness_vertex));
      }
    }
    for (const OperatorSpec* s : {&op, &bent}) {
      const OperatorSpec two(s->tree, s->weight, s->map, Exponent(2));
      const bool dense = oracle::gram_identity_deviation(oracle::matrix_of(two)) <= 1e-10;
      run.check(dense == isometry_check(two).is_isometry, "verdict matches the dense M^T M = I test", c, {}, &two);
    }
  }
}

inline void run_compactness(SuiteRun& run, gen::Rng& rng) {
  for (std::size_t c = 0; c < 50; ++c) {
    run.next_case();
    const Tree t = gen::random_irregular_tree(rng, 6, 3, 500);
    const SelfMap phi = c % 2 == 0 ? gen::random_bijection(rng, t) : gen::random_bounded_multiplicity_map(rng, t, 3);
    const OperatorSpec op(t, gen::random_weight(rng, t), phi, gen::random_exponent(rng));
    const auto prof = compactness_profile(op);
    bool monotone = true;
    for (std::size_t n = 1; n < prof.tail_sup.size(); ++n) monotone = monotone && prof.tail_sup[n] <= prof.tail_sup[n - 1];
    run.check(monotone, "tail suprema are nonincreasing", c, {}, &op);
    run.check(prof.tail_sup[0] == beta(op).value, "s_0 equals beta", c, {}, &op);
    if (!analyze(op.tree, op.map).injective) continue;
    const std::size_t depth = op.truncation_depth();
    for (std::size_t N = 0; N < depth; ++N) {
      double prev = INFINITY;
      for (std::size_t n = N + 1; n <= depth; ++n) {
        const double d = tail_defect(op, n, N);
        run.check(std::pow(d, op.p.value()) <= prof.tail_sup[N] + 1e-10, "tail_defect^p <= s_N", c,
                  "n=" + std::to_string(n) + " N=" + std::to_string(N), &op);
        run.check(d <= prev, "tail_defect nonincreasing in n", c, {}, &op);
        prev = d;
      }
    }
  }
}

inline void run_schatten(SuiteRun& run, gen::Rng& rng) {
  for (std::size_t c = 0; c < 50; ++c) {
    run.next_case();
    const Tree t = gen::random_irregular_tree(rng, 6, 3, 600);
    const OperatorSpec op(t, gen::random_weight(rng, t), gen::random_bounded_multiplicity_map(rng, t, 1 + c % 4),
                          Exponent(2));
    const auto mu = singular_values_analytic(op);
    double sq = 0.0;
    for (double x : mu) sq += x * x;
    const double hs = hs_norm(op);
    run.check(close_rel(hs * hs, sq, 1e-10), "hs_norm^2 = sum of squared singular values", c, {}, &op);
    for (double q : {1.0, 1.5, 2.0, 3.0}) {
      const auto s = schatten_sum(op, q);
      run.check(close_rel(s.diagonal_sum, s.singular_value_sum, 1e-10), "diagonal sum = singular value sum", c,
                "q=" + fmt(q), &op);
    }
  }
  // Partial sums along a truncation ladder never decrease.
  for (std::size_t c = 0; c < 20; ++c) {
    run.next_case();
    const Tree full = gen::random_irregular_tree(rng, 7, 3, 600);
    const Weight w = gen::random_weight(rng, full);
    std::vector<double> prev(3, 0.0);
    for (std::size_t d = 0; d <= full.truncation_depth(); ++d) {
      auto cut = truncate(full, d);
      std::vector<double> values(cut.tree.size());
      for (std::size_t i = 0; i < values.size(); ++i) values[i] = w[cut.to_old[i]];
      const OperatorSpec op(cut.tree, Weight(std::move(values)), parent_map(cut.tree), Exponent(2));
      const double qs[] = {1.0, 2.0, 3.0};
      for (std::size_t k = 0; k < 3; ++k) {
        const double s = schatten_sum(op, qs[k]).diagonal_sum;
        run.check(s >= prev[k] * (1 - 1e-12), "partial Schatten sums nondecreasing in depth", c, {}, &op);
        prev[k] = s;
      }
    }
  }
}

inline void run_trace(SuiteRun& run, gen::Rng& rng) {
  auto expect = [&](const OperatorSpec& op, std::size_t expected, std::size_t c, std::string_view what) {
    const auto tr = trace_diagonal(op);
    run.check(tr.agree && tr.fixed_point_count == expected, what, c,
              "trace " + fmt(tr.diagonal_sum) + ", expected " + std::to_string(expected), &op);
  };
  std::size_t c = 0;
  for (std::size_t depth = 1; depth <= 6; ++depth, ++c) {
    run.next_case();
    const Tree t = build_bary(2, depth);
    const Weight w = gen::random_weight(rng, t);
    expect(OperatorSpec(t, w, identity_map(t), Exponent(2)), t.size(), c, "identity trace = vertex count");
    expect(OperatorSpec(t, w, parent_map(t), Exponent(2)), 1, c, "parent map trace = 1");
  }
  for (std::size_t n = 2; n <= 5; ++n, ++c) {
    run.next_case();
    const Tree t = build_bary_capped(3, n * n, n);
    expect(OperatorSpec(t, reciprocal_depth_weight(t), depth_square_map(t), Exponent(2)), 1 + t.level_size(1), c,
           "depth_square trace = 1 + level-1 size");
  }
  for (std::size_t k = 0; k < 60; ++k, ++c) {
    run.next_case();
    const Tree t = gen::random_bary_tree(rng, 400);
    const OperatorSpec op(t, gen::random_weight(rng, t), gen::random_bounded_multiplicity_map(rng, t, 1 + k % 4),
                          Exponent(2));
    expect(op, analyze(t, op.map).fixed_points.size(), c, "trace = fixed-point count");
  }
}

inline void run_oracle(SuiteRun& run, gen::Rng& rng) {
  auto compare = [&](const OperatorSpec& op, std::size_t c) {
    const auto m = oracle::matrix_of(op);
    const auto dense = oracle::svd_values(m);
    const auto analytic = singular_values_analytic(op);
    double worst = 0.0;
    for (std::size_t i = 0; i < dense.size(); ++i) worst = std::max(worst, std::abs(dense[i] - analytic[i]));
    run.check(worst <= 1e-8 * std::max(1.0, analytic.front()), "analytic and dense singular values agree", c,
              "max deviation " + fmt(worst), &op);
    const double hs = hs_norm(op);
    run.check(close_rel(oracle::frobenius_squared(m), hs * hs, 1e-9), "Frobenius^2 = hs_norm^2", c, {}, &op);
    run.check(close_rel(dense.front(), norm_exact(op).value, 1e-8), "largest singular value = norm_exact", c, {}, &op);
  };
  std::size_t c = 0;
  for (; c < 50; ++c) {
    run.next_case();
    const Tree t = c % 2 == 0 ? gen::random_bary_tree(rng, 200) : gen::random_irregular_tree(rng, 5, 3, 200);
    compare(OperatorSpec(t, gen::random_weight(rng, t), gen::random_bounded_multiplicity_map(rng, t, 1 + c % 4),
                         Exponent(2)),
            c);
  }
  const Tree bin8 = build_bary(2, 8);
  const Tree tern5 = build_bary(3, 5);
  const Tree path = build_bary(1, 599);
  const Tree capped = build_bary_capped(2, 16, 4);
  const OperatorSpec structured[] = {
      {bin8, constant_weight(bin8, 1.0), identity_map(bin8), Exponent(2)},
      {bin8, constant_weight(bin8, 1.0), parent_map(bin8), Exponent(2)},
      {bin8, geometric_weight(bin8, 0.5), parent_map(bin8), Exponent(2)},
      {bin8, reciprocal_depth_weight(bin8), level_shift_map(bin8, 3), Exponent(2)},
      {tern5, geometric_weight(tern5, 2.0), parent_map(tern5), Exponent(2)},
      {tern5, reciprocal_depth_weight(tern5), identity_map(tern5), Exponent(2)},
      {path, geometric_weight(path, 0.99), parent_map(path), Exponent(2)},
      {path, reciprocal_depth_weight(path), level_shift_map(path, 7), Exponent(2)},
      {capped, reciprocal_depth_weight(capped), depth_square_map(capped), Exponent(2)},
      {capped, geometric_weight(capped, 2.0), depth_square_map(capped), Exponent(2)},
  };
  for (const auto& op : structured) {
    run.next_case();
    compare(op, c++);
  }
}

inline void run_adversary(SuiteRun& run, gen::Rng& rng) {
  for (std::size_t c = 0; c < 30; ++c) {
    run.next_case();
    const Tree t = gen::random_bary_tree(rng, 400);
    const Weight w = gen::random_weight(rng, t);
    for (const auto& adv : {adversary_unbounded(t, w), adversary_vanishing(t, w)}) {
      if (!adv) continue;
      const OperatorSpec op(t, w, adv->map, Exponent(2));
      run.check(analyze(t, adv->map).injective, "adversary map is injective", c, {}, &op);
      run.check(close_rel(beta(op).value, adv->best_ratio, 1e-12), "adversary beta equals its best ratio", c, {}, &op);
    }
    std::uniform_real_distribution<double> level(0.01, 100.0);
    const Weight flat = constant_weight(t, level(rng));
    run.check(!adversary_unbounded(t, flat) && !adversary_vanishing(t, flat), "constant weight has no adversary", c);
  }
}

} // namespace detail

/// Runs the selected suites; throws ValidationError for an unknown suite or
/// injection name.
inline Json run(const Options& opts) {
  if (opts.suite != "all" && std::find(suite_names.begin(), suite_names.end(), opts.suite) == suite_names.end())
    throw ValidationError("--suite", "unknown suite '" + opts.suite + "'");
  if (opts.inject && std::find(injections.begin(), injections.end(), *opts.inject) == injections.end())
    throw ValidationError("--inject", "unknown injection '" + *opts.inject + "'");
  const bool perturb = opts.inject && *opts.inject == "isometry-perturb";

  Json suites = Json::array();
  bool passed = true;
  for (std::size_t k = 0; k < suite_names.size(); ++k) {
    const std::string name(suite_names[k]);
    if (opts.suite != "all" && opts.suite != name) continue;
    gen::Rng rng(opts.seed * 0x9E3779B97F4A7C15ULL + k);
    SuiteRun r(name, opts.seed);
    if (name == "tree") detail::run_tree(r, rng);
    else if (name == "lpspace") detail::run_lpspace(r, rng);
    else if (name == "boundedness") detail::run_boundedness(r, rng);
    else if (name == "isometry") detail::run_isometry(r, rng, perturb);
    else if (name == "compactness") detail::run_compactness(r, rng);
    else if (name == "schatten") detail::run_schatten(r, rng);
    else if (name == "oracle") detail::run_oracle(r, rng);
    else if (name == "adversary") detail::run_adversary(r, rng);
    else if (name == "trace") detail::run_trace(r, rng);
    passed = passed && r.passed();
    suites.push_back(r.to_json());
  }
  Json out;
  out["schema_version"] = cli::schema_version;
  out["command"] = "verify";
  out["seed"] = opts.seed;
  out["suite"] = opts.suite;
  out["inject"] = opts.inject ? Json(*opts.inject) : Json(nullptr);
  out["suites"] = std::move(suites);
  out["passed"] = passed;
  return out;
}

inline std::string summary(const Json& report) {
  std::string s;
  for (const auto& suite : report.at("suites")) {
    s += suite.at("name").get<std::string>() + ": " + std::to_string(suite.at("cases").get<std::size_t>()) +
         " cases, " + std::to_string(suite.at("checks").get<std::size_t>()) + " checks, ";
    const auto failures = suite.at("failures").get<std::size_t>();
    s += failures == 0 ? "ok\n" : std::to_string(failures) + " FAILED\n";
    for (const auto& v : suite.at("violations")) {
      s += "  - " + v.at("check").get<std::string>() + " (case " + std::to_string(v.at("case").get<std::size_t>()) + ")";
      if (v.contains("witness_vertex")) s += ", witness vertex " + v.at("witness_vertex").get<std::string>();
      if (!v.at("detail").get<std::string>().empty()) s += ": " + v.at("detail").get<std::string>();
      s += "\n";
    }
  }
  s += report.at("passed").get<bool>() ? "all suites passed\n" : "violations found\n";
  return s;
}

} // namespace spectree::verify
