#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <span>
#include <string_view>
#include <utility>
#include <vector>

#include "spectree/error.hpp"
#include "spectree/lpspace.hpp"
#include "spectree/operator_spec.hpp"
#include "spectree/selfmap.hpp"
#include "spectree/tree.hpp"
#include "spectree/weight.hpp"

namespace spectree {

/// (C_phi f)(v) = f(phi(v)); zero outside the map's domain.
inline TreeFunction apply(const OperatorSpec& spec, const TreeFunction& f) {
  TreeFunction out(spec.tree.size());
  for (VertexId v : spec.map.domain()) out[v] = f[spec.map(v)];
  return out;
}

struct BetaResult {
  double value = 0.0;
  VertexId argmax;
  bool finite = true;
};

/// beta_phi = max over the domain of lambda(v) / lambda(phi(v)).
inline BetaResult beta(const OperatorSpec& spec) {
  BetaResult r{-1.0, VertexId{0}, true};
  for (VertexId v : spec.map.domain()) {
    const double ratio = spec.weight[v] / spec.weight[spec.map(v)];
    if (ratio > r.value) r.value = ratio, r.argmax = v;
  }
  r.finite = std::isfinite(r.value);
  return r;
}

/// lambda(phi^-1(u)) = sum of lambda(v) over the preimage of u, per vertex u.
inline std::vector<double> preimage_mass(const OperatorSpec& spec) {
  std::vector<double> mass(spec.tree.size(), 0.0);
  for (VertexId v : spec.map.domain()) mass[spec.map(v).index] += spec.weight[v];
  return mass;
}

struct NormResult {
  double value = 0.0;
  /// Vertex u whose normalized indicator attains the norm.
  VertexId argmax;
};

namespace detail {

inline double pth_root(double x, Exponent p) {
  if (p.value() == 1.0) return x;
  if (p.is_two()) return std::sqrt(x);
  return std::pow(x, 1.0 / p.value());
}

// max over u with depth(u) > min_depth (or every u) of lambda(phi^-1(u))/lambda(u)
inline std::pair<double, VertexId> max_mass_ratio(const OperatorSpec& spec, std::optional<std::size_t> min_depth) {
  const auto mass = preimage_mass(spec);
  double best = 0.0;
  VertexId arg{0};
  for (std::uint32_t u = 0; u < mass.size(); ++u) {
    if (mass[u] == 0.0) continue;
    if (min_depth && spec.tree.depth(VertexId{u}) <= *min_depth) continue;
    const double r = mass[u] / spec.weight.values()[u];
    if (r > best) best = r, arg = VertexId{u};
  }
  return {best, arg};
}

} // namespace detail

/// Exact operator norm at truncation scale:
///   ||C_phi|| = max_u [lambda(phi^-1(u)) / lambda(u)]^(1/p),
/// from ||C_phi f||^p = sum_u |f(u)|^p lambda(phi^-1(u)). For injective phi
/// it equals beta^(1/p). Vertices with empty preimage contribute 0.
inline NormResult norm_exact(const OperatorSpec& spec) {
  auto [ratio, arg] = detail::max_mass_ratio(spec, std::nullopt);
  return {detail::pth_root(ratio, spec.p), arg};
}

struct BoundednessReport {
  double beta = 0.0;
  VertexId beta_argmax;
  bool beta_finite = true;
  double norm_exact = 0.0;
  VertexId norm_argmax;
  /// beta^(1/p)
  double norm_lower_bound = 0.0;
  /// (M beta)^(1/p)
  double norm_upper_bound = 0.0;
  bool injective = true;
  std::size_t multiplicity = 0;
  std::size_t truncation_depth = 0;
  std::optional<std::size_t> effective_domain_depth;
};

inline BoundednessReport boundedness(const OperatorSpec& spec) {
  const auto b = beta(spec);
  const auto n = norm_exact(spec);
  const auto profile = analyze(spec.tree, spec.map);
  BoundednessReport r;
  r.beta = b.value;
  r.beta_argmax = b.argmax;
  r.beta_finite = b.finite;
  r.norm_exact = n.value;
  r.norm_argmax = n.argmax;
  r.norm_lower_bound = detail::pth_root(b.value, spec.p);
  r.norm_upper_bound = detail::pth_root(static_cast<double>(profile.max_multiplicity) * b.value, spec.p);
  r.injective = profile.injective;
  r.multiplicity = profile.max_multiplicity;
  r.truncation_depth = spec.truncation_depth();
  r.effective_domain_depth = spec.map.effective_domain_depth();
  return r;
}

/// Outcome of the isometry test with, on failure, a unit function whose
/// image norm differs from 1.
struct IsometryVerdict {
  bool is_isometry = false;
  bool bijective = false;
  /// phi is injective and every vertex it misses lies on the truncation
  /// frontier, so the failure may come from truncating a bijection.
  bool frontier_only = false;
  std::optional<VertexId> non_hit;
  std::optional<std::pair<VertexId, VertexId>> shared_image;
  /// Vertex u with lambda(u)/lambda(phi(u)) != 1, and that ratio.
  std::optional<VertexId> ratio_defect;
  double defect_ratio = 1.0;
  /// Unit vector f_w concentrated at `witness_vertex`.
  std::optional<TreeFunction> witness;
  std::optional<VertexId> witness_vertex;
  double witness_image_norm = 1.0;
  /// | ||C_phi witness||_p - 1 |
  double margin = 0.0;
};

/// C_phi is an isometry iff phi is a bijection of the stored vertex set and
/// lambda(v) = lambda(phi(v)) for all v (ratios compared at `ratio_tol`).
inline IsometryVerdict isometry_check(const OperatorSpec& spec, double ratio_tol = 1e-12) {
  const auto profile = analyze(spec.tree, spec.map);
  IsometryVerdict out;
  out.bijective = spec.map.is_total() && profile.injective && profile.surjective_on_truncation;

  auto attach_witness = [&](VertexId w) {
    auto f = basis_vector(spec.tree, spec.weight, w, spec.p);
    out.witness_image_norm = norm_p(apply(spec, f), spec.weight, spec.p);
    out.margin = std::abs(out.witness_image_norm - 1.0);
    out.witness_vertex = w;
    out.witness = std::move(f);
  };

  if (!out.bijective) {
    // A non-bijective self-map of a finite set always misses some vertex.
    if (!profile.injective) {
      for (std::uint32_t u = 0; u < profile.preimages.size(); ++u)
        if (profile.preimages[u].size() > 1) {
          out.shared_image = std::pair{profile.preimages[u][0], profile.preimages[u][1]};
          break;
        }
    }
    if (!profile.non_hit.empty()) {
      out.non_hit = profile.non_hit.front();
      const std::size_t frontier = spec.truncation_depth();
      out.frontier_only = profile.injective && std::all_of(profile.non_hit.begin(), profile.non_hit.end(),
                                      [&](VertexId w) { return spec.tree.depth(w) == frontier; });
      attach_witness(*out.non_hit);
    }
    return out;
  }

  double worst = 0.0;
  for (VertexId v : spec.map.domain()) {
    const double r = spec.weight[v] / spec.weight[spec.map(v)];
    const double dev = std::abs(r - 1.0);
    if (dev > ratio_tol && dev > worst) {
      worst = dev;
      out.ratio_defect = v;
      out.defect_ratio = r;
    }
  }
  if (!out.ratio_defect) {
    out.is_isometry = true;
    return out;
  }
  // ||C_phi f_{phi(u)}||^p = lambda(u) / lambda(phi(u)) for a bijection.
  attach_witness(spec.map(*out.ratio_defect));
  return out;
}

enum class CompactnessVerdict { compact_consistent, not_compact_consistent };

inline std::string_view to_string(CompactnessVerdict v) {
  return v == CompactnessVerdict::compact_consistent ? "compact-consistent" : "not compact-consistent";
}

struct CompactnessCriteria {
  /// Required decay of the deepest tail supremum relative to s_0.
  double decay_factor = 0.1;
};

/// Tail suprema s_N = max { lambda(v)/lambda(phi(v)) : depth(phi(v)) >= N }
/// for N = 0..D and a finite-depth trend verdict. This is a diagnostic of
/// the truncation, not a proof of compactness of the infinite operator.
struct CompactnessProfile {
  std::vector<double> tail_sup;
  /// Depths occupied by phi(T); s_N only changes at these depths.
  std::vector<std::size_t> image_depths;
  /// Least-squares slope of ln s_N against N over the final third of the
  /// image depths; NaN when fewer than two positive points are available.
  double tail_slope = std::numeric_limits<double>::quiet_NaN();
  CompactnessVerdict verdict = CompactnessVerdict::not_compact_consistent;
  std::size_t truncation_depth = 0;
};

inline CompactnessProfile compactness_profile(const OperatorSpec& spec, CompactnessCriteria criteria = {}) {
  const std::size_t depth = spec.truncation_depth();
  CompactnessProfile out;
  out.truncation_depth = depth;
  std::vector<double> by_image_depth(depth + 1, 0.0);
  std::vector<bool> occupied(depth + 1, false);
  for (VertexId v : spec.map.domain()) {
    const VertexId u = spec.map(v);
    const std::size_t d = spec.tree.depth(u);
    by_image_depth[d] = std::max(by_image_depth[d], spec.weight[v] / spec.weight[u]);
    occupied[d] = true;
  }
  out.tail_sup.assign(depth + 1, 0.0);
  double running = 0.0;
  for (std::size_t n = depth + 1; n-- > 0;) {
    running = std::max(running, by_image_depth[n]);
    out.tail_sup[n] = running;
  }
  for (std::size_t d = 0; d <= depth; ++d)
    if (occupied[d]) out.image_depths.push_back(d);

  // Empty tails beyond the deepest image are truncation artifacts, so the
  // trend is judged on the image depths only.
  const auto& pts = out.image_depths;
  if (pts.size() < 2) return out;
  const std::size_t tail_count = std::max<std::size_t>(2, (pts.size() + 2) / 3);
  const std::size_t first = pts.size() - tail_count;

  bool strictly_decreasing = true;
  for (std::size_t i = first + 1; i < pts.size(); ++i)
    if (!(out.tail_sup[pts[i]] < out.tail_sup[pts[i - 1]])) strictly_decreasing = false;

  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  std::size_t m = 0;
  for (std::size_t i = first; i < pts.size(); ++i) {
    const double s = out.tail_sup[pts[i]];
    if (!(s > 0.0)) continue;
    const double x = static_cast<double>(pts[i]), y = std::log(s);
    sx += x, sy += y, sxx += x * x, sxy += x * y, ++m;
  }
  if (m >= 2) {
    const double denom = static_cast<double>(m) * sxx - sx * sx;
    if (denom != 0.0) out.tail_slope = (static_cast<double>(m) * sxy - sx * sy) / denom;
  }

  const bool decayed = out.tail_sup[pts.back()] < criteria.decay_factor * out.tail_sup[0];
  if (decayed && strictly_decreasing) out.verdict = CompactnessVerdict::compact_consistent;
  return out;
}

/// ||C_phi - C_phi A_n|| on the truncation: the norm formula restricted to
/// vertices u with depth(u) > n. Defined for n > N only, the regime in which
/// tail_defect^p <= s_N holds for injective phi.
inline double tail_defect(const OperatorSpec& spec, std::size_t n, std::size_t N) {
  if (n <= N)
    throw DomainError("tail_defect requires n > N (got n=" + std::to_string(n) + ", N=" + std::to_string(N) + ")");
  auto [ratio, arg] = detail::max_mass_ratio(spec, n);
  (void)arg;
  return detail::pth_root(ratio, spec.p);
}

enum class Trend { unbounded, bounded, inconclusive };

inline std::string_view to_string(Trend t) {
  switch (t) {
    case Trend::unbounded: return "unbounded trend";
    case Trend::bounded: return "bounded plateau";
    case Trend::inconclusive: return "inconclusive";
  }
  return "inconclusive";
}

/// Classifies a sequence of suprema measured along increasing truncation
/// depths: strictly growing at every step is an unbounded trend, an
/// unchanged final step is a plateau.
inline Trend classify_trend(std::span<const double> values, double rel_tol = 1e-9) {
  if (values.size() < 2) return Trend::inconclusive;
  bool growing = true;
  for (std::size_t i = 1; i < values.size(); ++i)
    if (!(values[i] > values[i - 1] * (1.0 + rel_tol))) growing = false;
  if (growing) return Trend::unbounded;
  const double a = values[values.size() - 2], b = values.back();
  if (std::abs(b - a) <= rel_tol * std::max(std::abs(a), std::abs(b))) return Trend::bounded;
  return Trend::inconclusive;
}

} // namespace spectree
