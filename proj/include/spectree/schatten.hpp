#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <span>
#include <string_view>
#include <vector>

#include "spectree/compop.hpp"
#include "spectree/error.hpp"

namespace spectree {

namespace detail {

inline void require_hilbert(const OperatorSpec& spec, const char* what) {
  if (!spec.p.is_two())
    throw DomainError(std::string(what) + " is defined on L^2_lambda only (p = 2), got p = " +
                      std::to_string(spec.p.value()));
}

// lambda(phi^-1(u)) / lambda(u) for every u, zero for vertices phi misses.
inline std::vector<double> diagonal_ratios(const OperatorSpec& spec) {
  auto mass = preimage_mass(spec);
  for (std::size_t u = 0; u < mass.size(); ++u) mass[u] /= spec.weight.values()[u];
  return mass;
}

} // namespace detail

/// Singular values of C_phi on L^2_lambda, descending.
///
/// In the orthonormal basis {f_u} the matrix of C_phi has one nonzero per
/// row, so C_phi^* C_phi is diagonal with entries lambda(phi^-1(u))/lambda(u).
/// The result holds their square roots, zero-padded to the vertex count.
inline std::vector<double> singular_values_analytic(const OperatorSpec& spec) {
  detail::require_hilbert(spec, "singular_values_analytic");
  auto values = detail::diagonal_ratios(spec);
  for (double& x : values) x = std::sqrt(x);
  std::sort(values.begin(), values.end(), std::greater<>());
  return values;
}

/// Hilbert-Schmidt norm [sum_u lambda(phi^-1(u))/lambda(u)]^(1/2).
inline double hs_norm(const OperatorSpec& spec) {
  detail::require_hilbert(spec, "hs_norm");
  double sum = 0.0;
  for (double x : detail::diagonal_ratios(spec)) sum += x;
  return std::sqrt(sum);
}

struct SchattenSum {
  double q = 0.0;
  /// sum_u [lambda(phi^-1(u))/lambda(u)]^(q/2)
  double diagonal_sum = 0.0;
  /// sum_n mu_n^q over the analytic singular values.
  double singular_value_sum = 0.0;
};

/// Partial Schatten sums at exponent q >= 1. The two sums coincide because
/// the singular values are exactly the square roots of the diagonal ratios.
inline SchattenSum schatten_sum(const OperatorSpec& spec, double q) {
  detail::require_hilbert(spec, "schatten_sum");
  if (!std::isfinite(q) || q < 1.0) throw DomainError("schatten exponent must satisfy q >= 1");
  SchattenSum out{q, 0.0, 0.0};
  for (double x : detail::diagonal_ratios(spec))
    if (x > 0.0) out.diagonal_sum += q == 2.0 ? x : std::pow(x, q / 2.0);
  for (double mu : singular_values_analytic(spec))
    if (mu > 0.0) out.singular_value_sum += std::pow(mu, q);
  return out;
}

struct TraceResult {
  /// sum_u <C_phi f_u, f_u>
  double diagonal_sum = 0.0;
  std::size_t fixed_point_count = 0;
  /// Integer identity: the rounded diagonal sum equals the fixed-point count.
  bool agree = false;
};

/// Trace of C_phi in the basis {f_u}, computed from the basis and by
/// counting fixed points. Each diagonal entry is chi_u(phi(u)), i.e. 0 or 1.
inline TraceResult trace_diagonal(const OperatorSpec& spec) {
  detail::require_hilbert(spec, "trace_diagonal");
  TraceResult out;
  for (VertexId u : spec.map.domain()) {
    const double inv_sqrt = 1.0 / std::sqrt(spec.weight[u]);
    // <C_phi f_u, f_u> has a single term at v = u: f_u(phi(u)) f_u(u) lambda(u).
    const double image_value = spec.map(u) == u ? inv_sqrt : 0.0;
    out.diagonal_sum += image_value * inv_sqrt * spec.weight[u];
  }
  out.fixed_point_count = analyze(spec.tree, spec.map).fixed_points.size();
  const double count = static_cast<double>(out.fixed_point_count);
  out.agree = std::llround(out.diagonal_sum) == static_cast<long long>(out.fixed_point_count) &&
              std::abs(out.diagonal_sum - count) <= 1e-9 * std::max(1.0, count);
  return out;
}

enum class Convergence { converging, diverging, inconclusive };

inline std::string_view to_string(Convergence c) {
  switch (c) {
    case Convergence::converging: return "converging";
    case Convergence::diverging: return "diverging";
    case Convergence::inconclusive: return "inconclusive";
  }
  return "inconclusive";
}

/// Three-way verdict on partial sums measured at increasing truncation
/// depths. Converging: the last increment is below `cauchy_tol` relative to
/// the sum. Diverging: the per-depth increment did not shrink over the last
/// step. Needs at least three depths.
inline Convergence classify_partial_sums(std::span<const std::size_t> depths, std::span<const double> sums,
                                         double cauchy_tol = 1e-6) {
  if (depths.size() != sums.size() || sums.size() < 3) return Convergence::inconclusive;
  const std::size_t k = sums.size() - 1;
  const double last = sums[k] - sums[k - 1];
  const double prev = sums[k - 1] - sums[k - 2];
  if (last <= cauchy_tol * std::abs(sums[k])) return Convergence::converging;
  const double rate_last = last / static_cast<double>(depths[k] - depths[k - 1]);
  const double rate_prev = prev / static_cast<double>(depths[k - 1] - depths[k - 2]);
  if (rate_last >= rate_prev * (1.0 - 1e-9)) return Convergence::diverging;
  return Convergence::inconclusive;
}

enum class SpectrumSource { analytic, oracle };

inline std::string_view to_string(SpectrumSource s) { return s == SpectrumSource::analytic ? "analytic" : "oracle"; }

struct SpectralReport {
  std::vector<double> singular_values;
  std::vector<SchattenSum> schatten_sums;
  double hs_norm = 0.0;
  TraceResult trace;
  SpectrumSource source = SpectrumSource::analytic;
};

inline SpectralReport spectral_report(const OperatorSpec& spec, std::span<const double> exponents) {
  SpectralReport r;
  r.singular_values = singular_values_analytic(spec);
  for (double q : exponents) r.schatten_sums.push_back(schatten_sum(spec, q));
  r.hs_norm = hs_norm(spec);
  r.trace = trace_diagonal(spec);
  return r;
}

} // namespace spectree
