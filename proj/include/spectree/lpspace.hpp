#pragma once

#include <cmath>
#include <complex>
#include <span>
#include <vector>

#include "spectree/error.hpp"
#include "spectree/tree.hpp"
#include "spectree/weight.hpp"

namespace spectree {

using Scalar = std::complex<double>;

/// Exponent p of L^p_lambda, 1 <= p < infinity.
class Exponent {
public:
  explicit Exponent(double p) : p_(p) {
    if (!std::isfinite(p) || p < 1.0) throw ValidationError("p", "exponent must satisfy 1 <= p < inf");
  }
  double value() const noexcept { return p_; }
  bool is_two() const noexcept { return p_ == 2.0; }

  friend bool operator==(Exponent, Exponent) = default;

private:
  double p_;
};

/// Complex value per stored vertex.
class TreeFunction {
public:
  TreeFunction() = default;
  explicit TreeFunction(std::size_t size, Scalar fill = {}) : values_(size, fill) {}
  explicit TreeFunction(std::vector<Scalar> values) : values_(std::move(values)) {}

  std::size_t size() const noexcept { return values_.size(); }
  Scalar operator[](VertexId v) const { return values_[v.index]; }
  Scalar& operator[](VertexId v) { return values_[v.index]; }
  std::span<const Scalar> values() const noexcept { return values_; }
  std::span<Scalar> values() noexcept { return values_; }

  TreeFunction& operator*=(Scalar s) {
    for (auto& x : values_) x *= s;
    return *this;
  }
  friend TreeFunction operator-(const TreeFunction& a, const TreeFunction& b) {
    TreeFunction out(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) out.values_[i] = a.values_[i] - b.values_[i];
    return out;
  }
  friend TreeFunction operator+(const TreeFunction& a, const TreeFunction& b) {
    TreeFunction out(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) out.values_[i] = a.values_[i] + b.values_[i];
    return out;
  }

private:
  std::vector<Scalar> values_;
};

/// ||f||_p = (sum_v |f(v)|^p lambda(v))^(1/p)
inline double norm_p(const TreeFunction& f, const Weight& w, Exponent p) {
  if (f.size() != w.size()) throw ValidationError("function", "function and weight have different sizes");
  const double e = p.value();
  double sum = 0.0;
  const auto fv = f.values();
  const auto wv = w.values();
  if (p.is_two()) {
    for (std::size_t i = 0; i < fv.size(); ++i) sum += std::norm(fv[i]) * wv[i];
    return std::sqrt(sum);
  }
  for (std::size_t i = 0; i < fv.size(); ++i) {
    const double a = std::abs(fv[i]);
    if (a != 0.0) sum += std::pow(a, e) * wv[i];
  }
  return std::pow(sum, 1.0 / e);
}

/// <f, g> = sum_v f(v) conj(g(v)) lambda(v); conjugate-linear in g so that
/// <f, f> = ||f||_2^2 for complex f.
inline Scalar inner(const TreeFunction& f, const TreeFunction& g, const Weight& w) {
  if (f.size() != w.size() || g.size() != w.size())
    throw ValidationError("function", "function and weight have different sizes");
  Scalar sum{};
  for (std::size_t i = 0; i < f.size(); ++i) sum += f.values()[i] * std::conj(g.values()[i]) * w.values()[i];
  return sum;
}

/// Normalized indicator f_v = chi_v / lambda(v)^(1/p); a unit vector.
inline TreeFunction basis_vector(const Tree& t, const Weight& w, VertexId v, Exponent p) {
  if (!t.contains(v)) throw std::out_of_range("basis_vector: vertex out of range");
  TreeFunction f(t.size());
  f[v] = p.is_two() ? 1.0 / std::sqrt(w[v]) : std::pow(w[v], -1.0 / p.value());
  return f;
}

/// Norm of the point evaluation f -> f(v), which is lambda(v)^(-1/p) and is
/// attained by the basis vector f_v.
inline double point_eval_norm(const Tree& t, const Weight& w, VertexId v, Exponent p) {
  if (!t.contains(v)) throw std::out_of_range("point_eval_norm: vertex out of range");
  return p.is_two() ? 1.0 / std::sqrt(w[v]) : std::pow(w[v], -1.0 / p.value());
}

/// Truncation projection A_n: keeps f on depth <= n, zero below.
inline TreeFunction project(const Tree& t, const TreeFunction& f, std::size_t n) {
  TreeFunction out(f.size());
  for (std::size_t d = 0; d <= std::min(n, t.truncation_depth()); ++d)
    for (VertexId v : t.level(d)) out[v] = f[v];
  return out;
}

} // namespace spectree
