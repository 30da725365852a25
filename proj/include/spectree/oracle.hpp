#pragma once

// Dense-matrix cross-check of the analytic formulas. Nothing in here calls
// into compop or schatten: the matrix is assembled from the basis definition
// and diagonalized numerically.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <ostream>
#include <random>
#include <vector>

#include "spectree/error.hpp"
#include "spectree/lpspace.hpp"
#include "spectree/operator_spec.hpp"

namespace spectree::oracle {

/// Default cap on the vertex count for dense checks.
inline constexpr std::size_t default_max_vertices = 600;

class DenseMatrix {
public:
  DenseMatrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols, 0.0) {}

  static DenseMatrix identity(std::size_t n) {
    DenseMatrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
  }

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }
  const std::vector<double>& data() const noexcept { return data_; }

private:
  std::size_t rows_, cols_;
  std::vector<double> data_;
};

/// Matrix of C_phi on L^2_lambda in the basis f_u = chi_u / sqrt(lambda(u)):
/// M[w, u] = <C_phi f_u, f_w> = chi_u(phi(w)) sqrt(lambda(w) / lambda(u)).
inline DenseMatrix matrix_of(const OperatorSpec& spec) {
  if (!spec.p.is_two()) throw DomainError("matrix_of requires p = 2");
  const std::size_t n = spec.tree.size();
  DenseMatrix m(n, n);
  for (VertexId w : spec.map.domain()) {
    const VertexId u = spec.map(w);
    // (C_phi f_u)(w) = f_u(phi(w)); the inner product against f_w keeps the
    // single term at w.
    const double image_value = 1.0 / std::sqrt(spec.weight[u]);
    const double basis_value = 1.0 / std::sqrt(spec.weight[w]);
    m(w.index, u.index) = image_value * basis_value * spec.weight[w];
  }
  return m;
}

inline double frobenius_squared(const DenseMatrix& m) {
  double s = 0.0;
  for (double x : m.data()) s += x * x;
  return s;
}

/// M^T M
inline DenseMatrix gram(const DenseMatrix& m) {
  DenseMatrix g(m.cols(), m.cols());
  for (std::size_t r = 0; r < m.rows(); ++r)
    for (std::size_t i = 0; i < m.cols(); ++i) {
      const double a = m(r, i);
      if (a == 0.0) continue;
      for (std::size_t j = 0; j < m.cols(); ++j) g(i, j) += a * m(r, j);
    }
  return g;
}

/// max_ij |(M^T M)_ij - delta_ij|
inline double gram_identity_deviation(const DenseMatrix& m) {
  const auto g = gram(m);
  double worst = 0.0;
  for (std::size_t i = 0; i < g.rows(); ++i)
    for (std::size_t j = 0; j < g.cols(); ++j) worst = std::max(worst, std::abs(g(i, j) - (i == j ? 1.0 : 0.0)));
  return worst;
}

struct SvdOptions {
  /// Stop once the off-diagonal Frobenius mass of M^T M falls below this
  /// fraction of its total Frobenius mass.
  double relative_off_diagonal = 1e-14;
  int max_sweeps = 100;
};

/// Singular values, descending, by one-sided (Hestenes) Jacobi: plane
/// rotations orthogonalize the columns, which diagonalizes M^T M without
/// forming it; the singular values are the final column norms.
inline std::vector<double> svd_values(const DenseMatrix& m, SvdOptions opts = {}) {
  for (double x : m.data())
    if (!std::isfinite(x)) throw ValidationError("matrix", "non-finite entry");
  const std::size_t rows = m.rows(), cols = m.cols();
  std::vector<std::vector<double>> a(cols, std::vector<double>(rows));
  for (std::size_t r = 0; r < rows; ++r)
    for (std::size_t c = 0; c < cols; ++c) a[c][r] = m(r, c);

  auto dot = [rows](const std::vector<double>& x, const std::vector<double>& y) {
    double s = 0.0;
    for (std::size_t k = 0; k < rows; ++k) s += x[k] * y[k];
    return s;
  };

  std::vector<double> sq(cols);
  for (std::size_t c = 0; c < cols; ++c) sq[c] = dot(a[c], a[c]);

  for (int sweep = 0; sweep < opts.max_sweeps; ++sweep) {
    double off = 0.0, diag = 0.0;
    bool rotated = false;
    for (double s : sq) diag += s * s;
    for (std::size_t i = 0; i + 1 < cols; ++i) {
      for (std::size_t j = i + 1; j < cols; ++j) {
        const double alpha = sq[i], beta = sq[j];
        if (alpha == 0.0 || beta == 0.0) continue;
        const double gamma = dot(a[i], a[j]);
        off += 2.0 * gamma * gamma;
        if (std::abs(gamma) <= 1e-300 || std::abs(gamma) <= 4e-16 * std::sqrt(alpha * beta)) continue;
        const double zeta = (beta - alpha) / (2.0 * gamma);
        const double t = std::copysign(1.0, zeta) / (std::abs(zeta) + std::sqrt(1.0 + zeta * zeta));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = c * t;
        auto& x = a[i];
        auto& y = a[j];
        for (std::size_t k = 0; k < rows; ++k) {
          const double xi = x[k], yj = y[k];
          x[k] = c * xi - s * yj;
          y[k] = s * xi + c * yj;
        }
        sq[i] = dot(x, x);
        sq[j] = dot(y, y);
        rotated = true;
      }
    }
    if (!rotated || std::sqrt(off) <= opts.relative_off_diagonal * std::sqrt(diag + off)) break;
  }

  std::vector<double> sigma(cols);
  for (std::size_t c = 0; c < cols; ++c) sigma[c] = std::sqrt(dot(a[c], a[c]));
  std::sort(sigma.begin(), sigma.end(), std::greater<>());
  sigma.resize(std::min(rows, cols));
  return sigma;
}

/// Lower-bound search for ||C_phi|| on L^p_lambda: the largest image norm
/// over every normalized indicator f_u and `samples` random unit functions.
/// Deterministic for a given seed.
inline double norm_search(const OperatorSpec& spec, std::size_t samples, std::uint64_t seed) {
  if (samples == 0) throw ValidationError("samples", "must be at least 1");
  const std::size_t n = spec.tree.size();
  auto compose = [&](const TreeFunction& f) {
    TreeFunction g(n);
    for (VertexId v : spec.map.domain()) g[v] = f[spec.map(v)];
    return g;
  };

  double best = 0.0;
  for (std::uint32_t u = 0; u < n; ++u) {
    TreeFunction f(n);
    f[VertexId{u}] = 1.0;
    f *= 1.0 / norm_p(f, spec.weight, spec.p);
    best = std::max(best, norm_p(compose(f), spec.weight, spec.p));
  }

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::uniform_int_distribution<std::uint32_t> pick(0, static_cast<std::uint32_t>(n - 1));
  for (std::size_t s = 0; s < samples; ++s) {
    TreeFunction f(n);
    // Alternate dense functions with sparse ones concentrated on a few
    // vertices, which come closer to the extremal indicators.
    if (s % 2 == 0) {
      for (auto& x : f.values()) x = Scalar(gauss(rng), gauss(rng));
    } else {
      for (int k = 0; k < 3; ++k) f[VertexId{pick(rng)}] += Scalar(gauss(rng), gauss(rng));
    }
    const double norm = norm_p(f, spec.weight, spec.p);
    if (norm == 0.0) continue;
    f *= 1.0 / norm;
    best = std::max(best, norm_p(compose(f), spec.weight, spec.p));
  }
  return best;
}

/// Nonzero entries as CSV triplets `row,col,value`.
inline void write_triplets(std::ostream& os, const DenseMatrix& m) {
  os << "row,col,value\n";
  const auto old_precision = os.precision(17);
  for (std::size_t r = 0; r < m.rows(); ++r)
    for (std::size_t c = 0; c < m.cols(); ++c)
      if (m(r, c) != 0.0) os << r << ',' << c << ',' << m(r, c) << '\n';
  os.precision(old_precision);
}

} // namespace spectree::oracle
