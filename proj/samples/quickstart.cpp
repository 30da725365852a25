// Builds the depth-square map on a binary tree with reciprocal depth
// weights and prints how beta grows with the effective domain depth.

#include <cstdio>

#include "spectree/spectree.hpp"

int main() {
  using namespace spectree;
  for (std::size_t n = 2; n <= 6; ++n) {
    // Binary down to depth n, single children below: level n^2 has as many
    // vertices as level n.
    const Tree t = build_bary_capped(2, n * n, n);
    const OperatorSpec op(t, reciprocal_depth_weight(t), depth_square_map(t), Exponent(2));
    const auto b = boundedness(op);
    std::printf("N=%zu  vertices=%zu  beta=%.12g  (1+N^2)/(1+N)=%.12g  norm=%.12g\n", n, t.size(), b.beta,
                double(1 + n * n) / double(1 + n), b.norm_exact);
  }

  const Tree path = build_bary(1, 6);
  const OperatorSpec parent(path, geometric_weight(path, 0.5), parent_map(path), Exponent(2));
  std::printf("geometric 0.5 path, parent map: hs_norm=%.12g trace=%.12g\n", hs_norm(parent),
              trace_diagonal(parent).diagonal_sum);
  const auto sigma = singular_values_analytic(parent);
  const auto dense = oracle::svd_values(oracle::matrix_of(parent));
  for (std::size_t i = 0; i < sigma.size(); ++i) std::printf("  sigma_%zu  %.15f  %.15f\n", i + 1, sigma[i], dense[i]);
}
