#pragma once

#include <array>
#include <vector>

namespace nsfem {

/// Rule on the reference triangle {(0,0), (1,0), (0,1)}. Points are stored
/// as barycentric triples (1 - xi - eta, xi, eta); weights sum to 1/2.
struct QuadratureRule {
  std::vector<std::array<double, 3>> points;
  std::vector<double> weights;
  int exactness_degree = 0;

  std::size_t size() const { return weights.size(); }
};

/// Rule exact for all polynomials of total degree <= `degree`, 1 <= degree <= 8.
/// Degrees 1, 2 and 5 use the classical symmetric 1-, 3- and 7-point rules;
/// the rest are collapsed Gauss-Legendre tensor rules.
const QuadratureRule& triangle_quadrature(int degree);

/// n-point Gauss-Legendre nodes and weights on [0, 1].
void gauss_legendre_unit(int n, std::vector<double>& nodes, std::vector<double>& weights);

}  // namespace nsfem
