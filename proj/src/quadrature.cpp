#include "nsfem/quadrature.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>
#include <utility>

namespace nsfem {

namespace {

// P_n(x) and P_n'(x) by the three-term recurrence.
std::pair<double, double> legendre(int n, double x) {
  double p0 = 1.0, p1 = x;
  for (int k = 2; k <= n; ++k) {
    const double pk = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
    p0 = p1;
    p1 = pk;
  }
  return {p1, n * (x * p1 - p0) / (x * x - 1.0)};
}

}  // namespace

void gauss_legendre_unit(int n, std::vector<double>& nodes, std::vector<double>& weights) {
  if (n < 1) throw std::invalid_argument("gauss_legendre_unit: n must be >= 1");
  nodes.assign(n, 0.0);
  weights.assign(n, 0.0);
  for (int i = 0; i < n; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    for (int it = 0; it < 100; ++it) {
      const auto [p, dp] = legendre(n, x);
      const double dx = p / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    const double dp = legendre(n, x).second;
    nodes[n - 1 - i] = 0.5 * (x + 1.0);
    weights[n - 1 - i] = 1.0 / ((1.0 - x * x) * dp * dp);
  }
}

namespace {

QuadratureRule centroid_rule() {
  QuadratureRule r;
  r.points = {{1.0 / 3, 1.0 / 3, 1.0 / 3}};
  r.weights = {0.5};
  r.exactness_degree = 1;
  return r;
}

QuadratureRule strang_fix_3() {
  QuadratureRule r;
  const double a = 2.0 / 3, b = 1.0 / 6;
  r.points = {{a, b, b}, {b, a, b}, {b, b, a}};
  r.weights = {1.0 / 6, 1.0 / 6, 1.0 / 6};
  r.exactness_degree = 2;
  return r;
}

// Radon's 7-point degree-5 rule in closed form.
QuadratureRule radon_7() {
  QuadratureRule r;
  const double s = std::sqrt(15.0);
  const double a1 = (6.0 - s) / 21.0, w1 = (155.0 - s) / 2400.0;
  const double a2 = (6.0 + s) / 21.0, w2 = (155.0 + s) / 2400.0;
  const double b1 = 1.0 - 2.0 * a1, b2 = 1.0 - 2.0 * a2;
  r.points = {{1.0 / 3, 1.0 / 3, 1.0 / 3},
              {b1, a1, a1}, {a1, b1, a1}, {a1, a1, b1},
              {b2, a2, a2}, {a2, b2, a2}, {a2, a2, b2}};
  r.weights = {9.0 / 80.0, w1, w1, w1, w2, w2, w2};
  r.exactness_degree = 5;
  return r;
}

// Duffy map (u, v) -> (xi, eta) = (u (1 - v), v), Jacobian (1 - v).
// Exact for total degree d with ceil((d+1)/2) points in u and
// ceil((d+2)/2) points in v.
QuadratureRule collapsed_gauss(int degree) {
  const int nu = (degree + 2) / 2;
  const int nv = (degree + 3) / 2;
  std::vector<double> xu, wu, xv, wv;
  gauss_legendre_unit(nu, xu, wu);
  gauss_legendre_unit(nv, xv, wv);
  QuadratureRule r;
  for (int j = 0; j < nv; ++j) {
    for (int i = 0; i < nu; ++i) {
      const double xi = xu[i] * (1.0 - xv[j]);
      const double eta = xv[j];
      r.points.push_back({1.0 - xi - eta, xi, eta});
      r.weights.push_back(wu[i] * wv[j] * (1.0 - xv[j]));
    }
  }
  r.exactness_degree = degree;
  return r;
}

}  // namespace

const QuadratureRule& triangle_quadrature(int degree) {
  static const std::vector<QuadratureRule> rules = [] {
    std::vector<QuadratureRule> v;
    v.push_back(centroid_rule());
    v.push_back(strang_fix_3());
    v.push_back(collapsed_gauss(3));
    v.push_back(collapsed_gauss(4));
    v.push_back(radon_7());
    v.push_back(collapsed_gauss(6));
    v.push_back(collapsed_gauss(7));
    v.push_back(collapsed_gauss(8));
    return v;
  }();
  if (degree < 1 || degree > 8) {
    throw std::invalid_argument("triangle_quadrature: unsupported degree " + std::to_string(degree));
  }
  return rules[degree - 1];
}

}  // namespace nsfem
