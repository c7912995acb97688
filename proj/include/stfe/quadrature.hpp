#pragma once

#include <cstddef>
#include <vector>

namespace stfe {

// Quadrature on the reference n-simplex, stored as barycentric points with
// weights summing to 1. A rule integrates f over a physical simplex T as
//   |T| * sum_i w_i f(lambda_i),
// so the monomial identity  |T| * n! * prod(alpha_k!) / (|alpha|+n)!  for
// integral of prod lambda_k^alpha_k serves as an exact self-check.
struct QuadratureRule {
  int dim = 0;           // n (simplex dimension)
  int exact_degree = 0;  // all polynomials up to this degree are exact
  std::vector<double> points;   // npts * (dim+1) barycentric coordinates
  std::vector<double> weights;  // npts, positive, sum = 1

  std::size_t size() const { return weights.size(); }
  const double* lambda(std::size_t i) const { return &points[i * (dim + 1)]; }
};

// Conical-product (collapsed Gauss) rule: Gauss-Legendre x Gauss-Jacobi
// tensor rules mapped onto the simplex. Positive weights, any degree.
// Cached per (dim, degree); the returned reference stays valid for the
// program lifetime.
const QuadratureRule& simplex_rule(int dim, int degree);

// Gauss-Legendre on [0,1] with weight 1; exact through degree 2*npts-1.
struct LineRule {
  std::vector<double> x;  // in (0,1)
  std::vector<double> w;  // positive, sum = 1
};
const LineRule& line_rule(int degree);

// Gauss-Jacobi nodes/weights on [0,1] with weight (1-x)^alpha, alpha >= 0
// integer. Exposed mainly for tests; simplex_rule uses it internally.
LineRule gauss_jacobi_01(int npts, int alpha);

// Closed-form reference integral of prod lambda_k^alpha_k over the unit
// reference simplex, normalized the same way as the rules (i.e. the value
// sum_i w_i prod lambda^alpha should equal this).
double monomial_reference_integral(const std::vector<int>& alpha);

}  // namespace stfe
