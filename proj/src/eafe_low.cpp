#include "stfe/eafe_low.hpp"

#include <stdexcept>

#include "stfe/quadrature.hpp"

namespace stfe {

void local_eafe_matrix(const ElementGeometry& geom, const ElementCoefficients& coeff,
                       double* a) {
  const int n = geom.n;
  const int m = n + 1;
  // d[j][i] = |T| (D grad lambda_i) . grad lambda_j
  double dg[4][3];
  for (int i = 0; i < m; ++i)
    for (int k = 0; k < n; ++k) {
      double acc = 0.0;
      for (int l = 0; l < n; ++l) acc += coeff.D[k][l] * geom.grad[i][l];
      dg[i][k] = acc;
    }
  for (int j = 0; j < m; ++j) {
    double diag = 0.0;
    for (int i = 0; i < m; ++i) {
      if (i == j) continue;
      double d_ji = 0.0, s = 0.0;
      for (int k = 0; k < n; ++k) {
        d_ji += dg[i][k] * geom.grad[j][k];
        s += coeff.q[k] * (geom.y[i][k] - geom.y[j][k]);
      }
      d_ji *= geom.vol;
      a[j * m + i] = d_ji * bernoulli(s);
      diag -= d_ji * bernoulli(-s);
    }
    a[j * m + j] = diag;
  }
}

AssembledSystem assemble_eafe(const SimplexMesh& mesh, const SpaceTimeProblem& problem,
                              const EafeOptions& opts) {
  if (problem.space_time && problem.eps <= 0.0)
    throw std::invalid_argument("assemble_eafe: eps must be positive");
  if (!problem.source) throw std::invalid_argument("assemble_eafe: missing source");
  LagrangeSpace space(mesh, 1);
  const int n = mesh.dim;
  const int m = n + 1;
  const QuadratureRule& rule = simplex_rule(n, opts.source_quad_degree);

  const ElementKernel kernel = [&](int /*cell*/, const ElementGeometry& geom,
                                   double* a, double* f) {
    const ElementCoefficients coeff = freeze_coefficients(problem, geom);
    local_eafe_matrix(geom, coeff, a);
    if (coeff.gamma != 0.0) {
      if (opts.lump_mass) {
        const double w = coeff.gamma * geom.vol / m;
        for (int i = 0; i < m; ++i) a[i * m + i] += w;
      } else {
        // Exact mass on linears: |T| (1 + delta_ij) / ((n+1)(n+2)).
        const double w = coeff.gamma * geom.vol / (m * (m + 1));
        for (int i = 0; i < m; ++i)
          for (int j = 0; j < m; ++j) a[i * m + j] += w * (1.0 + (i == j));
      }
    }
    for (int i = 0; i < m; ++i) f[i] = 0.0;
    for (std::size_t qp = 0; qp < rule.size(); ++qp) {
      const double* lam = rule.lambda(qp);
      double y[3] = {};
      for (int a2 = 0; a2 < m; ++a2)
        for (int k = 0; k < n; ++k) y[k] += lam[a2] * geom.y[a2][k];
      const double w = geom.vol * rule.weights[qp] * problem.source(y);
      for (int i = 0; i < m; ++i) f[i] += w * lam[i];
    }
  };

  return assemble_system(space, problem, kernel,
                         /*outflow_facet_mass=*/problem.space_time, opts.parallel);
}

}  // namespace stfe
