#include "stfe/sd.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

#include "stfe/quadrature.hpp"

namespace stfe {

int sd_select_p(int r, double alpha) { return (r == 1 || alpha == 0.0) ? 1 : 2; }

SdParameters make_sd_parameters(const SpaceTimeProblem& problem, double theta, int r) {
  if (!problem.space_time)
    throw std::invalid_argument("streamline diffusion needs a space-time problem");
  if (!problem.constant_coefficients)
    throw std::invalid_argument(
        "streamline diffusion requires constant coefficients (K = alpha I, beta, gamma)");
  if (r != 1 && r != 2) throw std::invalid_argument("order must be 1 or 2");
  SdParameters p;
  p.alpha = problem.alpha;
  p.beta = problem.beta;
  p.gamma = problem.gamma;
  p.theta = theta;
  p.r = r;
  p.p = sd_select_p(r, problem.alpha);
  const double b2 = p.beta[0] * p.beta[0] + p.beta[1] * p.beta[1];
  p.nu = 1.0 / std::sqrt(b2 + 1.0);
  return p;
}

void local_sd_matrix(const ElementGeometry& geom, const SdParameters& params,
                     double* a) {
  const int n = geom.n;       // space-time dimension
  const int ds = n - 1;       // spatial dimension
  const int nloc = local_dof_count(n, params.r);
  const double tau = params.theta * std::pow(geom.h, params.p) * params.nu;
  const QuadratureRule& rule = simplex_rule(n, 2 * params.r + 2);

  std::vector<double> vals(nloc), grads(nloc * n), lap(nloc, 0.0);
  if (params.r == 2) {
    // Second derivatives of quadratics are constant on the element.
    std::vector<double> hess(nloc * n * n);
    shape_hessians(n, geom, hess.data());
    for (int i = 0; i < nloc; ++i)
      for (int k = 0; k < ds; ++k) lap[i] += hess[i * n * n + k * n + k];
  }

  for (int i = 0; i < nloc * nloc; ++i) a[i] = 0.0;
  for (std::size_t qp = 0; qp < rule.size(); ++qp) {
    shape_values(n, params.r, rule.lambda(qp), vals.data());
    shape_gradients(n, params.r, rule.lambda(qp), geom, grads.data());
    const double w = geom.vol * rule.weights[qp];
    for (int i = 0; i < nloc; ++i) {
      const double* gi = grads.data() + i * n;
      double stream_i = gi[n - 1];  // v_t + beta . grad_x v
      for (int k = 0; k < ds; ++k) stream_i += params.beta[k] * gi[k];
      for (int j = 0; j < nloc; ++j) {
        const double* gj = grads.data() + j * n;
        double stream_j = gj[n - 1];
        for (int k = 0; k < ds; ++k) stream_j += params.beta[k] * gj[k];
        double diff = 0.0;
        for (int k = 0; k < ds; ++k) diff += gi[k] * gj[k];
        const double lu =
            stream_j - params.alpha * lap[j] + params.gamma * vals[j];
        a[i * nloc + j] += w * (params.alpha * diff + stream_j * vals[i] +
                                params.gamma * vals[j] * vals[i] +
                                tau * lu * stream_i);
      }
    }
  }
}

AssembledSystem assemble_sd(const SimplexMesh& mesh, const SpaceTimeProblem& problem,
                            const SdParameters& params, const SdOptions& opts) {
  if (!problem.source) throw std::invalid_argument("assemble_sd: missing source");
  LagrangeSpace space(mesh, params.r);
  const int n = mesh.dim;
  const int ds = n - 1;
  const int nloc = space.dofs_per_cell();
  const QuadratureRule& rule = simplex_rule(n, 2 * params.r + 2);

  const ElementKernel kernel = [&](int /*cell*/, const ElementGeometry& geom,
                                   double* a, double* f) {
    local_sd_matrix(geom, params, a);
    const double tau = params.theta * std::pow(geom.h, params.p) * params.nu;
    std::vector<double> vals(nloc), grads(nloc * n);
    for (int i = 0; i < nloc; ++i) f[i] = 0.0;
    for (std::size_t qp = 0; qp < rule.size(); ++qp) {
      const double* lam = rule.lambda(qp);
      shape_values(n, params.r, lam, vals.data());
      shape_gradients(n, params.r, lam, geom, grads.data());
      double y[3] = {};
      for (int a2 = 0; a2 <= n; ++a2)
        for (int k = 0; k < n; ++k) y[k] += lam[a2] * geom.y[a2][k];
      const double w = geom.vol * rule.weights[qp] * problem.source(y);
      for (int i = 0; i < nloc; ++i) {
        const double* gi = grads.data() + i * n;
        double stream_i = gi[n - 1];
        for (int k = 0; k < ds; ++k) stream_i += params.beta[k] * gi[k];
        f[i] += w * (vals[i] + tau * stream_i);
      }
    }
  };

  return assemble_system(space, problem, kernel, /*outflow_facet_mass=*/false,
                         opts.parallel);
}

double energy_norm(const LagrangeSpace& space, const std::vector<double>& u,
                   const SdParameters& params) {
  const SimplexMesh& mesh = space.mesh();
  const int n = mesh.dim;
  const int ds = n - 1;
  const int nloc = space.dofs_per_cell();
  const QuadratureRule& rule = simplex_rule(n, 2 * params.r);
  std::vector<int> dofs;
  std::vector<double> vals(nloc), grads(nloc * n);
  double acc = 0.0;
  for (int c = 0; c < mesh.ncells(); ++c) {
    const ElementGeometry geom = compute_geometry(mesh, c);
    space.cell_dofs(c, dofs);
    const double hp = std::pow(geom.h, params.p) * params.nu;
    for (std::size_t qp = 0; qp < rule.size(); ++qp) {
      shape_values(n, params.r, rule.lambda(qp), vals.data());
      shape_gradients(n, params.r, rule.lambda(qp), geom, grads.data());
      double uh = 0.0, g[3] = {};
      for (int a = 0; a < nloc; ++a) {
        uh += u[dofs[a]] * vals[a];
        for (int k = 0; k < n; ++k) g[k] += u[dofs[a]] * grads[a * n + k];
      }
      double stream = g[n - 1];
      double diff = 0.0;
      for (int k = 0; k < ds; ++k) {
        stream += params.beta[k] * g[k];
        diff += g[k] * g[k];
      }
      acc += geom.vol * rule.weights[qp] *
             (params.alpha * diff + hp * stream * stream + params.gamma * uh * uh);
    }
  }
  const double trace = facet_l2_norm(space, u, BoundaryRole::OutflowFinal, 2 * params.r);
  return std::sqrt(acc + trace * trace);
}

}  // namespace stfe
