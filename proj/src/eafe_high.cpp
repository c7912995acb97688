#include "stfe/eafe_high.hpp"

#include <exception>
#include <iomanip>
#include <ostream>
#include <stdexcept>

#include "stfe/lagrange.hpp"
#include "stfe/quadrature.hpp"

namespace stfe {
namespace {

// W[i][k] = int_T psi_k . grad xi_i; both factors have degree <= r-1.
DenseMatrix test_gradient_moments(const NedelecSpace& space) {
  const ElementGeometry& geom = space.geometry();
  const int n = geom.n;
  const int r = space.order();
  const int nloc = local_dof_count(n, r);
  const int m0 = space.poly_dim();
  const QuadratureRule& rule = simplex_rule(n, 2 * r);
  DenseMatrix w(nloc, m0);
  double grads[10 * 3], psi[3];
  for (std::size_t qp = 0; qp < rule.size(); ++qp) {
    const double* lam = rule.lambda(qp);
    double y[3] = {0.0, 0.0, 0.0};
    for (int a = 0; a <= n; ++a)
      for (int k = 0; k < n; ++k) y[k] += lam[a] * geom.y[a][k];
    shape_gradients(n, r, lam, geom, grads);
    const double wq = geom.vol * rule.weights[qp];
    for (int k = 0; k < m0; ++k) {
      space.eval_psi(k, y, psi);
      for (int i = 0; i < nloc; ++i) {
        double dot = 0.0;
        for (int c = 0; c < n; ++c) dot += psi[c] * grads[i * n + c];
        w(i, k) += wq * dot;
      }
    }
  }
  return w;
}

void dump_matrix(std::ostream& os, const char* name, const DenseMatrix& m) {
  os << name << ' ' << m.rows() << ' ' << m.cols() << '\n';
  for (std::size_t i = 0; i < m.rows(); ++i) {
    for (std::size_t j = 0; j < m.cols(); ++j)
      os << (j ? " " : "") << std::setprecision(17) << m(i, j);
    os << '\n';
  }
}

}  // namespace

HighOrderLocal local_high_order(const NedelecSpace& space,
                                const ElementCoefficients& coeff, int cell) {
  const int n = space.geometry().n;
  const int nloc = space.lagrange_dofs();
  double dflat[9];
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) dflat[i * n + j] = coeff.D[i][j];

  HighOrderLocal out{make_flux_recovery(space, coeff.q, dflat, cell),
                     DenseMatrix(nloc, nloc)};
  const DenseMatrix w = test_gradient_moments(space);
  const std::vector<double> nw = node_weights(space, coeff.q);
  const DenseMatrix& dxi = space.grad_basis_map();

  std::vector<double> d(space.dim());
  for (int j = 0; j < nloc; ++j) {
    for (int m = 0; m < space.dim(); ++m) d[m] = dxi(m, j) * nw[j];
    const std::vector<double> c = out.recovery.solve(d);
    for (int i = 0; i < nloc; ++i) {
      double s = 0.0;
      for (int k = 0; k < space.poly_dim(); ++k) s += w(i, k) * c[k];
      out.a(i, j) = s;
    }
  }
  return out;
}

DenseMatrix local_high_order_matrix(const NedelecSpace& space,
                                    const ElementCoefficients& coeff, int cell) {
  return local_high_order(space, coeff, cell).a;
}

AssembledSystem assemble_high_order(const SimplexMesh& mesh,
                                    const SpaceTimeProblem& problem, int r,
                                    const HighOrderOptions& opts) {
  const int n = mesh.dim;
  if (r != 1 && r != 2)
    throw std::invalid_argument("assemble_high_order: order must be 1 or 2");
  if ((r == 2 && n != 2) || n < 2 || n > 3)
    throw std::invalid_argument("assemble_high_order: unsupported (order, dim)");
  if (problem.space_time && problem.eps <= 0.0)
    throw std::invalid_argument("assemble_high_order: eps must be positive");
  if (!problem.source)
    throw std::invalid_argument("assemble_high_order: missing source");

  LagrangeSpace space(mesh, r);
  const int nloc = local_dof_count(n, r);
  const QuadratureRule& mass_rule = simplex_rule(n, 2 * r);
  const QuadratureRule& src_rule = simplex_rule(n, opts.source_quad_degree);
  const bool parallel = opts.parallel && opts.dump == nullptr;

  std::exception_ptr err = nullptr;
  const ElementKernel kernel = [&](int cell, const ElementGeometry& geom,
                                   double* a, double* f) {
    for (int i = 0; i < nloc * nloc; ++i) a[i] = 0.0;
    for (int i = 0; i < nloc; ++i) f[i] = 0.0;
    try {
      const ElementCoefficients coeff = freeze_coefficients(problem, geom);
      const NedelecSpace ns(geom, r);
      const HighOrderLocal loc = local_high_order(ns, coeff, cell);
      for (int i = 0; i < nloc; ++i)
        for (int j = 0; j < nloc; ++j) a[i * nloc + j] = loc.a(i, j);
      if (coeff.gamma != 0.0) {
        std::vector<double> vals(nloc);
        for (std::size_t qp = 0; qp < mass_rule.size(); ++qp) {
          shape_values(n, r, mass_rule.lambda(qp), vals.data());
          const double wq = coeff.gamma * geom.vol * mass_rule.weights[qp];
          for (int i = 0; i < nloc; ++i)
            for (int j = 0; j < nloc; ++j)
              a[i * nloc + j] += wq * vals[i] * vals[j];
        }
      }
      std::vector<double> vals(nloc);
      for (std::size_t qp = 0; qp < src_rule.size(); ++qp) {
        const double* lam = src_rule.lambda(qp);
        double y[3] = {0.0, 0.0, 0.0};
        for (int a2 = 0; a2 <= n; ++a2)
          for (int k = 0; k < n; ++k) y[k] += lam[a2] * geom.y[a2][k];
        shape_values(n, r, lam, vals.data());
        const double wq = geom.vol * src_rule.weights[qp] * problem.source(y);
        for (int i = 0; i < nloc; ++i) f[i] += wq * vals[i];
      }
      if (opts.dump) {
        std::ostream& os = *opts.dump;
        os << "element " << cell << '\n';
        dump_matrix(os, "P", loc.recovery.P);
        dump_matrix(os, "Z", loc.recovery.Z);
        dump_matrix(os, "A", loc.a);
      }
    } catch (...) {
#pragma omp critical(stfe_high_order_error)
      if (!err) err = std::current_exception();
    }
  };

  AssembledSystem sys = assemble_system(space, problem, kernel,
                                        /*outflow_facet_mass=*/problem.space_time,
                                        parallel);
  if (err) std::rethrow_exception(err);
  return sys;
}

}  // namespace stfe
