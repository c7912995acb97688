#include "stfe/lagrange.hpp"

#include <cmath>
#include <stdexcept>

#include "stfe/quadrature.hpp"

namespace stfe {
namespace {

// Local edges of the reference n-simplex in lexicographic order; this fixes
// the P2 edge-DOF layout within each cell.
int local_edge_list(int n, int pairs[][2]) {
  int m = 0;
  for (int a = 0; a <= n; ++a)
    for (int b = a + 1; b <= n; ++b) {
      pairs[m][0] = a;
      pairs[m][1] = b;
      ++m;
    }
  return m;
}

}  // namespace

int local_dof_count(int dim, int order) {
  const int nv = dim + 1;
  return order == 1 ? nv : nv + dim * (dim + 1) / 2;
}

void shape_values(int dim, int order, const double* lambda, double* vals) {
  const int nv = dim + 1;
  if (order == 1) {
    for (int a = 0; a < nv; ++a) vals[a] = lambda[a];
    return;
  }
  for (int a = 0; a < nv; ++a) vals[a] = lambda[a] * (2.0 * lambda[a] - 1.0);
  int pairs[6][2];
  const int ne = local_edge_list(dim, pairs);
  for (int e = 0; e < ne; ++e)
    vals[nv + e] = 4.0 * lambda[pairs[e][0]] * lambda[pairs[e][1]];
}

void shape_gradients(int dim, int order, const double* lambda,
                     const ElementGeometry& geom, double* grads) {
  const int nv = dim + 1;
  if (order == 1) {
    for (int a = 0; a < nv; ++a)
      for (int k = 0; k < dim; ++k) grads[a * dim + k] = geom.grad[a][k];
    return;
  }
  for (int a = 0; a < nv; ++a)
    for (int k = 0; k < dim; ++k)
      grads[a * dim + k] = (4.0 * lambda[a] - 1.0) * geom.grad[a][k];
  int pairs[6][2];
  const int ne = local_edge_list(dim, pairs);
  for (int e = 0; e < ne; ++e) {
    const int a = pairs[e][0], b = pairs[e][1];
    for (int k = 0; k < dim; ++k)
      grads[(nv + e) * dim + k] =
          4.0 * (lambda[a] * geom.grad[b][k] + lambda[b] * geom.grad[a][k]);
  }
}

void shape_hessians(int dim, const ElementGeometry& geom, double* hess) {
  const int nv = dim + 1;
  const int n2 = dim * dim;
  for (int a = 0; a < nv; ++a)
    for (int k = 0; k < dim; ++k)
      for (int l = 0; l < dim; ++l)
        hess[a * n2 + k * dim + l] = 4.0 * geom.grad[a][k] * geom.grad[a][l];
  int pairs[6][2];
  const int ne = local_edge_list(dim, pairs);
  for (int e = 0; e < ne; ++e) {
    const int a = pairs[e][0], b = pairs[e][1];
    for (int k = 0; k < dim; ++k)
      for (int l = 0; l < dim; ++l)
        hess[(nv + e) * n2 + k * dim + l] =
            4.0 * (geom.grad[a][k] * geom.grad[b][l] + geom.grad[b][k] * geom.grad[a][l]);
  }
}

LagrangeSpace::LagrangeSpace(const SimplexMesh& mesh, int order)
    : mesh_(&mesh), r_(order) {
  if (order != 1 && order != 2)
    throw std::invalid_argument("LagrangeSpace: order must be 1 or 2");
  if (order == 2) edges_ = build_edge_table(mesh);
}

int LagrangeSpace::ndofs() const {
  return mesh_->nv() + (r_ == 2 ? edges_.size() : 0);
}

int LagrangeSpace::dofs_per_cell() const { return local_dof_count(mesh_->dim, r_); }

void LagrangeSpace::cell_dofs(int c, std::vector<int>& out) const {
  const int n = mesh_->dim;
  const int* v = mesh_->cell(c);
  out.clear();
  for (int a = 0; a <= n; ++a) out.push_back(v[a]);
  if (r_ == 2) {
    int pairs[6][2];
    const int ne = local_edge_list(n, pairs);
    for (int e = 0; e < ne; ++e)
      out.push_back(mesh_->nv() + edges_.find(v[pairs[e][0]], v[pairs[e][1]]));
  }
}

std::array<double, 3> LagrangeSpace::dof_point(int dof) const {
  const int n = mesh_->dim;
  std::array<double, 3> p{};
  if (dof < mesh_->nv()) {
    for (int k = 0; k < n; ++k) p[k] = mesh_->vertex(dof)[k];
  } else {
    const auto [a, b] = edges_.edges[dof - mesh_->nv()];
    for (int k = 0; k < n; ++k) p[k] = 0.5 * (mesh_->vertex(a)[k] + mesh_->vertex(b)[k]);
  }
  return p;
}

std::vector<double> LagrangeSpace::interpolate(
    const std::function<double(const double*)>& f) const {
  std::vector<double> u(ndofs());
  for (int d = 0; d < ndofs(); ++d) {
    const auto p = dof_point(d);
    u[d] = f(p.data());
  }
  return u;
}

ErrorNorms error_norms(const LagrangeSpace& space, const std::vector<double>& u,
                       const std::function<double(const double*)>& exact,
                       const std::function<void(const double*, double*)>& exact_grad,
                       int quad_degree) {
  const SimplexMesh& mesh = space.mesh();
  const int n = mesh.dim;
  const QuadratureRule& rule = simplex_rule(n, quad_degree);
  const int nloc = space.dofs_per_cell();
  std::vector<int> dofs;
  std::vector<double> vals(nloc), grads(nloc * n);
  ErrorNorms err;
  for (int c = 0; c < mesh.ncells(); ++c) {
    const ElementGeometry geom = compute_geometry(mesh, c);
    space.cell_dofs(c, dofs);
    for (std::size_t qp = 0; qp < rule.size(); ++qp) {
      const double* lam = rule.lambda(qp);
      shape_values(n, space.order(), lam, vals.data());
      shape_gradients(n, space.order(), lam, geom, grads.data());
      double x[3] = {};
      for (int a = 0; a <= n; ++a)
        for (int k = 0; k < n; ++k) x[k] += lam[a] * geom.y[a][k];
      double uh = 0.0, gh[3] = {};
      for (int a = 0; a < nloc; ++a) {
        uh += u[dofs[a]] * vals[a];
        for (int k = 0; k < n; ++k) gh[k] += u[dofs[a]] * grads[a * n + k];
      }
      const double w = geom.vol * rule.weights[qp];
      const double dv = uh - exact(x);
      err.l2 += w * dv * dv;
      double ge[3] = {};
      exact_grad(x, ge);
      for (int k = 0; k < n; ++k) err.h1_semi += w * (gh[k] - ge[k]) * (gh[k] - ge[k]);
    }
  }
  err.l2 = std::sqrt(err.l2);
  err.h1_semi = std::sqrt(err.h1_semi);
  return err;
}

double facet_measure(const SimplexMesh& mesh, const Facet& f) {
  const int n = mesh.dim;
  if (n == 1) return 1.0;  // facet is a point
  if (n == 2) {
    double d2 = 0.0;
    for (int k = 0; k < 2; ++k) {
      const double d = mesh.vertex(f.v[1])[k] - mesh.vertex(f.v[0])[k];
      d2 += d * d;
    }
    return std::sqrt(d2);
  }
  double e1[3], e2[3];
  for (int k = 0; k < 3; ++k) {
    e1[k] = mesh.vertex(f.v[1])[k] - mesh.vertex(f.v[0])[k];
    e2[k] = mesh.vertex(f.v[2])[k] - mesh.vertex(f.v[0])[k];
  }
  const double cx = e1[1] * e2[2] - e1[2] * e2[1];
  const double cy = e1[2] * e2[0] - e1[0] * e2[2];
  const double cz = e1[0] * e2[1] - e1[1] * e2[0];
  return 0.5 * std::sqrt(cx * cx + cy * cy + cz * cz);
}

void facet_dofs(const LagrangeSpace& space, const Facet& f, std::vector<int>& out) {
  const int n = space.mesh().dim;
  out.clear();
  for (int a = 0; a < n; ++a) out.push_back(f.v[a]);
  if (space.order() == 2) {
    for (int a = 0; a < n; ++a)
      for (int b = a + 1; b < n; ++b)
        out.push_back(space.mesh().nv() + space.edge_table().find(f.v[a], f.v[b]));
  }
}

double facet_l2_norm(const LagrangeSpace& space, const std::vector<double>& u,
                     BoundaryRole role, int quad_degree) {
  const SimplexMesh& mesh = space.mesh();
  const int n = mesh.dim;
  if (n < 2) throw std::invalid_argument("facet_l2_norm: needs dim >= 2");
  const QuadratureRule& rule = simplex_rule(n - 1, quad_degree);
  std::vector<int> dofs;
  double acc = 0.0;
  // The trace of the order-r basis on a facet is the order-r basis of the
  // facet simplex, so facet values come from the facet's own shape table.
  const int nloc_f = local_dof_count(n - 1, space.order());
  std::vector<double> vals(nloc_f);
  for (const Facet& f : mesh.facets) {
    if (f.role != role) continue;
    facet_dofs(space, f, dofs);
    const double area = facet_measure(mesh, f);
    for (std::size_t qp = 0; qp < rule.size(); ++qp) {
      shape_values(n - 1, space.order(), rule.lambda(qp), vals.data());
      double uh = 0.0;
      for (int a = 0; a < nloc_f; ++a) uh += u[dofs[a]] * vals[a];
      acc += area * rule.weights[qp] * uh * uh;
    }
  }
  return std::sqrt(acc);
}

}  // namespace stfe
