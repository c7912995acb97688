#pragma once

#include <functional>
#include <vector>

#include "stfe/geometry.hpp"
#include "stfe/mesh.hpp"

namespace stfe {

// Continuous Lagrange space of order r in {1,2} on a simplicial mesh.
// DOF layout: vertex values first (dof i = vertex i), then for r=2 one DOF
// per global edge (midpoint value), in edge-table order.
class LagrangeSpace {
 public:
  LagrangeSpace(const SimplexMesh& mesh, int order);

  const SimplexMesh& mesh() const { return *mesh_; }
  int order() const { return r_; }
  int ndofs() const;
  int dofs_per_cell() const;

  // Global DOF ids of cell c: vertices in cell order, then (r=2) edge DOFs
  // in local lexicographic edge order (0,1),(0,2),...
  void cell_dofs(int c, std::vector<int>& out) const;

  // Coordinates of a global DOF's node.
  std::array<double, 3> dof_point(int dof) const;

  // Nodal interpolation of a scalar function given as f(point).
  std::vector<double> interpolate(const std::function<double(const double*)>& f) const;

  const EdgeTable& edge_table() const { return edges_; }

 private:
  const SimplexMesh* mesh_;
  int r_;
  EdgeTable edges_;  // populated for r=2
};

// Local shape functions at a barycentric point. nloc = n+1 (P1) or
// n+1 + n(n+1)/2 (P2). Gradients are physical (use the element's
// barycentric gradients); P2 Hessians are constant per element.
int local_dof_count(int dim, int order);
void shape_values(int dim, int order, const double* lambda, double* vals);
void shape_gradients(int dim, int order, const double* lambda,
                     const ElementGeometry& geom, double* grads /* nloc*n */);
// hess[a][k*n+l]: Hessian of local shape a (only meaningful for r=2).
void shape_hessians(int dim, const ElementGeometry& geom, double* hess /* nloc*n*n */);

// L2 and H1-seminorm errors of a discrete field against an exact solution.
struct ErrorNorms {
  double l2 = 0.0;
  double h1_semi = 0.0;
};
ErrorNorms error_norms(const LagrangeSpace& space, const std::vector<double>& u,
                       const std::function<double(const double*)>& exact,
                       const std::function<void(const double*, double*)>& exact_grad,
                       int quad_degree = 8);

// L2 norm of a discrete field over facets with a given boundary role
// (e.g. the final-time face).
double facet_l2_norm(const LagrangeSpace& space, const std::vector<double>& u,
                     BoundaryRole role, int quad_degree = 6);

// Facet helpers shared by boundary-term assembly: measure of a boundary
// facet and the DOFs living on it (vertex DOFs, then r=2 facet-edge DOFs in
// sorted local order).
double facet_measure(const SimplexMesh& mesh, const Facet& f);
void facet_dofs(const LagrangeSpace& space, const Facet& f, std::vector<int>& out);

}  // namespace stfe
