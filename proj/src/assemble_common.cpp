#include "stfe/assemble_common.hpp"

#include <stdexcept>

#include "stfe/quadrature.hpp"

namespace stfe {

DirichletData collect_dirichlet(const LagrangeSpace& space,
                                const SpaceTimeProblem& problem) {
  if (!problem.boundary)
    throw std::invalid_argument("collect_dirichlet: problem has no boundary data");
  DirichletData d;
  d.flag.assign(space.ndofs(), 0);
  d.value.assign(space.ndofs(), 0.0);
  std::vector<int> fdofs;
  for (const Facet& f : space.mesh().facets) {
    if (f.role == BoundaryRole::OutflowFinal) continue;
    facet_dofs(space, f, fdofs);
    for (int dof : fdofs) {
      if (d.flag[dof]) continue;
      d.flag[dof] = 1;
      const auto p = space.dof_point(dof);
      d.value[dof] = problem.boundary(p.data());
    }
  }
  return d;
}

AssembledSystem assemble_system(const LagrangeSpace& space,
                                const SpaceTimeProblem& problem,
                                const ElementKernel& kernel,
                                bool outflow_facet_mass, bool parallel) {
  const SimplexMesh& mesh = space.mesh();
  const int nloc = space.dofs_per_cell();
  const int ncells = mesh.ncells();
  const int ndofs = space.ndofs();

  std::vector<double> all_a(static_cast<std::size_t>(ncells) * nloc * nloc);
  std::vector<double> all_f(static_cast<std::size_t>(ncells) * nloc);

#ifdef _OPENMP
#pragma omp parallel for schedule(static) if (parallel)
#endif
  for (int c = 0; c < ncells; ++c) {
    const ElementGeometry geom = compute_geometry(mesh, c);
    kernel(c, geom, all_a.data() + static_cast<std::size_t>(c) * nloc * nloc,
           all_f.data() + static_cast<std::size_t>(c) * nloc);
  }
#ifndef _OPENMP
  (void)parallel;
#endif

  AssembledSystem sys;
  sys.dirichlet = collect_dirichlet(space, problem);
  sys.rhs.assign(ndofs, 0.0);
  TripletBuilder builder(ndofs);
  builder.reserve(static_cast<std::size_t>(ncells) * nloc * nloc + ndofs);

  const auto scatter = [&](const std::vector<int>& dofs, const double* a,
                           const double* f) {
    const int m = static_cast<int>(dofs.size());
    for (int i = 0; i < m; ++i) {
      const int gi = dofs[i];
      if (sys.dirichlet.flag[gi]) continue;
      if (f) sys.rhs[gi] += f[i];
      for (int j = 0; j < m; ++j) {
        const int gj = dofs[j];
        const double v = a[i * m + j];
        if (v == 0.0) continue;
        if (sys.dirichlet.flag[gj])
          sys.rhs[gi] -= v * sys.dirichlet.value[gj];
        else
          builder.add(gi, gj, v);
      }
    }
  };

  std::vector<int> dofs;
  for (int c = 0; c < ncells; ++c) {
    space.cell_dofs(c, dofs);
    scatter(dofs, all_a.data() + static_cast<std::size_t>(c) * nloc * nloc,
            all_f.data() + static_cast<std::size_t>(c) * nloc);
  }

  if (outflow_facet_mass && mesh.dim >= 2) {
    const int nfl = local_dof_count(mesh.dim - 1, space.order());
    const QuadratureRule& rule = simplex_rule(mesh.dim - 1, 2 * space.order());
    std::vector<double> vals(nfl), mass(nfl * nfl);
    for (const Facet& f : mesh.facets) {
      if (f.role != BoundaryRole::OutflowFinal) continue;
      facet_dofs(space, f, dofs);
      const double area = facet_measure(mesh, f);
      std::fill(mass.begin(), mass.end(), 0.0);
      for (std::size_t qp = 0; qp < rule.size(); ++qp) {
        shape_values(mesh.dim - 1, space.order(), rule.lambda(qp), vals.data());
        for (int a = 0; a < nfl; ++a)
          for (int b = 0; b < nfl; ++b)
            mass[a * nfl + b] += area * rule.weights[qp] * vals[a] * vals[b];
      }
      scatter(dofs, mass.data(), nullptr);
    }
  }

  for (int i = 0; i < ndofs; ++i) {
    if (!sys.dirichlet.flag[i]) continue;
    builder.add(i, i, 1.0);
    sys.rhs[i] = sys.dirichlet.value[i];
  }
  sys.matrix = builder.build();
  return sys;
}

}  // namespace stfe
