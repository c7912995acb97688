#pragma once

#include <functional>
#include <vector>

#include "stfe/csr.hpp"
#include "stfe/lagrange.hpp"
#include "stfe/problem.hpp"

namespace stfe {

// Dirichlet constraint set: flag per DOF plus the boundary value where set.
struct DirichletData {
  std::vector<char> flag;
  std::vector<double> value;
};

// Marks every DOF sitting on a DirichletLateral or DirichletInitial facet and
// evaluates the problem's boundary callback there.
DirichletData collect_dirichlet(const LagrangeSpace& space,
                                const SpaceTimeProblem& problem);

struct AssembledSystem {
  CsrMatrix matrix;
  std::vector<double> rhs;
  DirichletData dirichlet;
};

// Element kernel contract: fill the dense local matrix (nloc x nloc,
// row-major) and local load vector for one cell.  Kernels must be pure
// functions of the cell so the element loop can run in parallel.
using ElementKernel =
    std::function<void(int cell, const ElementGeometry& geom, double* a_local,
                       double* f_local)>;

// Runs the element loop, optionally adds the facet mass matrix on
// OutflowFinal facets (the outflow closure \int_{t=t_max} u v), and
// eliminates Dirichlet rows by replacement: constrained rows become identity
// with the boundary value on the right-hand side, and constrained columns are
// folded into the right-hand side so the reduced system keeps its sign
// structure.
//
// With parallel = true the local matrices are computed concurrently into a
// per-cell buffer; the scatter pass is always sequential and in cell order,
// so both modes produce bit-identical output.
AssembledSystem assemble_system(const LagrangeSpace& space,
                                const SpaceTimeProblem& problem,
                                const ElementKernel& kernel,
                                bool outflow_facet_mass, bool parallel);

}  // namespace stfe
