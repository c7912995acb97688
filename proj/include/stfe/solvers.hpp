#pragma once

#include <string>
#include <vector>

#include "stfe/csr.hpp"

namespace stfe {

enum class Preconditioner { None, Jacobi, Ilu0, GaussSeidel };

Preconditioner parse_preconditioner(const std::string& name);
std::string preconditioner_name(Preconditioner p);

struct SolverOptions {
  double tol = 1e-10;
  int restart = 50;
  int max_iter = 10000;  // total Arnoldi steps across restarts
  Preconditioner precond = Preconditioner::Ilu0;
};

struct SolverReport {
  int iterations = 0;
  double residual = 0.0;  // ||b - A x|| / ||b||, recomputed on exit
  bool converged = false;
  double seconds = 0.0;
  bool dense_fallback = false;
};

// Restarted GMRES with right preconditioning and x0 = 0.  Breakdown or an
// exhausted iteration budget yields a non-converged report, never a throw.
SolverReport solve_gmres(const CsrMatrix& a, const std::vector<double>& b,
                         std::vector<double>& x, const SolverOptions& opts = {});

// Dense LU with partial pivoting for systems of at most 2000 unknowns.
// Throws on size violations and on pivots below 1e-14 * ||A||_max.
std::vector<double> solve_dense_lu(const CsrMatrix& a, const std::vector<double>& b);

// Default solve path: GMRES(50)+ILU(0); when that stalls and the system has
// fewer than 2000 unknowns, falls back to dense LU.
SolverReport solve_linear_system(const CsrMatrix& a, const std::vector<double>& b,
                                 std::vector<double>& x,
                                 const SolverOptions& opts = {});

}  // namespace stfe
