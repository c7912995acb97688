#pragma once

#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "stfe/dense.hpp"
#include "stfe/geometry.hpp"

namespace stfe {

// Raised when the exponential weight e^{-q.(y - y_c)} cannot be represented
// in double precision anywhere on the element (roughly |q| h > 1400 after
// barycentric centering).
struct CoefficientOutOfRange : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Raised when the projected DOF system P*ZP is singular or its condition
// estimate exceeds 1e12.
struct UnisolvenceFailure : std::runtime_error {
  UnisolvenceFailure(const std::string& what, int cell_, double cond_)
      : std::runtime_error(what), cell(cell_), cond(cond_) {}
  int cell;
  double cond;
};

// One degree of freedom of the element: either an edge moment
//   v -> int_0^1 (v . (y_b - y_a))(s) w_m(s) ds,  w_0 = 1, w_1 = 2s - 1,
// over the edge from local vertex a to b (a < b), or an interior moment
//   v -> int_T v . e_comp.
struct NedelecDof {
  enum Kind { Edge, Interior };
  Kind kind = Edge;
  int a = 0, b = 0;
  int moment = 0;
  int comp = 0;
};

// Vector-valued first-kind space (P_{r-1})^n + S_r on one element, with the
// moment DOFs above and the basis dual to them.  Supported instances:
// r = 1 for n in {2, 3} (Whitney edge elements) and r = 2 for n = 2.
// All polynomials are represented over scalar monomials in coordinates
// centered at the element barycenter.
class NedelecSpace {
 public:
  NedelecSpace(const ElementGeometry& geom, int r);

  int order() const { return r_; }
  int dim() const { return M_; }        // number of DOFs / basis fields
  int poly_dim() const { return M0_; }  // dim (P_{r-1})^n
  const ElementGeometry& geometry() const { return geom_; }
  const std::vector<NedelecDof>& dofs() const { return dofs_; }

  // Evaluate basis field phi_j (dual to the DOFs) or the fixed polynomial
  // basis psi_k of (P_{r-1})^n at a physical point.
  void eval_phi(int j, const double* y, double* v) const;
  void eval_psi(int k, const double* y, double* v) const;

  // Apply DOF j to an arbitrary field by quadrature (edges: Gauss of degree
  // 2r+4; interior: simplex rule of degree 2r+4).  Exact for the polynomial
  // fields of this element's spaces.
  double dof_apply(int j, const std::function<void(const double* y, double* v)>& field) const;

  // Table eta_j(grad xi_l) over the order-r scalar Lagrange basis of the
  // element (vertices first, then edge midpoints in lexicographic order).
  const DenseMatrix& grad_basis_map() const { return grad_xi_; }
  int lagrange_dofs() const { return static_cast<int>(grad_xi_.cols()); }

 private:
  void eval_mono_field(const double* coeffs, const double* y, double* v) const;
  double dof_apply_field(const NedelecDof& dof,
                         const std::function<void(const double*, double*)>& field) const;

  ElementGeometry geom_;
  int r_ = 1, n_ = 2, M_ = 0, M0_ = 0;
  int nmono_ = 0;               // scalar monomials per component
  int powers_[6][3] = {};       // exponents of the scalar monomials
  std::vector<double> phi_;     // M  x (n*nmono) coefficients
  std::vector<double> psi_;     // M0 x (n*nmono) coefficients
  std::vector<NedelecDof> dofs_;
  DenseMatrix grad_xi_;
};

// Embedding matrix p_{mk} = eta_m(psi_k) (M x M0).  Verifies that
// sum_m p_{mk} phi_m reconstructs psi_k before returning.
DenseMatrix build_P(const NedelecSpace& space);

// Weighted DOF vector <eta_j, e^{-q.(y-y_c)} G> for a given field G.  Edge
// entries combine a 3-point sample of G.tau along the edge (exact for fields
// of degree <= 2) with closed-form integrals of s^k e^{E0+(E1-E0)s}; interior
// entries use a degree-(2r+4) rule.  This is the single evaluation path
// shared by build_Z and any data vector built from a flux field, so
// polynomial identities between them hold to roundoff.
std::vector<double> weighted_dof_vector(
    const NedelecSpace& space, const double* q,
    const std::function<void(const double* y, double* v)>& g);

// Z_{jk} = <eta_j, e^{-q.(y-y_c)} D^{-1} phi_k> (M x M), D SPD (n x n,
// row-major).  Throws CoefficientOutOfRange when the exponent range is not
// representable.
DenseMatrix build_Z(const NedelecSpace& space, const double* q, const double* d);

// Solver for the projected recovery system (P*ZP) c = P* d.  The public
// matrices are double precision; the solve itself runs on extended-precision
// copies built alongside them, because entry roundoff in the exponentially
// row-scaled system is what limits the recovery accuracy, not the
// factorization.
struct FluxRecovery {
  DenseMatrix P;
  DenseMatrix Z;
  LuFactors ptzp;
  double cond = 0.0;  // one-norm condition estimate of P*ZP
  std::vector<double> solve(const std::vector<double>& d) const;

  // Weighted DOFs of a flux field followed by solve, entirely in extended
  // precision: the path used where the polynomial-recovery identity must
  // hold to near roundoff.  Requires the space passed to make_flux_recovery
  // to be alive.
  std::vector<double> recover(
      const std::function<void(const double* y, double* v)>& field) const;

  // Extended-precision internals (filled by make_flux_recovery).
  const NedelecSpace* space = nullptr;
  double q[3] = {0.0, 0.0, 0.0};
  std::vector<long double> p_ext, z_ext, lu_ext;
  std::vector<int> piv_ext;
};

FluxRecovery make_flux_recovery(const NedelecSpace& space, const double* q,
                                const double* d_tensor, int cell = -1);

// Weights e^{-q.(y_l - y_c)} at the order-r Lagrange nodes of the element
// (vertices, then edge midpoints in lexicographic order).
std::vector<double> node_weights(const NedelecSpace& space, const double* q);

// d_j = <eta_j, grad I_r(e^{-q.(y-y_c)} u)> from the nodal values of u on the
// order-r Lagrange nodes of the element; I_r is nodal interpolation, so d is
// grad_basis_map() applied to the node-weighted nodal values.
std::vector<double> compute_d(const NedelecSpace& space, const double* q,
                              const std::vector<double>& u_nodal);

}  // namespace stfe
