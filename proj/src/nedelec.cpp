#include "stfe/nedelec.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <utility>

#include "stfe/lagrange.hpp"
#include "stfe/quadrature.hpp"

namespace stfe {
namespace {

// Scalar monomials of degree <= r in barycenter-centered coordinates, ordered
// by total degree and then by descending leading exponent:
//   n=2: 1, x, y [, x^2, xy, y^2]   n=3: 1, x, y, z.
int mono_table(int n, int r, int pw[6][3]) {
  int m = 0;
  for (int d = 0; d <= r; ++d)
    for (int px = d; px >= 0; --px) {
      if (n == 2) {
        pw[m][0] = px;
        pw[m][1] = d - px;
        pw[m][2] = 0;
        ++m;
      } else {
        for (int py = d - px; py >= 0; --py) {
          pw[m][0] = px;
          pw[m][1] = py;
          pw[m][2] = d - px - py;
          ++m;
        }
      }
    }
  return m;
}

// F_k = int_0^1 s^k e^{E0 + (E1-E0)s} ds for k = 0..kmax.  Small exponent
// differences use the entire-function series e^{E0} sum_m a^m/(m!(k+m+1));
// larger ones the integration-by-parts recurrence, whose terms all stay
// below e^{max(E0,E1)} so nothing overflows before the guard at |E| = 700.
template <typename T>
void exp_moments(T e0, T e1, int kmax, T* f) {
  const T a = e1 - e0;
  const T cut = std::numeric_limits<T>::epsilon() * T(0.005);
  if (std::fabs(a) <= T(2)) {
    const T w = std::exp(e0);
    for (int k = 0; k <= kmax; ++k) {
      T sum = T(1) / T(k + 1);
      T am = 1, mfact = 1;
      for (int m = 1; m <= 90; ++m) {
        am *= a;
        mfact *= m;
        const T term = am / (mfact * T(k + m + 1));
        sum += term;
        if (std::fabs(term) <= cut * std::fabs(sum)) break;
      }
      f[k] = w * sum;
    }
    return;
  }
  const T w0 = std::exp(e0), w1 = std::exp(e1);
  f[0] = (w1 - w0) / a;
  for (int k = 1; k <= kmax; ++k) f[k] = (w1 - T(k) * f[k - 1]) / a;
}

void check_exponents(const ElementGeometry& g, const double* q) {
  for (int a = 0; a <= g.n; ++a) {
    double e = 0.0;
    for (int k = 0; k < g.n; ++k) e -= q[k] * (g.y[a][k] - g.yc[k]);
    if (!(std::fabs(e) <= 700.0))
      throw CoefficientOutOfRange(
          "exponential weight out of range: |q.(y - y_c)| = " +
          std::to_string(std::fabs(e)) + " at a vertex exceeds 700");
  }
}

double exponent_at(const ElementGeometry& g, const double* q, const double* y) {
  double e = 0.0;
  for (int k = 0; k < g.n; ++k) e -= q[k] * (y[k] - g.yc[k]);
  return e;
}

// Weighted DOF vector <eta_j, e^{-q.(y-y_c)} G>, with all combination
// arithmetic in the scalar type T; only the field evaluations stay double.
// This single path serves the public API (T = double after rounding), the
// Z columns, and the extended-precision recovery chain.
template <typename T>
void weighted_dofs(const NedelecSpace& space, const double* q,
                   const std::function<void(const double*, double*)>& g,
                   T* out) {
  const ElementGeometry& geo = space.geometry();
  const int n = geo.n;
  check_exponents(geo, q);
  double v[3];
  for (int j = 0; j < space.dim(); ++j) {
    const NedelecDof& dof = space.dofs()[j];
    if (dof.kind == NedelecDof::Edge) {
      const auto tau = geo.edge_vec(dof.a, dof.b);
      T e0 = 0, e1 = 0;
      for (int k = 0; k < n; ++k) {
        e0 -= T(q[k]) * (T(geo.y[dof.a][k]) - T(geo.yc[k]));
        e1 -= T(q[k]) * (T(geo.y[dof.b][k]) - T(geo.yc[k]));
      }
      // g.tau along the edge from a 3-point sample (exact through degree 2).
      T smp[3];
      for (int i = 0; i < 3; ++i) {
        const double s = 0.5 * i;
        double y[3] = {0.0, 0.0, 0.0};
        for (int k = 0; k < n; ++k) y[k] = geo.y[dof.a][k] + s * tau[k];
        g(y, v);
        T t = 0;
        for (int k = 0; k < n; ++k) t += T(v[k]) * T(tau[k]);
        smp[i] = t;
      }
      const T c0 = smp[0];
      const T c1 = T(-3) * smp[0] + T(4) * smp[1] - smp[2];
      const T c2 = T(2) * smp[0] - T(4) * smp[1] + T(2) * smp[2];
      T f[4];
      exp_moments(e0, e1, 3, f);
      out[j] = (dof.moment == 0)
                   ? c0 * f[0] + c1 * f[1] + c2 * f[2]
                   : c0 * (T(2) * f[1] - f[0]) + c1 * (T(2) * f[2] - f[1]) +
                         c2 * (T(2) * f[3] - f[2]);
    } else {
      const QuadratureRule& qr = simplex_rule(n, 2 * space.order() + 4);
      T sum = 0;
      for (std::size_t i = 0; i < qr.size(); ++i) {
        const double* lam = qr.lambda(i);
        double y[3] = {0.0, 0.0, 0.0};
        for (int k = 0; k < n; ++k) {
          double s = 0.0;
          for (int a = 0; a <= n; ++a) s += lam[a] * geo.y[a][k];
          y[k] = s;
        }
        g(y, v);
        T e = 0;
        for (int k = 0; k < n; ++k) e -= T(q[k]) * (T(y[k]) - T(geo.yc[k]));
        sum += T(qr.weights[i]) * std::exp(e) * T(v[dof.comp]);
      }
      out[j] = T(geo.vol) * sum;
    }
  }
}

// Dense LU with partial pivoting on long double, for the small projected
// recovery systems (at most 6x6).
struct ExtLu {
  std::vector<long double> a;
  std::vector<int> piv;
  int n = 0;
};

ExtLu ext_lu_factor(std::vector<long double> a, int n) {
  ExtLu f;
  long double norm1 = 0.0L;
  for (int j = 0; j < n; ++j) {
    long double s = 0.0L;
    for (int i = 0; i < n; ++i) s += std::fabs(a[i * n + j]);
    norm1 = std::max(norm1, s);
  }
  f.piv.resize(n);
  for (int k = 0; k < n; ++k) {
    int p = k;
    for (int i = k + 1; i < n; ++i)
      if (std::fabs(a[i * n + k]) > std::fabs(a[p * n + k])) p = i;
    f.piv[k] = p;
    if (p != k)
      for (int j = 0; j < n; ++j) std::swap(a[k * n + j], a[p * n + j]);
    if (!(std::fabs(a[k * n + k]) > 1e-18L * norm1))
      throw std::runtime_error("ext_lu_factor: singular pivot");
    for (int i = k + 1; i < n; ++i) {
      a[i * n + k] /= a[k * n + k];
      for (int j = k + 1; j < n; ++j) a[i * n + j] -= a[i * n + k] * a[k * n + j];
    }
  }
  f.a = std::move(a);
  f.n = n;
  return f;
}

std::vector<long double> ext_lu_solve(const ExtLu& f, std::vector<long double> b) {
  const int n = f.n;
  // The factorization swaps entire rows (multipliers included), so every
  // transposition must hit b before the forward sweep, in recorded order.
  for (int k = 0; k < n; ++k)
    if (f.piv[k] != k) std::swap(b[k], b[f.piv[k]]);
  for (int k = 0; k < n; ++k)
    for (int i = k + 1; i < n; ++i) b[i] -= f.a[i * n + k] * b[k];
  for (int i = n - 1; i >= 0; --i) {
    for (int j = i + 1; j < n; ++j) b[i] -= f.a[i * n + j] * b[j];
    b[i] /= f.a[i * n + i];
  }
  return b;
}

}  // namespace

NedelecSpace::NedelecSpace(const ElementGeometry& geom, int r)
    : geom_(geom), r_(r), n_(geom.n) {
  if (n_ != 2 && n_ != 3)
    throw std::invalid_argument("NedelecSpace: dimension must be 2 or 3");
  if (r_ != 1 && !(r_ == 2 && n_ == 2))
    throw std::invalid_argument(
        "NedelecSpace: supported orders are r=1 (n=2,3) and r=2 (n=2)");
  nmono_ = mono_table(n_, r_, powers_);
  const int nc = n_ * nmono_;

  for (int a = 0; a <= n_; ++a)
    for (int b = a + 1; b <= n_; ++b)
      for (int m = 0; m < r_; ++m)
        dofs_.push_back(NedelecDof{NedelecDof::Edge, a, b, m, 0});
  if (r_ == 2)
    for (int k = 0; k < n_; ++k)
      dofs_.push_back(NedelecDof{NedelecDof::Interior, 0, 0, 0, k});
  M_ = static_cast<int>(dofs_.size());

  const int np = (r_ == 1) ? 1 : n_ + 1;  // dim of scalar P_{r-1}
  M0_ = n_ * np;

  // Spanning generators: the (P_{r-1})^n monomial fields (these double as
  // the psi basis), then the homogeneous degree-r fields p with p.x = 0.
  auto midx = [&](int px, int py, int pz) {
    for (int t = 0; t < nmono_; ++t)
      if (powers_[t][0] == px && powers_[t][1] == py && powers_[t][2] == pz)
        return t;
    throw std::logic_error("mono_table: missing monomial");
  };
  std::vector<std::vector<double>> gens;
  for (int k = 0; k < n_; ++k)
    for (int t = 0; t < np; ++t) {
      std::vector<double> g(nc, 0.0);
      g[k * nmono_ + t] = 1.0;
      gens.push_back(std::move(g));
    }
  auto add_tail = [&](std::initializer_list<std::array<int, 5>> terms) {
    std::vector<double> g(nc, 0.0);
    for (const auto& t : terms)  // {comp, px, py, pz, sign}
      g[t[0] * nmono_ + midx(t[1], t[2], t[3])] = t[4];
    gens.push_back(std::move(g));
  };
  if (r_ == 1 && n_ == 2) {
    add_tail({{0, 0, 1, 0, 1}, {1, 1, 0, 0, -1}});  // (y, -x)
  } else if (r_ == 1 && n_ == 3) {
    add_tail({{0, 0, 1, 0, 1}, {1, 1, 0, 0, -1}});  // (y, -x, 0)
    add_tail({{0, 0, 0, 1, 1}, {2, 1, 0, 0, -1}});  // (z, 0, -x)
    add_tail({{1, 0, 0, 1, 1}, {2, 0, 1, 0, -1}});  // (0, z, -y)
  } else {
    add_tail({{0, 1, 1, 0, 1}, {1, 2, 0, 0, -1}});  // (xy, -x^2)
    add_tail({{0, 0, 2, 0, 1}, {1, 1, 1, 0, -1}});  // (y^2, -xy)
  }
  if (static_cast<int>(gens.size()) != M_)
    throw std::logic_error("NedelecSpace: generator count mismatch");

  // Dual basis via the DOF/generator Vandermonde matrix.
  DenseMatrix vand(M_, M_);
  for (int j = 0; j < M_; ++j)
    for (int g = 0; g < M_; ++g) {
      const double* coef = gens[g].data();
      vand(j, g) = dof_apply_field(dofs_[j], [&](const double* y, double* v) {
        eval_mono_field(coef, y, v);
      });
    }
  LuFactors vf = lu_factor(vand);  // throws for degenerate geometry
  phi_.assign(static_cast<std::size_t>(M_) * nc, 0.0);
  std::vector<double> e(M_, 0.0);
  for (int i = 0; i < M_; ++i) {
    e.assign(M_, 0.0);
    e[i] = 1.0;
    std::vector<double> c = lu_solve(vf, e);
    // Two refinement passes with extended-precision residuals keep the
    // duality defect at entry-rounding level even on thin elements.
    for (int pass = 0; pass < 2; ++pass) {
      std::vector<double> res(M_);
      for (int k = 0; k < M_; ++k) {
        long double acc = e[k];
        for (int g = 0; g < M_; ++g) acc -= static_cast<long double>(vand(k, g)) * c[g];
        res[k] = static_cast<double>(acc);
      }
      const std::vector<double> dc = lu_solve(vf, res);
      for (int g = 0; g < M_; ++g) c[g] += dc[g];
    }
    for (int g = 0; g < M_; ++g) {
      if (c[g] == 0.0) continue;
      for (int t = 0; t < nc; ++t) phi_[i * nc + t] += c[g] * gens[g][t];
    }
  }
  psi_.assign(static_cast<std::size_t>(M0_) * nc, 0.0);
  for (int k = 0; k < M0_; ++k)
    for (int t = 0; t < nc; ++t) psi_[k * nc + t] = gens[k][t];

  // Re-apply every DOF to every basis field: catches any mismatch between
  // the DOF quadrature and the coefficient algebra, and degenerate shapes.
  double defect = 0.0;
  for (int j = 0; j < M_; ++j)
    for (int i = 0; i < M_; ++i) {
      const double* coef = &phi_[i * nc];
      const double v =
          dof_apply_field(dofs_[j], [&](const double* y, double* out) {
            eval_mono_field(coef, y, out);
          });
      defect = std::max(defect, std::fabs(v - (i == j ? 1.0 : 0.0)));
    }
  if (!(defect <= 1e-11))
    throw std::runtime_error("NedelecSpace: DOF/basis duality defect " +
                             std::to_string(defect));

  // eta_j(grad xi_l) over the element's order-r Lagrange shapes.
  const int nloc = local_dof_count(n_, r_);
  grad_xi_ = DenseMatrix(M_, nloc);
  for (int l = 0; l < nloc; ++l) {
    auto field = [&](const double* y, double* v) {
      double lam[4], grads[10 * 3];
      for (int a = 0; a <= n_; ++a) {
        double s = 1.0 / (n_ + 1);
        for (int k = 0; k < n_; ++k)
          s += geom_.grad[a][k] * (y[k] - geom_.yc[k]);
        lam[a] = s;
      }
      shape_gradients(n_, r_, lam, geom_, grads);
      for (int k = 0; k < n_; ++k) v[k] = grads[l * n_ + k];
    };
    for (int j = 0; j < M_; ++j) grad_xi_(j, l) = dof_apply_field(dofs_[j], field);
  }
}

void NedelecSpace::eval_mono_field(const double* coeffs, const double* y,
                                   double* v) const {
  // Monomials in (y - y_c)/h so the polynomial bases stay O(1) on every
  // element scale; all downstream matrices see only shape, not size.
  double xh[3] = {0.0, 0.0, 0.0}, mono[6];
  for (int k = 0; k < n_; ++k) xh[k] = (y[k] - geom_.yc[k]) / geom_.h;
  for (int t = 0; t < nmono_; ++t) {
    double m = 1.0;
    for (int k = 0; k < n_; ++k)
      for (int p = 0; p < powers_[t][k]; ++p) m *= xh[k];
    mono[t] = m;
  }
  for (int k = 0; k < n_; ++k) {
    double s = 0.0;
    for (int t = 0; t < nmono_; ++t) s += coeffs[k * nmono_ + t] * mono[t];
    v[k] = s;
  }
}

void NedelecSpace::eval_phi(int j, const double* y, double* v) const {
  eval_mono_field(&phi_[static_cast<std::size_t>(j) * n_ * nmono_], y, v);
}

void NedelecSpace::eval_psi(int k, const double* y, double* v) const {
  eval_mono_field(&psi_[static_cast<std::size_t>(k) * n_ * nmono_], y, v);
}

double NedelecSpace::dof_apply_field(
    const NedelecDof& dof,
    const std::function<void(const double*, double*)>& field) const {
  double v[3];
  if (dof.kind == NedelecDof::Edge) {
    const LineRule& lr = line_rule(2 * r_ + 4);
    const auto tau = geom_.edge_vec(dof.a, dof.b);
    double sum = 0.0;
    for (std::size_t i = 0; i < lr.x.size(); ++i) {
      const double s = lr.x[i];
      double y[3] = {0.0, 0.0, 0.0};
      for (int k = 0; k < n_; ++k) y[k] = geom_.y[dof.a][k] + s * tau[k];
      field(y, v);
      double t = 0.0;
      for (int k = 0; k < n_; ++k) t += v[k] * tau[k];
      sum += lr.w[i] * t * (dof.moment == 0 ? 1.0 : 2.0 * s - 1.0);
    }
    return sum;
  }
  const QuadratureRule& qr = simplex_rule(n_, 2 * r_ + 4);
  double sum = 0.0;
  for (std::size_t i = 0; i < qr.size(); ++i) {
    const double* lam = qr.lambda(i);
    double y[3] = {0.0, 0.0, 0.0};
    for (int k = 0; k < n_; ++k) {
      double s = 0.0;
      for (int a = 0; a <= n_; ++a) s += lam[a] * geom_.y[a][k];
      y[k] = s;
    }
    field(y, v);
    sum += qr.weights[i] * v[dof.comp];
  }
  return geom_.vol * sum;
}

double NedelecSpace::dof_apply(
    int j, const std::function<void(const double*, double*)>& field) const {
  return dof_apply_field(dofs_[j], field);
}

DenseMatrix build_P(const NedelecSpace& space) {
  const int M = space.dim(), M0 = space.poly_dim();
  DenseMatrix p(M, M0);
  for (int m = 0; m < M; ++m)
    for (int k = 0; k < M0; ++k)
      p(m, k) = space.dof_apply(
          m, [&](const double* y, double* v) { space.eval_psi(k, y, v); });

  // sum_m p_{mk} phi_m must reproduce psi_k pointwise.
  const ElementGeometry& g = space.geometry();
  const int n = g.n;
  std::vector<const double*> pts;
  for (int a = 0; a <= n; ++a) pts.push_back(g.y[a].data());
  pts.push_back(g.yc.data());
  for (int k = 0; k < M0; ++k) {
    double scale = 1e-30, defect = 0.0;
    for (const double* y : pts) {
      double want[3], got[3] = {0.0, 0.0, 0.0}, tmp[3];
      space.eval_psi(k, y, want);
      for (int m = 0; m < M; ++m) {
        space.eval_phi(m, y, tmp);
        for (int c = 0; c < n; ++c) got[c] += p(m, k) * tmp[c];
      }
      for (int c = 0; c < n; ++c) {
        scale = std::max(scale, std::fabs(want[c]));
        defect = std::max(defect, std::fabs(got[c] - want[c]));
      }
    }
    if (!(defect <= 1e-10 * std::max(scale, 1e-14)))
      throw std::runtime_error("build_P: psi reconstruction defect " +
                               std::to_string(defect));
  }
  return p;
}

std::vector<double> weighted_dof_vector(
    const NedelecSpace& space, const double* q,
    const std::function<void(const double*, double*)>& g) {
  std::vector<long double> out(space.dim());
  weighted_dofs(space, q, g, out.data());
  return std::vector<double>(out.begin(), out.end());
}

namespace {

// Z columns in extended precision; the D-solve per evaluation point stays in
// double like every other field evaluation.
std::vector<long double> build_z_ext(const NedelecSpace& space, const double* q,
                                     const double* d) {
  const int n = space.geometry().n;
  DenseMatrix dm(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) dm(i, j) = d[i * n + j];
  const LuFactors df = lu_factor(dm);
  const int M = space.dim();
  std::vector<long double> z(static_cast<std::size_t>(M) * M);
  std::vector<long double> col(M);
  std::vector<double> rhs(n);
  for (int k = 0; k < M; ++k) {
    auto field = [&](const double* y, double* v) {
      double phi[3];
      space.eval_phi(k, y, phi);
      for (int c = 0; c < n; ++c) rhs[c] = phi[c];
      const std::vector<double> w = lu_solve(df, rhs);
      for (int c = 0; c < n; ++c) v[c] = w[c];
    };
    weighted_dofs(space, q, field, col.data());
    for (int j = 0; j < M; ++j) z[static_cast<std::size_t>(j) * M + k] = col[j];
  }
  return z;
}

std::vector<long double> solve_projected(const FluxRecovery& fr,
                                         const std::vector<long double>& d) {
  const int m = static_cast<int>(fr.P.rows()), m0 = static_cast<int>(fr.P.cols());
  std::vector<long double> rhs(m0, 0.0L);
  for (int i = 0; i < m; ++i)
    for (int k = 0; k < m0; ++k) rhs[k] += fr.p_ext[std::size_t(i) * m0 + k] * d[i];
  const ExtLu lu{fr.lu_ext, fr.piv_ext, m0};
  std::vector<long double> c = ext_lu_solve(lu, rhs);

  // Iterative refinement: the recovery systems are consistent but badly
  // row-scaled, and refinement pins the solve at entry-roundoff level.
  long double prev_norm = std::numeric_limits<long double>::infinity();
  for (int pass = 0; pass < 3; ++pass) {
    std::vector<long double> t(m, 0.0L), u(m, 0.0L), s(m0);
    for (int i = 0; i < m; ++i)
      for (int k = 0; k < m0; ++k) t[i] += fr.p_ext[std::size_t(i) * m0 + k] * c[k];
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < m; ++j) u[i] += fr.z_ext[std::size_t(i) * m + j] * t[j];
    for (int k = 0; k < m0; ++k) {
      long double acc = rhs[k];
      for (int i = 0; i < m; ++i) acc -= fr.p_ext[std::size_t(i) * m0 + k] * u[i];
      s[k] = acc;
    }
    const std::vector<long double> dc = ext_lu_solve(lu, s);
    long double dn = 0.0L, cn = 0.0L;
    for (int k = 0; k < m0; ++k) {
      c[k] += dc[k];
      dn += dc[k] * dc[k];
      cn += c[k] * c[k];
    }
    if (dn >= prev_norm || dn <= 1e-34L * cn) break;
    prev_norm = dn;
  }
  return c;
}

}  // namespace

DenseMatrix build_Z(const NedelecSpace& space, const double* q, const double* d) {
  const int M = space.dim();
  const std::vector<long double> z = build_z_ext(space, q, d);
  DenseMatrix out(M, M);
  for (int j = 0; j < M; ++j)
    for (int k = 0; k < M; ++k)
      out(j, k) = static_cast<double>(z[static_cast<std::size_t>(j) * M + k]);
  return out;
}

std::vector<double> FluxRecovery::solve(const std::vector<double>& d) const {
  const std::vector<long double> c =
      solve_projected(*this, std::vector<long double>(d.begin(), d.end()));
  return std::vector<double>(c.begin(), c.end());
}

std::vector<double> FluxRecovery::recover(
    const std::function<void(const double*, double*)>& field) const {
  std::vector<long double> d(space->dim());
  weighted_dofs(*space, q, field, d.data());
  const std::vector<long double> c = solve_projected(*this, d);
  return std::vector<double>(c.begin(), c.end());
}

FluxRecovery make_flux_recovery(const NedelecSpace& space, const double* q,
                                const double* d_tensor, int cell) {
  const int M = space.dim(), M0 = space.poly_dim();
  FluxRecovery fr;
  fr.space = &space;
  for (int k = 0; k < space.geometry().n; ++k) fr.q[k] = q[k];

  fr.P = build_P(space);
  fr.p_ext.assign(static_cast<std::size_t>(M) * M0, 0.0L);
  for (int i = 0; i < M; ++i)
    for (int k = 0; k < M0; ++k) fr.p_ext[std::size_t(i) * M0 + k] = fr.P(i, k);
  fr.z_ext = build_z_ext(space, q, d_tensor);
  fr.Z = DenseMatrix(M, M);
  for (int j = 0; j < M; ++j)
    for (int k = 0; k < M; ++k)
      fr.Z(j, k) = static_cast<double>(fr.z_ext[std::size_t(j) * M + k]);

  // Projected matrix in extended precision; the double copy feeds the
  // condition estimate and the diagnostics dump.
  std::vector<long double> mext(static_cast<std::size_t>(M0) * M0, 0.0L);
  for (int i = 0; i < M; ++i)
    for (int k = 0; k < M0; ++k) {
      long double zp = 0.0L;
      for (int j = 0; j < M; ++j)
        zp += fr.z_ext[std::size_t(i) * M + j] * fr.p_ext[std::size_t(j) * M0 + k];
      for (int l = 0; l < M0; ++l)
        mext[std::size_t(l) * M0 + k] += fr.p_ext[std::size_t(i) * M0 + l] * zp;
    }
  DenseMatrix m(M0, M0);
  for (int l = 0; l < M0; ++l)
    for (int k = 0; k < M0; ++k)
      m(l, k) = static_cast<double>(mext[std::size_t(l) * M0 + k]);
  try {
    fr.ptzp = lu_factor(m);
    ExtLu lu = ext_lu_factor(mext, M0);
    fr.lu_ext = std::move(lu.a);
    fr.piv_ext = std::move(lu.piv);
  } catch (const std::runtime_error& e) {
    throw UnisolvenceFailure(
        std::string("flux recovery system singular: ") + e.what(), cell,
        std::numeric_limits<double>::infinity());
  }
  fr.cond = condition_estimate_1(m, fr.ptzp);
  if (!(fr.cond <= 1e12))
    throw UnisolvenceFailure("flux recovery system ill-conditioned: cond = " +
                                 std::to_string(fr.cond),
                             cell, fr.cond);
  return fr;
}

std::vector<double> node_weights(const NedelecSpace& space, const double* q) {
  const ElementGeometry& g = space.geometry();
  const int n = g.n;
  check_exponents(g, q);
  std::vector<double> w;
  for (int a = 0; a <= n; ++a)
    w.push_back(std::exp(exponent_at(g, q, g.y[a].data())));
  if (space.order() == 2)
    for (int a = 0; a <= n; ++a)
      for (int b = a + 1; b <= n; ++b) {
        double mid[3] = {0.0, 0.0, 0.0};
        for (int k = 0; k < n; ++k) mid[k] = 0.5 * (g.y[a][k] + g.y[b][k]);
        w.push_back(std::exp(exponent_at(g, q, mid)));
      }
  return w;
}

std::vector<double> compute_d(const NedelecSpace& space, const double* q,
                              const std::vector<double>& u_nodal) {
  const int nloc = space.lagrange_dofs();
  if (static_cast<int>(u_nodal.size()) != nloc)
    throw std::invalid_argument("compute_d: nodal vector size mismatch");
  const std::vector<double> w = node_weights(space, q);
  std::vector<double> wu(nloc);
  for (int l = 0; l < nloc; ++l) wu[l] = w[l] * u_nodal[l];
  return space.grad_basis_map().apply(wu);
}

}  // namespace stfe
