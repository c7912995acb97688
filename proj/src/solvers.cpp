#include "stfe/solvers.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <stdexcept>

#include "stfe/dense.hpp"

namespace stfe {
namespace {

double dot(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double norm2(const std::vector<double>& a) { return std::sqrt(dot(a, a)); }

// Right preconditioner M^{-1}.  ILU(0) keeps the sparsity pattern of A and
// stores the combined L\U factors in place; a zero pivot degrades the
// preconditioner to identity rather than failing the solve.
class Precond {
 public:
  Precond(const CsrMatrix& a, Preconditioner type) : a_(a), type_(type) {
    if (type_ == Preconditioner::Jacobi) {
      diag_.assign(a.n, 1.0);
      for (int i = 0; i < a.n; ++i)
        if (const double* d = a.find(i, i); d && *d != 0.0) diag_[i] = *d;
    } else if (type_ == Preconditioner::Ilu0) {
      if (!factor_ilu0()) type_ = Preconditioner::None;
    }
  }

  void apply(const std::vector<double>& v, std::vector<double>& z) const {
    switch (type_) {
      case Preconditioner::None:
        z = v;
        break;
      case Preconditioner::Jacobi:
        z.resize(v.size());
        for (int i = 0; i < a_.n; ++i) z[i] = v[i] / diag_[i];
        break;
      case Preconditioner::GaussSeidel:
        forward_solve(a_.vals, v, z, /*unit_lower=*/false);
        break;
      case Preconditioner::Ilu0:
        forward_solve(lu_, v, z, /*unit_lower=*/true);
        backward_solve(lu_, z);
        break;
    }
  }

 private:
  bool factor_ilu0() {
    lu_ = a_.vals;
    diag_pos_.assign(a_.n, -1);
    for (int i = 0; i < a_.n; ++i)
      for (int k = a_.row_ptr[i]; k < a_.row_ptr[i + 1]; ++k)
        if (a_.col_idx[k] == i) diag_pos_[i] = k;
    for (int i = 0; i < a_.n; ++i) {
      for (int kk = a_.row_ptr[i]; kk < a_.row_ptr[i + 1]; ++kk) {
        const int k = a_.col_idx[kk];
        if (k >= i) break;
        if (diag_pos_[k] < 0 || lu_[diag_pos_[k]] == 0.0) return false;
        const double factor = lu_[kk] / lu_[diag_pos_[k]];
        lu_[kk] = factor;
        // Subtract factor * row_k from row_i on the shared pattern past k.
        for (int kj = diag_pos_[k] + 1; kj < a_.row_ptr[k + 1]; ++kj) {
          if (double* aij = find_in_row(i, a_.col_idx[kj])) *aij -= factor * lu_[kj];
        }
      }
      if (diag_pos_[i] < 0 || lu_[diag_pos_[i]] == 0.0) return false;
    }
    return true;
  }

  double* find_in_row(int i, int j) {
    const int* begin = a_.col_idx.data() + a_.row_ptr[i];
    const int* end = a_.col_idx.data() + a_.row_ptr[i + 1];
    const int* it = std::lower_bound(begin, end, j);
    if (it == end || *it != j) return nullptr;
    return lu_.data() + (it - a_.col_idx.data());
  }

  void forward_solve(const std::vector<double>& vals, const std::vector<double>& v,
                     std::vector<double>& z, bool unit_lower) const {
    z.assign(a_.n, 0.0);
    for (int i = 0; i < a_.n; ++i) {
      double acc = v[i];
      double diag = 1.0;
      for (int k = a_.row_ptr[i]; k < a_.row_ptr[i + 1]; ++k) {
        const int j = a_.col_idx[k];
        if (j < i)
          acc -= vals[k] * z[j];
        else if (j == i)
          diag = vals[k];
      }
      if (unit_lower)
        z[i] = acc;
      else
        z[i] = acc / (diag != 0.0 ? diag : 1.0);
    }
  }

  void backward_solve(const std::vector<double>& vals, std::vector<double>& z) const {
    for (int i = a_.n - 1; i >= 0; --i) {
      double acc = z[i];
      double diag = 1.0;
      for (int k = a_.row_ptr[i]; k < a_.row_ptr[i + 1]; ++k) {
        const int j = a_.col_idx[k];
        if (j > i)
          acc -= vals[k] * z[j];
        else if (j == i)
          diag = vals[k];
      }
      z[i] = acc / (diag != 0.0 ? diag : 1.0);
    }
  }

  const CsrMatrix& a_;
  Preconditioner type_;
  std::vector<double> diag_;
  std::vector<double> lu_;
  std::vector<int> diag_pos_;
};

double true_residual(const CsrMatrix& a, const std::vector<double>& b,
                     const std::vector<double>& x, double bnorm) {
  std::vector<double> r(a.n);
  a.apply(x.data(), r.data());
  for (int i = 0; i < a.n; ++i) r[i] = b[i] - r[i];
  return norm2(r) / bnorm;
}

}  // namespace

Preconditioner parse_preconditioner(const std::string& name) {
  if (name == "none") return Preconditioner::None;
  if (name == "jacobi") return Preconditioner::Jacobi;
  if (name == "ilu0") return Preconditioner::Ilu0;
  if (name == "gauss_seidel") return Preconditioner::GaussSeidel;
  throw std::invalid_argument("unknown preconditioner: " + name);
}

std::string preconditioner_name(Preconditioner p) {
  switch (p) {
    case Preconditioner::None: return "none";
    case Preconditioner::Jacobi: return "jacobi";
    case Preconditioner::Ilu0: return "ilu0";
    case Preconditioner::GaussSeidel: return "gauss_seidel";
  }
  return "?";
}

SolverReport solve_gmres(const CsrMatrix& a, const std::vector<double>& b,
                         std::vector<double>& x, const SolverOptions& opts) {
  const auto t0 = std::chrono::steady_clock::now();
  SolverReport rep;
  const int n = a.n;
  if (static_cast<int>(b.size()) != n)
    throw std::invalid_argument("solve_gmres: size mismatch");
  x.assign(n, 0.0);
  const double bnorm = norm2(b);
  if (bnorm == 0.0) {
    rep.converged = true;
    return rep;
  }
  const Precond precond(a, opts.precond);
  const int m = std::max(1, opts.restart);

  std::vector<std::vector<double>> v(m + 1, std::vector<double>(n));
  std::vector<std::vector<double>> h(m + 1, std::vector<double>(m, 0.0));
  std::vector<double> cs(m), sn(m), g(m + 1), y(m), z(n), w(n), r(n);

  while (rep.iterations < opts.max_iter) {
    a.apply(x.data(), r.data());
    for (int i = 0; i < n; ++i) r[i] = b[i] - r[i];
    const double beta = norm2(r);
    if (beta / bnorm <= opts.tol) break;
    for (int i = 0; i < n; ++i) v[0][i] = r[i] / beta;
    std::fill(g.begin(), g.end(), 0.0);
    g[0] = beta;

    int j = 0;
    bool breakdown = false;
    for (; j < m && rep.iterations < opts.max_iter; ++j) {
      precond.apply(v[j], z);
      a.apply(z.data(), w.data());
      for (int i = 0; i <= j; ++i) {
        h[i][j] = dot(w, v[i]);
        for (int k = 0; k < n; ++k) w[k] -= h[i][j] * v[i][k];
      }
      h[j + 1][j] = norm2(w);
      ++rep.iterations;
      if (h[j + 1][j] <= 1e-14 * bnorm) {
        breakdown = true;  // happy breakdown: exact solution in this subspace
      } else {
        for (int k = 0; k < n; ++k) v[j + 1][k] = w[k] / h[j + 1][j];
      }
      // Rotate the new column into upper-triangular form.
      for (int i = 0; i < j; ++i) {
        const double t = cs[i] * h[i][j] + sn[i] * h[i + 1][j];
        h[i + 1][j] = -sn[i] * h[i][j] + cs[i] * h[i + 1][j];
        h[i][j] = t;
      }
      const double denom = std::hypot(h[j][j], h[j + 1][j]);
      if (denom == 0.0) {
        cs[j] = 1.0;
        sn[j] = 0.0;
      } else {
        cs[j] = h[j][j] / denom;
        sn[j] = h[j + 1][j] / denom;
      }
      h[j][j] = denom;
      h[j + 1][j] = 0.0;
      g[j + 1] = -sn[j] * g[j];
      g[j] = cs[j] * g[j];
      if (breakdown || std::abs(g[j + 1]) / bnorm <= opts.tol) {
        ++j;
        break;
      }
    }

    // x += M^{-1} (V_j y) with y from the triangular least-squares system.
    for (int i = j - 1; i >= 0; --i) {
      double acc = g[i];
      for (int k = i + 1; k < j; ++k) acc -= h[i][k] * y[k];
      if (h[i][i] == 0.0) {
        breakdown = true;
        acc = 0.0;
      }
      y[i] = h[i][i] != 0.0 ? acc / h[i][i] : 0.0;
    }
    std::fill(w.begin(), w.end(), 0.0);
    for (int k = 0; k < j; ++k)
      for (int i = 0; i < n; ++i) w[i] += y[k] * v[k][i];
    precond.apply(w, z);
    for (int i = 0; i < n; ++i) x[i] += z[i];
    if (breakdown) break;
  }

  rep.residual = true_residual(a, b, x, bnorm);
  rep.converged = rep.residual <= opts.tol;
  rep.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return rep;
}

std::vector<double> solve_dense_lu(const CsrMatrix& a, const std::vector<double>& b) {
  if (a.n > 2000) throw std::invalid_argument("solve_dense_lu: size above 2000");
  if (static_cast<int>(b.size()) != a.n)
    throw std::invalid_argument("solve_dense_lu: size mismatch");
  DenseMatrix d(a.n, a.n);
  for (int i = 0; i < a.n; ++i)
    for (int k = a.row_ptr[i]; k < a.row_ptr[i + 1]; ++k)
      d(i, a.col_idx[k]) = a.vals[k];
  return dense_solve(d, b);
}

SolverReport solve_linear_system(const CsrMatrix& a, const std::vector<double>& b,
                                 std::vector<double>& x, const SolverOptions& opts) {
  SolverReport rep = solve_gmres(a, b, x, opts);
  if (!rep.converged && a.n < 2000) {
    const auto t0 = std::chrono::steady_clock::now();
    x = solve_dense_lu(a, b);
    rep.dense_fallback = true;
    const double bnorm = norm2(b);
    rep.residual = bnorm == 0.0 ? 0.0 : true_residual(a, b, x, bnorm);
    rep.converged = rep.residual <= opts.tol;
    rep.seconds += std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  }
  return rep;
}

}  // namespace stfe
