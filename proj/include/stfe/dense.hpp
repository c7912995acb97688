#pragma once

#include <cassert>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

namespace stfe {

// Small dense row-major matrix for element-local work (local stiffness
// blocks, Nedelec DOF systems, the dense-LU solver fallback). Not meant for
// large n; the sparse path lives in csr.hpp.
class DenseMatrix {
 public:
  DenseMatrix() = default;
  DenseMatrix(std::size_t rows, std::size_t cols)
      : rows_(rows), cols_(cols), a_(rows * cols, 0.0) {}

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  double& operator()(std::size_t i, std::size_t j) { return a_[i * cols_ + j]; }
  double operator()(std::size_t i, std::size_t j) const { return a_[i * cols_ + j]; }

  double* data() { return a_.data(); }
  const double* data() const { return a_.data(); }

  DenseMatrix transposed() const {
    DenseMatrix t(cols_, rows_);
    for (std::size_t i = 0; i < rows_; ++i)
      for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
    return t;
  }

  std::vector<double> apply(const std::vector<double>& x) const {
    assert(x.size() == cols_);
    std::vector<double> y(rows_, 0.0);
    for (std::size_t i = 0; i < rows_; ++i) {
      double s = 0.0;
      for (std::size_t j = 0; j < cols_; ++j) s += (*this)(i, j) * x[j];
      y[i] = s;
    }
    return y;
  }

  friend DenseMatrix operator*(const DenseMatrix& a, const DenseMatrix& b) {
    assert(a.cols_ == b.rows_);
    DenseMatrix c(a.rows_, b.cols_);
    for (std::size_t i = 0; i < a.rows_; ++i)
      for (std::size_t k = 0; k < a.cols_; ++k) {
        const double aik = a(i, k);
        if (aik == 0.0) continue;
        for (std::size_t j = 0; j < b.cols_; ++j) c(i, j) += aik * b(k, j);
      }
    return c;
  }

  double norm_frobenius() const {
    double s = 0.0;
    for (double v : a_) s += v * v;
    return std::sqrt(s);
  }

  double norm_one() const {  // max column sum
    double m = 0.0;
    for (std::size_t j = 0; j < cols_; ++j) {
      double s = 0.0;
      for (std::size_t i = 0; i < rows_; ++i) s += std::fabs((*this)(i, j));
      m = std::max(m, s);
    }
    return m;
  }

 private:
  std::size_t rows_ = 0, cols_ = 0;
  std::vector<double> a_;
};

// LU factorization with partial pivoting, in place. Returns the permutation
// and throws on a pivot smaller than tiny * ||A||_1 (singular system).
struct LuFactors {
  DenseMatrix lu;
  std::vector<std::size_t> perm;
  int sign = 1;
};

inline LuFactors lu_factor(DenseMatrix a, double tiny = 1e-14) {
  const std::size_t n = a.rows();
  if (n != a.cols()) throw std::invalid_argument("lu_factor: matrix not square");
  const double scale = std::max(a.norm_one(), 1e-300);
  LuFactors f{std::move(a), std::vector<std::size_t>(n), 1};
  for (std::size_t i = 0; i < n; ++i) f.perm[i] = i;
  DenseMatrix& m = f.lu;
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t p = k;
    double best = std::fabs(m(k, k));
    for (std::size_t i = k + 1; i < n; ++i)
      if (std::fabs(m(i, k)) > best) { best = std::fabs(m(i, k)); p = i; }
    if (best <= tiny * scale)
      throw std::runtime_error("lu_factor: singular matrix (pivot " +
                               std::to_string(best) + ")");
    if (p != k) {
      for (std::size_t j = 0; j < n; ++j) std::swap(m(k, j), m(p, j));
      std::swap(f.perm[k], f.perm[p]);
      f.sign = -f.sign;
    }
    const double inv = 1.0 / m(k, k);
    for (std::size_t i = k + 1; i < n; ++i) {
      m(i, k) *= inv;
      const double lik = m(i, k);
      if (lik == 0.0) continue;
      for (std::size_t j = k + 1; j < n; ++j) m(i, j) -= lik * m(k, j);
    }
  }
  return f;
}

inline std::vector<double> lu_solve(const LuFactors& f, const std::vector<double>& b) {
  const std::size_t n = f.lu.rows();
  assert(b.size() == n);
  std::vector<double> x(n);
  for (std::size_t i = 0; i < n; ++i) x[i] = b[f.perm[i]];
  for (std::size_t i = 1; i < n; ++i) {
    double s = x[i];
    for (std::size_t j = 0; j < i; ++j) s -= f.lu(i, j) * x[j];
    x[i] = s;
  }
  for (std::size_t i = n; i-- > 0;) {
    double s = x[i];
    for (std::size_t j = i + 1; j < n; ++j) s -= f.lu(i, j) * x[j];
    x[i] = s / f.lu(i, i);
  }
  return x;
}

inline std::vector<double> dense_solve(const DenseMatrix& a, const std::vector<double>& b) {
  return lu_solve(lu_factor(a), b);
}

// One-norm condition estimate: ||A||_1 * ||A^{-1}||_1 with the inverse norm
// estimated by the classic Hager power iteration on A^{-T}/A^{-1} solves.
inline double condition_estimate_1(const DenseMatrix& a, const LuFactors& f) {
  const std::size_t n = a.rows();
  if (n == 0) return 0.0;
  // Solve with A^T by solving the transposed triangular systems.
  auto solve_t = [&](std::vector<double> b) {
    // forward with U^T, then L^T, then un-permute
    std::vector<double>& x = b;
    for (std::size_t i = 0; i < n; ++i) {
      double s = x[i];
      for (std::size_t j = 0; j < i; ++j) s -= f.lu(j, i) * x[j];
      x[i] = s / f.lu(i, i);
    }
    for (std::size_t i = n; i-- > 0;) {
      double s = x[i];
      for (std::size_t j = i + 1; j < n; ++j) s -= f.lu(j, i) * x[j];
      x[i] = s;
    }
    std::vector<double> y(n);
    for (std::size_t i = 0; i < n; ++i) y[f.perm[i]] = x[i];
    return y;
  };
  std::vector<double> v(n, 1.0 / double(n));
  double inv_norm = 0.0;
  for (int iter = 0; iter < 5; ++iter) {
    std::vector<double> y = lu_solve(f, v);
    double ny = 0.0;
    for (double t : y) ny += std::fabs(t);
    inv_norm = std::max(inv_norm, ny);
    std::vector<double> xi(n);
    for (std::size_t i = 0; i < n; ++i) xi[i] = (y[i] >= 0.0) ? 1.0 : -1.0;
    std::vector<double> z = solve_t(std::move(xi));
    std::size_t jmax = 0;
    double zmax = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      if (std::fabs(z[i]) > zmax) { zmax = std::fabs(z[i]); jmax = i; }
    double ztv = 0.0;
    for (std::size_t i = 0; i < n; ++i) ztv += z[i] * v[i];
    if (zmax <= ztv) break;
    v.assign(n, 0.0);
    v[jmax] = 1.0;
  }
  return a.norm_one() * inv_norm;
}

}  // namespace stfe
