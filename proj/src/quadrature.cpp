#include "stfe/quadrature.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <stdexcept>

namespace stfe {
namespace {

// Golub-Welsch: Gauss nodes/weights from the symmetric Jacobi matrix of the
// three-term recurrence. The tridiagonal eigenproblem is solved by the
// implicit-shift QL sweep (tql2 lineage); weights are mu0 * (first eigenvector
// component)^2.
struct Recurrence {
  std::vector<double> a;  // diagonal
  std::vector<double> b;  // off-diagonal squared (b[0] unused as offdiag)
  double mu0;             // integral of the weight function
};

void tridiag_eigen(std::vector<double>& d, std::vector<double>& e,
                   std::vector<double>& first_component) {
  const std::size_t n = d.size();
  first_component.assign(n, 0.0);
  // z holds the first row of the accumulating orthogonal transform.
  std::vector<double>& z = first_component;
  if (n == 0) return;
  z[0] = 1.0;
  e.resize(n, 0.0);  // e[i] couples d[i], d[i+1]; e[n-1] is padding
  for (std::size_t l = 0; l < n; ++l) {
    int iter = 0;
    for (;;) {
      std::size_t m = l;
      for (; m + 1 < n; ++m) {
        const double dd = std::fabs(d[m]) + std::fabs(d[m + 1]);
        if (std::fabs(e[m]) <= 1e-16 * dd) break;
      }
      if (m == l) break;
      if (++iter > 60) throw std::runtime_error("tridiag_eigen: no convergence");
      double g = (d[l + 1] - d[l]) / (2.0 * e[l]);
      double r = std::hypot(g, 1.0);
      g = d[m] - d[l] + e[l] / (g + (g >= 0 ? r : -r));
      double s = 1.0, c = 1.0, p = 0.0;
      bool underflow = false;
      for (std::size_t i = m; i-- > l;) {
        double f = s * e[i], bb = c * e[i];
        r = std::hypot(f, g);
        e[i + 1] = r;
        if (r == 0.0) {
          d[i + 1] -= p;
          e[m] = 0.0;
          underflow = true;
          break;
        }
        s = f / r;
        c = g / r;
        g = d[i + 1] - p;
        r = (d[i] - g) * s + 2.0 * c * bb;
        p = s * r;
        d[i + 1] = g + p;
        g = c * r - bb;
        f = z[i + 1];
        z[i + 1] = s * z[i] + c * f;
        z[i] = c * z[i] - s * f;
      }
      if (underflow) continue;
      d[l] -= p;
      e[l] = g;
      e[m] = 0.0;
    }
  }
  // Sort ascending by eigenvalue, carrying the first components along.
  for (std::size_t i = 0; i + 1 < n; ++i) {
    std::size_t k = i;
    for (std::size_t j = i + 1; j < n; ++j)
      if (d[j] < d[k]) k = j;
    if (k != i) {
      std::swap(d[i], d[k]);
      std::swap(z[i], z[k]);
    }
  }
}

LineRule gauss_from_recurrence(const Recurrence& rec) {
  const std::size_t n = rec.a.size();
  std::vector<double> d = rec.a;
  std::vector<double> e(n);
  for (std::size_t i = 1; i < n; ++i) e[i - 1] = std::sqrt(rec.b[i]);
  std::vector<double> z;
  tridiag_eigen(d, e, z);
  LineRule r;
  r.x = d;
  r.w.resize(n);
  for (std::size_t i = 0; i < n; ++i) r.w[i] = rec.mu0 * z[i] * z[i];
  return r;
}

// Jacobi weight (1-x)^alpha (1+x)^beta on [-1,1]; Gautschi's recurrence
// coefficients. We only need beta = 0.
Recurrence jacobi_recurrence(int n, double alpha, double beta) {
  Recurrence rec;
  rec.a.resize(n);
  rec.b.resize(n);
  const double ab = alpha + beta;
  rec.mu0 = std::pow(2.0, ab + 1) * std::tgamma(alpha + 1) * std::tgamma(beta + 1) /
            std::tgamma(ab + 2);
  for (int k = 0; k < n; ++k) {
    const double kk = k;
    if (k == 0)
      rec.a[k] = (beta - alpha) / (ab + 2);
    else
      rec.a[k] = (beta * beta - alpha * alpha) /
                 ((2 * kk + ab) * (2 * kk + ab + 2));
    if (k == 0)
      rec.b[k] = 0.0;  // unused
    else if (k == 1)
      rec.b[k] = 4 * (alpha + 1) * (beta + 1) / ((ab + 2) * (ab + 2) * (ab + 3));
    else
      rec.b[k] = 4 * kk * (kk + alpha) * (kk + beta) * (kk + ab) /
                 ((2 * kk + ab) * (2 * kk + ab) * (2 * kk + ab + 1) *
                  (2 * kk + ab - 1));
  }
  return rec;
}

// Map a [-1,1] rule with weight (1-x)^alpha to [0,1] with weight (1-t)^alpha,
// then normalize so the weights sum to 1 (we fold the weight-function mass
// into the simplex volume factor instead).
LineRule mapped_jacobi(int npts, int alpha) {
  LineRule r = gauss_from_recurrence(jacobi_recurrence(npts, alpha, 0.0));
  double total = 0.0;
  for (double w : r.w) total += w;
  for (std::size_t i = 0; i < r.x.size(); ++i) {
    r.x[i] = 0.5 * (r.x[i] + 1.0);
    r.w[i] /= total;
  }
  return r;
}

std::map<std::pair<int, int>, QuadratureRule> g_simplex_cache;
std::map<int, LineRule> g_line_cache;
std::mutex g_cache_mutex;

QuadratureRule build_simplex_rule(int dim, int degree) {
  const int k = degree / 2 + 1;  // 2k-1 >= degree
  QuadratureRule rule;
  rule.dim = dim;
  rule.exact_degree = degree;
  const LineRule u = mapped_jacobi(k, 0);
  if (dim == 1) {
    for (int i = 0; i < k; ++i) {
      rule.points.push_back(1.0 - u.x[i]);
      rule.points.push_back(u.x[i]);
      rule.weights.push_back(u.w[i]);
    }
    return rule;
  }
  if (dim == 2) {
    // x = a(1-b), y = b; Jacobian (1-b). The (1-b) factor is the Jacobi
    // weight of the second direction, and the 1/2 reference volume is
    // normalized away because our weights sum to 1.
    const LineRule v = mapped_jacobi(k, 1);
    for (int i = 0; i < k; ++i)
      for (int j = 0; j < k; ++j) {
        const double x = u.x[i] * (1.0 - v.x[j]);
        const double y = v.x[j];
        rule.points.push_back(1.0 - x - y);
        rule.points.push_back(x);
        rule.points.push_back(y);
        rule.weights.push_back(u.w[i] * v.w[j]);
      }
    return rule;
  }
  if (dim == 3) {
    const LineRule v = mapped_jacobi(k, 1);
    const LineRule w = mapped_jacobi(k, 2);
    for (int i = 0; i < k; ++i)
      for (int j = 0; j < k; ++j)
        for (int l = 0; l < k; ++l) {
          const double z = w.x[l];
          const double y = v.x[j] * (1.0 - z);
          const double x = u.x[i] * (1.0 - v.x[j]) * (1.0 - z);
          rule.points.push_back(1.0 - x - y - z);
          rule.points.push_back(x);
          rule.points.push_back(y);
          rule.points.push_back(z);
          rule.weights.push_back(u.w[i] * v.w[j] * w.w[l]);
        }
    return rule;
  }
  throw std::invalid_argument("simplex_rule: dim must be 1, 2, or 3");
}

double validate_rule(const QuadratureRule& rule) {
  // Spot-check full monomial exactness at the rule's degree.
  double worst = 0.0;
  std::vector<int> alpha(rule.dim + 1, 0);
  // enumerate all alpha with |alpha| <= exact_degree over dim+1 barycentrics
  std::vector<std::vector<int>> all;
  std::vector<int> cur(rule.dim + 1, 0);
  auto rec = [&](auto&& self, int pos, int left) -> void {
    if (pos == rule.dim) {
      cur[pos] = left;
      all.push_back(cur);
      return;
    }
    for (int v = 0; v <= left; ++v) {
      cur[pos] = v;
      self(self, pos + 1, left - v);
    }
  };
  for (int total = 0; total <= rule.exact_degree; ++total) rec(rec, 0, total);
  for (const auto& a : all) {
    double quad = 0.0;
    for (std::size_t p = 0; p < rule.size(); ++p) {
      double term = rule.weights[p];
      for (int c = 0; c <= rule.dim; ++c)
        for (int e = 0; e < a[c]; ++e) term *= rule.lambda(p)[c];
      quad += term;
    }
    const double exact = monomial_reference_integral(a);
    worst = std::max(worst, std::fabs(quad - exact) / std::max(1e-30, exact));
  }
  return worst;
}

}  // namespace

double monomial_reference_integral(const std::vector<int>& alpha) {
  // integral over T of prod lambda^alpha = |T| n! prod(alpha!)/(|alpha|+n)!,
  // and our normalization divides by |T|.
  const int n = int(alpha.size()) - 1;
  double log_num = std::lgamma(n + 1.0);
  int total = 0;
  for (int a : alpha) {
    log_num += std::lgamma(a + 1.0);
    total += a;
  }
  return std::exp(log_num - std::lgamma(total + n + 1.0));
}

const LineRule& line_rule(int degree) {
  std::lock_guard<std::mutex> lock(g_cache_mutex);
  auto it = g_line_cache.find(degree);
  if (it != g_line_cache.end()) return it->second;
  const int k = degree / 2 + 1;
  return g_line_cache.emplace(degree, mapped_jacobi(k, 0)).first->second;
}

LineRule gauss_jacobi_01(int npts, int alpha) { return mapped_jacobi(npts, alpha); }

const QuadratureRule& simplex_rule(int dim, int degree) {
  std::lock_guard<std::mutex> lock(g_cache_mutex);
  auto key = std::make_pair(dim, degree);
  auto it = g_simplex_cache.find(key);
  if (it != g_simplex_cache.end()) return it->second;
  QuadratureRule rule = build_simplex_rule(dim, degree);
  const double err = validate_rule(rule);
  if (err > 1e-12)
    throw std::runtime_error("simplex_rule: self-check failed, rel err " +
                             std::to_string(err));
  return g_simplex_cache.emplace(key, std::move(rule)).first->second;
}

}  // namespace stfe
