#include "stfe/problem.hpp"

#include <cmath>
#include <memory>
#include <stdexcept>

namespace stfe {
namespace {

constexpr double kPi = 3.14159265358979323846;

void invert_spd_2x2(const double k[4], double inv[4]) {
  const double det = k[0] * k[3] - k[1] * k[2];
  if (det <= 0.0) throw std::invalid_argument("diffusion tensor not positive definite");
  inv[0] = k[3] / det;
  inv[1] = -k[1] / det;
  inv[2] = -k[2] / det;
  inv[3] = k[0] / det;
}

}  // namespace

ElementCoefficients freeze_coefficients(const SpaceTimeProblem& problem,
                                        const ElementGeometry& geom) {
  ElementCoefficients c;
  c.n = geom.n;
  c.gamma = problem.gamma;
  const int ds = problem.space_dim;
  const double a0 = problem.constant_coefficients ? problem.alpha : 1.0;
  double k[4] = {a0, 0.0, 0.0, a0};
  double beta[2] = {problem.beta[0], problem.beta[1]};
  if (problem.diffusion) problem.diffusion(geom.yc.data(), k);
  if (problem.convection) problem.convection(geom.yc.data(), beta);

  if (ds == 1) {
    if (k[0] <= 0.0) throw std::invalid_argument("diffusion tensor not positive definite");
    c.D[0][0] = k[0];
    c.b[0] = beta[0];
    c.q[0] = beta[0] / k[0];
  } else {
    double kinv[4];
    invert_spd_2x2(k, kinv);
    c.D[0][0] = k[0];
    c.D[0][1] = k[1];
    c.D[1][0] = k[2];
    c.D[1][1] = k[3];
    c.b[0] = beta[0];
    c.b[1] = beta[1];
    c.q[0] = kinv[0] * beta[0] + kinv[1] * beta[1];
    c.q[1] = kinv[2] * beta[0] + kinv[3] * beta[1];
  }
  if (problem.space_time) {
    if (problem.eps <= 0.0)
      throw std::invalid_argument("eps must be positive for the space-time closure");
    c.D[ds][ds] = problem.eps;
    c.b[ds] = 1.0;
    c.q[ds] = 1.0 / problem.eps;
  }
  return c;
}

SpaceTimeProblem make_preset(const std::string& name) {
  SpaceTimeProblem p;
  p.name = name;
  if (name == "heat2d") {
    // U = e^{-t} sin(pi x) sin(pi y), K = I, beta = 0, gamma = 0:
    // U_t - div(grad U) = (-1 + 2 pi^2) U, so f = (2 pi^2 - 1) U.
    p.space_dim = 2;
    p.constant_coefficients = true;
    p.alpha = 1.0;
    auto u = [](const double* y) {
      return std::exp(-y[2]) * std::sin(kPi * y[0]) * std::sin(kPi * y[1]);
    };
    p.source = [u](const double* y) { return (2.0 * kPi * kPi - 1.0) * u(y); };
    p.boundary = u;
    p.exact = u;
    p.exact_grad = [u](const double* y, double* g) {
      const double e = std::exp(-y[2]);
      g[0] = kPi * e * std::cos(kPi * y[0]) * std::sin(kPi * y[1]);
      g[1] = kPi * e * std::sin(kPi * y[0]) * std::cos(kPi * y[1]);
      g[2] = -u(y);
    };
  } else if (name == "heat1d") {
    // U = e^{-t} sin(pi x): U_t - U_xx = (pi^2 - 1) U.
    p.space_dim = 1;
    p.constant_coefficients = true;
    p.alpha = 1.0;
    auto u = [](const double* y) { return std::exp(-y[1]) * std::sin(kPi * y[0]); };
    p.source = [u](const double* y) { return (kPi * kPi - 1.0) * u(y); };
    p.boundary = u;
    p.exact = u;
    p.exact_grad = [u](const double* y, double* g) {
      g[0] = kPi * std::exp(-y[1]) * std::cos(kPi * y[0]);
      g[1] = -u(y);
    };
  } else if (name == "zero") {
    p.space_dim = 2;
    p.constant_coefficients = true;
    p.alpha = 1.0;
    p.source = [](const double*) { return 0.0; };
    p.boundary = [](const double*) { return 0.0; };
    p.exact = [](const double*) { return 0.0; };
    p.exact_grad = [](const double*, double* g) { g[0] = g[1] = g[2] = 0.0; };
  } else if (name == "oscillating-convection") {
    // u_t - div(grad u - b u) = 1 with b = (100 sin(6 pi t), 0), zero data.
    p.space_dim = 2;
    p.constant_coefficients = false;
    p.convection = [](const double* y, double* b) {
      b[0] = 100.0 * std::sin(6.0 * kPi * y[2]);
      b[1] = 0.0;
    };
    p.source = [](const double*) { return 1.0; };
    p.boundary = [](const double*) { return 0.0; };
  } else if (name == "steady2d") {
    // Steady convection-diffusion -div(grad U - beta U) + U = f with
    // beta = (2, 1) and U = sin(pi x) sin(pi y):
    // f = 2 pi^2 U + beta . grad U + U.
    p.space_dim = 2;
    p.space_time = false;
    p.gamma = 1.0;
    p.constant_coefficients = true;
    p.alpha = 1.0;
    p.beta = {2.0, 1.0};
    p.convection = [](const double*, double* b) {
      b[0] = 2.0;
      b[1] = 1.0;
    };
    auto u = [](const double* y) { return std::sin(kPi * y[0]) * std::sin(kPi * y[1]); };
    p.source = [u](const double* y) {
      const double gx = kPi * std::cos(kPi * y[0]) * std::sin(kPi * y[1]);
      const double gy = kPi * std::sin(kPi * y[0]) * std::cos(kPi * y[1]);
      return 2.0 * kPi * kPi * u(y) + 2.0 * gx + 1.0 * gy + u(y);
    };
    p.boundary = u;
    p.exact = u;
    p.exact_grad = [](const double* y, double* g) {
      g[0] = kPi * std::cos(kPi * y[0]) * std::sin(kPi * y[1]);
      g[1] = kPi * std::sin(kPi * y[0]) * std::cos(kPi * y[1]);
    };
  } else if (name == "two-point-steady") {
    return make_two_point_steady(10.0);
  } else {
    throw std::invalid_argument("unknown preset: " + name);
  }
  return p;
}

std::vector<std::string> preset_names() {
  return {"heat2d", "heat1d", "zero", "oscillating-convection", "steady2d",
          "two-point-steady"};
}

SpaceTimeProblem make_two_point_steady(double beta) {
  SpaceTimeProblem p;
  p.name = "two-point-steady";
  p.space_dim = 1;
  p.space_time = false;
  p.constant_coefficients = true;
  p.alpha = 1.0;
  p.beta = {beta, 0.0};
  p.convection = [beta](const double*, double* b) { b[0] = beta; };
  p.source = [](const double*) { return 0.0; };
  p.boundary = [](const double* y) { return y[0] > 0.5 ? 1.0 : 0.0; };
  // -(u' - beta u)' = 0 with u(0)=0, u(1)=1 has u = (e^{beta x}-1)/(e^beta-1);
  // expm1 keeps the ratio accurate for small beta.
  p.exact = [beta](const double* y) { return std::expm1(beta * y[0]) / std::expm1(beta); };
  p.exact_grad = [beta](const double* y, double* g) {
    g[0] = beta * std::exp(beta * y[0]) / std::expm1(beta);
  };
  return p;
}

SpaceTimeProblem time_rescale(const SpaceTimeProblem& problem, double kappa) {
  if (kappa <= 0.0) throw std::invalid_argument("time_rescale: kappa must be positive");
  if (!problem.space_time)
    throw std::invalid_argument("time_rescale: problem has no time axis");
  auto base = std::make_shared<const SpaceTimeProblem>(problem);
  const int td = base->space_dim;  // index of the time coordinate

  auto pull_back = [td, kappa](const double* y, double* yp) {
    for (int k = 0; k < td; ++k) yp[k] = y[k];
    yp[td] = y[td] / kappa;
  };

  SpaceTimeProblem r = problem;
  r.t_max = kappa * problem.t_max;
  r.alpha = problem.alpha / kappa;
  r.beta = {problem.beta[0] / kappa, problem.beta[1] / kappa};
  r.gamma = problem.gamma / kappa;
  if (base->diffusion)
    r.diffusion = [base, pull_back, kappa](const double* y, double* k) {
      double yp[3];
      pull_back(y, yp);
      base->diffusion(yp, k);
      const int ds = base->space_dim;
      for (int i = 0; i < ds * ds; ++i) k[i] /= kappa;
    };
  else
    r.diffusion = [base, kappa](const double*, double* k) {
      const int ds = base->space_dim;
      for (int i = 0; i < ds * ds; ++i) k[i] = 0.0;
      for (int i = 0; i < ds; ++i) k[i * ds + i] = base->alpha / kappa;
    };
  if (base->convection)
    r.convection = [base, pull_back, kappa](const double* y, double* b) {
      double yp[3];
      pull_back(y, yp);
      base->convection(yp, b);
      for (int i = 0; i < base->space_dim; ++i) b[i] /= kappa;
    };
  if (base->source)
    r.source = [base, pull_back, kappa](const double* y) {
      double yp[3];
      pull_back(y, yp);
      return base->source(yp) / kappa;
    };
  if (base->boundary)
    r.boundary = [base, pull_back](const double* y) {
      double yp[3];
      pull_back(y, yp);
      return base->boundary(yp);
    };
  if (base->exact)
    r.exact = [base, pull_back](const double* y) {
      double yp[3];
      pull_back(y, yp);
      return base->exact(yp);
    };
  if (base->exact_grad)
    r.exact_grad = [base, pull_back, td, kappa](const double* y, double* g) {
      double yp[3];
      pull_back(y, yp);
      base->exact_grad(yp, g);
      g[td] /= kappa;
    };
  return r;
}

}  // namespace stfe
