#pragma once

#include <array>
#include <functional>
#include <string>
#include <vector>

#include "stfe/geometry.hpp"

namespace stfe {

// A parabolic problem u_t - div(K grad u - beta u) + gamma u = f posed on a
// space-time cylinder, treated as stationary convection-diffusion in the
// coordinates y = (x, t).  With space_time = false the same type describes a
// plain steady convection-diffusion problem in x alone.
struct SpaceTimeProblem {
  std::string name;
  int space_dim = 2;       // d_s in {1, 2}
  bool space_time = true;  // adds the time axis as the last coordinate
  double t_max = 1.0;
  double gamma = 0.0;
  double eps = 1e-5;  // diffusion assigned to the time direction by the EAFE closure

  // Coefficient callbacks over y = (x[, t]).
  std::function<void(const double* y, double* k)> diffusion;   // d_s x d_s row-major
  std::function<void(const double* y, double* b)> convection;  // d_s components
  std::function<double(const double* y)> source;
  std::function<double(const double* y)> boundary;  // Dirichlet data on lateral and initial parts

  // Optional exact solution for error reporting; gradient has mesh_dim() components.
  std::function<double(const double* y)> exact;
  std::function<void(const double* y, double* g)> exact_grad;

  // Constant-coefficient view; required by the streamline-diffusion scheme
  // (K = alpha I, constant beta, constant gamma).
  bool constant_coefficients = false;
  double alpha = 1.0;
  std::array<double, 2> beta{};

  int mesh_dim() const { return space_dim + (space_time ? 1 : 0); }
  bool has_exact() const { return static_cast<bool>(exact); }
};

// Per-element coefficient freeze at the barycenter: D = diag(K, eps) and
// b = (beta, 1) in space-time mode, D = K and b = beta in steady mode;
// q = D^{-1} b.
struct ElementCoefficients {
  int n = 0;
  double D[3][3] = {};
  double b[3] = {};
  double q[3] = {};
  double gamma = 0.0;
};

ElementCoefficients freeze_coefficients(const SpaceTimeProblem& problem,
                                        const ElementGeometry& geom);

// Named presets used by the command line and the test drivers.
SpaceTimeProblem make_preset(const std::string& name);
std::vector<std::string> preset_names();

// Steady two-point problem -(u' - beta u)' = 0, u(0)=0, u(1)=1, whose exact
// solution (e^{beta x} - 1)/(e^beta - 1) is reproduced nodally by the
// Scharfetter-Gummel scheme.
SpaceTimeProblem make_two_point_steady(double beta);

// Rescales time by kappa: t~ = kappa t, t_max -> kappa t_max, and
// (alpha, beta, gamma, f) -> (alpha, beta, gamma, f)/kappa, so that the
// solution field is carried over as u~(x, t~) = u(x, t~/kappa).
SpaceTimeProblem time_rescale(const SpaceTimeProblem& problem, double kappa);

}  // namespace stfe
