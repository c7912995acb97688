#pragma once

#include <array>
#include <cmath>
#include <stdexcept>

#include "stfe/mesh.hpp"

namespace stfe {

// Per-element affine geometry: vertex coordinates, volume, barycentric
// gradients (constant on the element), barycenter and diameter. Everything
// downstream (Lagrange bases, EAFE matrices, Nedelec DOFs) is driven by
// these quantities.
struct ElementGeometry {
  int n = 0;
  std::array<std::array<double, 3>, 4> y{};      // vertex coords, y[a][k]
  std::array<std::array<double, 3>, 4> grad{};   // grad lambda_a
  std::array<double, 3> yc{};                    // barycenter
  double vol = 0.0;
  double h = 0.0;  // max edge length

  std::array<double, 3> edge_vec(int a, int b) const {  // y_b - y_a
    std::array<double, 3> d{};
    for (int k = 0; k < n; ++k) d[k] = y[b][k] - y[a][k];
    return d;
  }
};

inline ElementGeometry compute_geometry(const SimplexMesh& mesh, int c) {
  ElementGeometry g;
  const int n = mesh.dim;
  g.n = n;
  const int* v = mesh.cell(c);
  for (int a = 0; a <= n; ++a)
    for (int k = 0; k < n; ++k) g.y[a][k] = mesh.vertex(v[a])[k];

  // B columns are edge vectors from vertex 0; grads 1..n are rows of B^{-1}.
  double B[3][3] = {};
  for (int i = 0; i < n; ++i)
    for (int k = 0; k < n; ++k) B[k][i] = g.y[i + 1][k] - g.y[0][k];
  double det = 0.0, inv[3][3] = {};
  if (n == 1) {
    det = B[0][0];
    inv[0][0] = 1.0 / det;
  } else if (n == 2) {
    det = B[0][0] * B[1][1] - B[0][1] * B[1][0];
    inv[0][0] = B[1][1] / det;
    inv[0][1] = -B[0][1] / det;
    inv[1][0] = -B[1][0] / det;
    inv[1][1] = B[0][0] / det;
  } else {
    const double c00 = B[1][1] * B[2][2] - B[1][2] * B[2][1];
    const double c01 = B[1][2] * B[2][0] - B[1][0] * B[2][2];
    const double c02 = B[1][0] * B[2][1] - B[1][1] * B[2][0];
    det = B[0][0] * c00 + B[0][1] * c01 + B[0][2] * c02;
    inv[0][0] = c00 / det;
    inv[1][0] = c01 / det;
    inv[2][0] = c02 / det;
    inv[0][1] = (B[0][2] * B[2][1] - B[0][1] * B[2][2]) / det;
    inv[1][1] = (B[0][0] * B[2][2] - B[0][2] * B[2][0]) / det;
    inv[2][1] = (B[0][1] * B[2][0] - B[0][0] * B[2][1]) / det;
    inv[0][2] = (B[0][1] * B[1][2] - B[0][2] * B[1][1]) / det;
    inv[1][2] = (B[0][2] * B[1][0] - B[0][0] * B[1][2]) / det;
    inv[2][2] = (B[0][0] * B[1][1] - B[0][1] * B[1][0]) / det;
  }
  if (det <= 0.0) throw std::runtime_error("compute_geometry: non-positive orientation");
  double fact = 1.0;
  for (int i = 2; i <= n; ++i) fact *= i;
  g.vol = det / fact;

  // grad lambda_i = i-th row of B^{-1}; grad lambda_0 = -sum of the others.
  for (int i = 0; i < n; ++i)
    for (int k = 0; k < n; ++k) g.grad[i + 1][k] = inv[i][k];
  for (int k = 0; k < n; ++k) {
    double s = 0.0;
    for (int i = 1; i <= n; ++i) s += g.grad[i][k];
    g.grad[0][k] = -s;
  }

  for (int k = 0; k < n; ++k) {
    double s = 0.0;
    for (int a = 0; a <= n; ++a) s += g.y[a][k];
    g.yc[k] = s / (n + 1);
  }
  double h2 = 0.0;
  for (int a = 0; a <= n; ++a)
    for (int b = a + 1; b <= n; ++b) {
      double d2 = 0.0;
      for (int k = 0; k < n; ++k) {
        const double d = g.y[a][k] - g.y[b][k];
        d2 += d * d;
      }
      h2 = std::max(h2, d2);
    }
  g.h = std::sqrt(h2);
  return g;
}

}  // namespace stfe
