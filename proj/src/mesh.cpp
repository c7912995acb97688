#include "stfe/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <stdexcept>

namespace stfe {
namespace {

double det_n(const SimplexMesh& mesh, const int* v) {
  const int n = mesh.dim;
  double m[9];
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      m[i * n + j] = mesh.vertex(v[i + 1])[j] - mesh.vertex(v[0])[j];
  if (n == 1) return m[0];
  if (n == 2) return m[0] * m[3] - m[1] * m[2];
  return m[0] * (m[4] * m[8] - m[5] * m[7]) - m[1] * (m[3] * m[8] - m[5] * m[6]) +
         m[2] * (m[3] * m[7] - m[4] * m[6]);
}

double factorial(int n) {
  double f = 1.0;
  for (int i = 2; i <= n; ++i) f *= i;
  return f;
}

void orient_cell(SimplexMesh& mesh, int c) {
  int* v = &mesh.cells[std::size_t(c) * (mesh.dim + 1)];
  const double d = det_n(mesh, v);
  if (d == 0.0) throw std::runtime_error("mesh: degenerate simplex");
  if (d < 0.0) std::swap(v[0], v[1]);
}

void compute_mesh_size(SimplexMesh& mesh) {
  double h = 0.0;
  for (int c = 0; c < mesh.ncells(); ++c) h = std::max(h, cell_diameter(mesh, c));
  mesh.mesh_size_h = h;
}

}  // namespace

double cell_volume(const SimplexMesh& mesh, int c) {
  return det_n(mesh, mesh.cell(c)) / factorial(mesh.dim);
}

double cell_diameter(const SimplexMesh& mesh, int c) {
  const int n = mesh.dim;
  const int* v = mesh.cell(c);
  double h2 = 0.0;
  for (int a = 0; a <= n; ++a)
    for (int b = a + 1; b <= n; ++b) {
      double d2 = 0.0;
      for (int k = 0; k < n; ++k) {
        const double d = mesh.vertex(v[a])[k] - mesh.vertex(v[b])[k];
        d2 += d * d;
      }
      h2 = std::max(h2, d2);
    }
  return std::sqrt(h2);
}

SimplexMesh build_box_mesh(const std::vector<int>& divisions,
                           const std::vector<double>& lo,
                           const std::vector<double>& hi, bool has_time) {
  const int n = int(divisions.size());
  if (n < 1 || n > 3) throw std::invalid_argument("build_box_mesh: dimension must be 1..3");
  if (lo.size() != std::size_t(n) || hi.size() != std::size_t(n))
    throw std::invalid_argument("build_box_mesh: extents mismatch dimensions");
  for (int k = 0; k < n; ++k) {
    if (divisions[k] < 1) throw std::invalid_argument("build_box_mesh: divisions must be >= 1");
    if (!(hi[k] > lo[k])) throw std::invalid_argument("build_box_mesh: degenerate extents");
  }

  SimplexMesh mesh;
  mesh.dim = n;
  mesh.has_time = has_time;
  mesh.t_max = has_time ? hi[n - 1] : 0.0;

  // Lexicographic vertex grid: index = i0 + (N0+1)*(i1 + (N1+1)*i2).
  std::array<int, 3> np{1, 1, 1};
  for (int k = 0; k < n; ++k) np[k] = divisions[k] + 1;
  const int nv = np[0] * np[1] * np[2];
  mesh.coords.resize(std::size_t(nv) * n);
  for (int i2 = 0; i2 < np[2]; ++i2)
    for (int i1 = 0; i1 < np[1]; ++i1)
      for (int i0 = 0; i0 < np[0]; ++i0) {
        const int id = i0 + np[0] * (i1 + np[1] * i2);
        const int idx[3] = {i0, i1, i2};
        for (int k = 0; k < n; ++k)
          mesh.coords[std::size_t(id) * n + k] =
              lo[k] + (hi[k] - lo[k]) * double(idx[k]) / double(divisions[k]);
      }

  // Kuhn splitting: walk from the low corner of each box along axis
  // permutations; all simplices share the box's main diagonal.
  std::vector<int> perm(n);
  std::array<int, 3> nb{1, 1, 1};
  for (int k = 0; k < n; ++k) nb[k] = divisions[k];
  auto vid = [&](int i0, int i1, int i2) { return i0 + np[0] * (i1 + np[1] * i2); };
  for (int b2 = 0; b2 < nb[2]; ++b2)
    for (int b1 = 0; b1 < nb[1]; ++b1)
      for (int b0 = 0; b0 < nb[0]; ++b0) {
        std::iota(perm.begin(), perm.end(), 0);
        do {
          int idx[3] = {b0, b1, b2};
          mesh.cells.push_back(vid(idx[0], idx[1], idx[2]));
          for (int step = 0; step < n; ++step) {
            idx[perm[step]] += 1;
            mesh.cells.push_back(vid(idx[0], idx[1], idx[2]));
          }
        } while (std::next_permutation(perm.begin(), perm.end()));
      }
  for (int c = 0; c < mesh.ncells(); ++c) orient_cell(mesh, c);
  classify_boundary(mesh);
  compute_mesh_size(mesh);
  return mesh;
}

SimplexMesh unit_box_mesh(int space_dim, int n_per_axis, bool with_time, double t_max) {
  const int n = space_dim + (with_time ? 1 : 0);
  std::vector<int> div(n, n_per_axis);
  std::vector<double> lo(n, 0.0), hi(n, 1.0);
  if (with_time) hi[n - 1] = t_max;
  return build_box_mesh(div, lo, hi, with_time);
}

void classify_boundary(SimplexMesh& mesh) {
  const int n = mesh.dim;
  mesh.facets.clear();
  // Count facet incidence by sorted vertex tuple.
  std::map<std::array<int, 3>, std::pair<int, int>> incidence;  // key -> (count, cell)
  for (int c = 0; c < mesh.ncells(); ++c) {
    const int* v = mesh.cell(c);
    for (int drop = 0; drop <= n; ++drop) {
      std::array<int, 3> key{-1, -1, -1};
      int p = 0;
      for (int a = 0; a <= n; ++a)
        if (a != drop) key[p++] = v[a];
      std::sort(key.begin(), key.begin() + n);
      auto [it, inserted] = incidence.try_emplace(key, std::pair<int, int>{0, c});
      it->second.first += 1;
    }
  }
  const double t_tol = 1e-12 * std::max(1.0, std::fabs(mesh.t_max));
  for (const auto& [key, cc] : incidence) {
    if (cc.first == 1) {
      Facet f;
      f.v = key;
      f.cell = cc.second;
      if (mesh.has_time) {
        bool all0 = true, allT = true;
        for (int a = 0; a < n; ++a) {
          const double t = mesh.vertex(key[a])[n - 1];
          all0 &= std::fabs(t) <= t_tol;
          allT &= std::fabs(t - mesh.t_max) <= t_tol;
        }
        f.role = all0 ? BoundaryRole::DirichletInitial
                      : (allT ? BoundaryRole::OutflowFinal : BoundaryRole::DirichletLateral);
      } else {
        f.role = BoundaryRole::DirichletLateral;
      }
      mesh.facets.push_back(f);
    } else if (cc.first != 2) {
      throw std::runtime_error("classify_boundary: nonconforming mesh (facet count " +
                               std::to_string(cc.first) + ")");
    }
  }
}

EdgeTable build_edge_table(const SimplexMesh& mesh) {
  EdgeTable t;
  const int n = mesh.dim;
  for (int c = 0; c < mesh.ncells(); ++c) {
    const int* v = mesh.cell(c);
    for (int a = 0; a <= n; ++a)
      for (int b = a + 1; b <= n; ++b) {
        auto key = std::minmax(v[a], v[b]);
        auto [it, inserted] = t.index.try_emplace(key, t.size());
        if (inserted) t.edges.push_back(key);
      }
  }
  return t;
}

SimplexMesh uniform_refine(const SimplexMesh& mesh) {
  const int n = mesh.dim;
  const EdgeTable edges = build_edge_table(mesh);
  SimplexMesh out;
  out.dim = n;
  out.has_time = mesh.has_time;
  out.t_max = mesh.t_max;
  out.coords = mesh.coords;
  out.coords.resize(std::size_t(mesh.nv() + edges.size()) * n);
  for (int e = 0; e < edges.size(); ++e) {
    const auto [a, b] = edges.edges[e];
    for (int k = 0; k < n; ++k)
      out.coords[std::size_t(mesh.nv() + e) * n + k] =
          0.5 * (mesh.vertex(a)[k] + mesh.vertex(b)[k]);
  }
  auto mid = [&](int a, int b) { return mesh.nv() + edges.find(a, b); };
  for (int c = 0; c < mesh.ncells(); ++c) {
    const int* v = mesh.cell(c);
    if (n == 1) {
      const int m = mid(v[0], v[1]);
      out.cells.insert(out.cells.end(), {v[0], m, m, v[1]});
    } else if (n == 2) {
      const int m01 = mid(v[0], v[1]), m02 = mid(v[0], v[2]), m12 = mid(v[1], v[2]);
      out.cells.insert(out.cells.end(), {v[0], m01, m02,  //
                                         m01, v[1], m12,  //
                                         m02, m12, v[2],  //
                                         m01, m12, m02});
    } else {
      const int m01 = mid(v[0], v[1]), m02 = mid(v[0], v[2]), m03 = mid(v[0], v[3]);
      const int m12 = mid(v[1], v[2]), m13 = mid(v[1], v[3]), m23 = mid(v[2], v[3]);
      // Four corner children, then the octahedron cut along the fixed
      // diagonal (m02, m13) -- Bey's rule, which keeps refinements stable.
      out.cells.insert(out.cells.end(), {v[0], m01, m02, m03,  //
                                         m01, v[1], m12, m13,  //
                                         m02, m12, v[2], m23,  //
                                         m03, m13, m23, v[3],  //
                                         m01, m02, m03, m13,   //
                                         m01, m02, m12, m13,   //
                                         m02, m03, m13, m23,   //
                                         m02, m12, m13, m23});
    }
  }
  for (int c = 0; c < out.ncells(); ++c) orient_cell(out, c);
  classify_boundary(out);
  compute_mesh_size(out);
  return out;
}

void perturb_interior_vertices(SimplexMesh& mesh, double rel,
                               std::uint64_t seed) {
  const int n = mesh.dim;
  std::vector<char> on_boundary(mesh.nv(), 0);
  for (const Facet& f : mesh.facets)
    for (int i = 0; i < n; ++i) on_boundary[f.v[i]] = 1;

  // Shortest incident edge per vertex bounds the displacement locally.
  std::vector<double> hloc(mesh.nv(), std::numeric_limits<double>::max());
  for (int c = 0; c < mesh.ncells(); ++c) {
    const int* v = mesh.cell(c);
    for (int a = 0; a <= n; ++a)
      for (int b = a + 1; b <= n; ++b) {
        double d2 = 0.0;
        for (int k = 0; k < n; ++k) {
          const double d = mesh.vertex(v[a])[k] - mesh.vertex(v[b])[k];
          d2 += d * d;
        }
        const double len = std::sqrt(d2);
        hloc[v[a]] = std::min(hloc[v[a]], len);
        hloc[v[b]] = std::min(hloc[v[b]], len);
      }
  }

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  std::vector<double> dir(mesh.coords.size());
  for (double& d : dir) d = unit(rng);

  std::vector<double> vol0(mesh.ncells());
  for (int c = 0; c < mesh.ncells(); ++c) vol0[c] = cell_volume(mesh, c);

  const std::vector<double> base = mesh.coords;
  for (int attempt = 0; attempt < 40; ++attempt, rel *= 0.5) {
    for (int v = 0; v < mesh.nv(); ++v) {
      if (on_boundary[v]) continue;
      for (int k = 0; k < n; ++k)
        mesh.coords[std::size_t(v) * n + k] =
            base[std::size_t(v) * n + k] + rel * hloc[v] * dir[std::size_t(v) * n + k];
    }
    bool ok = true;
    for (int c = 0; c < mesh.ncells() && ok; ++c)
      ok = cell_volume(mesh, c) > 0.1 * vol0[c];
    if (ok) {
      compute_mesh_size(mesh);
      return;
    }
  }
  mesh.coords = base;  // all amplitudes failed; keep the mesh unchanged
  compute_mesh_size(mesh);
}

}  // namespace stfe
