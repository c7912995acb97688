#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <utility>
#include <vector>

namespace stfe {

// Boundary roles for the space-time box: the initial condition becomes a
// Dirichlet face at t=0, the lateral boundary carries the usual Dirichlet
// data, and the final-time face is a free outflow face (no condition is
// imposed there; schemes add the natural outflow closure themselves).
enum class BoundaryRole : std::uint8_t {
  DirichletLateral,
  DirichletInitial,
  OutflowFinal,
};

struct Facet {
  std::array<int, 3> v{-1, -1, -1};  // first dim entries used
  BoundaryRole role = BoundaryRole::DirichletLateral;
  int cell = -1;  // the unique adjacent cell
};

// Conforming simplicial mesh in dimension n (1: intervals, 2: triangles,
// 3: tetrahedra), positively oriented cells. When has_time is set, the last
// coordinate is time and boundary facets are classified against t=0 / t_max.
struct SimplexMesh {
  int dim = 0;
  bool has_time = false;
  double t_max = 0.0;
  std::vector<double> coords;  // nv * dim
  std::vector<int> cells;      // ncells * (dim+1)
  std::vector<Facet> facets;   // boundary facets only
  double mesh_size_h = 0.0;    // max edge length

  int nv() const { return int(coords.size()) / dim; }
  int ncells() const { return int(cells.size()) / (dim + 1); }
  const double* vertex(int i) const { return &coords[std::size_t(i) * dim]; }
  const int* cell(int c) const { return &cells[std::size_t(c) * (dim + 1)]; }
};

// Tensor-box mesh via the Kuhn splitting: every grid box is cut into n!
// simplices sharing the main diagonal, which keeps neighboring boxes
// conforming and (in 2D) yields a Delaunay triangulation.
//
// divisions has one entry per axis (space axes first, then time when
// has_time); lo/hi give the box extents in the same order.
SimplexMesh build_box_mesh(const std::vector<int>& divisions,
                           const std::vector<double>& lo,
                           const std::vector<double>& hi, bool has_time);

// Convenience: unit space box [0,1]^ds (x time [0,t_max]) with N divisions
// per axis.
SimplexMesh unit_box_mesh(int space_dim, int n_per_axis, bool with_time,
                          double t_max = 1.0);

// Red refinement: every edge is bisected; triangles split into 4 children,
// tetrahedra into 8 (4 corner children plus 4 octahedron children around a
// fixed interior diagonal). Volume and boundary classification preserved.
SimplexMesh uniform_refine(const SimplexMesh& mesh);

// (Re)extract boundary facets and assign roles. Called by the builders;
// exposed for meshes assembled by hand in tests.
void classify_boundary(SimplexMesh& mesh);

// Deterministic global edge numbering (needed by quadratic elements and the
// refinement routine): edges identified by sorted vertex pairs, numbered in
// first-encounter order over cells.
struct EdgeTable {
  std::vector<std::pair<int, int>> edges;       // id -> (v0 < v1)
  std::map<std::pair<int, int>, int> index;     // (v0 < v1) -> id
  int size() const { return int(edges.size()); }
  int find(int a, int b) const {
    auto it = index.find(a < b ? std::make_pair(a, b) : std::make_pair(b, a));
    return it == index.end() ? -1 : it->second;
  }
};
EdgeTable build_edge_table(const SimplexMesh& mesh);

// Randomly displace interior vertices by up to `rel` times the shortest
// incident edge, keeping every boundary vertex fixed and every cell
// positively oriented (the amplitude is halved until orientation holds).
// Used to break the superconvergence structure of the uniform meshes in
// convergence studies. Deterministic for a given seed.
void perturb_interior_vertices(SimplexMesh& mesh, double rel,
                               std::uint64_t seed);

// Signed volume of cell c (positive for correctly oriented cells).
double cell_volume(const SimplexMesh& mesh, int c);

// Maximum-edge-length diameter of cell c.
double cell_diameter(const SimplexMesh& mesh, int c);

}  // namespace stfe
