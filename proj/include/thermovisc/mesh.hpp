/// @file mesh.hpp
/// @brief Uniform simplicial meshes on intervals and rectangles, with geometry cache.
#pragma once

#include <array>
#include <iosfwd>
#include <string>
#include <vector>

namespace thermovisc {

struct MeshSpec {
  int dim = 1;
  std::array<double, 2> lo{0.0, 0.0};
  std::array<double, 2> hi{1.0, 1.0};
  std::array<int, 2> res{17, 1};
};

/// Boundary facet: a node in 1D, an edge in 2D. All facets carry u:dirichlet and theta:neumann.
struct Facet {
  std::array<int, 2> v{-1, -1};
  std::string u_tag = "dirichlet";
  std::string theta_tag = "neumann";
};

class Mesh {
 public:
  int dim = 1;
  std::vector<std::array<double, 2>> nodes;
  std::vector<std::array<int, 3>> elems;  // 1D uses the first two entries
  std::vector<Facet> facets;

  int n_nodes() const { return static_cast<int>(nodes.size()); }
  int n_elems() const { return static_cast<int>(elems.size()); }
  int verts_per_elem() const { return dim + 1; }

  // Geometry cache, filled by finalize().
  std::vector<double> measure;                         // |T|
  std::vector<std::array<std::array<double, 2>, 3>> grad;  // grad of barycentric lambda_j on T
  std::vector<double> lumped;                          // m_i = sum |T|/(d+1)
  std::vector<double> facet_measure;
  std::vector<char> boundary_node;
  std::vector<double> boundary_weight;                 // lumped boundary quadrature weight per node

  void finalize();
  double volume() const;
};

Mesh build_mesh(const MeshSpec& spec);

void write_mesh(std::ostream& os, const Mesh& m);
Mesh read_mesh(std::istream& is);

}  // namespace thermovisc
