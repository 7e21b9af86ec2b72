#include "thermovisc/mesh.hpp"

#include <cmath>
#include <iomanip>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace thermovisc {

void Mesh::finalize() {
  const int ne = n_elems(), nn = n_nodes();
  measure.assign(ne, 0.0);
  grad.assign(ne, {});
  lumped.assign(nn, 0.0);
  for (int e = 0; e < ne; ++e) {
    const auto& el = elems[e];
    if (dim == 1) {
      const double x0 = nodes[el[0]][0], x1 = nodes[el[1]][0];
      const double L = x1 - x0;
      if (!(std::fabs(L) > 0.0)) throw std::runtime_error("mesh: degenerate segment");
      measure[e] = std::fabs(L);
      grad[e][0] = {-1.0 / L, 0.0};
      grad[e][1] = {1.0 / L, 0.0};
    } else {
      const auto& p0 = nodes[el[0]];
      const auto& p1 = nodes[el[1]];
      const auto& p2 = nodes[el[2]];
      const double det = (p1[0] - p0[0]) * (p2[1] - p0[1]) - (p2[0] - p0[0]) * (p1[1] - p0[1]);
      if (!(std::fabs(det) > 0.0)) throw std::runtime_error("mesh: degenerate triangle");
      measure[e] = 0.5 * std::fabs(det);
      grad[e][0] = {(p1[1] - p2[1]) / det, (p2[0] - p1[0]) / det};
      grad[e][1] = {(p2[1] - p0[1]) / det, (p0[0] - p2[0]) / det};
      grad[e][2] = {(p0[1] - p1[1]) / det, (p1[0] - p0[0]) / det};
    }
    for (int a = 0; a <= dim; ++a) lumped[el[a]] += measure[e] / (dim + 1);
  }
  boundary_node.assign(nn, 0);
  boundary_weight.assign(nn, 0.0);
  facet_measure.assign(facets.size(), 0.0);
  for (size_t f = 0; f < facets.size(); ++f) {
    const auto& fc = facets[f];
    if (dim == 1) {
      facet_measure[f] = 1.0;
      boundary_node[fc.v[0]] = 1;
      boundary_weight[fc.v[0]] += 1.0;
    } else {
      const auto& a = nodes[fc.v[0]];
      const auto& b = nodes[fc.v[1]];
      const double L = std::hypot(b[0] - a[0], b[1] - a[1]);
      facet_measure[f] = L;
      for (int k = 0; k < 2; ++k) {
        boundary_node[fc.v[k]] = 1;
        boundary_weight[fc.v[k]] += 0.5 * L;
      }
    }
  }
}

double Mesh::volume() const {
  double s = 0.0;
  for (double m : measure) s += m;
  return s;
}

Mesh build_mesh(const MeshSpec& spec) {
  if (spec.dim != 1 && spec.dim != 2) throw std::invalid_argument("build_mesh: dimension must be 1 or 2");
  Mesh m;
  m.dim = spec.dim;
  for (int k = 0; k < spec.dim; ++k) {
    if (spec.res[k] < 2) throw std::invalid_argument("build_mesh: resolution must be at least 2 nodes per axis");
    if (!(spec.hi[k] > spec.lo[k])) throw std::invalid_argument("build_mesh: degenerate extents");
  }
  if (spec.dim == 1) {
    const int n = spec.res[0];
    for (int i = 0; i < n; ++i)
      m.nodes.push_back({spec.lo[0] + (spec.hi[0] - spec.lo[0]) * i / (n - 1), 0.0});
    for (int i = 0; i + 1 < n; ++i) m.elems.push_back({i, i + 1, -1});
    Facet f0, f1;
    f0.v = {0, -1};
    f1.v = {n - 1, -1};
    m.facets = {f0, f1};
  } else {
    const int nx = spec.res[0], ny = spec.res[1];
    auto id = [nx](int i, int j) { return j * nx + i; };
    for (int j = 0; j < ny; ++j)
      for (int i = 0; i < nx; ++i)
        m.nodes.push_back({spec.lo[0] + (spec.hi[0] - spec.lo[0]) * i / (nx - 1),
                           spec.lo[1] + (spec.hi[1] - spec.lo[1]) * j / (ny - 1)});
    for (int j = 0; j + 1 < ny; ++j)
      for (int i = 0; i + 1 < nx; ++i) {
        const int a = id(i, j), b = id(i + 1, j), c = id(i + 1, j + 1), d = id(i, j + 1);
        m.elems.push_back({a, b, c});
        m.elems.push_back({a, c, d});
      }
    auto add = [&m](int a, int b) {
      Facet f;
      f.v = {a, b};
      m.facets.push_back(f);
    };
    for (int i = 0; i + 1 < nx; ++i) add(id(i, 0), id(i + 1, 0));
    for (int j = 0; j + 1 < ny; ++j) add(id(nx - 1, j), id(nx - 1, j + 1));
    for (int i = nx - 1; i > 0; --i) add(id(i, ny - 1), id(i - 1, ny - 1));
    for (int j = ny - 1; j > 0; --j) add(id(0, j), id(0, j - 1));
  }
  m.finalize();
  return m;
}

void write_mesh(std::ostream& os, const Mesh& m) {
  os << std::setprecision(17);
  os << "MESH " << m.dim << ' ' << m.n_nodes() << ' ' << m.n_elems() << ' ' << m.facets.size() << '\n';
  for (const auto& p : m.nodes) {
    os << p[0];
    if (m.dim == 2) os << ' ' << p[1];
    os << '\n';
  }
  for (const auto& e : m.elems) {
    for (int a = 0; a <= m.dim; ++a) os << (a ? " " : "") << e[a];
    os << '\n';
  }
  for (const auto& f : m.facets) {
    os << f.v[0];
    if (m.dim == 2) os << ' ' << f.v[1];
    os << " u:" << f.u_tag << " theta:" << f.theta_tag << '\n';
  }
}

Mesh read_mesh(std::istream& is) {
  std::string magic;
  Mesh m;
  size_t nn = 0, ne = 0, nf = 0;
  if (!(is >> magic >> m.dim >> nn >> ne >> nf) || magic != "MESH")
    throw std::runtime_error("read_mesh: bad header");
  m.nodes.resize(nn);
  for (auto& p : m.nodes) {
    p = {0.0, 0.0};
    for (int k = 0; k < m.dim; ++k) is >> p[k];
  }
  m.elems.resize(ne);
  for (auto& e : m.elems) {
    e = {-1, -1, -1};
    for (int a = 0; a <= m.dim; ++a) is >> e[a];
  }
  m.facets.resize(nf);
  for (auto& f : m.facets) {
    is >> f.v[0];
    if (m.dim == 2) is >> f.v[1];
    std::string tu, tt;
    is >> tu >> tt;
    if (tu.rfind("u:", 0) != 0 || tt.rfind("theta:", 0) != 0) throw std::runtime_error("read_mesh: bad facet tags");
    f.u_tag = tu.substr(2);
    f.theta_tag = tt.substr(6);
  }
  if (!is) throw std::runtime_error("read_mesh: truncated input");
  m.finalize();
  return m;
}

}  // namespace thermovisc
