#include "febe/spaces.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <stdexcept>

#include "febe/quadrature.hpp"

namespace febe {

namespace {

struct EdgeInfo {
  int degree = 0;       // minimum rule; 0 = unset
  EdgeTag tag = EdgeTag::None;
  int dof_begin = -1;   // first edge-mode DOF, -1 if none/eliminated
};

using EdgeKey = std::pair<int, int>;

EdgeKey key_of(int a, int b) { return {std::min(a, b), std::max(a, b)}; }

}  // namespace

FeSpace build_fe_space(const Mesh2D& mesh) {
  FeSpace sp;
  sp.mesh = &mesh;
  const int ne = static_cast<int>(mesh.elements.size());
  const int nv = static_cast<int>(mesh.vertices.size());

  std::map<EdgeKey, EdgeInfo> edges;
  for (int k = 0; k < ne; ++k)
    for (int e = 0; e < mesh.elements[k].nedges(); ++e) {
      auto [a, b] = mesh.edge(k, e);
      EdgeInfo& info = edges[key_of(a, b)];
      info.degree = info.degree == 0 ? mesh.elements[k].degree
                                     : std::min(info.degree, mesh.elements[k].degree);
      if (mesh.edge_tags[k][e] != EdgeTag::None) info.tag = mesh.edge_tags[k][e];
    }

  std::vector<bool> v_dirichlet(nv, false), v_interface(nv, false);
  for (const auto& [k, info] : edges) {
    if (info.tag == EdgeTag::Dirichlet) v_dirichlet[k.first] = v_dirichlet[k.second] = true;
    if (info.tag == EdgeTag::Interface) v_interface[k.first] = v_interface[k.second] = true;
  }

  std::vector<int> v_dof(nv, -1);
  int next = 0;
  // outer block: vertices, edge modes, interior modes without interface support
  for (int v = 0; v < nv; ++v)
    if (!v_dirichlet[v] && !v_interface[v]) v_dof[v] = next++;
  for (auto& [k, info] : edges) {
    if (info.tag == EdgeTag::Dirichlet || info.tag == EdgeTag::Interface) continue;
    if (info.degree >= 2) {
      info.dof_begin = next;
      next += info.degree - 1;
    }
  }
  std::vector<int> interior_begin(ne, -1);
  for (int k = 0; k < ne; ++k) {
    LocalBasisSpec spec;
    spec.triangle = mesh.elements[k].kind == ElemKind::Triangle;
    spec.degree = mesh.elements[k].degree;
    for (int e = 0; e < mesh.elements[k].nedges(); ++e) {
      auto [a, b] = mesh.edge(k, e);
      spec.edge_degree[e] = edges[key_of(a, b)].degree;
      spec.edge_flip[e] = a > b;
    }
    sp.specs.push_back(spec);
    if (spec.num_interior() > 0) {
      interior_begin[k] = next;
      next += spec.num_interior();
    }
  }
  sp.n_outer = next;
  // interface block
  for (int v = 0; v < nv; ++v)
    if (!v_dirichlet[v] && v_interface[v]) v_dof[v] = next++;
  for (auto& [k, info] : edges) {
    if (info.tag != EdgeTag::Interface) continue;
    if (info.degree >= 2) {
      info.dof_begin = next;
      next += info.degree - 1;
    }
  }
  sp.n_interface = next - sp.n_outer;

  for (int k = 0; k < ne; ++k) {
    const LocalBasisSpec& spec = sp.specs[k];
    std::vector<int> map(spec.size(), -1);
    for (int i = 0; i < spec.num_vertices(); ++i) map[i] = v_dof[mesh.elements[k].v[i]];
    for (int e = 0; e < spec.num_edges(); ++e) {
      auto [a, b] = mesh.edge(k, e);
      const EdgeInfo& info = edges[key_of(a, b)];
      for (int m = 0; m < spec.num_edge_modes(e); ++m)
        map[spec.edge_dof_begin(e) + m] = info.dof_begin < 0 ? -1 : info.dof_begin + m;
    }
    for (int m = 0; m < spec.num_interior(); ++m)
      map[spec.interior_dof_begin() + m] = interior_begin[k] + m;
    sp.ldof.push_back(std::move(map));
  }
  return sp;
}

double FeSpace::eval(const Eigen::VectorXd& u, int elem, double xi, double eta) const {
  std::vector<double> v;
  shape_values(specs[elem], xi, eta, v);
  double s = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i)
    if (ldof[elem][i] >= 0) s += u[ldof[elem][i]] * v[i];
  return s;
}

Eigen::Vector2d FeSpace::eval_grad(const Eigen::VectorXd& u, int elem, double xi,
                                   double eta) const {
  std::vector<double> v, dx, dy;
  shape_values_grads(specs[elem], xi, eta, v, dx, dy);
  Eigen::Vector2d gref = Eigen::Vector2d::Zero();
  for (std::size_t i = 0; i < v.size(); ++i)
    if (ldof[elem][i] >= 0) gref += u[ldof[elem][i]] * Eigen::Vector2d(dx[i], dy[i]);
  Eigen::Matrix2d B;
  Eigen::Vector2d b;
  mesh->affine(elem, B, b);
  return B.transpose().fullPivLu().solve(gref);
}

double FeSpace::eval_edge(const Eigen::VectorXd& u, int elem, int e, double t) const {
  std::vector<double> v;
  shape_edge_trace(specs[elem], e, t, v);
  double s = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i)
    if (ldof[elem][i] >= 0) s += u[ldof[elem][i]] * v[i];
  return s;
}

BeTraceSpace build_be_trace_space(const BoundaryMesh& bm) {
  BeTraceSpace sp;
  sp.bm = &bm;
  const int np = static_cast<int>(bm.panels.size());
  const int nv = static_cast<int>(bm.vertices.size());
  std::vector<bool> v_dirichlet(nv, false), v_interface(nv, false);
  for (const Panel& p : bm.panels) {
    if (p.tag == EdgeTag::Dirichlet) v_dirichlet[p.a] = v_dirichlet[p.b] = true;
    if (p.tag == EdgeTag::Interface) v_interface[p.a] = v_interface[p.b] = true;
  }
  std::vector<int> v_dof(nv, -1);
  int next = 0;
  // interface block first
  for (int v = 0; v < nv; ++v)
    if (!v_dirichlet[v] && v_interface[v]) v_dof[v] = next++;
  std::vector<int> mode_begin(np, -1);
  for (int j = 0; j < np; ++j) {
    const Panel& p = bm.panels[j];
    if (p.tag != EdgeTag::Interface || p.degree < 2) continue;
    mode_begin[j] = next;
    next += p.degree - 1;
  }
  sp.n_interface = next;
  for (int v = 0; v < nv; ++v)
    if (!v_dirichlet[v] && !v_interface[v]) v_dof[v] = next++;
  for (int j = 0; j < np; ++j) {
    const Panel& p = bm.panels[j];
    if (p.tag == EdgeTag::Dirichlet || p.tag == EdgeTag::Interface || p.degree < 2) continue;
    mode_begin[j] = next;
    next += p.degree - 1;
  }
  sp.n_outer = next - sp.n_interface;

  for (int j = 0; j < np; ++j) {
    const Panel& p = bm.panels[j];
    std::vector<int> map(p.degree + 1, -1);
    if (p.tag != EdgeTag::Dirichlet) {
      map[0] = v_dof[p.a];
      map[1] = v_dof[p.b];
      for (int m = 0; m + 2 <= p.degree; ++m)
        map[2 + m] = mode_begin[j] < 0 ? -1 : mode_begin[j] + m;
    }
    sp.ldof.push_back(std::move(map));
  }
  return sp;
}

double BeTraceSpace::eval(const Eigen::VectorXd& u, int panel, double t) const {
  const std::vector<int>& map = ldof[panel];
  std::vector<double> v;
  basis_1d(static_cast<int>(map.size()) - 1, t, v);
  double s = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i)
    if (map[i] >= 0) s += u[map[i]] * v[i];
  return s;
}

double BeTraceSpace::eval_dt(const Eigen::VectorXd& u, int panel, double t) const {
  const std::vector<int>& map = ldof[panel];
  std::vector<double> v, dv;
  basis_1d_d1(static_cast<int>(map.size()) - 1, t, v, dv);
  double s = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i)
    if (map[i] >= 0) s += u[map[i]] * dv[i];
  return s;
}

BeFluxSpace build_be_flux_space(const BoundaryMesh& bm) {
  BeFluxSpace sp;
  sp.bm = &bm;
  sp.offset.assign(bm.panels.size() + 1, 0);
  for (std::size_t j = 0; j < bm.panels.size(); ++j)
    sp.offset[j + 1] = sp.offset[j] + bm.panels[j].degree + 1;
  return sp;
}

double BeFluxSpace::eval(const Eigen::VectorXd& u, int panel, double t) const {
  const int p = panel_dim(panel) - 1;
  std::vector<double> leg;
  legendre_all(2.0 * t - 1.0, p, leg);
  double s = 0.0;
  for (int k = 0; k <= p; ++k) s += u[offset[panel] + k] * leg[k];
  return s;
}

namespace {
int floor_tol(double x) { return static_cast<int>(std::floor(x + 1e-9)); }
}  // namespace

void assign_linear_degrees(Mesh2D& mesh, int layers, double mu) {
  if (mu <= 0.0) throw std::invalid_argument("assign_linear_degrees: mu must be positive");
  for (Element& el : mesh.elements) {
    const int j = el.layer >= 0 ? el.layer : layers;
    el.degree = std::max(j + 1, floor_tol(mu * (j + 1)));
  }
}

void assign_linear_degrees(BoundaryMesh& bm, int layers, double mu) {
  if (mu <= 0.0) throw std::invalid_argument("assign_linear_degrees: mu must be positive");
  for (Panel& p : bm.panels) {
    const int j = p.layer >= 1 ? p.layer : layers + 1;
    p.degree = j == 1 ? 1 : std::max(2, floor_tol(mu * j));
  }
}

void set_uniform_degree(Mesh2D& mesh, int p) {
  if (p < 1) throw std::invalid_argument("set_uniform_degree: p must be >= 1");
  for (Element& el : mesh.elements) el.degree = p;
}

void set_uniform_degree(BoundaryMesh& bm, int p) {
  if (p < 1) throw std::invalid_argument("set_uniform_degree: p must be >= 1");
  for (Panel& pa : bm.panels) pa.degree = p;
}

namespace {

// L2 projection of g onto the interior modes N_2..N_p on [0,1].
Eigen::VectorXd project_edge_modes(int p, const std::function<double(double)>& g) {
  const int m = p - 1;
  Eigen::MatrixXd M = Eigen::MatrixXd::Zero(m, m);
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(m);
  const QuadRule q = gauss_legendre(p + 8);
  std::vector<double> v;
  for (std::size_t i = 0; i < q.size(); ++i) {
    basis_1d(p, q.nodes[i], v);
    const double gv = g(q.nodes[i]);
    for (int a = 0; a < m; ++a) {
      rhs[a] += q.weights[i] * v[a + 2] * gv;
      for (int b = 0; b < m; ++b) M(a, b) += q.weights[i] * v[a + 2] * v[b + 2];
    }
  }
  return M.ldlt().solve(rhs);
}

}  // namespace

Eigen::VectorXd interpolate(const FeSpace& space, const ScalarField& f) {
  const Mesh2D& mesh = *space.mesh;
  Eigen::VectorXd u = Eigen::VectorXd::Zero(space.size());
  // vertex values
  for (std::size_t k = 0; k < mesh.elements.size(); ++k)
    for (int i = 0; i < mesh.elements[k].nv(); ++i) {
      const int g = space.ldof[k][i];
      if (g >= 0) u[g] = f(mesh.vertices[mesh.elements[k].v[i]]);
    }
  // edge modes, once per global edge
  std::set<EdgeKey> done;
  for (std::size_t k = 0; k < mesh.elements.size(); ++k) {
    const LocalBasisSpec& spec = space.specs[k];
    for (int e = 0; e < spec.num_edges(); ++e) {
      if (spec.num_edge_modes(e) == 0) continue;
      auto [a, b] = mesh.edge(k, e);
      if (space.ldof[k][spec.edge_dof_begin(e)] < 0) continue;
      const EdgeKey key = key_of(a, b);
      if (!done.insert(key).second) continue;
      const Point2 A = mesh.vertices[key.first], B = mesh.vertices[key.second];
      const double fa = f(A), fb = f(B);
      auto g = [&](double t) { return f(A + t * (B - A)) - ((1.0 - t) * fa + t * fb); };
      const Eigen::VectorXd c = project_edge_modes(spec.edge_degree[e], g);
      for (int m = 0; m < spec.num_edge_modes(e); ++m)
        u[space.ldof[k][spec.edge_dof_begin(e) + m]] = c[m];
    }
  }
  // interior modes by local L2 projection of the remainder
  for (std::size_t k = 0; k < mesh.elements.size(); ++k) {
    const LocalBasisSpec& spec = space.specs[k];
    const int ni = spec.num_interior();
    if (ni == 0) continue;
    const int p = spec.degree;
    const QuadRule2D q = spec.triangle ? triangle_rule(p + 5, p + 5)
                                       : tensor_rule(p + 5, p + 5);
    Eigen::Matrix2d Bm;
    Eigen::Vector2d bv;
    mesh.affine(static_cast<int>(k), Bm, bv);
    Eigen::MatrixXd M = Eigen::MatrixXd::Zero(ni, ni);
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(ni);
    std::vector<double> v;
    const int i0 = spec.interior_dof_begin();
    for (std::size_t i = 0; i < q.size(); ++i) {
      shape_values(spec, q.x[i], q.y[i], v);
      const Eigen::Vector2d x = Bm * Eigen::Vector2d(q.x[i], q.y[i]) + bv;
      double r = f({x[0], x[1]});
      for (int a = 0; a < i0; ++a)
        if (space.ldof[k][a] >= 0) r -= u[space.ldof[k][a]] * v[a];
      for (int a = 0; a < ni; ++a) {
        rhs[a] += q.w[i] * v[i0 + a] * r;
        for (int b = 0; b < ni; ++b) M(a, b) += q.w[i] * v[i0 + a] * v[i0 + b];
      }
    }
    const Eigen::VectorXd c = M.ldlt().solve(rhs);
    for (int a = 0; a < ni; ++a) u[space.ldof[k][i0 + a]] = c[a];
  }
  return u;
}

Eigen::VectorXd interpolate(const BeTraceSpace& space, const ScalarField& f) {
  const BoundaryMesh& bm = *space.bm;
  Eigen::VectorXd u = Eigen::VectorXd::Zero(space.size());
  for (std::size_t j = 0; j < bm.panels.size(); ++j) {
    const std::vector<int>& map = space.ldof[j];
    const Point2 A = bm.vertices[bm.panels[j].a], B = bm.vertices[bm.panels[j].b];
    const double fa = f(A), fb = f(B);
    if (map[0] >= 0) u[map[0]] = fa;
    if (map[1] >= 0) u[map[1]] = fb;
    if (map.size() > 2 && map[2] >= 0) {
      auto g = [&](double t) { return f(A + t * (B - A)) - ((1.0 - t) * fa + t * fb); };
      const Eigen::VectorXd c = project_edge_modes(bm.panels[j].degree, g);
      for (std::size_t m = 2; m < map.size(); ++m) u[map[m]] = c[m - 2];
    }
  }
  return u;
}

Eigen::VectorXd interpolate(const BeFluxSpace& space, const ScalarField& f) {
  const BoundaryMesh& bm = *space.bm;
  Eigen::VectorXd u = Eigen::VectorXd::Zero(space.size());
  for (std::size_t j = 0; j < bm.panels.size(); ++j) {
    const int p = space.panel_dim(static_cast<int>(j)) - 1;
    const Point2 A = bm.vertices[bm.panels[j].a], B = bm.vertices[bm.panels[j].b];
    const QuadRule q = gauss_legendre(p + 8);
    std::vector<double> leg;
    for (std::size_t i = 0; i < q.size(); ++i) {
      const double fv = f(A + q.nodes[i] * (B - A));
      legendre_all(2.0 * q.nodes[i] - 1.0, p, leg);
      for (int k = 0; k <= p; ++k)
        u[space.offset[j] + k] += (2.0 * k + 1.0) * q.weights[i] * leg[k] * fv;
    }
  }
  return u;
}

}  // namespace febe
