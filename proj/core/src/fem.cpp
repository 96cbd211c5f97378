#include "febe/fem.hpp"

#include <cmath>
#include <stdexcept>

#include "febe/quadrature.hpp"

namespace febe {

namespace {

QuadRule2D element_rule(const LocalBasisSpec& spec, int extra) {
  const int n = spec.degree + 1 + extra;
  return spec.triangle ? triangle_rule(n + 1, n) : tensor_rule(n, n);
}

}  // namespace

Eigen::MatrixXd assemble_stiffness(const FeSpace& space, double kappa_scale) {
  const Mesh2D& mesh = *space.mesh;
  const int N = space.size();
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(N, N);
  std::vector<double> v, dx, dy;
  for (int k = 0; k < static_cast<int>(mesh.elements.size()); ++k) {
    const LocalBasisSpec& spec = space.specs[k];
    const QuadRule2D q = element_rule(spec, 0);
    Eigen::Matrix2d B;
    Eigen::Vector2d b;
    mesh.affine(k, B, b);
    const Eigen::Matrix2d Binv = B.inverse();
    const double jac = std::abs(B.determinant());
    const double kap = kappa_scale * mesh.elements[k].kappa;
    const int n = spec.size();
    Eigen::MatrixXd Ke = Eigen::MatrixXd::Zero(n, n);
    std::vector<Eigen::Vector2d> g(n);
    for (std::size_t i = 0; i < q.size(); ++i) {
      shape_values_grads(spec, q.x[i], q.y[i], v, dx, dy);
      for (int a = 0; a < n; ++a) g[a] = Binv.transpose() * Eigen::Vector2d(dx[a], dy[a]);
      const double w = kap * jac * q.w[i];
      for (int a = 0; a < n; ++a)
        for (int c = a; c < n; ++c) Ke(a, c) += w * g[a].dot(g[c]);
    }
    for (int a = 0; a < n; ++a)
      for (int c = a; c < n; ++c) {
        const int ga = space.ldof[k][a], gc = space.ldof[k][c];
        if (ga < 0 || gc < 0) continue;
        A(ga, gc) += Ke(a, c);
        if (ga != gc) A(gc, ga) += Ke(a, c);
      }
  }
  return A;
}

Eigen::MatrixXd assemble_mass(const FeSpace& space) {
  const Mesh2D& mesh = *space.mesh;
  const int N = space.size();
  Eigen::MatrixXd M = Eigen::MatrixXd::Zero(N, N);
  std::vector<double> v;
  for (int k = 0; k < static_cast<int>(mesh.elements.size()); ++k) {
    const LocalBasisSpec& spec = space.specs[k];
    const QuadRule2D q = element_rule(spec, 1);
    Eigen::Matrix2d B;
    Eigen::Vector2d b;
    mesh.affine(k, B, b);
    const double jac = std::abs(B.determinant());
    const int n = spec.size();
    for (std::size_t i = 0; i < q.size(); ++i) {
      shape_values(spec, q.x[i], q.y[i], v);
      const double w = jac * q.w[i];
      for (int a = 0; a < n; ++a) {
        const int ga = space.ldof[k][a];
        if (ga < 0) continue;
        for (int c = 0; c < n; ++c) {
          const int gc = space.ldof[k][c];
          if (gc >= 0) M(ga, gc) += w * v[a] * v[c];
        }
      }
    }
  }
  return M;
}

Eigen::VectorXd assemble_load(const FeSpace& space, const ScalarField& f, const ScalarField& g) {
  const Mesh2D& mesh = *space.mesh;
  Eigen::VectorXd l = Eigen::VectorXd::Zero(space.size());
  std::vector<double> v;
  for (int k = 0; k < static_cast<int>(mesh.elements.size()); ++k) {
    const LocalBasisSpec& spec = space.specs[k];
    Eigen::Matrix2d B;
    Eigen::Vector2d b;
    mesh.affine(k, B, b);
    const double jac = std::abs(B.determinant());
    if (f) {
      const QuadRule2D q = element_rule(spec, 4);
      for (std::size_t i = 0; i < q.size(); ++i) {
        const Eigen::Vector2d x = B * Eigen::Vector2d(q.x[i], q.y[i]) + b;
        const double w = jac * q.w[i] * f({x[0], x[1]});
        if (w == 0.0) continue;
        shape_values(spec, q.x[i], q.y[i], v);
        for (int a = 0; a < spec.size(); ++a)
          if (space.ldof[k][a] >= 0) l[space.ldof[k][a]] += w * v[a];
      }
    }
    if (!g) continue;
    for (int e = 0; e < mesh.elements[k].nedges(); ++e) {
      if (mesh.edge_tags[k][e] != EdgeTag::Neumann) continue;
      auto [va, vb] = mesh.edge(k, e);
      // edge parameter in the global (low id -> high id) orientation
      const Point2 A = mesh.vertices[std::min(va, vb)], Bp = mesh.vertices[std::max(va, vb)];
      const double h = dist(A, Bp);
      const QuadRule q = gauss_legendre(spec.degree + 6);
      for (std::size_t i = 0; i < q.size(); ++i) {
        const double t = q.nodes[i];
        const Point2 x = A + t * (Bp - A);
        const double w = h * q.weights[i] * g(x);
        shape_edge_trace(spec, e, t, v);
        for (int a = 0; a < spec.size(); ++a)
          if (space.ldof[k][a] >= 0) l[space.ldof[k][a]] += w * v[a];
      }
    }
  }
  return l;
}

double trace_constant(const Mesh2D& mesh, int elem, int local_edge, int degree) {
  if (local_edge < 0 || local_edge >= mesh.elements[elem].nedges())
    throw std::invalid_argument("trace_constant: invalid local edge");
  auto [a, b] = mesh.edge(elem, local_edge);
  const double J = dist(mesh.vertices[a], mesh.vertices[b]);
  const double K = mesh.element_area(elem);
  const double p = degree;
  if (mesh.elements[elem].kind == ElemKind::Triangle)
    return 0.5 * (p + 1.0) * (p + 2.0) * J / K;
  return (p + 1.0) * (p + 1.0) * J / K;
}

double trace_constant(const Mesh2D& mesh, int elem, int local_edge) {
  return trace_constant(mesh, elem, local_edge, mesh.elements[elem].degree);
}

}  // namespace febe
