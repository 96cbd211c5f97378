#pragma once

#include <functional>
#include <stdexcept>
#include <vector>

namespace febe {

/// 1D quadrature rule on [0,1]; weights sum to 1 within 1e-14.
struct QuadRule {
  std::vector<double> nodes;
  std::vector<double> weights;

  std::size_t size() const { return nodes.size(); }

  double integrate(const std::function<double(double)>& f) const {
    double s = 0.0;
    for (std::size_t i = 0; i < nodes.size(); ++i) s += weights[i] * f(nodes[i]);
    return s;
  }

  /// Affine image on [a,b].
  QuadRule mapped(double a, double b) const;
};

/// 2D rule with points (x,y) and weights.
struct QuadRule2D {
  std::vector<double> x, y, w;
  std::size_t size() const { return x.size(); }
};

/// n-point Gauss-Legendre rule on [0,1], exact for degree <= 2n-1.
QuadRule gauss_legendre(int n);

/// Composite Gauss rule on [0,1] graded geometrically toward 0 with
/// cells [sigma^{layers+1-j}, sigma^{layers-j}]. Integrates endpoint
/// singularities like x^{-1/3} or log(x) to high accuracy.
QuadRule graded_rule(double sigma, int layers, int per_cell_order);

/// Tensor Gauss rule on the unit square.
QuadRule2D tensor_rule(int nx, int ny);

/// Rule on the unit triangle {(x,y): x,y>=0, x+y<=1} via the Duffy map
/// of a tensor Gauss rule; exact for polynomials of total degree
/// <= min(2*nx-2, 2*ny-1) (the map raises the x-degree by one).
QuadRule2D triangle_rule(int nx, int ny);

/// Tensor rule on the unit square graded toward the corner (0,0) in
/// both directions; for integrands with a point singularity there.
QuadRule2D corner_graded_square_rule(double sigma, int layers, int order);

/// Rule on the unit triangle graded toward the vertex (0,0).
QuadRule2D corner_graded_triangle_rule(double sigma, int layers, int order);

enum class PanelRelation { Identical, Adjacent, Disjoint };

/// Product rule for a Galerkin double integral over a pair of straight
/// panels, parameterised by arc length s in [0,h1] and t in [0,h2].
/// For Identical (h1 == h2, same panel) the diagonal log singularity is
/// resolved; for Adjacent the parameters must both start at the shared
/// vertex (s = t = 0) where the kernel is singular. Disjoint pairs get
/// a plain tensor Gauss rule.
struct PanelPairRule {
  std::vector<double> s, t, w;
  std::size_t size() const { return s.size(); }

  double integrate(const std::function<double(double, double)>& f) const {
    double acc = 0.0;
    for (std::size_t i = 0; i < s.size(); ++i) acc += w[i] * f(s[i], t[i]);
    return acc;
  }
};

PanelPairRule panel_pair_rule(PanelRelation relation, double h1, double h2, int order);

}  // namespace febe
