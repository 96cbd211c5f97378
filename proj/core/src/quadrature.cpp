#include "febe/quadrature.hpp"

#include <cmath>

namespace febe {

QuadRule QuadRule::mapped(double a, double b) const {
  QuadRule r;
  r.nodes.reserve(nodes.size());
  r.weights.reserve(weights.size());
  const double len = b - a;
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    r.nodes.push_back(a + len * nodes[i]);
    r.weights.push_back(len * weights[i]);
  }
  return r;
}

// Golub-Welsch via Newton iteration on Legendre polynomials; nodes on
// [-1,1] are mapped to [0,1].
QuadRule gauss_legendre(int n) {
  if (n < 1) throw std::invalid_argument("gauss_legendre: n must be >= 1");
  QuadRule rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    // Chebyshev initial guess for the i-th root (descending).
    double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
    double pp = 0.0;
    for (int it = 0; it < 100; ++it) {
      // Evaluate P_n(x) and P_n'(x) by recurrence.
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      pp = n * (x * p1 - p0) / (x * x - 1.0);
      double dx = p1 / pp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    double wgt = 2.0 / ((1.0 - x * x) * pp * pp);
    rule.nodes[i] = 0.5 * (1.0 - x);  // descending x -> ascending node
    rule.nodes[n - 1 - i] = 0.5 * (1.0 + x);
    rule.weights[i] = 0.5 * wgt;
    rule.weights[n - 1 - i] = 0.5 * wgt;
  }
  return rule;
}

QuadRule graded_rule(double sigma, int layers, int per_cell_order) {
  if (!(sigma > 0.0 && sigma < 1.0)) throw std::invalid_argument("graded_rule: sigma must be in (0,1)");
  if (layers < 0) throw std::invalid_argument("graded_rule: layers must be >= 0");
  if (per_cell_order < 1) throw std::invalid_argument("graded_rule: order must be >= 1");
  const QuadRule base = gauss_legendre(per_cell_order);
  QuadRule rule;
  double lo = 0.0;
  for (int j = 0; j <= layers; ++j) {
    const double hi = std::pow(sigma, layers - j);
    const QuadRule cell = base.mapped(lo, hi);
    rule.nodes.insert(rule.nodes.end(), cell.nodes.begin(), cell.nodes.end());
    rule.weights.insert(rule.weights.end(), cell.weights.begin(), cell.weights.end());
    lo = hi;
  }
  return rule;
}

QuadRule2D tensor_rule(int nx, int ny) {
  const QuadRule gx = gauss_legendre(nx);
  const QuadRule gy = gauss_legendre(ny);
  QuadRule2D r;
  r.x.reserve(gx.size() * gy.size());
  for (std::size_t j = 0; j < gy.size(); ++j)
    for (std::size_t i = 0; i < gx.size(); ++i) {
      r.x.push_back(gx.nodes[i]);
      r.y.push_back(gy.nodes[j]);
      r.w.push_back(gx.weights[i] * gy.weights[j]);
    }
  return r;
}

QuadRule2D triangle_rule(int nx, int ny) {
  const QuadRule2D sq = tensor_rule(nx, ny);
  QuadRule2D r;
  r.x.reserve(sq.size());
  for (std::size_t i = 0; i < sq.size(); ++i) {
    // Duffy: (u,v) -> (u(1-v), u v), Jacobian u.
    const double u = sq.x[i], v = sq.y[i];
    r.x.push_back(u * (1.0 - v));
    r.y.push_back(u * v);
    r.w.push_back(sq.w[i] * u);
  }
  return r;
}

QuadRule2D corner_graded_square_rule(double sigma, int layers, int order) {
  const QuadRule g = graded_rule(sigma, layers, order);
  QuadRule2D r;
  for (std::size_t j = 0; j < g.size(); ++j)
    for (std::size_t i = 0; i < g.size(); ++i) {
      r.x.push_back(g.nodes[i]);
      r.y.push_back(g.nodes[j]);
      r.w.push_back(g.weights[i] * g.weights[j]);
    }
  return r;
}

QuadRule2D corner_graded_triangle_rule(double sigma, int layers, int order) {
  // Duffy with the radial variable graded toward the singular vertex.
  const QuadRule gu = graded_rule(sigma, layers, order);
  const QuadRule gv = gauss_legendre(order);
  QuadRule2D r;
  for (std::size_t j = 0; j < gv.size(); ++j)
    for (std::size_t i = 0; i < gu.size(); ++i) {
      const double u = gu.nodes[i], v = gv.nodes[j];
      r.x.push_back(u * (1.0 - v));
      r.y.push_back(u * v);
      r.w.push_back(gu.weights[i] * gv.weights[j] * u);
    }
  return r;
}

PanelPairRule panel_pair_rule(PanelRelation relation, double h1, double h2, int order) {
  PanelPairRule rule;
  switch (relation) {
    case PanelRelation::Identical: {
      // Substitute u = s - t; the kernel is singular only in u. For
      // u in [0,h] graded toward 0, integrate t over [0,h-u] and add
      // both orderings (s,t) = (t+u,t) and (t,t+u).
      const double h = h1;
      const QuadRule gu = graded_rule(0.15, 20, order);
      const QuadRule gt = gauss_legendre(order);
      for (std::size_t i = 0; i < gu.size(); ++i) {
        const double u = h * gu.nodes[i];
        const double wu = h * gu.weights[i];
        for (std::size_t j = 0; j < gt.size(); ++j) {
          const double t = (h - u) * gt.nodes[j];
          const double wt = (h - u) * gt.weights[j];
          rule.s.push_back(t + u);
          rule.t.push_back(t);
          rule.w.push_back(wu * wt);
          rule.s.push_back(t);
          rule.t.push_back(t + u);
          rule.w.push_back(wu * wt);
        }
      }
      break;
    }
    case PanelRelation::Adjacent: {
      // Shared vertex at s = t = 0: tensor of graded rules.
      const QuadRule g1 = graded_rule(0.15, 20, order).mapped(0.0, h1);
      const QuadRule g2 = graded_rule(0.15, 20, order).mapped(0.0, h2);
      for (std::size_t i = 0; i < g1.size(); ++i)
        for (std::size_t j = 0; j < g2.size(); ++j) {
          rule.s.push_back(g1.nodes[i]);
          rule.t.push_back(g2.nodes[j]);
          rule.w.push_back(g1.weights[i] * g2.weights[j]);
        }
      break;
    }
    case PanelRelation::Disjoint: {
      const QuadRule g1 = gauss_legendre(order).mapped(0.0, h1);
      const QuadRule g2 = gauss_legendre(order).mapped(0.0, h2);
      for (std::size_t i = 0; i < g1.size(); ++i)
        for (std::size_t j = 0; j < g2.size(); ++j) {
          rule.s.push_back(g1.nodes[i]);
          rule.t.push_back(g2.nodes[j]);
          rule.w.push_back(g1.weights[i] * g2.weights[j]);
        }
      break;
    }
  }
  return rule;
}

}  // namespace febe
