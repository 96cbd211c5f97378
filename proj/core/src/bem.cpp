#include "febe/bem.hpp"

#include <cmath>

#include "febe/quadrature.hpp"
#include "febe/shape.hpp"

namespace febe {

double kernel_G(Point2 x, Point2 y) {
  const double r = dist(x, y);
  if (r == 0.0) throw std::domain_error("kernel_G: coincident points");
  return -std::log(r) / (2.0 * M_PI);
}

ScaleTransform capacity_scale(const BoundaryMesh& bm) {
  ScaleTransform tr;
  tr.s = 0.25;
  Point2 c{0.0, 0.0};
  for (const Point2& p : bm.vertices) c = c + p;
  tr.center = (1.0 / static_cast<double>(bm.vertices.size())) * c;
  return tr;
}

BoundaryMesh apply(const ScaleTransform& tr, const BoundaryMesh& bm) {
  BoundaryMesh out = bm;
  for (Point2& p : out.vertices) p = tr.apply(p);
  for (auto& [a, b] : out.arcs) {
    a = tr.apply(a);
    b = tr.apply(b);
  }
  return out;
}

namespace {

// double-layer kernel: gradient of G in y dotted with the outward normal at y
double kernel_dG(Point2 x, Point2 y, Point2 ny) {
  const Point2 d = y - x;
  const double r2 = dot(d, d);
  return -dot(d, ny) / (2.0 * M_PI * r2);
}

struct PanelGeom {
  Point2 a, b;  // endpoints in panel-parameter order
  double h;
  Point2 n;
  Point2 at(double t) const { return a + t * (b - a); }
};

// shared-vertex detection; returns (shared, flip_i, flip_j). flip means the
// panel's own parameter runs away from / toward the shared vertex.
bool shared_vertex(const Panel& pi, const Panel& pj, bool& rev_i, bool& rev_j) {
  if (pi.b == pj.a) { rev_i = true;  rev_j = false; return true; }
  if (pi.a == pj.b) { rev_i = false; rev_j = true;  return true; }
  if (pi.a == pj.a) { rev_i = false; rev_j = false; return true; }
  if (pi.b == pj.b) { rev_i = true;  rev_j = true;  return true; }
  return false;
}

}  // namespace

LayerMatrices assemble_layers(const BoundaryMesh& bm, const BeTraceSpace& trace,
                              const BeFluxSpace& flux, int order) {
  const int np = static_cast<int>(bm.panels.size());
  int pmax = 1;
  for (const Panel& p : bm.panels) pmax = std::max(pmax, p.degree);
  // floor 14: the graded layers at sigma = 0.15 need this many Gauss points
  // per cell to push the log-kernel quadrature error below 1e-11
  if (order <= 0) order = std::max(14, 2 * pmax + 2);

  LayerMatrices lm;
  const int nf = flux.size();
  const int nt = trace.size();
  lm.V = Eigen::MatrixXd::Zero(nf, nf);
  lm.K = Eigen::MatrixXd::Zero(nf, nt);
  lm.M = Eigen::MatrixXd::Zero(nf, nt);
  lm.Mf = Eigen::VectorXd::Zero(nf);

  std::vector<PanelGeom> geom(np);
  for (int j = 0; j < np; ++j) {
    geom[j] = {bm.vertices[bm.panels[j].a], bm.vertices[bm.panels[j].b], bm.panel_length(j),
               bm.panel_normal(j)};
  }

  std::vector<double> leg_i, leg_j, tr_j;
  for (int i = 0; i < np; ++i) {
    const int pi = bm.panels[i].degree;
    // flux Gram diagonal and mass pairing (panel-local)
    for (int k = 0; k <= pi; ++k) lm.Mf[flux.offset[i] + k] = geom[i].h / (2.0 * k + 1.0);
    {
      const QuadRule q = gauss_legendre(pi + 4);
      for (std::size_t n = 0; n < q.size(); ++n) {
        legendre_all(2.0 * q.nodes[n] - 1.0, pi, leg_i);
        basis_1d(pi, q.nodes[n], tr_j);
        const double w = geom[i].h * q.weights[n];
        for (int k = 0; k <= pi; ++k)
          for (int l = 0; l <= pi; ++l) {
            const int g = trace.ldof[i][l];
            if (g >= 0) lm.M(flux.offset[i] + k, g) += w * leg_i[k] * tr_j[l];
          }
      }
    }
    for (int j = 0; j < np; ++j) {
      const int pj = bm.panels[j].degree;
      bool rev_i = false, rev_j = false;
      PanelRelation rel;
      if (i == j)
        rel = PanelRelation::Identical;
      else if (shared_vertex(bm.panels[i], bm.panels[j], rev_i, rev_j))
        rel = PanelRelation::Adjacent;
      else
        rel = PanelRelation::Disjoint;

      const PanelPairRule rule = panel_pair_rule(rel, geom[i].h, geom[j].h, order);
      // the rule parameterises by arc length from the shared vertex (adjacent)
      // or from the panel start; map back to each panel's own parameter
      auto ti_of = [&](double s) { return rev_i ? 1.0 - s / geom[i].h : s / geom[i].h; };
      auto tj_of = [&](double t) { return rev_j ? 1.0 - t / geom[j].h : t / geom[j].h; };

      for (std::size_t n = 0; n < rule.size(); ++n) {
        const double ti = ti_of(rule.s[n]), tj = tj_of(rule.t[n]);
        const Point2 x = geom[i].at(ti), y = geom[j].at(tj);
        // innermost graded nodes can round onto each other; their true
        // contribution is below rounding, so drop them
        const double r = dist(x, y);
        if (r == 0.0) continue;
        const double g = -std::log(r) / (2.0 * M_PI);
        legendre_all(2.0 * ti - 1.0, pi, leg_i);
        legendre_all(2.0 * tj - 1.0, pj, leg_j);
        const double w = rule.w[n];
        for (int k = 0; k <= pi; ++k)
          for (int l = 0; l <= pj; ++l)
            lm.V(flux.offset[i] + k, flux.offset[j] + l) += w * g * leg_i[k] * leg_j[l];
        if (rel != PanelRelation::Identical) {
          // double layer: zero for x,y on the same straight panel
          const double dg = kernel_dG(x, y, geom[j].n);
          if (dg != 0.0) {
            basis_1d(pj, tj, tr_j);
            for (int k = 0; k <= pi; ++k)
              for (int l = 0; l <= pj; ++l) {
                const int gl = trace.ldof[j][l];
                if (gl >= 0) lm.K(flux.offset[i] + k, gl) += w * dg * leg_i[k] * tr_j[l];
              }
          }
        }
      }
    }
  }
  lm.V = 0.5 * (lm.V + lm.V.transpose()).eval();

  // hypersingular operator through the regularized identity
  // <W u, v> = <V u', v'> with arc-length derivatives; the derivative of the
  // trace basis lies in the flux space, expressed by the matrix D below.
  Eigen::MatrixXd D = Eigen::MatrixXd::Zero(nf, nt);
  for (int j = 0; j < np; ++j) {
    const int pj = bm.panels[j].degree;
    const double invh = 1.0 / geom[j].h;
    auto put = [&](int local, int legendre_mode, double coeff) {
      const int g = trace.ldof[j][local];
      if (g >= 0) D(flux.offset[j] + legendre_mode, g) += coeff;
    };
    put(0, 0, -invh);
    put(1, 0, invh);
    for (int k = 2; k <= pj; ++k) {
      // N_k'(t) = 2 c_k (2k-1) P_{k-1}(2t-1), c_k = 1/sqrt(2(2k-1))
      const double ck = 1.0 / std::sqrt(2.0 * (2.0 * k - 1.0));
      put(k, k - 1, 2.0 * ck * (2.0 * k - 1.0) * invh);
    }
  }
  lm.W = D.transpose() * lm.V * D;
  lm.W = 0.5 * (lm.W + lm.W.transpose()).eval();
  return lm;
}

VInverse discrete_V_inverse(const Eigen::MatrixXd& V) {
  VInverse inv;
  inv.llt.compute(V);
  if (inv.llt.info() != Eigen::Success)
    throw CapacityError(
        "single-layer matrix not positive definite; rescale the curve to diameter < 1");
  return inv;
}

Eigen::MatrixXd discrete_steklov(const LayerMatrices& lm, const VInverse& vinv) {
  const Eigen::MatrixXd KM = lm.K + 0.5 * lm.M;
  Eigen::MatrixXd S = lm.W + KM.transpose() * vinv.apply(KM);
  return 0.5 * (S + S.transpose());
}

double calderon_residual(const BoundaryMesh& bm, const ScalarField& u_trace,
                         const ScalarField& u_flux) {
  // use a copy with every panel freed so the trace space spans the whole loop
  BoundaryMesh full = bm;
  for (Panel& p : full.panels) p.tag = EdgeTag::Interface;
  const BeTraceSpace trace = build_be_trace_space(full);
  const BeFluxSpace flux = build_be_flux_space(full);
  const LayerMatrices lm = assemble_layers(full, trace, flux);
  const Eigen::VectorXd U = interpolate(trace, u_trace);
  const Eigen::VectorXd Phi = interpolate(flux, u_flux);
  const Eigen::VectorXd rho = lm.V * Phi - (lm.K + 0.5 * lm.M) * U;
  double nrm2 = 0.0;
  for (int i = 0; i < rho.size(); ++i) nrm2 += rho[i] * rho[i] / lm.Mf[i];
  return std::sqrt(nrm2);
}

Eigen::VectorXd newton_rhs(const BeTraceSpace& trace, const ScalarField& f) {
  if (f) {
    const BoundaryMesh& bm = *trace.bm;
    for (int j = 0; j < static_cast<int>(bm.panels.size()); ++j)
      if (std::abs(f(bm.panel_point(j, 0.5))) > 0.0)
        throw UnsupportedFeature("newton_rhs: only f = 0 is supported");
  }
  return Eigen::VectorXd::Zero(trace.size());
}

}  // namespace febe
