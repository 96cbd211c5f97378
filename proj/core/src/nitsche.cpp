#include "febe/nitsche.hpp"

#include <cmath>
#include <stdexcept>

#include "febe/quadrature.hpp"

namespace febe {

namespace {

double fe_param(const TraceSegment& seg, double s) {
  const double t = (s - seg.s0) / (seg.s1 - seg.s0);
  return seg.reversed ? 1.0 - t : t;
}

// sparse row of basis values at one interface point
struct Row {
  std::vector<int> idx;
  std::vector<double> val;
  void add(int i, double v) {
    if (i >= 0 && v != 0.0) {
      idx.push_back(i);
      val.push_back(v);
    }
  }
};

// jump row: +FE trace values, -BE trace values, on combined DOF indices
Row jump_row(const CouplingContext& ctx, const OverlaySegment& seg, double s,
             std::vector<double>& scratch) {
  Row r;
  const TraceSegment& fs = ctx.fe_trace.segments[seg.fe_seg];
  const TraceSegment& bs = ctx.be_trace.segments[seg.be_seg];
  shape_edge_trace(ctx.fe->specs[fs.parent], fs.local_edge, fe_param(fs, s), scratch);
  for (std::size_t i = 0; i < scratch.size(); ++i)
    r.add(ctx.fe->ldof[fs.parent][i], scratch[i]);
  const int nfe = ctx.fe->size();
  const int pb = static_cast<int>(ctx.be->ldof[bs.parent].size()) - 1;
  basis_1d(pb, fe_param(bs, s), scratch);
  for (int i = 0; i <= pb; ++i) {
    const int g = ctx.be->ldof[bs.parent][i];
    if (g >= 0) r.add(nfe + g, -scratch[i]);
  }
  return r;
}

// one-sided FE flux row kappa grad(phi) . n1 at interface point s
Row flux_row(const CouplingContext& ctx, const OverlaySegment& seg, double s,
             std::vector<double>& v, std::vector<double>& dx, std::vector<double>& dy) {
  Row r;
  const TraceSegment& fs = ctx.fe_trace.segments[seg.fe_seg];
  const LocalBasisSpec& spec = ctx.fe->specs[fs.parent];
  double xi, eta;
  edge_point(spec, fs.local_edge, fe_param(fs, s), xi, eta);
  shape_values_grads(spec, xi, eta, v, dx, dy);
  Eigen::Matrix2d B;
  Eigen::Vector2d b;
  ctx.mesh->affine(fs.parent, B, b);
  const Eigen::Matrix2d BinvT = B.inverse().transpose();
  const Point2 n = ctx.curve->normal1(s);
  const double kap = ctx.mesh->elements[fs.parent].kappa;
  for (std::size_t i = 0; i < v.size(); ++i) {
    const Eigen::Vector2d g = BinvT * Eigen::Vector2d(dx[i], dy[i]);
    r.add(ctx.fe->ldof[fs.parent][i], kap * (g[0] * n.x + g[1] * n.y));
  }
  return r;
}

int seg_order(const CouplingContext& ctx, const OverlaySegment& seg) {
  const int pf = ctx.fe_trace.segments[seg.fe_seg].degree;
  const int pb = ctx.be_trace.segments[seg.be_seg].degree;
  return pf + pb + 2;
}

}  // namespace

CouplingContext build_coupling(const Mesh2D& mesh, const FeSpace& fe, const BoundaryMesh& bm,
                               const BeTraceSpace& be, const InterfaceCurve& curve, double eta0) {
  CouplingContext ctx;
  ctx.mesh = &mesh;
  ctx.fe = &fe;
  ctx.be = &be;
  ctx.curve = &curve;
  ctx.eta0 = eta0;
  ctx.fe_trace = trace_partition(mesh, curve);
  ctx.be_trace = trace_partition(bm, curve);
  ctx.ov = overlay(ctx.fe_trace, ctx.be_trace, curve);
  for (OverlaySegment& seg : ctx.ov.segments) {
    const TraceSegment& fs = ctx.fe_trace.segments[seg.fe_seg];
    const Element& el = mesh.elements[fs.parent];
    seg.eta = eta0 * el.kappa * trace_constant(mesh, fs.parent, fs.local_edge);
  }
  return ctx;
}

Eigen::MatrixXd assemble_penalty(const CouplingContext& ctx) {
  if (ctx.ov.segments.empty()) throw std::invalid_argument("assemble_penalty: empty overlay");
  const int N = ctx.n_total();
  Eigen::MatrixXd C = Eigen::MatrixXd::Zero(N, N);
  std::vector<double> scratch;
  for (const OverlaySegment& seg : ctx.ov.segments) {
    const double h = seg.s1 - seg.s0;
    const QuadRule q = gauss_legendre(seg_order(ctx, seg));
    for (std::size_t n = 0; n < q.size(); ++n) {
      const double s = seg.s0 + h * q.nodes[n];
      const double w = seg.eta * h * q.weights[n];
      const Row r = jump_row(ctx, seg, s, scratch);
      for (std::size_t a = 0; a < r.idx.size(); ++a)
        for (std::size_t b = 0; b < r.idx.size(); ++b)
          C(r.idx[a], r.idx[b]) += w * r.val[a] * r.val[b];
    }
  }
  return C;
}

Eigen::MatrixXd assemble_flux_coupling(const CouplingContext& ctx) {
  const int N = ctx.n_total();
  Eigen::MatrixXd B = Eigen::MatrixXd::Zero(N, N);
  std::vector<double> scratch, v, dx, dy;
  for (const OverlaySegment& seg : ctx.ov.segments) {
    const double h = seg.s1 - seg.s0;
    const QuadRule q = gauss_legendre(seg_order(ctx, seg));
    for (std::size_t n = 0; n < q.size(); ++n) {
      const double s = seg.s0 + h * q.nodes[n];
      const double w = h * q.weights[n];
      const Row rj = jump_row(ctx, seg, s, scratch);
      const Row rq = flux_row(ctx, seg, s, v, dx, dy);
      for (std::size_t a = 0; a < rq.idx.size(); ++a)
        for (std::size_t b = 0; b < rj.idx.size(); ++b) {
          const double c = w * rq.val[a] * rj.val[b];
          B(rq.idx[a], rj.idx[b]) -= c;
          B(rj.idx[b], rq.idx[a]) -= c;
        }
    }
  }
  return B;
}

double eval_jump(const CouplingContext& ctx, const Eigen::VectorXd& u, double s) {
  // find the overlay segment containing s
  int lo = 0, hi = static_cast<int>(ctx.ov.segments.size()) - 1;
  while (lo < hi) {
    const int mid = (lo + hi) / 2;
    if (s < ctx.ov.segments[mid].s1)
      hi = mid;
    else
      lo = mid + 1;
  }
  const OverlaySegment& seg = ctx.ov.segments[lo];
  const TraceSegment& fs = ctx.fe_trace.segments[seg.fe_seg];
  const TraceSegment& bs = ctx.be_trace.segments[seg.be_seg];
  const double u1 = ctx.fe->eval_edge(u.head(ctx.fe->size()), fs.parent, fs.local_edge,
                                      fe_param(fs, s));
  const double u2 = ctx.be->eval(u.tail(ctx.be->size()), bs.parent, fe_param(bs, s));
  return u1 - u2;
}

double jump_norm(const CouplingContext& ctx, const Eigen::VectorXd& u) {
  double acc = 0.0;
  for (const OverlaySegment& seg : ctx.ov.segments) {
    const double h = seg.s1 - seg.s0;
    const QuadRule q = gauss_legendre(seg_order(ctx, seg) + 2);
    for (std::size_t n = 0; n < q.size(); ++n) {
      const double s = seg.s0 + h * q.nodes[n];
      const double j = eval_jump(ctx, u, s);
      acc += seg.eta * h * q.weights[n] * j * j;
    }
  }
  return std::sqrt(acc);
}

namespace {

LocalBasisSpec gradient_spec(const LocalBasisSpec& fe_spec) {
  LocalBasisSpec full;
  full.triangle = fe_spec.triangle;
  full.degree = fe_spec.degree;
  full.edge_degree = {fe_spec.degree, fe_spec.degree, fe_spec.degree, fe_spec.degree};
  full.edge_flip = {false, false, false, false};
  return full;
}

}  // namespace

std::map<int, Eigen::VectorXd> lifting_apply(const CouplingContext& ctx,
                                             const Eigen::VectorXd& u) {
  // group overlay segments by FE parent element
  std::map<int, std::vector<int>> by_elem;
  for (int i = 0; i < static_cast<int>(ctx.ov.segments.size()); ++i)
    by_elem[ctx.fe_trace.segments[ctx.ov.segments[i].fe_seg].parent].push_back(i);

  std::map<int, Eigen::VectorXd> out;
  std::vector<double> vals;
  for (const auto& [k, segs] : by_elem) {
    const LocalBasisSpec full = gradient_spec(ctx.fe->specs[k]);
    const int n = full.size();
    Eigen::Matrix2d B;
    Eigen::Vector2d b;
    ctx.mesh->affine(k, B, b);
    const double jac = std::abs(B.determinant());
    const int qn = full.degree + 2;
    const QuadRule2D q = full.triangle ? triangle_rule(qn + 1, qn) : tensor_rule(qn, qn);
    Eigen::MatrixXd M = Eigen::MatrixXd::Zero(n, n);
    for (std::size_t i = 0; i < q.size(); ++i) {
      shape_values(full, q.x[i], q.y[i], vals);
      for (int a = 0; a < n; ++a)
        for (int c = 0; c < n; ++c) M(a, c) += jac * q.w[i] * vals[a] * vals[c];
    }
    Eigen::VectorXd rx = Eigen::VectorXd::Zero(n), ry = Eigen::VectorXd::Zero(n);
    for (int si : segs) {
      const OverlaySegment& seg = ctx.ov.segments[si];
      const TraceSegment& fs = ctx.fe_trace.segments[seg.fe_seg];
      const double h = seg.s1 - seg.s0;
      const QuadRule qe = gauss_legendre(seg_order(ctx, seg) + 2);
      for (std::size_t i = 0; i < qe.size(); ++i) {
        const double s = seg.s0 + h * qe.nodes[i];
        const double jmp = eval_jump(ctx, u, s);
        const Point2 nrm = ctx.curve->normal1(s);
        double xi, eta;
        edge_point(ctx.fe->specs[k], fs.local_edge, fe_param(fs, s), xi, eta);
        shape_values(full, xi, eta, vals);
        const double w = h * qe.weights[i] * jmp;
        for (int a = 0; a < n; ++a) {
          rx[a] += w * vals[a] * nrm.x;
          ry[a] += w * vals[a] * nrm.y;
        }
      }
    }
    const Eigen::LDLT<Eigen::MatrixXd> ldlt(M);
    Eigen::VectorXd c(2 * n);
    c.head(n) = ldlt.solve(rx);
    c.tail(n) = ldlt.solve(ry);
    out[k] = c;
  }
  return out;
}

double formulation_gap(const CouplingContext& ctx, const Eigen::MatrixXd& Afe,
                       const Eigen::MatrixXd& Shat, const Eigen::MatrixXd& B,
                       const Eigen::MatrixXd& C, const Eigen::VectorXd& U,
                       const Eigen::VectorXd& Phi) {
  const int nf = ctx.fe->size();
  const int nb = ctx.be->size();
  const Eigen::VectorXd U1 = U.head(nf), P1 = Phi.head(nf);
  const Eigen::VectorXd U2 = U.tail(nb), P2 = Phi.tail(nb);

  const double core = U1.dot(Afe * P1) + U2.dot(Shat * P2) + U.dot(C * Phi);
  const double a_hp = core + U.dot(B * Phi);

  // lifting replacement of the flux pairings
  auto dot_grad_lift = [&](const Eigen::VectorXd& fe_coef,
                           const std::map<int, Eigen::VectorXd>& lift) {
    double acc = 0.0;
    std::vector<double> vals;
    for (const auto& [k, c] : lift) {
      const LocalBasisSpec full = gradient_spec(ctx.fe->specs[k]);
      const int n = full.size();
      Eigen::Matrix2d Bm;
      Eigen::Vector2d bv;
      ctx.mesh->affine(k, Bm, bv);
      const double jac = std::abs(Bm.determinant());
      const double kap = ctx.mesh->elements[k].kappa;
      const int qn = full.degree + 2;
      const QuadRule2D q = full.triangle ? triangle_rule(qn + 1, qn) : tensor_rule(qn, qn);
      for (std::size_t i = 0; i < q.size(); ++i) {
        const Eigen::Vector2d g = ctx.fe->eval_grad(fe_coef, k, q.x[i], q.y[i]);
        shape_values(full, q.x[i], q.y[i], vals);
        double lx = 0.0, ly = 0.0;
        for (int a = 0; a < n; ++a) {
          lx += c[a] * vals[a];
          ly += c[n + a] * vals[a];
        }
        acc += kap * jac * q.w[i] * (g[0] * lx + g[1] * ly);
      }
    }
    return acc;
  };
  const std::map<int, Eigen::VectorXd> LU = lifting_apply(ctx, U);
  const std::map<int, Eigen::VectorXd> LP = lifting_apply(ctx, Phi);
  const double atilde = core - dot_grad_lift(U1, LP) - dot_grad_lift(P1, LU);
  return std::abs(a_hp - atilde);
}

}  // namespace febe
