// Acceptance gate: one pass/fail line per criterion, exit code = number of
// failures. Runs the full convergence studies, so expect a few minutes.

#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <random>
#include <vector>

#include "febe/analysis.hpp"
#include "febe/bem.hpp"
#include "febe/fem.hpp"
#include "febe/nitsche.hpp"
#include "febe/quadrature.hpp"
#include "febe/solver.hpp"
#include "febe/study.hpp"

using namespace febe;

namespace {

int failures = 0;

void report(int id, bool ok, const char* fmt, ...) {
  if (!ok) ++failures;
  std::printf("%s criterion %d: ", ok ? "PASS" : "FAIL", id);
  va_list args;
  va_start(args, fmt);
  std::vprintf(fmt, args);
  va_end(args);
  std::printf("\n");
  std::fflush(stdout);
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

struct Setup {
  Decomposition dec;
  FeSpace fe;
  BeTraceSpace be;
  Eigen::MatrixXd Shat;
  CouplingContext ctx;
};

Setup make_square_setup(int p_fe, int p_be, double eta0) {
  Setup s;
  DecompositionConfig cfg;
  s.dec = build_decomposition(cfg);
  set_uniform_degree(s.dec.mesh, p_fe);
  set_uniform_degree(s.dec.boundary, p_be);
  s.fe = build_fe_space(s.dec.mesh);
  s.be = build_be_trace_space(s.dec.boundary);
  const BeFluxSpace fx = build_be_flux_space(s.dec.boundary);
  const BoundaryMesh scaled = apply(capacity_scale(s.dec.boundary), s.dec.boundary);
  const LayerMatrices lm = assemble_layers(scaled, s.be, fx);
  s.Shat = discrete_steklov(lm, discrete_V_inverse(lm.V));
  s.ctx = build_coupling(s.dec.mesh, s.fe, s.dec.boundary, s.be, s.dec.interface, eta0);
  return s;
}

// interface-edge mass matrix of a one-element mesh, assembled by quadrature
Eigen::MatrixXd edge_mass(const FeSpace& sp, double edge_length, int local_edge, int p) {
  const int n = sp.size();
  Eigen::MatrixXd E = Eigen::MatrixXd::Zero(n, n);
  const QuadRule q = gauss_legendre(2 * p + 2);
  for (std::size_t i = 0; i < q.size(); ++i) {
    Eigen::VectorXd tr(n);
    for (int a = 0; a < n; ++a) {
      Eigen::VectorXd ei = Eigen::VectorXd::Zero(n);
      ei[a] = 1.0;
      tr[a] = sp.eval_edge(ei, 0, local_edge, q.nodes[i]);
    }
    E += (edge_length * q.weights[i]) * tr * tr.transpose();
  }
  return E;
}

Mesh2D one_triangle(Point2 a, Point2 b, Point2 c, int p) {
  Mesh2D mesh;
  const int i = mesh.add_vertex(a), j = mesh.add_vertex(b), k = mesh.add_vertex(c);
  Element e;
  e.v = {i, j, k, -1};
  e.degree = p;
  mesh.elements.push_back(e);
  mesh.edge_tags.push_back({EdgeTag::Interface, EdgeTag::None, EdgeTag::None, EdgeTag::None});
  return mesh;
}

Mesh2D one_quad(double h, double k, int p) {
  Mesh2D mesh;
  const int a = mesh.add_vertex({0, 0}), b = mesh.add_vertex({h, 0}), c = mesh.add_vertex({h, k}),
            d = mesh.add_vertex({0, k});
  Element e;
  e.kind = ElemKind::Parallelogram;
  e.v = {a, b, c, d};
  e.degree = p;
  mesh.elements.push_back(e);
  mesh.edge_tags.push_back({EdgeTag::Interface, EdgeTag::None, EdgeTag::None, EdgeTag::None});
  return mesh;
}

// ccw square loop for the operator checks
BoundaryMesh square_loop(double side, int n) {
  BoundaryMesh bm;
  const Point2 c0{-side / 2, -side / 2};
  const Point2 corners[4] = {{c0.x, c0.y}, {c0.x + side, c0.y}, {c0.x + side, c0.y + side},
                             {c0.x, c0.y + side}};
  for (int s = 0; s < 4; ++s) {
    const Point2 a = corners[s], b = corners[(s + 1) % 4];
    for (int i = 0; i < n; ++i) bm.vertices.push_back(a + (static_cast<double>(i) / n) * (b - a));
  }
  const int nv = static_cast<int>(bm.vertices.size());
  for (int i = 0; i < nv; ++i) {
    Panel p;
    p.a = i;
    p.b = (i + 1) % nv;
    p.degree = 1;
    p.tag = EdgeTag::Interface;
    p.arc = i / n;
    bm.panels.push_back(p);
  }
  for (int s = 0; s < 4; ++s) bm.arcs.push_back({corners[s], corners[(s + 1) % 4]});
  return bm;
}

std::vector<StepResult> all_steps;  // collected for the conditioning criterion

void criterion_1() {
  const auto t0 = std::chrono::steady_clock::now();
  const Setup s = make_square_setup(3, 2, 2.0);
  const Eigen::MatrixXd Afe = assemble_stiffness(s.fe);
  const Eigen::MatrixXd B = assemble_flux_coupling(s.ctx);
  const Eigen::MatrixXd C = assemble_penalty(s.ctx);
  Eigen::MatrixXd Afull = B + C;
  Afull.topLeftCorner(s.fe.size(), s.fe.size()) += Afe;
  Afull.bottomRightCorner(s.be.size(), s.be.size()) += s.Shat;

  std::mt19937 rng(101);
  std::normal_distribution<double> gauss;
  double worst = 0.0;
  for (int it = 0; it < 100; ++it) {
    Eigen::VectorXd u(s.ctx.n_total()), w(s.ctx.n_total());
    for (int i = 0; i < u.size(); ++i) {
      u[i] = gauss(rng);
      w[i] = gauss(rng);
    }
    const double gap = formulation_gap(s.ctx, Afe, s.Shat, B, C, u, w);
    const double scale = std::sqrt(std::abs(u.dot(Afull * u)) * std::abs(w.dot(Afull * w)));
    worst = std::max(worst, gap / scale);
  }
  const double dt = seconds_since(t0);
  report(1, worst < 1e-10 && dt < 10.0,
         "lifted and penalty formulations agree on 100 random pairs "
         "(max relative gap %.2e, %.1fs)",
         worst, dt);
}

void criterion_2() {
  const auto t0 = std::chrono::steady_clock::now();
  std::mt19937 rng(103);
  std::normal_distribution<double> gauss;
  std::uniform_real_distribution<double> uni(0.3, 1.7);

  // sharp constant on the reference triangle hypotenuse: the largest
  // generalized eigenvalue of edge mass against element mass over the full
  // polynomial space equals (p+1)(p+2) |e| / (2 |K|)
  double eig_gap = 0.0;
  for (int p = 1; p <= 6; ++p) {
    const Mesh2D mesh = one_triangle({0, 0}, {1, 0}, {0, 1}, p);
    const FeSpace sp = build_fe_space(mesh);
    const Eigen::MatrixXd M = assemble_mass(sp);
    const Eigen::MatrixXd E = edge_mass(sp, std::sqrt(2.0), 1, p);
    const Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> es(E, M);
    const double lmax = es.eigenvalues().maxCoeff();
    const double G = trace_constant(mesh, 0, 1);
    eig_gap = std::max(eig_gap, std::abs(lmax - G) / G);
  }

  // the inequality itself on random stretched elements and coefficients
  int violations = 0;
  for (const bool triangle : {true, false}) {
    for (int p = 1; p <= 6; ++p) {
      const double h = uni(rng), k = uni(rng);
      const Mesh2D mesh =
          triangle ? one_triangle({0, 0}, {h, 0}, {0, k}, p) : one_quad(h, k, p);
      const FeSpace sp = build_fe_space(mesh);
      const Eigen::MatrixXd M = assemble_mass(sp);
      const Eigen::MatrixXd E = edge_mass(sp, h, 0, p);
      const double G = trace_constant(mesh, 0, 0);
      for (int it = 0; it < 100; ++it) {
        Eigen::VectorXd c(sp.size());
        for (int j = 0; j < c.size(); ++j) c[j] = gauss(rng);
        if (c.dot(E * c) > G * c.dot(M * c) * (1.0 + 1e-10)) ++violations;
      }
    }
  }
  const double dt = seconds_since(t0);
  report(2, eig_gap < 1e-8 && violations == 0 && dt < 30.0,
         "trace constant matches the eigenvalue oracle for p=1..6 "
         "(max gap %.2e) and the inequality holds on 1200 random samples "
         "(%d violations, %.1fs)",
         eig_gap, violations, dt);
}

void criterion_3() {
  const auto t0 = std::chrono::steady_clock::now();
  const Setup s = make_square_setup(3, 2, 2.0);
  const Eigen::MatrixXd C = assemble_penalty(s.ctx);
  const QuadRule2D q2 = tensor_rule(8, 8);
  const QuadRule2D q2t = triangle_rule(9, 8);
  std::mt19937 rng(107);
  std::normal_distribution<double> gauss;
  std::vector<double> sv;
  int violations = 0;
  double worst_ratio = 0.0;
  for (int it = 0; it < 100; ++it) {
    Eigen::VectorXd v(s.ctx.n_total());
    for (int i = 0; i < v.size(); ++i) v[i] = gauss(rng);
    const auto lift = lifting_apply(s.ctx, v);
    double energy = 0.0;
    for (const auto& [k, coeff] : lift) {
      LocalBasisSpec gs = s.fe.specs[k];
      gs.edge_degree = {gs.degree, gs.degree, gs.degree, gs.degree};
      gs.edge_flip = {false, false, false, false};
      const int n = gs.size();
      Eigen::Matrix2d Bk;
      Eigen::Vector2d bk;
      s.dec.mesh.affine(k, Bk, bk);
      const double jac = std::abs(Bk.determinant());
      const QuadRule2D& qq = gs.triangle ? q2t : q2;
      for (std::size_t i = 0; i < qq.size(); ++i) {
        shape_values(gs, qq.x[i], qq.y[i], sv);
        double lx = 0, ly = 0;
        for (int a = 0; a < n; ++a) {
          lx += coeff[a] * sv[a];
          ly += coeff[n + a] * sv[a];
        }
        energy += s.dec.mesh.elements[k].kappa * jac * qq.w[i] * (lx * lx + ly * ly);
      }
    }
    const double bound = v.dot(C * v) / s.ctx.eta0;
    worst_ratio = std::max(worst_ratio, energy / bound);
    if (energy > bound * (1.0 + 1e-10)) ++violations;
  }
  const double dt = seconds_since(t0);
  report(3, violations == 0 && dt < 10.0,
         "lifting stability |kappa^{1/2} L(v)|^2 <= weighted jump norm on "
         "100 random v (worst ratio %.3f, %.1fs)",
         worst_ratio, dt);
}

void criterion_4() {
  // single layer self-entries against the closed form
  double self_gap = 0.0;
  for (const double h : {1.0, 0.5, 0.1}) {
    BoundaryMesh bm;
    bm.vertices.push_back({0, 0});
    bm.vertices.push_back({h, 0});
    Panel p;
    p.a = 0;
    p.b = 1;
    p.degree = 1;
    bm.panels.push_back(p);
    bm.arcs.push_back({{0, 0}, {h, 0}});
    const BeTraceSpace tr = build_be_trace_space(bm);
    const BeFluxSpace fx = build_be_flux_space(bm);
    const LayerMatrices lm = assemble_layers(bm, tr, fx);
    const double exact = h * h * (1.5 - std::log(h)) / (2.0 * M_PI);
    self_gap = std::max(self_gap, std::abs(lm.V(0, 0) - exact) / exact);
  }

  // Calderon residual of a harmonic pair decays with rate >= 1.5
  const auto u = [](Point2 p) {
    const double X = p.x + 1.0, Y = p.y + 2.0;
    return X / (X * X + Y * Y);
  };
  const auto flux = [&](Point2 p) {
    const double X = p.x + 1.0, Y = p.y + 2.0;
    const double d = (X * X + Y * Y) * (X * X + Y * Y);
    const Point2 g{(Y * Y - X * X) / d, -2.0 * X * Y / d};
    Point2 n{0, 0};
    if (std::abs(p.x - 0.5) < 1e-12)
      n = {1, 0};
    else if (std::abs(p.x + 0.5) < 1e-12)
      n = {-1, 0};
    else if (std::abs(p.y - 0.5) < 1e-12)
      n = {0, 1};
    else
      n = {0, -1};
    return g.x * n.x + g.y * n.y;
  };
  std::vector<double> res;
  for (const int n : {4, 8, 16, 32}) res.push_back(calderon_residual(square_loop(1.0, n), u, flux));
  double min_rate = 1e30;
  for (std::size_t i = 1; i < res.size(); ++i)
    min_rate = std::min(min_rate, std::log2(res[i - 1] / res[i]));

  // hypersingular operator annihilates constant traces
  const BoundaryMesh loop = square_loop(0.5, 3);
  const BeTraceSpace tr = build_be_trace_space(loop);
  const BeFluxSpace fx = build_be_flux_space(loop);
  const LayerMatrices lm = assemble_layers(loop, tr, fx);
  Eigen::VectorXd ones = Eigen::VectorXd::Zero(tr.size());
  for (int j = 0; j < static_cast<int>(loop.panels.size()); ++j) {
    ones[tr.ldof[j][0]] = 1.0;
    ones[tr.ldof[j][1]] = 1.0;
  }
  const double w_const = (lm.W * ones).cwiseAbs().maxCoeff();

  report(4, self_gap < 1e-9 && min_rate >= 1.5 && w_const < 1e-10,
         "layer operators: V self-entry gap %.2e, Calderon rate %.2f, "
         "W on constants %.2e",
         self_gap, min_rate, w_const);
}

void criterion_5() {
  const auto t0 = std::chrono::steady_clock::now();
  StudyConfig cfg;
  cfg.example = ExampleId::SquareSmooth;
  cfg.mode = StudyMode::P;
  cfg.max_p = 6;
  const std::vector<StepResult> res = run_study(cfg);
  std::vector<double> N, err;
  for (const StepResult& r : res) {
    N.push_back(r.rec.N);
    err.push_back(r.rec.err.total);
    all_steps.push_back(r);
  }
  const auto [b, corr] = fit_exponential_rate(N, err, 0.5);
  const double drop = err.front() / err.back();
  const double dt = seconds_since(t0);
  report(5, corr > 0.99 && b > 0.0 && drop >= 1e4 && dt < 300.0,
         "smooth problem converges exponentially in p: rate %.3f, "
         "|correlation| %.4f, error drop %.1e (%.0fs)",
         b, corr, drop, dt);
}

void criterion_6() {
  StudyConfig cfg;
  cfg.example = ExampleId::LshapeConfig2;
  cfg.mode = StudyMode::H;
  cfg.max_refine = 4;
  const std::vector<StepResult> res = run_study(cfg);
  std::vector<double> h, err;
  for (const StepResult& r : res) {
    h.push_back(r.rec.h_max);
    err.push_back(r.rec.err.total);
    all_steps.push_back(r);
  }
  const double rate = fit_algebraic_rate(h, err);
  report(6, rate >= 0.56 && rate <= 0.76,
         "uniform h-refinement at the singular corner: fitted rate %.3f in "
         "[0.56, 0.76] (expected 2/3)",
         rate);
}

void criterion_7() {
  StudyConfig cfg;
  cfg.example = ExampleId::LshapeConfig2;
  cfg.mode = StudyMode::P;
  cfg.max_p = 6;
  cfg.base_refine = 1;
  const std::vector<StepResult> res = run_study(cfg);
  std::vector<double> p, err;
  for (const StepResult& r : res) {
    p.push_back(r.rec.p_max);
    err.push_back(r.rec.err.total);
    all_steps.push_back(r);
  }
  const double rate = -fit_algebraic_rate(p, err);
  report(7, rate >= 1.1 && rate <= 1.6,
         "p-refinement at the singular corner: fitted rate %.3f in "
         "[1.1, 1.6] (doubled h-rate)",
         rate);
}

void criterion_8() {
  for (const bool config2 : {false, true}) {
    const auto t0 = std::chrono::steady_clock::now();
    StudyConfig cfg;
    cfg.example = config2 ? ExampleId::LshapeConfig2 : ExampleId::LshapeConfig1;
    cfg.mode = StudyMode::HP;
    cfg.max_layers = 6;
    const std::vector<StepResult> res = run_study(cfg);
    std::vector<double> N, err;
    for (const StepResult& r : res) {
      N.push_back(r.rec.N);
      err.push_back(r.rec.err.total);
      all_steps.push_back(r);
    }
    const double root = config2 ? 1.0 / 3.0 : 0.5;
    const auto [b, corr] = fit_exponential_rate(N, err, root);
    const double dt = seconds_since(t0);
    report(8, corr > 0.97 && b > 0.0 && dt < 600.0,
           "%s: exp(-b N^{%s}) fit with b = %.3f, |correlation| %.4f (%.0fs)",
           config2 ? "graded interior and boundary meshes" : "graded boundary mesh",
           config2 ? "1/3" : "1/2", b, corr, dt);
  }
}

void criterion_9() {
  double max_res = 0.0, max_sym = 0.0;
  int not_spd = 0;
  for (const StepResult& r : all_steps) {
    max_res = std::max(max_res, r.residual);
    max_sym = std::max(max_sym, r.symmetry);
    if (!r.spd) ++not_spd;
  }
  report(9, !all_steps.empty() && max_res < 1e-10 && max_sym < 1e-12 && not_spd == 0,
         "all %zu solves at eta0 = 2: max residual %.2e, max asymmetry %.2e, "
         "%d indefinite factorizations",
         all_steps.size(), max_res, max_sym, not_spd);
}

void criterion_10() {
  const double r3 = std::sqrt(3.0);
  const double c = quasi_optimality_constant(1.0 + r3, 2.0 + r3);
  const double expect = 2.0 * (2.0 + r3);
  report(10, std::abs(c - expect) < 1e-9,
         "quasi-optimality constant at delta = 1+sqrt(3), eta0 = 2+sqrt(3) is "
         "%.12f (expected 2(2+sqrt(3)) = %.12f)",
         c, expect);
}

}  // namespace

int main() {
  criterion_1();
  criterion_2();
  criterion_3();
  criterion_4();
  criterion_5();
  criterion_6();
  criterion_7();
  criterion_8();
  criterion_9();
  criterion_10();
  std::printf("%d of 10 criteria passed\n", 10 - failures);
  return failures;
}
