#include "febe/study.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <stdexcept>

#include "febe/bem.hpp"
#include "febe/fem.hpp"
#include "febe/solver.hpp"

namespace febe {

namespace {

constexpr double kPi = 3.14159265358979323846;

// Outward normal of the enclosing square [-1,1]^2; every Neumann edge or
// panel of the shipped decompositions lies on one of its four sides.
Point2 outer_normal(Point2 p) {
  const double tol = 1e-9;
  if (std::abs(p.x + 1.0) < tol) return {-1.0, 0.0};
  if (std::abs(p.x - 1.0) < tol) return {1.0, 0.0};
  if (std::abs(p.y + 1.0) < tol) return {0.0, -1.0};
  if (std::abs(p.y - 1.0) < tol) return {0.0, 1.0};
  throw std::domain_error("outer_normal: point not on the outer boundary");
}

ExactSolution square_solution() {
  ExactSolution ex;
  // harmonic, analytic on the closure, vanishing on x = -1
  ex.u = [](Point2 p) {
    const double X = p.x + 1.0, Y = p.y + 2.0;
    return X / (X * X + Y * Y);
  };
  ex.grad = [](Point2 p) {
    const double X = p.x + 1.0, Y = p.y + 2.0;
    const double d = (X * X + Y * Y) * (X * X + Y * Y);
    return Eigen::Vector2d((Y * Y - X * X) / d, -2.0 * X * Y / d);
  };
  ex.neumann = [g = ex.grad](Point2 p) {
    const Point2 n = outer_normal(p);
    const Eigen::Vector2d gr = g(p);
    return gr[0] * n.x + gr[1] * n.y;
  };
  return ex;
}

ExactSolution lshape_solution() {
  ExactSolution ex;
  // r^{2/3} sin(2/3 (theta - pi/2)) with theta in [pi/2, 5pi/2); vanishes on
  // the two notch edges and has the expected corner singularity at the origin
  constexpr double a = 2.0 / 3.0;
  ex.u = [](Point2 p) {
    const double r = std::hypot(p.x, p.y);
    if (r == 0.0) return 0.0;
    double th = std::atan2(p.y, p.x);
    if (th < 0.5 * kPi - 1e-12) th += 2.0 * kPi;
    return std::pow(r, a) * std::sin(a * (th - 0.5 * kPi));
  };
  ex.grad = [](Point2 p) {
    const double r = std::hypot(p.x, p.y);
    if (r == 0.0) return Eigen::Vector2d(0.0, 0.0);  // |grad| blows up; quadrature avoids r=0
    double th = std::atan2(p.y, p.x);
    if (th < 0.5 * kPi - 1e-12) th += 2.0 * kPi;
    const double phi = a * (th - 0.5 * kPi);
    const double c = a * std::pow(r, a - 1.0);
    const double ur = c * std::sin(phi), ut = c * std::cos(phi);
    return Eigen::Vector2d(ur * std::cos(th) - ut * std::sin(th),
                           ur * std::sin(th) + ut * std::cos(th));
  };
  ex.neumann = [g = ex.grad](Point2 p) {
    const Point2 n = outer_normal(p);
    const Eigen::Vector2d gr = g(p);
    return gr[0] * n.x + gr[1] * n.y;
  };
  return ex;
}

int floor_tol(double x) { return static_cast<int>(std::floor(x + 1e-9)); }

double mesh_h_max(const Decomposition& dec) {
  double h = 0.0;
  for (int k = 0; k < static_cast<int>(dec.mesh.elements.size()); ++k)
    h = std::max(h, dec.mesh.element_diameter(k));
  for (int j = 0; j < static_cast<int>(dec.boundary.panels.size()); ++j)
    h = std::max(h, dec.boundary.panel_length(j));
  return h;
}

int mesh_p_max(const Decomposition& dec) {
  int p = 1;
  for (const Element& e : dec.mesh.elements) p = std::max(p, e.degree);
  for (const Panel& pa : dec.boundary.panels) p = std::max(p, pa.degree);
  return p;
}

}  // namespace

ExactSolution exact_solution(ExampleId example) {
  return example == ExampleId::SquareSmooth ? square_solution() : lshape_solution();
}

StepResult solve_step(const Decomposition& dec, ExampleId example, double eta0) {
  const auto t0 = std::chrono::steady_clock::now();

  const FeSpace fe = build_fe_space(dec.mesh);
  const BeTraceSpace be = build_be_trace_space(dec.boundary);
  const BeFluxSpace flux = build_be_flux_space(dec.boundary);

  // Layer potentials on the capacity-scaled copy (diameter < 1, so V is SPD);
  // the Steklov energy is scale invariant in 2D, so S_hat couples directly.
  const BoundaryMesh scaled = apply(capacity_scale(dec.boundary), dec.boundary);
  const LayerMatrices lm = assemble_layers(scaled, be, flux);
  const VInverse vinv = discrete_V_inverse(lm.V);
  const Eigen::MatrixXd Shat = discrete_steklov(lm, vinv);

  const CouplingContext ctx =
      build_coupling(dec.mesh, fe, dec.boundary, be, dec.interface, eta0);
  const Eigen::MatrixXd Afe = assemble_stiffness(fe);
  const Eigen::MatrixXd C = assemble_penalty(ctx);
  const Eigen::MatrixXd B = assemble_flux_coupling(ctx);

  const ExactSolution ex = exact_solution(example);
  const Eigen::VectorXd load_fe = assemble_load(fe, ScalarField(), ex.neumann);
  const Eigen::VectorXd load_be = assemble_be_neumann_load(be, ex.neumann);

  const BlockSystem sys = assemble_global(fe, be, Afe, Shat, B, C, load_fe, load_be);

  StepResult res;
  res.symmetry = (sys.A - sys.A.transpose()).cwiseAbs().maxCoeff();
  const Solution sol = solve(sys);
  res.spd = sol.spd;
  res.residual = galerkin_residual(sys, sol);
  res.rec.err = energy_error(ctx, Shat, sol.full, ex.u, ex.grad);
  res.rec.N_FE = fe.size();
  res.rec.N_BE = be.size();
  res.rec.N = fe.size() + be.size();
  res.rec.h_max = mesh_h_max(dec);
  res.rec.p_max = mesh_p_max(dec);
  res.rec.wall_time =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return res;
}

std::vector<StepResult> run_study(const StudyConfig& cfg) {
  std::vector<StepResult> out;
  StudyMode mode = cfg.mode;
  if (mode == StudyMode::HP && cfg.example == ExampleId::SquareSmooth)
    mode = StudyMode::P;  // smooth solution: p refinement is already exponential

  const auto push = [&](Decomposition& dec, double sigma, double mu) {
    StepResult r = solve_step(dec, cfg.example, cfg.eta0);
    r.rec.step = static_cast<int>(out.size());
    r.rec.sigma = sigma;
    r.rec.mu = mu;
    if (!out.empty()) {
      const ConvergenceRecord& prev = out.back().rec;
      const double de = std::log(r.rec.err.total / prev.err.total);
      const double dh = std::log(r.rec.h_max / prev.h_max);
      const double dn = std::log(static_cast<double>(r.rec.N) / prev.N);
      // h-based rate when the mesh changed, N-based otherwise (p refinement)
      if (std::abs(dh) > 1e-12)
        r.rec.rate_running = de / dh;
      else if (std::abs(dn) > 1e-12)
        r.rec.rate_running = -de / dn;
    }
    out.push_back(std::move(r));
  };

  switch (mode) {
    case StudyMode::P: {
      DecompositionConfig dc;
      dc.example = cfg.example;
      dc.fe_refine = cfg.base_refine;
      dc.be_refine = cfg.base_refine;
      Decomposition dec = build_decomposition(dc);
      for (int p = 1; p <= cfg.max_p; ++p) {
        set_uniform_degree(dec.mesh, p);
        set_uniform_degree(dec.boundary, p);
        push(dec, 0.0, 0.0);
      }
      break;
    }
    case StudyMode::H: {
      for (int r = 0; r < cfg.max_refine; ++r) {
        DecompositionConfig dc;
        dc.example = cfg.example;
        dc.fe_refine = r;
        dc.be_refine = r;
        Decomposition dec = build_decomposition(dc);
        set_uniform_degree(dec.mesh, cfg.base_p);
        set_uniform_degree(dec.boundary, cfg.base_p);
        push(dec, 0.0, 0.0);
      }
      break;
    }
    case StudyMode::HP: {
      for (int n = 1; n <= cfg.max_layers; ++n) {
        DecompositionConfig dc;
        dc.example = cfg.example;
        dc.be_graded = true;
        dc.be_grading = {cfg.sigma_be, n, cfg.mu_be};
        if (cfg.example == ExampleId::LshapeConfig1) {
          // the FE subdomain excludes the corner, so its mesh stays fixed
          dc.fe_refine = 1;
        } else {
          dc.fe_graded = true;
          dc.fe_grading = {cfg.sigma_fe, n, cfg.mu_fe};
        }
        Decomposition dec = build_decomposition(dc);
        if (cfg.example == ExampleId::LshapeConfig1)
          set_uniform_degree(dec.mesh,
                             std::max(n + 1, floor_tol(cfg.mu_fe * (n + 1))));
        else
          assign_linear_degrees(dec.mesh, n, cfg.mu_fe);
        assign_linear_degrees(dec.boundary, n, cfg.mu_be);
        push(dec, cfg.sigma_be, cfg.mu_be);
      }
      break;
    }
  }
  return out;
}

std::string csv_header() {
  return "step,N,N_FE,N_BE,h_max,p_max,sigma,mu,err_total,err_fe,err_be,err_jump,"
         "rate_running";
}

std::string csv_line(const ConvergenceRecord& rec) {
  char buf[512];
  std::snprintf(buf, sizeof(buf),
                "%d,%d,%d,%d,%.12e,%d,%.12e,%.12e,%.12e,%.12e,%.12e,%.12e,%.12e",
                rec.step, rec.N, rec.N_FE, rec.N_BE, rec.h_max, rec.p_max, rec.sigma,
                rec.mu, rec.err.total, rec.err.fe_energy, rec.err.be_energy,
                rec.err.jump, rec.rate_running);
  return buf;
}

std::string csv_string(const std::vector<StepResult>& results) {
  std::string s = csv_header();
  s += '\n';
  for (const StepResult& r : results) {
    s += csv_line(r.rec);
    s += '\n';
  }
  return s;
}

}  // namespace febe
