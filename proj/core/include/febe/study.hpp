#pragma once

#include <string>
#include <vector>

#include "febe/analysis.hpp"
#include "febe/geometry.hpp"

namespace febe {

/// Exact solutions of the shipped experiments, with gradients and
/// position-dependent Neumann data (the outward normal is inferred from the
/// boundary segment a point lies on).
struct ExactSolution {
  ScalarField u;
  GradField grad;
  ScalarField neumann;  // du/dn on the Neumann boundary (kappa = 1)
};

ExactSolution exact_solution(ExampleId example);

enum class StudyMode { H, P, HP };

struct StudyConfig {
  ExampleId example = ExampleId::SquareSmooth;
  StudyMode mode = StudyMode::P;
  double eta0 = 2.0;
  double sigma_fe = 0.5, sigma_be = 0.5;
  double mu_fe = 1.0, mu_be = 1.0;
  int max_p = 6;        // p mode: degrees 1..max_p
  int max_refine = 4;   // h mode: refinement levels 0..max_refine-1
  int max_layers = 6;   // hp mode: layers 1..max_layers
  int base_p = 1;       // degree in h mode
  int base_refine = 0;  // extra uniform refinement of the fixed mesh in p mode
  // Interface mesh-size ratio h_FE/h_BE of the square example; only the
  // shipped 4/5 decomposition is supported.
  double fe_be_ratio = 0.8;
};

struct StepResult {
  ConvergenceRecord rec;
  double residual = 0.0;   // relative algebraic residual
  double symmetry = 0.0;   // max-norm asymmetry of the system matrix
  bool spd = true;
};

/// One solve on a prepared decomposition with degrees already assigned.
StepResult solve_step(const Decomposition& dec, ExampleId example, double eta0);

std::vector<StepResult> run_study(const StudyConfig& cfg);

std::string csv_header();
std::string csv_line(const ConvergenceRecord& rec);
std::string csv_string(const std::vector<StepResult>& results);

}  // namespace febe
