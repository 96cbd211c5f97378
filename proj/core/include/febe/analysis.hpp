#pragma once

#include <Eigen/Dense>
#include <functional>
#include <vector>

#include "febe/nitsche.hpp"

namespace febe {

struct ErrorBreakdown {
  double fe_energy = 0.0;  // kappa-weighted H1 seminorm error on the FE subdomain
  double be_energy = 0.0;  // discrete Steklov energy of the trace error
  double jump = 0.0;       // eta-weighted interface jump norm
  double total = 0.0;
};

struct ConvergenceRecord {
  int step = 0;
  int N = 0, N_FE = 0, N_BE = 0;
  double h_max = 0.0;
  int p_max = 1;
  double sigma = 0.0, mu = 0.0;
  ErrorBreakdown err;
  double rate_running = 0.0;
  double wall_time = 0.0;
};

using GradField = std::function<Eigen::Vector2d(Point2)>;

/// Energy-norm error of a solved coupled system against the exact solution.
/// The FE part integrates kappa |grad(u - U^1)|^2 with corner-graded
/// quadrature on elements touching a listed corner; the BE part is the
/// Steklov energy of (interpolant of u^2) - U^2; the jump part is the
/// eta-weighted norm of the discrete jump (the exact solution is continuous
/// across the interface).
ErrorBreakdown energy_error(const CouplingContext& ctx, const Eigen::MatrixXd& Shat,
                            const Eigen::VectorXd& U, const ScalarField& u_exact,
                            const GradField& grad_exact);

struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
  double correlation = 0.0;
};

LinearFit linear_fit(const std::vector<double>& x, const std::vector<double>& y);

/// Least-squares slope of log(err) against log(x); x is h, p, or N.
/// Requires at least 3 points.
double fit_algebraic_rate(const std::vector<double>& x, const std::vector<double>& err);

/// Fit log(err) = a - b N^{dof_root}; returns (b, |correlation| of the fit).
/// Requires at least 4 points.
std::pair<double, double> fit_exponential_rate(const std::vector<double>& N,
                                               const std::vector<double>& err, double dof_root);

/// Quasi-optimality constant delta/(delta-1) * (eta0+1)/min(eta0-delta, 1);
/// requires eta0 > delta > 1.
double quasi_optimality_constant(double delta, double eta0);

}  // namespace febe
