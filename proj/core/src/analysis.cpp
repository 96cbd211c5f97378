#include "febe/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "febe/quadrature.hpp"

namespace febe {

namespace {

// corner-graded reference rule rotated so the grading points at local vertex c
QuadRule2D rotated_corner_rule(bool triangle, int c, double sigma, int layers, int order) {
  QuadRule2D q = triangle ? corner_graded_triangle_rule(sigma, layers, order)
                          : corner_graded_square_rule(sigma, layers, order);
  for (std::size_t i = 0; i < q.size(); ++i) {
    double x = q.x[i], y = q.y[i];
    if (triangle) {
      if (c == 1) {
        q.x[i] = 1.0 - x - y;
        q.y[i] = y;
      } else if (c == 2) {
        q.x[i] = x;
        q.y[i] = 1.0 - x - y;
      }
    } else {
      if (c == 1) {
        q.x[i] = 1.0 - x;
      } else if (c == 2) {
        q.x[i] = 1.0 - x;
        q.y[i] = 1.0 - y;
      } else if (c == 3) {
        q.y[i] = 1.0 - y;
      }
    }
  }
  return q;
}

}  // namespace

ErrorBreakdown energy_error(const CouplingContext& ctx, const Eigen::MatrixXd& Shat,
                            const Eigen::VectorXd& U, const ScalarField& u_exact,
                            const GradField& grad_exact) {
  const Mesh2D& mesh = *ctx.mesh;
  ErrorBreakdown eb;

  // FE part
  double acc = 0.0;
  const Eigen::VectorXd Ufe = U.head(ctx.fe->size());
  for (int k = 0; k < static_cast<int>(mesh.elements.size()); ++k) {
    const LocalBasisSpec& spec = ctx.fe->specs[k];
    const int p = spec.degree;
    int corner_local = -1;
    for (int i = 0; i < mesh.elements[k].nv() && corner_local < 0; ++i)
      for (const Point2& c : mesh.corners)
        if (dist(mesh.vertices[mesh.elements[k].v[i]], c) < 1e-9) corner_local = i;
    QuadRule2D q;
    if (corner_local >= 0) {
      q = rotated_corner_rule(spec.triangle, corner_local, 0.15, 20, std::max(8, 2 * p + 2));
    } else {
      const int n = p + 3;
      q = spec.triangle ? triangle_rule(n + 1, n) : tensor_rule(n, n);
    }
    Eigen::Matrix2d B;
    Eigen::Vector2d b;
    mesh.affine(k, B, b);
    const double jac = std::abs(B.determinant());
    const double kap = mesh.elements[k].kappa;
    for (std::size_t i = 0; i < q.size(); ++i) {
      const Eigen::Vector2d x = B * Eigen::Vector2d(q.x[i], q.y[i]) + b;
      const Eigen::Vector2d d = grad_exact({x[0], x[1]}) - ctx.fe->eval_grad(Ufe, k, q.x[i], q.y[i]);
      acc += kap * jac * q.w[i] * d.squaredNorm();
    }
  }
  eb.fe_energy = std::sqrt(acc);

  // BE part: Steklov energy of the interpolation defect
  const Eigen::VectorXd Iu = interpolate(*ctx.be, u_exact);
  const Eigen::VectorXd e2 = Iu - U.tail(ctx.be->size());
  eb.be_energy = std::sqrt(std::max(0.0, e2.dot(Shat * e2)));

  // jump part: the exact solution is continuous, so [u - U] = -[U]
  eb.jump = jump_norm(ctx, U);

  eb.total = std::sqrt(eb.fe_energy * eb.fe_energy + eb.be_energy * eb.be_energy +
                       eb.jump * eb.jump);
  return eb;
}

LinearFit linear_fit(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2)
    throw std::invalid_argument("linear_fit: need at least 2 matching points");
  const double n = static_cast<double>(x.size());
  double sx = 0, sy = 0, sxx = 0, syy = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    syy += y[i] * y[i];
    sxy += x[i] * y[i];
  }
  LinearFit fit;
  const double vx = sxx - sx * sx / n;
  const double vy = syy - sy * sy / n;
  const double cxy = sxy - sx * sy / n;
  fit.slope = cxy / vx;
  fit.intercept = (sy - fit.slope * sx) / n;
  fit.correlation = vy > 0.0 ? cxy / std::sqrt(vx * vy) : (std::abs(cxy) > 0 ? 1.0 : 0.0);
  return fit;
}

double fit_algebraic_rate(const std::vector<double>& x, const std::vector<double>& err) {
  if (x.size() < 3) throw std::invalid_argument("fit_algebraic_rate: need at least 3 records");
  std::vector<double> lx, le;
  for (std::size_t i = 0; i < x.size(); ++i) {
    lx.push_back(std::log(x[i]));
    le.push_back(std::log(err[i]));
  }
  return linear_fit(lx, le).slope;
}

std::pair<double, double> fit_exponential_rate(const std::vector<double>& N,
                                               const std::vector<double>& err, double dof_root) {
  if (N.size() < 4) throw std::invalid_argument("fit_exponential_rate: need at least 4 records");
  std::vector<double> x, le;
  for (std::size_t i = 0; i < N.size(); ++i) {
    x.push_back(std::pow(N[i], dof_root));
    le.push_back(std::log(err[i]));
  }
  const LinearFit fit = linear_fit(x, le);
  return {-fit.slope, std::abs(fit.correlation)};
}

double quasi_optimality_constant(double delta, double eta0) {
  if (!(delta > 1.0) || !(eta0 > delta))
    throw std::invalid_argument("quasi_optimality_constant: need eta0 > delta > 1");
  return delta / (delta - 1.0) * (eta0 + 1.0) / std::min(eta0 - delta, 1.0);
}

}  // namespace febe
