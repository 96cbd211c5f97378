#include "febe/solver.hpp"

#include <cmath>
#include <iostream>
#include <stdexcept>

#include "febe/quadrature.hpp"
#include "febe/shape.hpp"

namespace febe {

BlockSystem assemble_global(const FeSpace& fe, const BeTraceSpace& be,
                            const Eigen::MatrixXd& Afe, const Eigen::MatrixXd& Shat,
                            const Eigen::MatrixXd& B, const Eigen::MatrixXd& C,
                            const Eigen::VectorXd& load_fe, const Eigen::VectorXd& load_be) {
  const int nf = fe.size();
  const int nb = be.size();
  if (Afe.rows() != nf || Shat.rows() != nb || B.rows() != nf + nb || C.rows() != nf + nb ||
      load_fe.size() != nf || load_be.size() != nb)
    throw std::invalid_argument("assemble_global: dimension mismatch");
  BlockSystem sys;
  sys.n_fe_outer = fe.n_outer;
  sys.n_fe_interface = fe.n_interface;
  sys.n_be_interface = be.n_interface;
  sys.n_be_outer = be.n_outer;
  sys.A = B + C;
  sys.A.topLeftCorner(nf, nf) += Afe;
  sys.A.bottomRightCorner(nb, nb) += Shat;
  sys.rhs.resize(nf + nb);
  sys.rhs.head(nf) = load_fe;
  sys.rhs.tail(nb) = load_be;
  return sys;
}

Eigen::VectorXd assemble_be_neumann_load(const BeTraceSpace& be, const ScalarField& g) {
  const BoundaryMesh& bm = *be.bm;
  Eigen::VectorXd l = Eigen::VectorXd::Zero(be.size());
  if (!g) return l;
  std::vector<double> v;
  for (int j = 0; j < static_cast<int>(bm.panels.size()); ++j) {
    if (bm.panels[j].tag != EdgeTag::Neumann) continue;
    const int p = bm.panels[j].degree;
    const double h = bm.panel_length(j);
    const QuadRule q = gauss_legendre(p + 6);
    for (std::size_t i = 0; i < q.size(); ++i) {
      const double w = h * q.weights[i] * g(bm.panel_point(j, q.nodes[i]));
      basis_1d(p, q.nodes[i], v);
      for (int a = 0; a <= p; ++a) {
        const int ga = be.ldof[j][a];
        if (ga >= 0) l[ga] += w * v[a];
      }
    }
  }
  return l;
}

Solution solve(const BlockSystem& sys) {
  Solution sol;
  const Eigen::LLT<Eigen::MatrixXd> llt(sys.A);
  if (llt.info() == Eigen::Success) {
    sol.full = llt.solve(sys.rhs);
  } else {
    sol.spd = false;
    std::cerr << "solve: matrix not positive definite, using pivoted LDLT\n";
    const Eigen::LDLT<Eigen::MatrixXd> ldlt(sys.A);
    const double minpivot = ldlt.vectorD().cwiseAbs().minCoeff();
    if (ldlt.info() != Eigen::Success || minpivot < 1e-14 * sys.A.norm())
      throw std::runtime_error("solve: singular system, smallest pivot " +
                               std::to_string(minpivot));
    sol.full = ldlt.solve(sys.rhs);
  }
  const int nf = sys.n_fe_outer + sys.n_fe_interface;
  sol.fe = sol.full.head(nf);
  sol.be = sol.full.tail(sys.size() - nf);
  return sol;
}

double galerkin_residual(const BlockSystem& sys, const Solution& sol) {
  const double r = (sys.A * sol.full - sys.rhs).lpNorm<Eigen::Infinity>();
  const double d = sys.rhs.lpNorm<Eigen::Infinity>();
  return d > 0.0 ? r / d : r;
}

}  // namespace febe
