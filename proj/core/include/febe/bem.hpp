#pragma once

#include <Eigen/Dense>
#include <stdexcept>

#include "febe/spaces.hpp"

namespace febe {

/// Raised when the single-layer Galerkin matrix is not positive definite
/// (logarithmic capacity of the unscaled curve too large).
struct CapacityError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct UnsupportedFeature : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Fundamental solution of the 2D Laplacian, -(1/2pi) ln|x-y|.
double kernel_G(Point2 x, Point2 y);

struct ScaleTransform {
  double s = 1.0;
  Point2 center{0.0, 0.0};
  Point2 apply(Point2 p) const { return center + s * (p - center); }
};

/// Scale by 1/4 about the barycenter of the boundary vertices; makes every
/// shipped curve have diameter < 1 so the single-layer matrix is SPD.
ScaleTransform capacity_scale(const BoundaryMesh& bm);
BoundaryMesh apply(const ScaleTransform& tr, const BoundaryMesh& bm);

struct LayerMatrices {
  Eigen::MatrixXd V;   // single layer, flux x flux
  Eigen::MatrixXd K;   // double layer, flux (test) x trace (trial)
  Eigen::MatrixXd M;   // mass pairing, flux (test) x trace (trial)
  Eigen::MatrixXd W;   // hypersingular, trace x trace (via the V of derivatives)
  Eigen::VectorXd Mf;  // flux Gram diagonal h_j/(2k+1)
};

LayerMatrices assemble_layers(const BoundaryMesh& bm, const BeTraceSpace& trace,
                              const BeFluxSpace& flux, int order = 0);

struct VInverse {
  Eigen::LLT<Eigen::MatrixXd> llt;
  Eigen::VectorXd apply(const Eigen::VectorXd& w) const { return llt.solve(w); }
  Eigen::MatrixXd apply(const Eigen::MatrixXd& w) const { return llt.solve(w); }
};

VInverse discrete_V_inverse(const Eigen::MatrixXd& V);

/// S_hat = W + (K + M/2)^T V^{-1} (K + M/2); symmetric on the trace space.
Eigen::MatrixXd discrete_steklov(const LayerMatrices& lm, const VInverse& vinv);

/// Residual of the first interior Calderon row V phi = (1/2 + K) u for a
/// harmonic pair (trace, normal flux), in the discrete L2(boundary) norm.
/// Assembled on the mesh as given (no rescale needed; V is not inverted).
double calderon_residual(const BoundaryMesh& bm, const ScalarField& u_trace,
                         const ScalarField& u_flux);

/// Newton-potential right-hand side; only f = 0 (null callback) supported.
Eigen::VectorXd newton_rhs(const BeTraceSpace& trace, const ScalarField& f);

}  // namespace febe
