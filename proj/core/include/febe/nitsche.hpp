#pragma once

#include <Eigen/Dense>
#include <map>

#include "febe/fem.hpp"
#include "febe/spaces.hpp"

namespace febe {

/// Interface plumbing shared by the coupling blocks: trace meshes of both
/// discretizations on the interface, their overlay, and the stabilization
/// eta = eta0 * kappa_K * G_K (constant per FE trace segment, copied to each
/// overlay child).
struct CouplingContext {
  const Mesh2D* mesh = nullptr;
  const FeSpace* fe = nullptr;
  const BeTraceSpace* be = nullptr;
  const InterfaceCurve* curve = nullptr;
  TracePartition fe_trace, be_trace;
  InterfaceOverlay ov;
  double eta0 = 2.0;

  int n_total() const { return fe->size() + be->size(); }
};

CouplingContext build_coupling(const Mesh2D& mesh, const FeSpace& fe, const BoundaryMesh& bm,
                               const BeTraceSpace& be, const InterfaceCurve& curve, double eta0);

/// Penalty block <eta [u],[phi]> on the combined DOF vector (FE first, then
/// BE); symmetric positive semidefinite.
Eigen::MatrixXd assemble_penalty(const CouplingContext& ctx);

/// Flux-consistency block -<q(u),[phi]> - <[u],q(phi)> with the one-sided
/// FE flux q(phi) = kappa grad(phi^1) . n^1; symmetric.
Eigen::MatrixXd assemble_flux_coupling(const CouplingContext& ctx);

/// Jump [u](s) = u^1(s) - u^2(s) of a combined coefficient vector.
double eval_jump(const CouplingContext& ctx, const Eigen::VectorXd& u, double s);

/// Weighted interface seminorm <eta [u],[u]>^{1/2}.
double jump_norm(const CouplingContext& ctx, const Eigen::VectorXd& u);

/// Discrete lifting: per interface-adjacent element, coefficients of the
/// vector field L(u) in the element-local gradient space [R_p]^2
/// (component-major), defined by (L(u), Psi) = <[u], Psi . n^1> on the
/// element's share of the interface. Elements away from the interface carry
/// no entry (their lifting vanishes).
std::map<int, Eigen::VectorXd> lifting_apply(const CouplingContext& ctx, const Eigen::VectorXd& u);

/// |a_hp(U, Phi) - a~_hp(U, Phi)| where a_hp uses the assembled blocks and
/// a~_hp replaces the flux pairings with lifting inner products.
double formulation_gap(const CouplingContext& ctx, const Eigen::MatrixXd& Afe,
                       const Eigen::MatrixXd& Shat, const Eigen::MatrixXd& B,
                       const Eigen::MatrixXd& C, const Eigen::VectorXd& U,
                       const Eigen::VectorXd& Phi);

}  // namespace febe
