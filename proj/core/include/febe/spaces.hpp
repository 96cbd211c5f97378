#pragma once

#include <Eigen/Dense>
#include <functional>

#include "febe/geometry.hpp"
#include "febe/shape.hpp"

namespace febe {

using ScalarField = std::function<double(Point2)>;

/// Conforming hp space on the FE mesh. Shared edges use the minimum of the
/// adjacent element degrees; DOFs supported on the Dirichlet boundary are
/// eliminated. Global ordering: all DOFs without interface support first
/// (outer block), then the interface-coupled DOFs.
struct FeSpace {
  const Mesh2D* mesh = nullptr;
  std::vector<LocalBasisSpec> specs;   // per element
  std::vector<std::vector<int>> ldof;  // local -> global, -1 for eliminated
  int n_outer = 0;
  int n_interface = 0;

  int size() const { return n_outer + n_interface; }

  double eval(const Eigen::VectorXd& u, int elem, double xi, double eta) const;
  Eigen::Vector2d eval_grad(const Eigen::VectorXd& u, int elem, double xi, double eta) const;
  /// Trace on local edge e at the edge's global parameter t.
  double eval_edge(const Eigen::VectorXd& u, int elem, int e, double t) const;
};

FeSpace build_fe_space(const Mesh2D& mesh);

/// Continuous trace space on the closed boundary loop, vanishing on the
/// Dirichlet panels (support in the free part). Interface-supported DOFs
/// come first, then the remaining free DOFs.
struct BeTraceSpace {
  const BoundaryMesh* bm = nullptr;
  std::vector<std::vector<int>> ldof;  // per panel: vertex a, vertex b, modes
  int n_interface = 0;
  int n_outer = 0;

  int size() const { return n_interface + n_outer; }

  double eval(const Eigen::VectorXd& u, int panel, double t) const;
  /// d/dt of the trace along the panel parameter (not arc length).
  double eval_dt(const Eigen::VectorXd& u, int panel, double t) const;
};

BeTraceSpace build_be_trace_space(const BoundaryMesh& bm);

/// Discontinuous panel-wise space of degree p_J per panel, Legendre modes
/// P_0..P_p in the panel parameter.
struct BeFluxSpace {
  const BoundaryMesh* bm = nullptr;
  std::vector<int> offset;  // per panel, offset[panels.size()] = total
  int size() const { return offset.back(); }
  int panel_dim(int j) const { return offset[j + 1] - offset[j]; }

  double eval(const Eigen::VectorXd& u, int panel, double t) const;
};

BeFluxSpace build_be_flux_space(const BoundaryMesh& bm);

/// Degrees from grading layers: 2D elements use p = max{j+1, floor(mu (j+1))}
/// on layer j and the regular-region value at j = layers; 1D panels use
/// p_1 = 1, p_j = max{2, floor(mu j)} with ungraded panels at j = layers+1.
void assign_linear_degrees(Mesh2D& mesh, int layers, double mu);
void assign_linear_degrees(BoundaryMesh& bm, int layers, double mu);
void set_uniform_degree(Mesh2D& mesh, int p);
void set_uniform_degree(BoundaryMesh& bm, int p);

/// Interpolation: vertex values exact, edge and interior hierarchic
/// coefficients by local L2 projection.
Eigen::VectorXd interpolate(const FeSpace& space, const ScalarField& f);
Eigen::VectorXd interpolate(const BeTraceSpace& space, const ScalarField& f);
/// Panel-wise L2 projection (exact in each panel's polynomial space).
Eigen::VectorXd interpolate(const BeFluxSpace& space, const ScalarField& f);

}  // namespace febe
