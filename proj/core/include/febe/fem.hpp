#pragma once

#include <Eigen/Dense>

#include "febe/spaces.hpp"

namespace febe {

/// Stiffness matrix of (kappa grad u, grad v) over the FE space; kappa is
/// the per-element coefficient stored in the mesh, optionally scaled.
Eigen::MatrixXd assemble_stiffness(const FeSpace& space, double kappa_scale = 1.0);

/// Load vector (f, v) + <g, v> on the Neumann boundary.
Eigen::VectorXd assemble_load(const FeSpace& space, const ScalarField& f, const ScalarField& g);

/// Element mass matrix contribution (u, v); used by interpolation-error
/// reporting and tests.
Eigen::MatrixXd assemble_mass(const FeSpace& space);

/// Sharp polynomial trace constant for edge e of an element:
/// (p+1)(p+2)/2 * |J|/|K| on triangles, (p+1)^2 * |J|/|K| on parallelograms.
double trace_constant(const Mesh2D& mesh, int elem, int local_edge);
double trace_constant(const Mesh2D& mesh, int elem, int local_edge, int degree);

}  // namespace febe
