#pragma once

#include <array>
#include <vector>

namespace febe {

/// P_0..P_n at x in [-1,1].
void legendre_all(double x, int n, std::vector<double>& p);
/// P_0..P_n and first derivatives.
void legendre_all_d1(double x, int n, std::vector<double>& p, std::vector<double>& dp);
/// P_0..P_n, first and second derivatives.
void legendre_all_d2(double x, int n, std::vector<double>& p, std::vector<double>& dp,
                     std::vector<double>& ddp);

// Hierarchic 1D basis on [0,1]: b_0 = 1-t, b_1 = t, and for k >= 2 the
// integrated-Legendre modes N_k(t) = (P_k - P_{k-2})(2t-1)/sqrt(2(2k-1)),
// which vanish at both endpoints and satisfy N_k(1-t) = (-1)^k N_k(t).

/// Values of b_0..b_p at t.
void basis_1d(int p, double t, std::vector<double>& v);
/// Values and derivatives of b_0..b_p at t.
void basis_1d_d1(int p, double t, std::vector<double>& v, std::vector<double>& dv);

/// Layout of element-local degrees of freedom for the hierarchic basis:
/// vertex modes, then (degree-1) modes per edge (possibly reduced by the
/// minimum rule), then interior modes. Edge flips reverse the edge
/// parameter so that both elements sharing an edge agree on its trace.
struct LocalBasisSpec {
  bool triangle = true;
  int degree = 1;
  std::array<int, 4> edge_degree{1, 1, 1, 1};  // per local edge, <= degree
  std::array<bool, 4> edge_flip{false, false, false, false};

  int num_vertices() const { return triangle ? 3 : 4; }
  int num_edges() const { return triangle ? 3 : 4; }
  int num_edge_modes(int e) const { return edge_degree[e] > 1 ? edge_degree[e] - 1 : 0; }
  int num_interior() const {
    const int p = degree;
    if (triangle) return p >= 3 ? (p - 1) * (p - 2) / 2 : 0;
    return p >= 2 ? (p - 1) * (p - 1) : 0;
  }
  int size() const {
    int n = num_vertices() + num_interior();
    for (int e = 0; e < num_edges(); ++e) n += num_edge_modes(e);
    return n;
  }
  int vertex_dof(int v) const { return v; }
  int edge_dof_begin(int e) const {
    int n = num_vertices();
    for (int i = 0; i < e; ++i) n += num_edge_modes(i);
    return n;
  }
  int interior_dof_begin() const { return edge_dof_begin(num_edges()); }
};

/// Evaluate all local shape functions at a reference point.
/// Triangle reference: {(0,0),(1,0),(0,1)}; quad reference: [0,1]^2 with
/// vertices (0,0),(1,0),(1,1),(0,1) and edges (01),(12),(23),(30).
void shape_values(const LocalBasisSpec& spec, double xi, double eta, std::vector<double>& v);

/// Values and reference gradients (dxi, deta).
void shape_values_grads(const LocalBasisSpec& spec, double xi, double eta, std::vector<double>& v,
                        std::vector<double>& dxi, std::vector<double>& deta);

/// Trace of the local basis on edge e at edge parameter t in [0,1]
/// (t runs in the global orientation of the edge). Fills one value per
/// local DOF; interior modes and modes of other edges evaluate to 0.
void shape_edge_trace(const LocalBasisSpec& spec, int e, double t, std::vector<double>& v);

/// Map edge parameter t (global orientation) to reference coordinates on
/// edge e of the reference element.
void edge_point(const LocalBasisSpec& spec, int e, double t, double& xi, double& eta);

// 1D continuous basis on a panel: vertex modes b_0, b_1 plus interior
// modes N_2..N_p; this is basis_1d with the panel's own orientation.

}  // namespace febe
