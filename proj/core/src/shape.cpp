#include "febe/shape.hpp"

#include <cmath>
#include <stdexcept>

namespace febe {

void legendre_all(double x, int n, std::vector<double>& p) {
  p.assign(n + 1, 0.0);
  p[0] = 1.0;
  if (n >= 1) p[1] = x;
  for (int k = 2; k <= n; ++k) p[k] = ((2.0 * k - 1.0) * x * p[k - 1] - (k - 1.0) * p[k - 2]) / k;
}

void legendre_all_d1(double x, int n, std::vector<double>& p, std::vector<double>& dp) {
  legendre_all(x, n, p);
  dp.assign(n + 1, 0.0);
  if (n >= 1) dp[1] = 1.0;
  for (int k = 2; k <= n; ++k) dp[k] = dp[k - 2] + (2.0 * k - 1.0) * p[k - 1];
}

void legendre_all_d2(double x, int n, std::vector<double>& p, std::vector<double>& dp,
                     std::vector<double>& ddp) {
  legendre_all_d1(x, n, p, dp);
  ddp.assign(n + 1, 0.0);
  for (int k = 2; k <= n; ++k) ddp[k] = ddp[k - 2] + (2.0 * k - 1.0) * dp[k - 1];
}

namespace {
inline double ck(int k) { return 1.0 / std::sqrt(2.0 * (2.0 * k - 1.0)); }
// N_k(t) = d_k * t(1-t) * P'_{k-1}(2t-1) with this prefactor.
inline double dk(int k) { return -4.0 * ck(k) * (2.0 * k - 1.0) / (double(k) * (k - 1.0)); }
}  // namespace

void basis_1d(int p, double t, std::vector<double>& v) {
  v.assign(p + 1, 0.0);
  v[0] = 1.0 - t;
  if (p >= 1) v[1] = t;
  if (p >= 2) {
    std::vector<double> leg;
    legendre_all(2.0 * t - 1.0, p, leg);
    for (int k = 2; k <= p; ++k) v[k] = ck(k) * (leg[k] - leg[k - 2]);
  }
}

void basis_1d_d1(int p, double t, std::vector<double>& v, std::vector<double>& dv) {
  v.assign(p + 1, 0.0);
  dv.assign(p + 1, 0.0);
  v[0] = 1.0 - t;
  dv[0] = -1.0;
  if (p >= 1) {
    v[1] = t;
    dv[1] = 1.0;
  }
  if (p >= 2) {
    std::vector<double> leg;
    legendre_all(2.0 * t - 1.0, p, leg);
    for (int k = 2; k <= p; ++k) {
      v[k] = ck(k) * (leg[k] - leg[k - 2]);
      dv[k] = 2.0 * ck(k) * (2.0 * k - 1.0) * leg[k - 1];
    }
  }
}

namespace {

struct Bary {
  // barycentric values and reference gradients for the unit triangle
  std::array<double, 3> l;
  std::array<std::array<double, 2>, 3> g;
};

Bary barycentric(double xi, double eta) {
  Bary b;
  b.l = {1.0 - xi - eta, xi, eta};
  b.g = {{{-1.0, -1.0}, {1.0, 0.0}, {0.0, 1.0}}};
  return b;
}

constexpr int tri_edge_v[3][2] = {{0, 1}, {1, 2}, {2, 0}};
constexpr int quad_edge_v[4][2] = {{0, 1}, {1, 2}, {2, 3}, {3, 0}};

}  // namespace

void shape_values_grads(const LocalBasisSpec& spec, double xi, double eta, std::vector<double>& v,
                        std::vector<double>& dx, std::vector<double>& dy) {
  const int n = spec.size();
  v.assign(n, 0.0);
  dx.assign(n, 0.0);
  dy.assign(n, 0.0);
  const int p = spec.degree;

  if (spec.triangle) {
    const Bary b = barycentric(xi, eta);
    for (int i = 0; i < 3; ++i) {
      v[i] = b.l[i];
      dx[i] = b.g[i][0];
      dy[i] = b.g[i][1];
    }
    std::vector<double> P, dP, ddP;
    int idx = spec.edge_dof_begin(0);
    for (int e = 0; e < 3; ++e) {
      int a = tri_edge_v[e][0], bb = tri_edge_v[e][1];
      if (spec.edge_flip[e]) std::swap(a, bb);
      const double la = b.l[a], lb = b.l[bb];
      const double z = lb - la;
      const int pe = spec.edge_degree[e];
      if (pe >= 2) {
        legendre_all_d2(z, pe - 1, P, dP, ddP);
        for (int k = 2; k <= pe; ++k) {
          const double d = dk(k);
          v[idx] = d * la * lb * dP[k - 1];
          for (int c = 0; c < 2; ++c) {
            const double gla = b.g[a][c], glb = b.g[bb][c];
            const double grad = d * ((gla * lb + la * glb) * dP[k - 1] +
                                     la * lb * ddP[k - 1] * (glb - gla));
            (c == 0 ? dx : dy)[idx] = grad;
          }
          ++idx;
        }
      }
    }
    if (p >= 3) {
      const double l0 = b.l[0], l1 = b.l[1], l2 = b.l[2];
      const double bub = l0 * l1 * l2;
      const std::array<double, 2> gbub = {
          b.g[0][0] * l1 * l2 + l0 * b.g[1][0] * l2 + l0 * l1 * b.g[2][0],
          b.g[0][1] * l1 * l2 + l0 * b.g[1][1] * l2 + l0 * l1 * b.g[2][1]};
      const double z1 = l1 - l0, z2 = 2.0 * l2 - 1.0;
      const std::array<double, 2> gz1 = {b.g[1][0] - b.g[0][0], b.g[1][1] - b.g[0][1]};
      const std::array<double, 2> gz2 = {2.0 * b.g[2][0], 2.0 * b.g[2][1]};
      std::vector<double> P1, dP1, P2, dP2;
      legendre_all_d1(z1, p - 3, P1, dP1);
      legendre_all_d1(z2, p - 3, P2, dP2);
      for (int i = 0; i + 3 <= p; ++i)
        for (int j = 0; i + j + 3 <= p; ++j) {
          v[idx] = bub * P1[i] * P2[j];
          dx[idx] = gbub[0] * P1[i] * P2[j] + bub * dP1[i] * gz1[0] * P2[j] +
                    bub * P1[i] * dP2[j] * gz2[0];
          dy[idx] = gbub[1] * P1[i] * P2[j] + bub * dP1[i] * gz1[1] * P2[j] +
                    bub * P1[i] * dP2[j] * gz2[1];
          ++idx;
        }
    }
  } else {
    std::vector<double> bx, dbx, by, dby;
    basis_1d_d1(p, xi, bx, dbx);
    basis_1d_d1(p, eta, by, dby);
    // vertices (0,0),(1,0),(1,1),(0,1)
    const int vi[4][2] = {{0, 0}, {1, 0}, {1, 1}, {0, 1}};
    for (int i = 0; i < 4; ++i) {
      v[i] = bx[vi[i][0]] * by[vi[i][1]];
      dx[i] = dbx[vi[i][0]] * by[vi[i][1]];
      dy[i] = bx[vi[i][0]] * dby[vi[i][1]];
    }
    int idx = spec.edge_dof_begin(0);
    for (int e = 0; e < 4; ++e) {
      const int pe = spec.edge_degree[e];
      if (pe < 2) continue;
      // local edge parameter u and global parameter t = flip ? 1-u : u
      for (int k = 2; k <= pe; ++k) {
        double u, du_dxi, du_deta, blend, bl_dxi, bl_deta;
        switch (e) {
          case 0: u = xi; du_dxi = 1; du_deta = 0; blend = 1.0 - eta; bl_dxi = 0; bl_deta = -1; break;
          case 1: u = eta; du_dxi = 0; du_deta = 1; blend = xi; bl_dxi = 1; bl_deta = 0; break;
          case 2: u = 1.0 - xi; du_dxi = -1; du_deta = 0; blend = eta; bl_dxi = 0; bl_deta = 1; break;
          default: u = 1.0 - eta; du_dxi = 0; du_deta = -1; blend = 1.0 - xi; bl_dxi = -1; bl_deta = 0; break;
        }
        double t = u, dt = 1.0;
        if (spec.edge_flip[e]) {
          t = 1.0 - u;
          dt = -1.0;
        }
        std::vector<double> nb, dnb;
        basis_1d_d1(k, t, nb, dnb);
        const double Nk = nb[k], dNk = dnb[k] * dt;
        v[idx] = Nk * blend;
        dx[idx] = dNk * du_dxi * blend + Nk * bl_dxi;
        dy[idx] = dNk * du_deta * blend + Nk * bl_deta;
        ++idx;
      }
    }
    if (p >= 2) {
      for (int i = 2; i <= p; ++i)
        for (int j = 2; j <= p; ++j) {
          v[idx] = bx[i] * by[j];
          dx[idx] = dbx[i] * by[j];
          dy[idx] = bx[i] * dby[j];
          ++idx;
        }
    }
  }
}

void shape_values(const LocalBasisSpec& spec, double xi, double eta, std::vector<double>& v) {
  std::vector<double> dx, dy;
  shape_values_grads(spec, xi, eta, v, dx, dy);
}

void edge_point(const LocalBasisSpec& spec, int e, double t, double& xi, double& eta) {
  const double u = spec.edge_flip[e] ? 1.0 - t : t;
  if (spec.triangle) {
    static constexpr double tv[3][2] = {{0, 0}, {1, 0}, {0, 1}};
    const int a = tri_edge_v[e][0], b = tri_edge_v[e][1];
    xi = tv[a][0] + u * (tv[b][0] - tv[a][0]);
    eta = tv[a][1] + u * (tv[b][1] - tv[a][1]);
  } else {
    static constexpr double qv[4][2] = {{0, 0}, {1, 0}, {1, 1}, {0, 1}};
    const int a = quad_edge_v[e][0], b = quad_edge_v[e][1];
    xi = qv[a][0] + u * (qv[b][0] - qv[a][0]);
    eta = qv[a][1] + u * (qv[b][1] - qv[a][1]);
  }
}

void shape_edge_trace(const LocalBasisSpec& spec, int e, double t, std::vector<double>& v) {
  v.assign(spec.size(), 0.0);
  const double u = spec.edge_flip[e] ? 1.0 - t : t;
  const int a = spec.triangle ? tri_edge_v[e][0] : quad_edge_v[e][0];
  const int b = spec.triangle ? tri_edge_v[e][1] : quad_edge_v[e][1];
  v[a] = 1.0 - u;
  v[b] = u;
  const int pe = spec.edge_degree[e];
  if (pe >= 2) {
    std::vector<double> nb;
    basis_1d(pe, t, nb);
    int idx = spec.edge_dof_begin(e);
    for (int k = 2; k <= pe; ++k) v[idx++] = nb[k];
  }
}

}  // namespace febe
