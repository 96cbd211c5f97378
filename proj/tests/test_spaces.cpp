#include <doctest.h>

#include <cmath>
#include <random>

#include "febe/spaces.hpp"

using namespace febe;

namespace {

Mesh2D two_triangles() {
  // unit square split along the diagonal, all boundary edges Neumann
  Mesh2D mesh;
  const int a = mesh.add_vertex({0, 0}), b = mesh.add_vertex({1, 0}), c = mesh.add_vertex({1, 1}),
            d = mesh.add_vertex({0, 1});
  Element t1, t2;
  t1.v = {a, b, c, -1};
  t2.v = {a, c, d, -1};
  mesh.elements = {t1, t2};
  mesh.edge_tags.push_back({EdgeTag::Neumann, EdgeTag::Neumann, EdgeTag::None, EdgeTag::None});
  mesh.edge_tags.push_back({EdgeTag::None, EdgeTag::Neumann, EdgeTag::Neumann, EdgeTag::None});
  return mesh;
}

BoundaryMesh open_chain(const std::vector<int>& degrees) {
  BoundaryMesh bm;
  const int n = static_cast<int>(degrees.size());
  for (int i = 0; i <= n; ++i) bm.vertices.push_back({static_cast<double>(i), 0.0});
  for (int i = 0; i < n; ++i) {
    Panel p;
    p.a = i;
    p.b = i + 1;
    p.degree = degrees[i];
    p.tag = EdgeTag::Interface;
    bm.panels.push_back(p);
  }
  bm.arcs.push_back({bm.vertices.front(), bm.vertices.back()});
  return bm;
}

}  // namespace

TEST_CASE("dof enumeration") {
  SUBCASE("two linear triangles") {
    Mesh2D mesh = two_triangles();
    set_uniform_degree(mesh, 1);
    const FeSpace sp = build_fe_space(mesh);
    CHECK(sp.size() == 4);
    CHECK(sp.n_interface == 0);
  }
  SUBCASE("minimum rule on the shared edge") {
    Mesh2D mesh = two_triangles();
    mesh.elements[0].degree = 2;
    mesh.elements[1].degree = 3;
    const FeSpace sp = build_fe_space(mesh);
    // 4 vertices + boundary edge modes (1,1) + (2,2) + shared edge min(2,3)-1 = 1
    // + interior modes (0) + (1)
    CHECK(sp.size() == 4 + 2 + 4 + 1 + 0 + 1);
    CHECK(sp.specs[0].edge_degree[2] == 2);
    CHECK(sp.specs[1].edge_degree[0] == 2);
  }
  SUBCASE("continuous chain p=(2,3)") {
    const BoundaryMesh bm = open_chain({2, 3});
    const BeTraceSpace sp = build_be_trace_space(bm);
    CHECK(sp.size() == 6);
  }
  SUBCASE("flux space is discontinuous") {
    BoundaryMesh bm = open_chain({2, 2, 2});
    const BeFluxSpace sp = build_be_flux_space(bm);
    CHECK(sp.size() == 9);
  }
  SUBCASE("dirichlet panels are constrained") {
    BoundaryMesh bm = open_chain({2, 2, 2});
    bm.panels[1].tag = EdgeTag::Dirichlet;
    const BeTraceSpace sp = build_be_trace_space(bm);
    // panel 1 fully eliminated including its endpoint vertices:
    // remaining are the two outer vertices and interior modes of panels 0, 2
    CHECK(sp.size() == 2 + 1 + 1);
    Eigen::VectorXd u = Eigen::VectorXd::Ones(sp.size());
    for (const double t : {0.1, 0.5, 0.9}) CHECK(sp.eval(u, 1, t) == 0.0);
  }
}

TEST_CASE("degree assignment") {
  SUBCASE("1d linear degree vector mu=1 n=4") {
    BoundaryMesh bm = open_chain({1, 1, 1, 1});
    for (int j = 0; j < 4; ++j) bm.panels[j].layer = j + 1;
    assign_linear_degrees(bm, 4, 1.0);
    CHECK(bm.panels[0].degree == 1);
    CHECK(bm.panels[1].degree == 2);
    CHECK(bm.panels[2].degree == 3);
    CHECK(bm.panels[3].degree == 4);
  }
  SUBCASE("1d mu=0.5 mid layers") {
    BoundaryMesh bm = open_chain({1, 1, 1});
    bm.panels[0].layer = 2;
    bm.panels[1].layer = 3;
    bm.panels[2].layer = 4;
    assign_linear_degrees(bm, 4, 0.5);
    CHECK(bm.panels[0].degree == 2);
    CHECK(bm.panels[1].degree == 2);
    CHECK(bm.panels[2].degree == 2);
  }
  SUBCASE("2d layers 0..2 with mu=1") {
    Mesh2D mesh = two_triangles();
    mesh.elements[0].layer = 0;
    mesh.elements[1].layer = 1;
    assign_linear_degrees(mesh, 2, 1.0);
    CHECK(mesh.elements[0].degree == 1);
    CHECK(mesh.elements[1].degree == 2);
    mesh.elements[0].layer = 2;
    assign_linear_degrees(mesh, 2, 1.0);
    CHECK(mesh.elements[0].degree == 3);
  }
  SUBCASE("invalid slope") {
    Mesh2D mesh = two_triangles();
    CHECK_THROWS(assign_linear_degrees(mesh, 2, 0.0));
  }
}

TEST_CASE("interpolation and conformity") {
  Mesh2D mesh = two_triangles();
  mesh.elements[0].degree = 3;
  mesh.elements[1].degree = 4;
  const FeSpace sp = build_fe_space(mesh);

  SUBCASE("constants and linears reproduce") {
    const Eigen::VectorXd c1 = interpolate(sp, [](Point2) { return 1.0; });
    const Eigen::VectorXd cx = interpolate(sp, [](Point2 p) { return 0.25 + p.x - 2.0 * p.y; });
    std::mt19937 rng(3);
    std::uniform_real_distribution<double> u(0.05, 0.45);
    for (int it = 0; it < 10; ++it) {
      const double x = u(rng), y = u(rng);
      for (int k = 0; k < 2; ++k) {
        CHECK(sp.eval(c1, k, x, y) == doctest::Approx(1.0).epsilon(1e-12));
        // reference coords: element k covers different physical points
        Eigen::Matrix2d B;
        Eigen::Vector2d b;
        mesh.affine(k, B, b);
        const Eigen::Vector2d phys = B * Eigen::Vector2d(x, y) + b;
        CHECK(sp.eval(cx, k, x, y) ==
              doctest::Approx(0.25 + phys[0] - 2.0 * phys[1]).epsilon(1e-11));
      }
    }
  }

  SUBCASE("degree-3 polynomial reproduces despite the minimum rule") {
    const auto f = [](Point2 p) {
      return 1.0 + p.x + p.y * p.y + p.x * p.x * p.y - 0.5 * p.y * p.y * p.y;
    };
    const Eigen::VectorXd c = interpolate(sp, f);
    Eigen::Matrix2d B;
    Eigen::Vector2d b;
    for (int k = 0; k < 2; ++k) {
      mesh.affine(k, B, b);
      for (const auto [x, y] : {std::pair{0.2, 0.3}, {0.05, 0.8}, {0.6, 0.1}}) {
        const Eigen::Vector2d phys = B * Eigen::Vector2d(x, y) + b;
        CHECK(sp.eval(c, k, x, y) == doctest::Approx(f({phys[0], phys[1]})).epsilon(1e-10));
      }
    }
  }

  SUBCASE("traces agree across the shared edge") {
    const Eigen::VectorXd c =
        interpolate(sp, [](Point2 p) { return std::sin(p.x + 0.3) * std::cos(2.0 * p.y); });
    // shared edge: element 0 local edge 2 (c->a), element 1 local edge 0 (a->c)
    for (const double t : {0.07, 0.31, 0.5, 0.77, 0.93}) {
      const double va = sp.eval_edge(c, 0, 2, t);
      const double vb = sp.eval_edge(c, 1, 0, t);
      CHECK(va == doctest::Approx(vb).epsilon(1e-12));
    }
  }

  SUBCASE("gradient evaluation") {
    const Eigen::VectorXd cx = interpolate(sp, [](Point2 p) { return 3.0 * p.x - p.y; });
    const Eigen::Vector2d g = sp.eval_grad(cx, 1, 0.2, 0.2);
    CHECK(g[0] == doctest::Approx(3.0).epsilon(1e-11));
    CHECK(g[1] == doctest::Approx(-1.0).epsilon(1e-11));
  }
}

TEST_CASE("boundary interpolation") {
  BoundaryMesh bm = open_chain({3, 2});
  const BeTraceSpace tr = build_be_trace_space(bm);
  const BeFluxSpace fx = build_be_flux_space(bm);

  SUBCASE("trace reproduction") {
    // chain lies on y=0, param of panel j covers x in [j, j+1]
    const auto f = [](Point2 p) { return 0.3 + p.x * (2.0 - p.x); };
    const Eigen::VectorXd c = interpolate(tr, f);
    for (int j = 0; j < 2; ++j)
      for (const double t : {0.0, 0.25, 0.6, 1.0})
        CHECK(tr.eval(c, j, t) == doctest::Approx(f({j + t, 0.0})).epsilon(1e-11));
  }
  SUBCASE("flux projection is exact on polynomials") {
    const auto f = [](Point2 p) { return 1.0 + p.x * p.x; };
    const Eigen::VectorXd c = interpolate(fx, f);
    for (int j = 0; j < 2; ++j)
      for (const double t : {0.1, 0.5, 0.95})
        CHECK(fx.eval(c, j, t) == doctest::Approx(f({j + t, 0.0})).epsilon(1e-11));
  }
  SUBCASE("x^2 best approximation on a p=1 panel") {
    BoundaryMesh lin = open_chain({1});
    const BeFluxSpace fl = build_be_flux_space(lin);
    const Eigen::VectorXd c = interpolate(fl, [](Point2 p) { return p.x * p.x; });
    // L2(0,1) projection of t^2 onto span{1,t}: 1/3 + (t-1/2) -> value 5/6 at t=1
    CHECK(fl.eval(c, 0, 1.0) == doctest::Approx(5.0 / 6.0).epsilon(1e-12));
  }
}
