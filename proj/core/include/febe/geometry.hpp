#pragma once

#include <Eigen/Dense>
#include <array>
#include <cmath>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace febe {

struct Point2 {
  double x = 0.0;
  double y = 0.0;
};

inline Point2 operator+(Point2 a, Point2 b) { return {a.x + b.x, a.y + b.y}; }
inline Point2 operator-(Point2 a, Point2 b) { return {a.x - b.x, a.y - b.y}; }
inline Point2 operator*(double s, Point2 p) { return {s * p.x, s * p.y}; }
inline double dot(Point2 a, Point2 b) { return a.x * b.x + a.y * b.y; }
inline double norm(Point2 a) { return std::sqrt(dot(a, a)); }
inline double dist(Point2 a, Point2 b) { return norm(a - b); }

enum class ElemKind { Triangle, Parallelogram };
enum class EdgeTag { None, Dirichlet, Neumann, Interface };

struct GradingParams {
  double sigma = 0.5;
  int layers = 0;
  double slope = 1.0;  // degree-vector slope mu
};

/// Breakpoints 0 = x_0 < x_1 < ... < x_{layers+1} = 1 with
/// x_j = sigma^{layers+1-j}.
std::vector<double> geometric_partition_1d(double sigma, int layers);

struct Element {
  ElemKind kind = ElemKind::Triangle;
  std::array<int, 4> v{-1, -1, -1, -1};  // vertex ids, v[3] unused for triangles
  int degree = 1;
  int layer = -1;  // grading layer, -1 = regular
  double kappa = 1.0;

  int nv() const { return kind == ElemKind::Triangle ? 3 : 4; }
  int nedges() const { return nv(); }
};

struct Mesh2D {
  std::vector<Point2> vertices;
  std::vector<Element> elements;
  std::vector<std::array<EdgeTag, 4>> edge_tags;  // parallel to elements
  std::vector<Point2> corners;

  int add_vertex(Point2 p);

  /// Local edge e of element k as a (vertex id, vertex id) pair in local order.
  std::pair<int, int> edge(int k, int e) const;

  /// Affine map F_K(xi) = B xi + b from the reference element.
  void affine(int k, Eigen::Matrix2d& B, Eigen::Vector2d& b) const;

  double element_diameter(int k) const;
  double element_area(int k) const;
  double element_inradius(int k) const;
  double total_area() const;
  /// max over elements of h_K / rho_K.
  double shape_regularity() const;
  /// Edge-to-edge conformity (no hanging nodes, edges shared by <= 2 elements).
  bool is_regular(std::string* why = nullptr) const;

  /// Plain-text sections VERTICES / ELEMENTS / TAGS.
  std::string dump() const;

 private:
  // vertex dedup keyed on quantized coordinates
  struct Key {
    long long x, y;
    bool operator<(const Key& o) const { return x < o.x || (x == o.x && y < o.y); }
  };
  std::map<Key, int> lookup_;
};

struct Panel {
  int a = -1, b = -1;  // vertex ids, ordered so Omega2 lies left of a->b
  int degree = 1;
  int layer = -1;
  EdgeTag tag = EdgeTag::Interface;
  int arc = -1;
};

struct BoundaryMesh {
  std::vector<Point2> vertices;
  std::vector<Panel> panels;  // ordered counterclockwise, closing the loop
  std::vector<std::pair<Point2, Point2>> arcs;

  double panel_length(int j) const { return dist(vertices[panels[j].a], vertices[panels[j].b]); }
  /// Unit outward normal of Omega2.
  Point2 panel_normal(int j) const;
  Point2 panel_point(int j, double t) const;  // t in [0,1] from a to b
  double total_length() const;
  bool is_closed_loop(std::string* why = nullptr) const;
  std::string dump() const;
};

/// The coupling interface as an oriented polyline with Omega2 on the left;
/// parameterised by arc length.
struct InterfaceCurve {
  std::vector<Point2> pts;
  std::vector<double> cum;  // cumulative arc length, cum[0] = 0

  void build();  // fill cum from pts
  double length() const { return cum.back(); }
  Point2 at(double s) const;
  /// Unit normal pointing out of Omega1 (into Omega2).
  Point2 normal1(double s) const;
  /// Arc-length coordinate of a point on the polyline (consistency error if off-curve).
  double locate(Point2 p) const;
};

/// One cell of a 1D trace mesh on the interface.
struct TraceSegment {
  double s0 = 0.0, s1 = 0.0;
  int parent = -1;      // element id (FE) or panel id (BE)
  int local_edge = -1;  // FE only
  bool reversed = false;  // parent's own parameter runs against increasing s
  int degree = 1;
};

struct TracePartition {
  std::vector<TraceSegment> segments;  // sorted by s0, partitioning [0, L]
};

/// Trace mesh induced on the interface by the FE mesh.
TracePartition trace_partition(const Mesh2D& mesh, const InterfaceCurve& curve);
/// Trace mesh induced by the BE panels.
TracePartition trace_partition(const BoundaryMesh& bm, const InterfaceCurve& curve);

struct OverlaySegment {
  double s0 = 0.0, s1 = 0.0;
  int fe_seg = -1;  // index into the FE TracePartition
  int be_seg = -1;  // index into the BE TracePartition
  double eta = 0.0;
};

struct InterfaceOverlay {
  std::vector<OverlaySegment> segments;
  double length = 0.0;
};

/// Common refinement of the two trace meshes; endpoint merge tolerance
/// 1e-12 relative to the interface length.
InterfaceOverlay overlay(const TracePartition& fe, const TracePartition& be,
                         const InterfaceCurve& curve);

/// Uniform red refinement: quads into 4 quads, triangles into 4 triangles.
Mesh2D uniform_refine(const Mesh2D& mesh);

/// Geometric grading of all elements having `corner` as a vertex, with
/// conforming closure (neighbors with hanging nodes are split into
/// triangles). Elements carry layer indices afterwards.
Mesh2D refine_geometric_corner(const Mesh2D& mesh, Point2 corner, const GradingParams& grading);

// ---------------------------------------------------------------------------
// Shipped decompositions

enum class ExampleId { SquareSmooth, LshapeConfig1, LshapeConfig2 };

struct DecompositionConfig {
  ExampleId example = ExampleId::SquareSmooth;
  int fe_refine = 0;      // uniform refinement level of the coarse FE mesh
  int be_refine = 0;      // doubling level of the BE panel counts
  bool fe_graded = false;  // geometric grading toward the singular corner
  bool be_graded = false;
  GradingParams fe_grading;
  GradingParams be_grading;
  // Uniform-h override for the square example: mesh Omega1 with an h x h grid.
  std::optional<double> uniform_h;
};

struct Decomposition {
  Mesh2D mesh;
  BoundaryMesh boundary;
  InterfaceCurve interface;
};

/// Square domain of the smooth example: Omega = [-1,1]^2,
/// Omega2 = [-1,0]x[-1/2,1/2]. Defaults give 32 FE elements and
/// 20 BE panels with non-matching interface spacings 0.25 vs 0.2.
Decomposition build_square_decomposition(const DecompositionConfig& cfg);

/// L-shaped domain Omega = [-1,1]^2 \ [0,1]^2; configuration 1
/// encapsulates the re-entrant corner in the BE subdomain, configuration 2
/// splits along the diagonal from (-1,-1) to (0,0).
Decomposition build_lshape_decomposition(const DecompositionConfig& cfg);

Decomposition build_decomposition(const DecompositionConfig& cfg);

}  // namespace febe
