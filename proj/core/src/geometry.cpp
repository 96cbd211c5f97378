#include "febe/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>

namespace febe {

namespace {
constexpr double kPointTol = 1e-9;

bool close(Point2 a, Point2 b, double tol = kPointTol) { return dist(a, b) < tol; }

bool on_segment(Point2 p, Point2 a, Point2 b, double tol = kPointTol) {
  return std::abs(dist(a, p) + dist(p, b) - dist(a, b)) < tol;
}

bool strictly_inside_segment(Point2 p, Point2 a, Point2 b, double tol = kPointTol) {
  if (close(p, a, tol) || close(p, b, tol)) return false;
  return on_segment(p, a, b, tol);
}

const char* tag_name(EdgeTag t) {
  switch (t) {
    case EdgeTag::Dirichlet: return "dirichlet";
    case EdgeTag::Neumann: return "neumann";
    case EdgeTag::Interface: return "interface";
    default: return "none";
  }
}

}  // namespace

std::vector<double> geometric_partition_1d(double sigma, int layers) {
  if (!(sigma > 0.0 && sigma < 1.0))
    throw std::invalid_argument("geometric_partition_1d: sigma must be in (0,1)");
  if (layers < 0) throw std::invalid_argument("geometric_partition_1d: layers must be >= 0");
  std::vector<double> x(layers + 2);
  x[0] = 0.0;
  for (int j = 1; j <= layers + 1; ++j) x[j] = std::pow(sigma, layers + 1 - j);
  return x;
}

int Mesh2D::add_vertex(Point2 p) {
  const Key k{static_cast<long long>(std::llround(p.x * 1e10)),
              static_cast<long long>(std::llround(p.y * 1e10))};
  auto it = lookup_.find(k);
  if (it != lookup_.end()) return it->second;
  const int id = static_cast<int>(vertices.size());
  vertices.push_back(p);
  lookup_[k] = id;
  return id;
}

std::pair<int, int> Mesh2D::edge(int k, int e) const {
  const Element& el = elements[k];
  const int n = el.nv();
  return {el.v[e], el.v[(e + 1) % n]};
}

void Mesh2D::affine(int k, Eigen::Matrix2d& B, Eigen::Vector2d& b) const {
  const Element& el = elements[k];
  const Point2 v0 = vertices[el.v[0]];
  const Point2 v1 = vertices[el.v[1]];
  const Point2 vlast = vertices[el.v[el.kind == ElemKind::Triangle ? 2 : 3]];
  B << v1.x - v0.x, vlast.x - v0.x, v1.y - v0.y, vlast.y - v0.y;
  b << v0.x, v0.y;
}

double Mesh2D::element_diameter(int k) const {
  const Element& el = elements[k];
  double d = 0.0;
  for (int i = 0; i < el.nv(); ++i)
    for (int j = i + 1; j < el.nv(); ++j)
      d = std::max(d, dist(vertices[el.v[i]], vertices[el.v[j]]));
  return d;
}

double Mesh2D::element_area(int k) const {
  Eigen::Matrix2d B;
  Eigen::Vector2d b;
  affine(k, B, b);
  const double det = std::abs(B.determinant());
  return elements[k].kind == ElemKind::Triangle ? 0.5 * det : det;
}

double Mesh2D::element_inradius(int k) const {
  const Element& el = elements[k];
  if (el.kind == ElemKind::Triangle) {
    double per = 0.0;
    for (int e = 0; e < 3; ++e) per += dist(vertices[el.v[e]], vertices[el.v[(e + 1) % 3]]);
    return 2.0 * element_area(k) / per;
  }
  // parallelogram: half the smaller distance between parallel side pairs
  const double area = element_area(k);
  const double s1 = dist(vertices[el.v[0]], vertices[el.v[1]]);
  const double s2 = dist(vertices[el.v[0]], vertices[el.v[3]]);
  return 0.5 * std::min(area / s1, area / s2);
}

double Mesh2D::total_area() const {
  double a = 0.0;
  for (int k = 0; k < static_cast<int>(elements.size()); ++k) a += element_area(k);
  return a;
}

double Mesh2D::shape_regularity() const {
  double tau = 0.0;
  for (int k = 0; k < static_cast<int>(elements.size()); ++k)
    tau = std::max(tau, element_diameter(k) / element_inradius(k));
  return tau;
}

bool Mesh2D::is_regular(std::string* why) const {
  auto fail = [&](const std::string& msg) {
    if (why) *why = msg;
    return false;
  };
  std::map<std::pair<int, int>, int> edge_count;
  for (int k = 0; k < static_cast<int>(elements.size()); ++k) {
    const Element& el = elements[k];
    // orientation: positive area
    Eigen::Matrix2d B;
    Eigen::Vector2d b;
    affine(k, B, b);
    if (B.determinant() <= 0.0) return fail("element " + std::to_string(k) + " not counterclockwise");
    if (el.kind == ElemKind::Parallelogram) {
      const Point2 gap = vertices[el.v[0]] - vertices[el.v[1]] + vertices[el.v[2]] - vertices[el.v[3]];
      if (norm(gap) > kPointTol) return fail("element " + std::to_string(k) + " not a parallelogram");
    }
    for (int e = 0; e < el.nedges(); ++e) {
      auto [a, bb] = edge(k, e);
      edge_count[{std::min(a, bb), std::max(a, bb)}]++;
    }
  }
  for (const auto& [e, c] : edge_count)
    if (c > 2) return fail("edge shared by more than two elements");
  // hanging nodes: a vertex strictly inside another element's edge
  for (int vi = 0; vi < static_cast<int>(vertices.size()); ++vi)
    for (int k = 0; k < static_cast<int>(elements.size()); ++k)
      for (int e = 0; e < elements[k].nedges(); ++e) {
        auto [a, bb] = edge(k, e);
        if (a == vi || bb == vi) continue;
        if (strictly_inside_segment(vertices[vi], vertices[a], vertices[bb]))
          return fail("hanging node at vertex " + std::to_string(vi));
      }
  // interior edges must be untagged
  for (int k = 0; k < static_cast<int>(elements.size()); ++k)
    for (int e = 0; e < elements[k].nedges(); ++e) {
      auto [a, bb] = edge(k, e);
      const int c = edge_count[{std::min(a, bb), std::max(a, bb)}];
      if (c == 2 && edge_tags[k][e] != EdgeTag::None)
        return fail("interior edge carries a boundary tag");
    }
  return true;
}

std::string Mesh2D::dump() const {
  std::ostringstream os;
  char buf[128];
  os << "VERTICES " << vertices.size() << "\n";
  for (std::size_t i = 0; i < vertices.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%zu %.12g %.12g\n", i, vertices[i].x, vertices[i].y);
    os << buf;
  }
  os << "ELEMENTS " << elements.size() << "\n";
  for (std::size_t k = 0; k < elements.size(); ++k) {
    const Element& el = elements[k];
    os << k << (el.kind == ElemKind::Triangle ? " tri" : " quad");
    for (int i = 0; i < el.nv(); ++i) os << ' ' << el.v[i];
    os << " p=" << el.degree << " layer=" << el.layer << " kappa=" << el.kappa << "\n";
  }
  os << "TAGS " << elements.size() << "\n";
  for (std::size_t k = 0; k < elements.size(); ++k) {
    os << k;
    for (int e = 0; e < elements[k].nedges(); ++e) os << ' ' << tag_name(edge_tags[k][e]);
    os << "\n";
  }
  return os.str();
}

Point2 BoundaryMesh::panel_normal(int j) const {
  const Point2 a = vertices[panels[j].a], b = vertices[panels[j].b];
  const double h = dist(a, b);
  // loop is counterclockwise, outward = right of travel
  return {(b.y - a.y) / h, -(b.x - a.x) / h};
}

Point2 BoundaryMesh::panel_point(int j, double t) const {
  const Point2 a = vertices[panels[j].a], b = vertices[panels[j].b];
  return a + t * (b - a);
}

double BoundaryMesh::total_length() const {
  double l = 0.0;
  for (int j = 0; j < static_cast<int>(panels.size()); ++j) l += panel_length(j);
  return l;
}

bool BoundaryMesh::is_closed_loop(std::string* why) const {
  auto fail = [&](const std::string& msg) {
    if (why) *why = msg;
    return false;
  };
  const int n = static_cast<int>(panels.size());
  if (n < 3) return fail("fewer than three panels");
  double area2 = 0.0;
  for (int j = 0; j < n; ++j) {
    if (panels[j].b != panels[(j + 1) % n].a)
      return fail("panels not connected end-to-end at " + std::to_string(j));
    if (panel_length(j) <= 0.0) return fail("degenerate panel " + std::to_string(j));
    const Point2 a = vertices[panels[j].a], b = vertices[panels[j].b];
    area2 += a.x * b.y - b.x * a.y;
    if (panels[j].arc >= 0) {
      const auto& [A, B] = arcs[panels[j].arc];
      if (!on_segment(a, A, B) || !on_segment(b, A, B))
        return fail("panel " + std::to_string(j) + " leaves its arc");
    }
  }
  if (area2 <= 0.0) return fail("loop not counterclockwise");
  return true;
}

std::string BoundaryMesh::dump() const {
  std::ostringstream os;
  char buf[128];
  os << "VERTICES " << vertices.size() << "\n";
  for (std::size_t i = 0; i < vertices.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%zu %.12g %.12g\n", i, vertices[i].x, vertices[i].y);
    os << buf;
  }
  os << "PANELS " << panels.size() << "\n";
  for (std::size_t j = 0; j < panels.size(); ++j) {
    const Panel& p = panels[j];
    os << j << ' ' << p.a << ' ' << p.b << " p=" << p.degree << " layer=" << p.layer << " arc="
       << p.arc << ' ' << tag_name(p.tag) << "\n";
  }
  return os.str();
}

void InterfaceCurve::build() {
  cum.assign(pts.size(), 0.0);
  for (std::size_t i = 1; i < pts.size(); ++i) cum[i] = cum[i - 1] + dist(pts[i - 1], pts[i]);
}

Point2 InterfaceCurve::at(double s) const {
  const double L = length();
  s = std::clamp(s, 0.0, L);
  auto it = std::upper_bound(cum.begin(), cum.end(), s);
  std::size_t i = std::min<std::size_t>(it - cum.begin(), cum.size() - 1);
  const double t = (s - cum[i - 1]) / (cum[i] - cum[i - 1]);
  return pts[i - 1] + t * (pts[i] - pts[i - 1]);
}

Point2 InterfaceCurve::normal1(double s) const {
  const double L = length();
  s = std::clamp(s, 0.0, L);
  auto it = std::upper_bound(cum.begin(), cum.end(), s);
  std::size_t i = std::min<std::size_t>(it - cum.begin(), cum.size() - 1);
  const Point2 t = pts[i] - pts[i - 1];
  const double h = norm(t);
  // Omega2 lies left of the direction of travel
  return {-t.y / h, t.x / h};
}

double InterfaceCurve::locate(Point2 p) const {
  const double tol = kPointTol * std::max(1.0, length());
  for (std::size_t i = 1; i < pts.size(); ++i) {
    if (on_segment(p, pts[i - 1], pts[i], tol)) {
      return cum[i - 1] + dist(pts[i - 1], p);
    }
  }
  throw std::runtime_error("InterfaceCurve::locate: point not on the interface");
}

namespace {

void finalize_partition(std::vector<TraceSegment>& segs, double L) {
  std::sort(segs.begin(), segs.end(),
            [](const TraceSegment& a, const TraceSegment& b) { return a.s0 < b.s0; });
  const double tol = kPointTol * std::max(1.0, L);
  if (segs.empty()) throw std::runtime_error("trace_partition: no interface cells found");
  if (std::abs(segs.front().s0) > tol || std::abs(segs.back().s1 - L) > tol)
    throw std::runtime_error("trace_partition: cells do not cover the interface");
  for (std::size_t i = 1; i < segs.size(); ++i)
    if (std::abs(segs[i].s0 - segs[i - 1].s1) > tol)
      throw std::runtime_error("trace_partition: gap or overlap between trace cells");
}

}  // namespace

TracePartition trace_partition(const Mesh2D& mesh, const InterfaceCurve& curve) {
  TracePartition part;
  for (int k = 0; k < static_cast<int>(mesh.elements.size()); ++k)
    for (int e = 0; e < mesh.elements[k].nedges(); ++e) {
      if (mesh.edge_tags[k][e] != EdgeTag::Interface) continue;
      auto [a, b] = mesh.edge(k, e);
      // global edge orientation: lower vertex id first
      const int ga = std::min(a, b), gb = std::max(a, b);
      const double sa = curve.locate(mesh.vertices[ga]);
      const double sb = curve.locate(mesh.vertices[gb]);
      TraceSegment seg;
      seg.parent = k;
      seg.local_edge = e;
      seg.degree = mesh.elements[k].degree;
      seg.s0 = std::min(sa, sb);
      seg.s1 = std::max(sa, sb);
      seg.reversed = sa > sb;
      part.segments.push_back(seg);
    }
  finalize_partition(part.segments, curve.length());
  return part;
}

TracePartition trace_partition(const BoundaryMesh& bm, const InterfaceCurve& curve) {
  TracePartition part;
  for (int j = 0; j < static_cast<int>(bm.panels.size()); ++j) {
    if (bm.panels[j].tag != EdgeTag::Interface) continue;
    const double sa = curve.locate(bm.vertices[bm.panels[j].a]);
    const double sb = curve.locate(bm.vertices[bm.panels[j].b]);
    TraceSegment seg;
    seg.parent = j;
    seg.degree = bm.panels[j].degree;
    seg.s0 = std::min(sa, sb);
    seg.s1 = std::max(sa, sb);
    seg.reversed = sa > sb;
    part.segments.push_back(seg);
  }
  finalize_partition(part.segments, curve.length());
  return part;
}

InterfaceOverlay overlay(const TracePartition& fe, const TracePartition& be,
                         const InterfaceCurve& curve) {
  const double L = curve.length();
  const double tol = 1e-12 * L;
  std::vector<double> breaks{0.0, L};
  for (const auto& s : fe.segments) breaks.push_back(s.s1);
  for (const auto& s : be.segments) breaks.push_back(s.s1);
  std::sort(breaks.begin(), breaks.end());
  std::vector<double> merged;
  for (double b : breaks)
    if (merged.empty() || b - merged.back() > tol) merged.push_back(b);
  if (std::abs(merged.back() - L) > tol) merged.push_back(L);
  merged.back() = L;

  auto find_in = [](const TracePartition& part, double s) {
    int lo = 0, hi = static_cast<int>(part.segments.size()) - 1;
    while (lo < hi) {
      const int mid = (lo + hi) / 2;
      if (s < part.segments[mid].s1)
        hi = mid;
      else
        lo = mid + 1;
    }
    return lo;
  };

  InterfaceOverlay ov;
  ov.length = L;
  for (std::size_t i = 1; i < merged.size(); ++i) {
    OverlaySegment seg;
    seg.s0 = merged[i - 1];
    seg.s1 = merged[i];
    const double mid = 0.5 * (seg.s0 + seg.s1);
    seg.fe_seg = find_in(fe, mid);
    seg.be_seg = find_in(be, mid);
    ov.segments.push_back(seg);
  }
  return ov;
}

Mesh2D uniform_refine(const Mesh2D& mesh) {
  Mesh2D out;
  out.corners = mesh.corners;
  auto mid = [](Point2 a, Point2 b) { return 0.5 * (a + b); };
  for (int k = 0; k < static_cast<int>(mesh.elements.size()); ++k) {
    const Element& el = mesh.elements[k];
    const auto& tags = mesh.edge_tags[k];
    auto P = [&](int i) { return mesh.vertices[el.v[i]]; };
    auto emit = [&](ElemKind kind, std::initializer_list<Point2> vs,
                    std::initializer_list<EdgeTag> ts) {
      Element child;
      child.kind = kind;
      child.degree = el.degree;
      child.layer = el.layer;
      child.kappa = el.kappa;
      int i = 0;
      for (Point2 p : vs) child.v[i++] = out.add_vertex(p);
      out.elements.push_back(child);
      std::array<EdgeTag, 4> ct{EdgeTag::None, EdgeTag::None, EdgeTag::None, EdgeTag::None};
      i = 0;
      for (EdgeTag t : ts) ct[i++] = t;
      out.edge_tags.push_back(ct);
    };
    const EdgeTag N = EdgeTag::None;
    if (el.kind == ElemKind::Parallelogram) {
      const Point2 m01 = mid(P(0), P(1)), m12 = mid(P(1), P(2)), m23 = mid(P(2), P(3)),
                   m30 = mid(P(3), P(0)), c = mid(P(0), P(2));
      emit(ElemKind::Parallelogram, {P(0), m01, c, m30}, {tags[0], N, N, tags[3]});
      emit(ElemKind::Parallelogram, {m01, P(1), m12, c}, {tags[0], tags[1], N, N});
      emit(ElemKind::Parallelogram, {c, m12, P(2), m23}, {N, tags[1], tags[2], N});
      emit(ElemKind::Parallelogram, {m30, c, m23, P(3)}, {N, N, tags[2], tags[3]});
    } else {
      const Point2 m01 = mid(P(0), P(1)), m12 = mid(P(1), P(2)), m20 = mid(P(2), P(0));
      emit(ElemKind::Triangle, {P(0), m01, m20}, {tags[0], N, tags[2]});
      emit(ElemKind::Triangle, {m01, P(1), m12}, {tags[0], tags[1], N});
      emit(ElemKind::Triangle, {m20, m12, P(2)}, {N, tags[1], tags[2]});
      emit(ElemKind::Triangle, {m01, m12, m20}, {N, N, N});
    }
  }
  return out;
}

namespace {

struct TaggedSeg {
  Point2 a, b;
  EdgeTag tag;
};

std::vector<TaggedSeg> collect_tagged(const Mesh2D& mesh) {
  std::vector<TaggedSeg> out;
  for (int k = 0; k < static_cast<int>(mesh.elements.size()); ++k)
    for (int e = 0; e < mesh.elements[k].nedges(); ++e)
      if (mesh.edge_tags[k][e] != EdgeTag::None) {
        auto [a, b] = mesh.edge(k, e);
        out.push_back({mesh.vertices[a], mesh.vertices[b], mesh.edge_tags[k][e]});
      }
  return out;
}

EdgeTag classify_edge(Point2 a, Point2 b, const std::vector<TaggedSeg>& segs) {
  for (const auto& s : segs)
    if (on_segment(a, s.a, s.b) && on_segment(b, s.a, s.b)) return s.tag;
  return EdgeTag::None;
}

void retag(Mesh2D& mesh, const std::vector<TaggedSeg>& segs) {
  mesh.edge_tags.assign(mesh.elements.size(),
                        {EdgeTag::None, EdgeTag::None, EdgeTag::None, EdgeTag::None});
  for (int k = 0; k < static_cast<int>(mesh.elements.size()); ++k)
    for (int e = 0; e < mesh.elements[k].nedges(); ++e) {
      auto [a, b] = mesh.edge(k, e);
      mesh.edge_tags[k][e] = classify_edge(mesh.vertices[a], mesh.vertices[b], segs);
    }
  // tags only apply on the actual boundary: clear tags on edges shared by two elements
  std::map<std::pair<int, int>, int> edge_count;
  for (int k = 0; k < static_cast<int>(mesh.elements.size()); ++k)
    for (int e = 0; e < mesh.elements[k].nedges(); ++e) {
      auto [a, b] = mesh.edge(k, e);
      edge_count[{std::min(a, b), std::max(a, b)}]++;
    }
  for (int k = 0; k < static_cast<int>(mesh.elements.size()); ++k)
    for (int e = 0; e < mesh.elements[k].nedges(); ++e) {
      auto [a, b] = mesh.edge(k, e);
      if (edge_count[{std::min(a, b), std::max(a, b)}] == 2) mesh.edge_tags[k][e] = EdgeTag::None;
    }
}

// Split elements containing hanging nodes into triangles until the mesh is
// conforming again. Tags are reassigned afterwards by the caller.
void resolve_hanging_nodes(Mesh2D& mesh) {
  for (int pass = 0; pass < 64; ++pass) {
    bool changed = false;
    for (int k = 0; k < static_cast<int>(mesh.elements.size()) && !changed; ++k) {
      const Element el = mesh.elements[k];
      for (int e = 0; e < el.nedges() && !changed; ++e) {
        auto [a, b] = mesh.edge(k, e);
        for (int vi = 0; vi < static_cast<int>(mesh.vertices.size()); ++vi) {
          if (vi == a || vi == b) continue;
          if (!strictly_inside_segment(mesh.vertices[vi], mesh.vertices[a], mesh.vertices[b]))
            continue;
          // fan-triangulate element k from the hanging node
          std::vector<Element> repl;
          auto tri = [&](int x, int y, int z) {
            Element t;
            t.kind = ElemKind::Triangle;
            t.v = {x, y, z, -1};
            t.degree = el.degree;
            t.layer = el.layer;
            t.kappa = el.kappa;
            repl.push_back(t);
          };
          const int n = el.nv();
          tri(vi, el.v[(e + 1) % n], el.v[(e + 2) % n]);
          if (n == 4) tri(vi, el.v[(e + 2) % n], el.v[(e + 3) % n]);
          tri(vi, el.v[(e + n - 1) % n], el.v[e]);
          mesh.elements[k] = repl[0];
          for (std::size_t r = 1; r < repl.size(); ++r) mesh.elements.push_back(repl[r]);
          changed = true;
          break;
        }
      }
    }
    if (!changed) return;
  }
  throw std::runtime_error("resolve_hanging_nodes: did not converge");
}

// Conforming geometric refinement templates toward local corner (0,0) of the
// unit reference square / triangle, expressed in reference coordinates.
struct RefPoly {
  ElemKind kind;
  std::array<std::array<double, 2>, 4> p;
  int layer;
};

std::vector<RefPoly> square_corner_template(const std::vector<double>& b) {
  std::vector<RefPoly> out;
  const int L = static_cast<int>(b.size()) - 2;  // layers
  auto quad = [&](double x0, double y0, double x1, double y1, double x2, double y2, double x3,
                  double y3, int layer) {
    out.push_back({ElemKind::Parallelogram, {{{x0, y0}, {x1, y1}, {x2, y2}, {x3, y3}}}, layer});
  };
  auto tri = [&](double x0, double y0, double x1, double y1, double x2, double y2, int layer) {
    out.push_back({ElemKind::Triangle, {{{x0, y0}, {x1, y1}, {x2, y2}, {0, 0}}}, layer});
  };
  quad(0, 0, b[1], 0, b[1], b[1], 0, b[1], 0);
  for (int j = 1; j <= L; ++j) {
    const double s = b[j], t = b[j + 1];
    if (j == 1) {
      quad(s, 0, t, 0, t, s, s, s, j);
      quad(0, s, s, s, s, t, 0, t, j);
    } else {
      const double h = b[j - 1];
      // lower strip, left edge split at (s,h) to match the inner ring
      tri(s, 0, t, 0, s, h, j);
      tri(s, h, t, 0, t, s, j);
      tri(s, h, t, s, s, s, j);
      // left strip (mirror image)
      tri(0, s, h, s, 0, t, j);
      tri(h, s, s, t, 0, t, j);
      tri(h, s, s, s, s, t, j);
    }
    quad(s, s, t, s, t, t, s, t, j);
  }
  return out;
}

std::vector<RefPoly> triangle_corner_template(const std::vector<double>& b) {
  std::vector<RefPoly> out;
  const int L = static_cast<int>(b.size()) - 2;
  out.push_back({ElemKind::Triangle, {{{0, 0}, {b[1], 0}, {0, b[1]}, {0, 0}}}, 0});
  for (int j = 1; j <= L; ++j) {
    const double s = b[j], t = b[j + 1];
    out.push_back({ElemKind::Triangle, {{{s, 0}, {t, 0}, {0, t}, {0, 0}}}, j});
    out.push_back({ElemKind::Triangle, {{{s, 0}, {0, t}, {0, s}, {0, 0}}}, j});
  }
  return out;
}

}  // namespace

Mesh2D refine_geometric_corner(const Mesh2D& mesh, Point2 corner, const GradingParams& grading) {
  const std::vector<double> b = geometric_partition_1d(grading.sigma, grading.layers);
  const std::vector<TaggedSeg> tagged = collect_tagged(mesh);

  Mesh2D out;
  out.corners = mesh.corners;
  bool found = false;
  for (int k = 0; k < static_cast<int>(mesh.elements.size()); ++k) {
    const Element& el = mesh.elements[k];
    int local_corner = -1;
    for (int i = 0; i < el.nv(); ++i)
      if (close(mesh.vertices[el.v[i]], corner)) local_corner = i;
    if (local_corner < 0) {
      Element copy = el;
      for (int i = 0; i < el.nv(); ++i) copy.v[i] = out.add_vertex(mesh.vertices[el.v[i]]);
      out.elements.push_back(copy);
      out.edge_tags.push_back(mesh.edge_tags[k]);
      continue;
    }
    found = true;
    // rotate so the corner is local vertex 0, then map template coordinates
    // through the element's affine chart
    const int n = el.nv();
    std::array<Point2, 4> rot;
    for (int i = 0; i < n; ++i) rot[i] = mesh.vertices[el.v[(local_corner + i) % n]];
    auto chart = [&](double X, double Y) -> Point2 {
      if (el.kind == ElemKind::Triangle)
        return rot[0] + X * (rot[1] - rot[0]) + Y * (rot[2] - rot[0]);
      return rot[0] + X * (rot[1] - rot[0]) + Y * (rot[3] - rot[0]);
    };
    const auto pieces = el.kind == ElemKind::Triangle ? triangle_corner_template(b)
                                                      : square_corner_template(b);
    for (const RefPoly& rp : pieces) {
      Element child;
      child.kind = rp.kind;
      child.degree = el.degree;
      child.layer = rp.layer;
      child.kappa = el.kappa;
      const int cn = rp.kind == ElemKind::Triangle ? 3 : 4;
      for (int i = 0; i < cn; ++i) child.v[i] = out.add_vertex(chart(rp.p[i][0], rp.p[i][1]));
      out.elements.push_back(child);
      out.edge_tags.push_back({EdgeTag::None, EdgeTag::None, EdgeTag::None, EdgeTag::None});
    }
  }
  if (!found) throw std::invalid_argument("refine_geometric_corner: no element touches the corner");
  resolve_hanging_nodes(out);
  retag(out, tagged);
  bool present = false;
  for (Point2 c : out.corners) present = present || close(c, corner);
  if (!present) out.corners.push_back(corner);
  return out;
}

// ---------------------------------------------------------------------------
// Shipped decompositions

namespace {

struct ArcSpec {
  Point2 a, b;
  EdgeTag tag;
  int grade = 0;  // 0 none, 1 toward a, 2 toward b
  int uniform_n = 1;
};

BoundaryMesh mesh_arcs(const std::vector<ArcSpec>& arcs, const GradingParams& g) {
  BoundaryMesh bm;
  std::map<std::pair<long long, long long>, int> ids;
  auto vid = [&](Point2 p) {
    const std::pair<long long, long long> key{std::llround(p.x * 1e10), std::llround(p.y * 1e10)};
    auto it = ids.find(key);
    if (it != ids.end()) return it->second;
    const int id = static_cast<int>(bm.vertices.size());
    bm.vertices.push_back(p);
    ids[key] = id;
    return id;
  };
  for (std::size_t ai = 0; ai < arcs.size(); ++ai) {
    const ArcSpec& arc = arcs[ai];
    bm.arcs.emplace_back(arc.a, arc.b);
    std::vector<double> t;      // breakpoints along a->b
    std::vector<int> layer;     // per panel, 1-based from the graded corner, or -1
    if (arc.grade == 1) {
      t = geometric_partition_1d(g.sigma, g.layers);
      for (int j = 1; j < static_cast<int>(t.size()); ++j) layer.push_back(j);
    } else if (arc.grade == 2) {
      const std::vector<double> x = geometric_partition_1d(g.sigma, g.layers);
      for (int j = static_cast<int>(x.size()) - 1; j >= 0; --j) t.push_back(1.0 - x[j]);
      for (int j = static_cast<int>(x.size()) - 1; j >= 1; --j) layer.push_back(j);
    } else {
      const int n = std::max(1, arc.uniform_n);
      for (int j = 0; j <= n; ++j) t.push_back(double(j) / n);
      layer.assign(n, -1);
    }
    for (std::size_t j = 0; j + 1 < t.size(); ++j) {
      Panel p;
      p.a = vid(arc.a + t[j] * (arc.b - arc.a));
      p.b = vid(arc.a + t[j + 1] * (arc.b - arc.a));
      p.tag = arc.tag;
      p.arc = static_cast<int>(ai);
      p.layer = layer[j];
      bm.panels.push_back(p);
    }
  }
  return bm;
}

InterfaceCurve make_curve(std::initializer_list<Point2> pts) {
  InterfaceCurve c;
  c.pts = pts;
  c.build();
  return c;
}

// Tag boundary edges of a tensor-product style mesh from explicit segment lists.
void tag_from_segments(Mesh2D& mesh, const std::vector<TaggedSeg>& segs) {
  std::map<std::pair<int, int>, int> edge_count;
  for (int k = 0; k < static_cast<int>(mesh.elements.size()); ++k)
    for (int e = 0; e < mesh.elements[k].nedges(); ++e) {
      auto [a, b] = mesh.edge(k, e);
      edge_count[{std::min(a, b), std::max(a, b)}]++;
    }
  mesh.edge_tags.assign(mesh.elements.size(),
                        {EdgeTag::None, EdgeTag::None, EdgeTag::None, EdgeTag::None});
  for (int k = 0; k < static_cast<int>(mesh.elements.size()); ++k)
    for (int e = 0; e < mesh.elements[k].nedges(); ++e) {
      auto [a, b] = mesh.edge(k, e);
      if (edge_count[{std::min(a, b), std::max(a, b)}] != 1) continue;
      mesh.edge_tags[k][e] = classify_edge(mesh.vertices[a], mesh.vertices[b], segs);
    }
}

// Quad mesh from sorted grid lines, keeping cells whose center satisfies keep().
Mesh2D grid_mesh(const std::vector<double>& xs, const std::vector<double>& ys,
                 const std::function<bool(double, double)>& keep) {
  Mesh2D mesh;
  for (std::size_t i = 0; i + 1 < xs.size(); ++i)
    for (std::size_t j = 0; j + 1 < ys.size(); ++j) {
      const double cx = 0.5 * (xs[i] + xs[i + 1]), cy = 0.5 * (ys[j] + ys[j + 1]);
      if (!keep(cx, cy)) continue;
      Element el;
      el.kind = ElemKind::Parallelogram;
      el.v[0] = mesh.add_vertex({xs[i], ys[j]});
      el.v[1] = mesh.add_vertex({xs[i + 1], ys[j]});
      el.v[2] = mesh.add_vertex({xs[i + 1], ys[j + 1]});
      el.v[3] = mesh.add_vertex({xs[i], ys[j + 1]});
      mesh.elements.push_back(el);
      mesh.edge_tags.push_back({EdgeTag::None, EdgeTag::None, EdgeTag::None, EdgeTag::None});
    }
  return mesh;
}

std::vector<double> subdivide(const std::vector<double>& lines, int times) {
  std::vector<double> out = lines;
  for (int r = 0; r < times; ++r) {
    std::vector<double> next;
    for (std::size_t i = 0; i + 1 < out.size(); ++i) {
      next.push_back(out[i]);
      next.push_back(0.5 * (out[i] + out[i + 1]));
    }
    next.push_back(out.back());
    out = next;
  }
  return out;
}

}  // namespace

Decomposition build_square_decomposition(const DecompositionConfig& cfg) {
  Decomposition dec;
  auto in_omega2 = [](double x, double y) {
    return x < 0.0 && std::abs(y) < 0.5;
  };
  std::vector<double> xs, ys;
  if (cfg.uniform_h) {
    const double h = *cfg.uniform_h;
    if (!(h > 0.0)) throw std::invalid_argument("build_square_decomposition: h must be positive");
    const int n = std::max(1, static_cast<int>(std::lround(2.0 / h)));
    for (int i = 0; i <= n; ++i) xs.push_back(-1.0 + 2.0 * i / n);
    ys = xs;
  } else {
    // 32-element layout: uniform 1/4-spacing around Omega2, coarser to the right
    xs = subdivide({-1.0, -0.75, -0.5, -0.25, 0.0, 0.5, 1.0}, cfg.fe_refine);
    ys = subdivide({-1.0, -0.75, -0.5, -0.25, 0.0, 0.25, 0.5, 0.75, 1.0}, cfg.fe_refine);
  }
  dec.mesh = grid_mesh(xs, ys, [&](double x, double y) { return !in_omega2(x, y); });
  const std::vector<TaggedSeg> segs = {
      {{-1, -1}, {-1, -0.5}, EdgeTag::Dirichlet},
      {{-1, 0.5}, {-1, 1}, EdgeTag::Dirichlet},
      {{-1, -1}, {1, -1}, EdgeTag::Neumann},
      {{1, -1}, {1, 1}, EdgeTag::Neumann},
      {{-1, 1}, {1, 1}, EdgeTag::Neumann},
      {{-1, -0.5}, {0, -0.5}, EdgeTag::Interface},
      {{0, -0.5}, {0, 0.5}, EdgeTag::Interface},
      {{0, 0.5}, {-1, 0.5}, EdgeTag::Interface},
  };
  tag_from_segments(dec.mesh, segs);

  const int r = 1 << cfg.be_refine;
  std::vector<ArcSpec> arcs = {
      {{0, -0.5}, {0, 0.5}, EdgeTag::Interface, 0, 5 * r},
      {{0, 0.5}, {-1, 0.5}, EdgeTag::Interface, 0, 5 * r},
      {{-1, 0.5}, {-1, -0.5}, EdgeTag::Dirichlet, 0, 5 * r},
      {{-1, -0.5}, {0, -0.5}, EdgeTag::Interface, 0, 5 * r},
  };
  dec.boundary = mesh_arcs(arcs, cfg.be_grading);
  dec.interface = make_curve({{-1, -0.5}, {0, -0.5}, {0, 0.5}, {-1, 0.5}});
  return dec;
}

Decomposition build_lshape_decomposition(const DecompositionConfig& cfg) {
  Decomposition dec;
  const Point2 origin{0, 0};
  if (cfg.example == ExampleId::LshapeConfig1) {
    auto keep = [](double x, double y) {
      const bool in_notch = x > 0.0 && y > 0.0;                       // removed [0,1]^2
      const bool in_omega2 = std::abs(x) < 0.5 && std::abs(y) < 0.5;  // includes its own notch
      return !in_notch && !in_omega2;
    };
    const std::vector<double> lines = subdivide({-1.0, -0.5, 0.0, 0.5, 1.0}, cfg.fe_refine);
    dec.mesh = grid_mesh(lines, lines, keep);
    const std::vector<TaggedSeg> segs = {
        {{0, 0.5}, {0, 1}, EdgeTag::Dirichlet},
        {{0.5, 0}, {1, 0}, EdgeTag::Dirichlet},
        {{-1, -1}, {1, -1}, EdgeTag::Neumann},
        {{1, -1}, {1, 0}, EdgeTag::Neumann},
        {{-1, 1}, {0, 1}, EdgeTag::Neumann},
        {{-1, -1}, {-1, 1}, EdgeTag::Neumann},
        {{0, 0.5}, {-0.5, 0.5}, EdgeTag::Interface},
        {{-0.5, 0.5}, {-0.5, -0.5}, EdgeTag::Interface},
        {{-0.5, -0.5}, {0.5, -0.5}, EdgeTag::Interface},
        {{0.5, -0.5}, {0.5, 0}, EdgeTag::Interface},
    };
    tag_from_segments(dec.mesh, segs);

    const int r = 1 << cfg.be_refine;
    std::vector<ArcSpec> arcs = {
        {{0.5, 0}, {0, 0}, EdgeTag::Dirichlet, cfg.be_graded ? 2 : 0, r},
        {{0, 0}, {0, 0.5}, EdgeTag::Dirichlet, cfg.be_graded ? 1 : 0, r},
        {{0, 0.5}, {-0.5, 0.5}, EdgeTag::Interface, 0, r},
        {{-0.5, 0.5}, {-0.5, -0.5}, EdgeTag::Interface, 0, 2 * r},
        {{-0.5, -0.5}, {0.5, -0.5}, EdgeTag::Interface, 0, 2 * r},
        {{0.5, -0.5}, {0.5, 0}, EdgeTag::Interface, 0, r},
    };
    dec.boundary = mesh_arcs(arcs, cfg.be_grading);
    dec.interface =
        make_curve({{0, 0.5}, {-0.5, 0.5}, {-0.5, -0.5}, {0.5, -0.5}, {0.5, 0}});
    dec.mesh.corners.push_back(origin);
  } else if (cfg.example == ExampleId::LshapeConfig2) {
    // Omega1: trapezoid below the diagonal, meshed as one square plus one triangle
    Mesh2D m;
    Element q;
    q.kind = ElemKind::Parallelogram;
    q.v[0] = m.add_vertex({0, -1});
    q.v[1] = m.add_vertex({1, -1});
    q.v[2] = m.add_vertex({1, 0});
    q.v[3] = m.add_vertex({0, 0});
    m.elements.push_back(q);
    m.edge_tags.push_back({EdgeTag::None, EdgeTag::None, EdgeTag::None, EdgeTag::None});
    Element t;
    t.kind = ElemKind::Triangle;
    t.v[0] = m.add_vertex({0, 0});
    t.v[1] = m.add_vertex({-1, -1});
    t.v[2] = m.add_vertex({0, -1});
    m.elements.push_back(t);
    m.edge_tags.push_back({EdgeTag::None, EdgeTag::None, EdgeTag::None, EdgeTag::None});
    for (int r = 0; r < cfg.fe_refine; ++r) m = uniform_refine(m);
    const std::vector<TaggedSeg> segs = {
        {{0, 0}, {1, 0}, EdgeTag::Dirichlet},
        {{-1, -1}, {1, -1}, EdgeTag::Neumann},
        {{1, -1}, {1, 0}, EdgeTag::Neumann},
        {{-1, -1}, {0, 0}, EdgeTag::Interface},
    };
    tag_from_segments(m, segs);
    if (cfg.fe_graded) {
      m = refine_geometric_corner(m, origin, cfg.fe_grading);
    }
    dec.mesh = m;
    const int r = 1 << cfg.be_refine;
    std::vector<ArcSpec> arcs = {
        {{-1, -1}, {0, 0}, EdgeTag::Interface, cfg.be_graded ? 2 : 0, 2 * r},
        {{0, 0}, {0, 1}, EdgeTag::Dirichlet, cfg.be_graded ? 1 : 0, r},
        {{0, 1}, {-1, 1}, EdgeTag::Neumann, 0, r},
        {{-1, 1}, {-1, -1}, EdgeTag::Neumann, 0, 2 * r},
    };
    dec.boundary = mesh_arcs(arcs, cfg.be_grading);
    dec.interface = make_curve({{-1, -1}, {0, 0}});
    dec.mesh.corners.push_back(origin);
  } else {
    throw std::invalid_argument("build_lshape_decomposition: unknown configuration");
  }
  return dec;
}

Decomposition build_decomposition(const DecompositionConfig& cfg) {
  if (cfg.example == ExampleId::SquareSmooth) return build_square_decomposition(cfg);
  return build_lshape_decomposition(cfg);
}

}  // namespace febe
