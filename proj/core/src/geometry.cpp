#include "sc/geometry.hpp"

#include <algorithm>
#include <limits>
#include <numbers>

namespace sc::billiard {

namespace {
constexpr double pi = std::numbers::pi;
}

Vec2 Element::point(double s) const {
  if (kind == Kind::Arc) {
    const double phi = phi0 + (dphi >= 0 ? 1.0 : -1.0) * s / radius;
    return center + radius * Vec2{std::cos(phi), std::sin(phi)};
  }
  const double t = s / length();
  return a + t * (b - a);
}

Vec2 Element::tangent(double s) const {
  if (kind == Kind::Arc) {
    const double sgn = dphi >= 0 ? 1.0 : -1.0;
    const double phi = phi0 + sgn * s / radius;
    return Vec2{-std::sin(phi), std::cos(phi)} * sgn;
  }
  return (b - a).unit();
}

Vec2 Element::normal_in(double s) const {
  if (kind == Kind::Arc) {
    const double sgn = dphi >= 0 ? 1.0 : -1.0;
    const double phi = phi0 + sgn * s / radius;
    const Vec2 radial{std::cos(phi), std::sin(phi)};
    // dispersing: interior on the far side from the center
    return dispersing ? radial : radial * -1.0;
  }
  // segments: interior to the left of a->b by convention (ccw boundary)
  return (b - a).unit().perp();
}

double Element::signed_radius() const {
  if (kind == Kind::Segment) return std::numeric_limits<double>::infinity();
  return dispersing ? -radius : radius;
}

double BilliardTable::recompute_perimeter() const {
  double p = 0.0;
  for (const auto& e : elements) p += e.length();
  return p;
}

double BilliardTable::recompute_area() const {
  // A = 1/2 oint (x dy - y dx), fine-grained over each element
  double A = 0.0;
  for (const auto& e : elements) {
    const int n = 2000;
    const double len = e.length();
    for (int i = 0; i < n; ++i) {
      const double s0 = len * i / n, s1 = len * (i + 1) / n;
      const Vec2 p0 = e.point(s0), p1 = e.point(s1);
      A += 0.5 * p0.cross(p1);
    }
  }
  return std::abs(A);
}

void BilliardTable::validate(double tol) const {
  if (elements.empty()) throw std::invalid_argument("BilliardTable: no elements");
  if (std::abs(recompute_perimeter() - perimeter) > tol * std::max(1.0, perimeter))
    throw std::invalid_argument("BilliardTable: declared perimeter inconsistent");
  if (std::abs(recompute_area() - area) > 1e-5 * std::max(1.0, area))
    throw std::invalid_argument("BilliardTable: declared area inconsistent");
}

bool BilliardTable::inside(Vec2 p, double) const {
  // crossing count along the +x ray; tolerant to the measure-zero grazing cases
  int crossings = 0;
  const int nsub = 64;
  for (const auto& e : elements) {
    const double len = e.length();
    Vec2 prev = e.point(0.0);
    for (int i = 1; i <= nsub; ++i) {
      const Vec2 cur = e.point(len * i / nsub);
      if ((prev.y > p.y) != (cur.y > p.y)) {
        const double t = (p.y - prev.y) / (cur.y - prev.y);
        if (prev.x + t * (cur.x - prev.x) > p.x) ++crossings;
      }
      prev = cur;
    }
  }
  return crossings % 2 == 1;
}

double BilliardTable::global_arclength(int elem, double s) const {
  double acc = 0.0;
  for (int i = 0; i < elem; ++i) acc += elements[i].length();
  return acc + s;
}

BilliardTable make_diamond_table(double d, double radius) {
  if (!(d > 0.0) || !(radius > d) || !(radius < d * std::sqrt(2.0)))
    throw std::invalid_argument("make_diamond_table: need d < radius < d*sqrt(2)");
  const double x0 = d - std::sqrt(radius * radius - d * d);  // vertex on +x axis

  BilliardTable t;
  t.name = "diamond";
  // Vertices, counterclockwise: (x0,0) -> (0,x0) -> (-x0,0) -> (0,-x0).
  // Arc k connects vertex k to vertex k+1 and is cut from the circle whose
  // center lies "outside" between them: NE arc from circle at (d,d), etc.
  const Vec2 centers[4] = {{d, d}, {-d, d}, {-d, -d}, {d, -d}};
  const Vec2 verts[4] = {{x0, 0.0}, {0.0, x0}, {-x0, 0.0}, {0.0, -x0}};
  for (int k = 0; k < 4; ++k) {
    const Vec2 c = centers[k];
    const Vec2 v_from = verts[k], v_to = verts[(k + 1) % 4];
    const double a0 = std::atan2(v_from.y - c.y, v_from.x - c.x);
    double a1 = std::atan2(v_to.y - c.y, v_to.x - c.x);
    // dispersing arc is traversed clockwise about its own center when the
    // boundary runs counterclockwise around the table
    while (a1 > a0) a1 -= 2.0 * pi;
    Element e;
    e.kind = Element::Kind::Arc;
    e.center = c;
    e.radius = radius;
    e.phi0 = a0;
    e.dphi = a1 - a0;  // negative
    e.dispersing = true;
    t.elements.push_back(e);
  }

  const double theta = std::abs(t.elements[0].dphi);
  t.perimeter = 4.0 * radius * theta;
  // diamond polygon minus four circular segments
  const double seg = 0.5 * radius * radius * (theta - std::sin(theta));
  t.area = 2.0 * x0 * x0 - 4.0 * seg;
  return t;
}

namespace {

// smallest positive root of the ray-element intersection, with local arclength
struct RawHit {
  double t;
  double s;
};

void ray_arc_hits(const Element& e, const Ray& r, std::vector<RawHit>& out, double eps) {
  const Vec2 oc = r.position - e.center;
  const double b = oc.dot(r.direction);
  const double c = oc.dot(oc) - e.radius * e.radius;
  const double disc = b * b - c;
  if (disc < 0.0) return;
  const double sq = std::sqrt(disc);
  for (double t : {-b - sq, -b + sq}) {
    if (t <= eps) continue;
    const Vec2 p = r.position + t * r.direction;
    double phi = std::atan2(p.y - e.center.y, p.x - e.center.x);
    // express relative to phi0 along the signed span
    const double sgn = e.dphi >= 0 ? 1.0 : -1.0;
    double rel = sgn > 0 ? phi - e.phi0 : e.phi0 - phi;
    while (rel < 0.0) rel += 2.0 * pi;
    while (rel >= 2.0 * pi) rel -= 2.0 * pi;
    const double span = std::abs(e.dphi);
    if (rel <= span + 1e-12) out.push_back({t, std::min(rel, span) * e.radius});
  }
}

void ray_segment_hits(const Element& e, const Ray& r, std::vector<RawHit>& out, double eps) {
  const Vec2 d = e.b - e.a;
  const double denom = r.direction.cross(d);
  if (std::abs(denom) < 1e-15) return;
  const Vec2 w = e.a - r.position;
  const double t = w.cross(d) / denom;
  const double u = w.cross(r.direction) / denom;
  if (t > eps && u >= -1e-12 && u <= 1.0 + 1e-12)
    out.push_back({t, std::clamp(u, 0.0, 1.0) * d.norm()});
}

}  // namespace

std::optional<Hit> first_hit(const BilliardTable& table, const Ray& ray, double eps) {
  std::optional<Hit> best;
  std::vector<RawHit> hits;
  for (size_t i = 0; i < table.elements.size(); ++i) {
    hits.clear();
    const auto& e = table.elements[i];
    if (e.kind == Element::Kind::Arc)
      ray_arc_hits(e, ray, hits, eps);
    else
      ray_segment_hits(e, ray, hits, eps);
    for (const auto& h : hits) {
      if (!best || h.t < best->distance) {
        best = Hit{static_cast<int>(i), h.s, h.t, ray.position + h.t * ray.direction};
      }
    }
  }
  return best;
}

Trajectory trace_ray(const BilliardTable& table, Ray ray, int n_bounces) {
  ray.validate();
  Trajectory traj;
  traj.bounces.reserve(n_bounces);
  for (int i = 0; i < n_bounces; ++i) {
    auto hit = first_hit(table, ray);
    if (!hit) throw std::runtime_error("trace_ray: ray escaped the table (geometry error)");
    const auto& e = table.elements[hit->element];
    if (hit->s < kCornerZone || hit->s > e.length() - kCornerZone)
      throw CornerError("trace_ray: bounce inside a corner exclusion zone");
    const Vec2 n = e.normal_in(hit->s);
    const double cosb = -ray.direction.dot(n);
    if (std::abs(cosb) < kGrazingTol) throw GrazingError("trace_ray: tangential grazing bounce");
    const Vec2 out = ray.direction - 2.0 * ray.direction.dot(n) * n;
    traj.bounces.push_back({*hit, std::abs(cosb), ray.direction, out, hit->distance});
    traj.total_length += hit->distance;
    ray = Ray{hit->point, out.unit()};
  }
  return traj;
}

}  // namespace sc::billiard
