#pragma once

#include <cmath>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace sc::billiard {

struct Vec2 {
  double x = 0.0, y = 0.0;

  Vec2 operator+(Vec2 o) const { return {x + o.x, y + o.y}; }
  Vec2 operator-(Vec2 o) const { return {x - o.x, y - o.y}; }
  Vec2 operator*(double c) const { return {c * x, c * y}; }
  double dot(Vec2 o) const { return x * o.x + y * o.y; }
  double cross(Vec2 o) const { return x * o.y - y * o.x; }
  double norm() const { return std::hypot(x, y); }
  Vec2 unit() const {
    const double n = norm();
    return {x / n, y / n};
  }
  Vec2 perp() const { return {-y, x}; }
};

inline Vec2 operator*(double c, Vec2 v) { return v * c; }

// Boundary element: circular arc or straight segment.
// Arcs are parametrized by local arclength s in [0, length()]:
//   point(s) = center + radius * (cos phi(s), sin phi(s)),
//   phi(s)   = phi0 + orientation * s / radius,  orientation = +-1.
// `dispersing` marks arcs that are concave seen from the interior (the
// center lies outside the table); the default diamond uses only these.
struct Element {
  enum class Kind { Arc, Segment };
  Kind kind = Kind::Segment;

  // arc fields
  Vec2 center{};
  double radius = 0.0;
  double phi0 = 0.0;
  double dphi = 0.0;  // signed angular span; orientation = sign(dphi)
  bool dispersing = false;

  // segment fields
  Vec2 a{}, b{};

  double length() const {
    return kind == Kind::Arc ? radius * std::abs(dphi) : (b - a).norm();
  }
  Vec2 point(double s) const;
  Vec2 tangent(double s) const;   // unit, in direction of increasing s
  Vec2 normal_in(double s) const; // unit, pointing into the table
  // Signed radius of curvature entering the reflection stability factor:
  // negative for dispersing (concave) arcs, positive for focusing arcs,
  // +infinity for segments.
  double signed_radius() const;
};

struct BilliardTable {
  std::vector<Element> elements;
  double area = 0.0;
  double perimeter = 0.0;
  std::string name;

  double recompute_perimeter() const;
  double recompute_area() const;  // Green's theorem over the boundary loop
  void validate(double tol = 1e-8) const;

  bool inside(Vec2 p, double tol = 1e-12) const;

  // Global boundary arclength of a local coordinate.
  double global_arclength(int elem, double s) const;
};

// Four concave arcs of radius `radius` centered at (+-d, +-d), joined at
// corners on the axes. Requires d < radius < d*sqrt(2).
BilliardTable make_diamond_table(double d = 2.2, double radius = 2.42);

struct Ray {
  Vec2 position;
  Vec2 direction;  // unit to 1e-12

  void validate() const {
    if (std::abs(direction.norm() - 1.0) > 1e-12)
      throw std::invalid_argument("Ray: direction must be a unit vector");
  }
};

struct GrazingError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct CornerError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Hit {
  int element = -1;
  double s = 0.0;       // local arclength on the element
  double distance = 0.0;
  Vec2 point{};
};

// Earliest boundary intersection of the ray strictly ahead of its origin.
std::optional<Hit> first_hit(const BilliardTable& table, const Ray& ray, double eps = 1e-10);

constexpr double kGrazingTol = 1e-9;   // |cos beta| below this -> GrazingError
constexpr double kCornerZone = 1e-8;   // arclength exclusion zone at element ends

struct BounceRecord {
  Hit hit;
  double cos_beta = 0.0;  // cosine of the reflection angle (from the normal)
  Vec2 dir_in{}, dir_out{};
  double segment_length = 0.0;  // chord length leading to this bounce
};

struct Trajectory {
  std::vector<BounceRecord> bounces;
  double total_length = 0.0;
};

Trajectory trace_ray(const BilliardTable& table, Ray ray, int n_bounces);

}  // namespace sc::billiard
