#include "sc/partner.hpp"

#include <cmath>
#include <stdexcept>

namespace sc::billiard {

std::vector<SelfCrossing> find_self_crossings(const PeriodicOrbit& orbit,
                                              double angle_threshold) {
  std::vector<SelfCrossing> out;
  const int n = orbit.n_bounces();
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      if (j == i || (j + 1) % n == i || (i + 1) % n == j) continue;  // adjacent chords
      const Vec2 a0 = orbit.bounce_points[i], a1 = orbit.bounce_points[(i + 1) % n];
      const Vec2 b0 = orbit.bounce_points[j], b1 = orbit.bounce_points[(j + 1) % n];
      const Vec2 da = a1 - a0, db = b1 - b0;
      const double denom = da.cross(db);
      if (std::abs(denom) < 1e-14) continue;
      const Vec2 w = b0 - a0;
      const double t = w.cross(db) / denom;
      const double s = w.cross(da) / denom;
      if (t <= 1e-9 || t >= 1.0 - 1e-9 || s <= 1e-9 || s >= 1.0 - 1e-9) continue;
      // antiparallel small-angle crossing: angle between v_a and -v_b
      const double c = -da.unit().dot(db.unit());
      const double angle = std::acos(std::clamp(c, -1.0, 1.0));
      if (angle < angle_threshold) {
        out.push_back({i, j, a0 + t * da, angle});
      }
    }
  }
  std::sort(out.begin(), out.end(),
            [](const SelfCrossing& x, const SelfCrossing& y) { return x.angle < y.angle; });
  return out;
}

namespace {

// Monodromy of the full orbit starting at `point` on chord `chord`,
// transverse coordinates (dq, dp) at k = 1.
StabilityMatrix loop_monodromy(const BilliardTable& table, const PeriodicOrbit& orbit,
                               int chord, Vec2 point) {
  const int n = orbit.n_bounces();
  const Vec2 p0 = orbit.bounce_points[chord];
  const Vec2 p1 = orbit.bounce_points[(chord + 1) % n];
  const double to_next = (p1 - point).norm();
  const double from_prev = (point - p0).norm();

  auto reflection = [&](int bounce_idx) -> StabilityMatrix {
    const auto& e = table.elements[orbit.code[bounce_idx]];
    const double s = orbit.bounce_s[bounce_idx];
    const Vec2 nrm = e.normal_in(s);
    const int prev = (bounce_idx + n - 1) % n;
    const Vec2 dir = (orbit.bounce_points[bounce_idx] - orbit.bounce_points[prev]).unit();
    const double cosb = std::abs(dir.dot(nrm));
    const double rs = e.signed_radius();
    const double kick = std::isinf(rs) ? 0.0 : 2.0 / (rs * cosb);
    return {-1.0, 0.0, kick, -1.0};
  };
  auto flight = [](double l) -> StabilityMatrix { return {1.0, l, 0.0, 1.0}; };

  StabilityMatrix m = flight(to_next);
  for (int step = 1; step <= n; ++step) {
    const int b = (chord + step) % n;
    m = reflection(b) * m;
    const int bn = (b + 1) % n;
    double l = (orbit.bounce_points[bn] - orbit.bounce_points[b]).norm();
    if (step == n) l = from_prev;  // last flight ends at the section
    m = flight(l) * m;
  }
  return m;
}

}  // namespace

std::optional<InvariantDirections> invariant_directions(const BilliardTable& table,
                                                        const PeriodicOrbit& orbit, int chord,
                                                        Vec2 point) {
  const StabilityMatrix m = loop_monodromy(table, orbit, chord, point);
  const double tr = m.trace();
  if (std::abs(tr) <= 2.0) return std::nullopt;
  const double disc = std::sqrt(tr * tr - 4.0);
  const double lu = 0.5 * (tr + (tr > 0 ? disc : -disc));  // |lu| > 1
  const double ls = 1.0 / lu;

  auto eigvec = [&](double lam, double& vq, double& vp) {
    // (m11 - lam) vq + m12 vp = 0
    if (std::abs(m.m12) > 1e-14) {
      vq = 1.0;
      vp = (lam - m.m11) / m.m12;
    } else {
      vq = 0.0;
      vp = 1.0;
    }
    const double nn = std::hypot(vq, vp);
    vq /= nn;
    vp /= nn;
  };

  InvariantDirections d;
  eigvec(lu, d.eu_q, d.eu_p);
  eigvec(ls, d.es_q, d.es_p);

  // symplectic normalization e_u ^ e_s = 1, residual scale fixed by equal norms
  const double w = d.eu_q * d.es_p - d.eu_p * d.es_q;
  if (std::abs(w) < 1e-14) return std::nullopt;
  d.es_q /= w;
  d.es_p /= w;
  const double nu = std::hypot(d.eu_q, d.eu_p), ns = std::hypot(d.es_q, d.es_p);
  const double g = std::sqrt(ns / nu);
  d.eu_q *= g;
  d.eu_p *= g;
  d.es_q /= g;
  d.es_p /= g;
  return d;
}

std::optional<PartnerResult> partner_for_crossing(const BilliardTable& table,
                                                  const PeriodicOrbit& orbit,
                                                  const SelfCrossing& cr, double lyapunov,
                                                  double cutoff_c) {
  const int n = orbit.n_bounces();

  // partner code: reverse the loop between the two crossing chords
  std::vector<int> code;
  std::vector<double> seed;
  for (int i = 0; i <= cr.chord_a; ++i) {
    code.push_back(orbit.code[i]);
    seed.push_back(orbit.bounce_s[i]);
  }
  for (int i = cr.chord_b; i >= cr.chord_a + 1; --i) {
    code.push_back(orbit.code[i]);
    seed.push_back(orbit.bounce_s[i]);
  }
  for (int i = cr.chord_b + 1; i < n; ++i) {
    code.push_back(orbit.code[i]);
    seed.push_back(orbit.bounce_s[i]);
  }

  auto partner = find_orbit_seeded(table, code, seed);
  if (!partner) return std::nullopt;
  if (canonical_code(partner->code) == canonical_code(orbit.code)) return std::nullopt;

  // (s, u) decomposition of T x_2 - x_1 at the crossing: zero position offset,
  // transverse momentum offset k sin(angle) at k = 1
  auto dirs = invariant_directions(table, orbit, cr.chord_a, cr.point);
  if (!dirs) return std::nullopt;
  const double dq = 0.0;
  const double dp = std::sin(cr.angle);
  // solve s*e_s + u*e_u = (dq, dp)
  const double det = dirs->es_q * dirs->eu_p - dirs->es_p * dirs->eu_q;
  if (std::abs(det) < 1e-14) return std::nullopt;
  const double s_comp = (dq * dirs->eu_p - dp * dirs->eu_q) / det;
  const double u_comp = (dirs->es_q * dp - dirs->es_p * dq) / det;

  PartnerResult res;
  res.partner = std::move(*partner);
  res.delta_s_measured = orbit.length - res.partner.length;
  res.geometry.section_point = cr.point;
  res.geometry.crossing_angle = cr.angle;
  res.geometry.s = s_comp;
  res.geometry.u = u_comp;
  res.geometry.action_difference = s_comp * u_comp;
  res.geometry.cutoff_c = cutoff_c;
  const double ds = std::abs(res.geometry.action_difference);
  res.geometry.t_enc =
      (lyapunov > 0.0 && ds > 0.0) ? std::log(cutoff_c * cutoff_c / ds) / lyapunov : 0.0;
  return res;
}

std::optional<PartnerResult> find_partner_orbit(const BilliardTable& table,
                                                const PeriodicOrbit& orbit, double lyapunov,
                                                double angle_threshold, double cutoff_c) {
  const auto crossings = find_self_crossings(orbit, angle_threshold);
  for (const auto& cr : crossings) {
    auto res = partner_for_crossing(table, orbit, cr, lyapunov, cutoff_c);
    if (res) return res;
  }
  return std::nullopt;
}

}  // namespace sc::billiard
