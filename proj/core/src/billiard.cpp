#include "sc/billiard.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <functional>
#include <mutex>
#include <numbers>
#include <random>
#include <thread>

namespace sc::billiard {

StabilityMatrix stability_matrix(const BilliardTable& table, const std::vector<int>& code,
                                 const std::vector<double>& bounce_s, double k) {
  const int n = static_cast<int>(code.size());
  if (n < 2) throw std::invalid_argument("stability_matrix: need >= 2 bounces");
  if (!(k > 0.0)) throw std::invalid_argument("stability_matrix: k must be positive");

  std::vector<Vec2> pts(n);
  for (int i = 0; i < n; ++i) pts[i] = table.elements[code[i]].point(bounce_s[i]);

  StabilityMatrix m;  // identity
  for (int i = 0; i < n; ++i) {
    const int j = (i + 1) % n;
    const Vec2 chord = pts[j] - pts[i];
    const double l = chord.norm();
    const StabilityMatrix flight{1.0, l / k, 0.0, 1.0};

    const auto& e = table.elements[code[j]];
    const Vec2 nrm = e.normal_in(bounce_s[j]);
    const double cosb = std::abs(chord.unit().dot(nrm));
    if (cosb < kGrazingTol) throw GrazingError("stability_matrix: grazing reflection");
    const double rs = e.signed_radius();
    const double kick = std::isinf(rs) ? 0.0 : 2.0 * k / (rs * cosb);
    const StabilityMatrix refl{-1.0, 0.0, kick, -1.0};

    // left-multiply: later factors act after earlier ones
    m = refl * (flight * m);
  }
  return m;
}

namespace {

struct LengthDerivatives {
  Eigen::VectorXd grad;
  Eigen::MatrixXd hess;
  double length;
};

LengthDerivatives chord_length_derivatives(const BilliardTable& table,
                                           const std::vector<int>& code,
                                           const std::vector<double>& s) {
  const int n = static_cast<int>(code.size());
  std::vector<Vec2> P(n), T(n), K(n);  // point, unit tangent, tangent derivative
  for (int i = 0; i < n; ++i) {
    const auto& e = table.elements[code[i]];
    P[i] = e.point(s[i]);
    T[i] = e.tangent(s[i]);
    if (e.kind == Element::Kind::Arc) {
      const double sgn = e.dphi >= 0 ? 1.0 : -1.0;
      const double phi = e.phi0 + sgn * s[i] / e.radius;
      K[i] = Vec2{std::cos(phi), std::sin(phi)} * (-1.0 / e.radius);
    } else {
      K[i] = {0.0, 0.0};
    }
  }

  LengthDerivatives out;
  out.grad = Eigen::VectorXd::Zero(n);
  out.hess = Eigen::MatrixXd::Zero(n, n);
  out.length = 0.0;

  for (int i = 0; i < n; ++i) {
    const int j = (i + 1) % n;
    const Vec2 e = P[j] - P[i];
    const double l = e.norm();
    const Vec2 u = e * (1.0 / l);
    out.length += l;

    out.grad[j] += T[j].dot(u);
    out.grad[i] -= T[i].dot(u);

    const double tju = T[j].dot(u), tiu = T[i].dot(u);
    out.hess(j, j) += (1.0 - tju * tju) / l + K[j].dot(u);
    out.hess(i, i) += (1.0 - tiu * tiu) / l - K[i].dot(u);
    const double cross = -(T[i].dot(T[j]) - tiu * tju) / l;
    out.hess(i, j) += cross;
    out.hess(j, i) += cross;
  }
  return out;
}

}  // namespace

double specular_residual(const BilliardTable& table, const PeriodicOrbit& orbit) {
  auto d = chord_length_derivatives(table, orbit.code, orbit.bounce_s);
  return d.grad.cwiseAbs().maxCoeff();
}

bool chords_interior(const BilliardTable& table, const std::vector<int>& code,
                     const std::vector<double>& bounce_s) {
  const int n = static_cast<int>(code.size());
  for (int i = 0; i < n; ++i) {
    const int j = (i + 1) % n;
    const Vec2 p0 = table.elements[code[i]].point(bounce_s[i]);
    const Vec2 p1 = table.elements[code[j]].point(bounce_s[j]);
    const Vec2 d = p1 - p0;
    const double len = d.norm();
    if (len < 1e-12) return false;
    const Ray r{p0, d.unit()};
    auto hit = first_hit(table, r, 1e-9);
    // the first boundary crossing along the chord must be its far endpoint
    if (!hit || hit->distance < len - 1e-7) return false;
  }
  return true;
}

std::optional<PeriodicOrbit> find_orbit_seeded(const BilliardTable& table,
                                               const std::vector<int>& code,
                                               std::vector<double> s,
                                               const NewtonOptions& opts) {
  const int n = static_cast<int>(code.size());
  if (n < 2) throw std::invalid_argument("find_orbit: code length must be >= 2");
  for (int i = 0; i < n; ++i) {
    if (code[i] < 0 || code[i] >= static_cast<int>(table.elements.size()))
      throw std::invalid_argument("find_orbit: code entry out of range");
    if (code[i] == code[(i + 1) % n]) return std::nullopt;  // same-element chord
  }

  auto clamp_coords = [&](std::vector<double>& v) {
    for (int i = 0; i < n; ++i) {
      const double len = table.elements[code[i]].length();
      v[i] = std::clamp(v[i], 1e-9 * len, (1.0 - 1e-9) * len);
    }
  };
  clamp_coords(s);

  auto d = chord_length_derivatives(table, code, s);
  double gnorm = d.grad.norm();
  for (int it = 0; it < opts.max_iterations; ++it) {
    if (gnorm < opts.grad_tol) break;
    Eigen::VectorXd step = d.hess.fullPivLu().solve(-d.grad);
    if (!step.allFinite()) return std::nullopt;
    double damp = 1.0;
    bool accepted = false;
    for (int half = 0; half < 30; ++half) {
      std::vector<double> trial(s);
      for (int i = 0; i < n; ++i) trial[i] += damp * step[i];
      clamp_coords(trial);
      auto dt = chord_length_derivatives(table, code, trial);
      if (dt.grad.norm() < gnorm) {
        s = trial;
        d = std::move(dt);
        gnorm = d.grad.norm();
        accepted = true;
        break;
      }
      damp *= 0.5;
    }
    if (!accepted) return std::nullopt;
  }
  if (gnorm >= opts.grad_tol) return std::nullopt;

  // reject bounce points inside corner zones
  for (int i = 0; i < n; ++i) {
    const double len = table.elements[code[i]].length();
    if (s[i] < opts.corner_margin * len || s[i] > (1.0 - opts.corner_margin) * len)
      return std::nullopt;
  }
  if (!chords_interior(table, code, s)) return std::nullopt;  // spurious

  PeriodicOrbit orbit;
  orbit.code = code;
  orbit.bounce_s = s;
  orbit.bounce_points.resize(n);
  for (int i = 0; i < n; ++i) orbit.bounce_points[i] = table.elements[code[i]].point(s[i]);
  orbit.length = d.length;
  orbit.primitive_length = d.length;
  orbit.repetitions = 1;
  StabilityMatrix m;
  try {
    m = stability_matrix(table, code, s, 1.0);
  } catch (const GrazingError&) {
    return std::nullopt;
  }
  orbit.trace_m = m.trace();
  if (std::abs(orbit.trace_m) <= 2.0) return std::nullopt;  // not hyperbolic
  orbit.maslov = 2 * n;  // Dirichlet reflections; no conjugate points on concave tables
  orbit.weight_sq = 1.0 / std::abs(orbit.trace_m - 2.0);
  return orbit;
}

std::optional<PeriodicOrbit> find_orbit(const BilliardTable& table, const std::vector<int>& code,
                                        const NewtonOptions& opts) {
  std::vector<double> seed(code.size());
  for (size_t i = 0; i < code.size(); ++i) seed[i] = 0.5 * table.elements[code[i]].length();
  return find_orbit_seeded(table, code, std::move(seed), opts);
}

std::vector<int> canonical_code(const std::vector<int>& code) {
  const int n = static_cast<int>(code.size());
  std::vector<int> best = code;
  auto consider = [&](std::vector<int> c) {
    for (int r = 0; r < n; ++r) {
      std::rotate(c.begin(), c.begin() + 1, c.end());
      if (c < best) best = c;
    }
  };
  consider(code);
  std::vector<int> rev(code.rbegin(), code.rend());
  consider(rev);
  return best;
}

bool code_is_primitive(const std::vector<int>& code) {
  const int n = static_cast<int>(code.size());
  for (int p = 1; p <= n / 2; ++p) {
    if (n % p != 0) continue;
    bool periodic = true;
    for (int i = 0; i < n && periodic; ++i) periodic = code[i] == code[i % p];
    if (periodic) return false;
  }
  return true;
}

double trace_power(double trace_m, int r) {
  // t_r = Tr(M^r): t_0 = 2, t_1 = Tr M, t_{r+1} = t_1 t_r - t_{r-1}
  double tm2 = 2.0, tm1 = trace_m;
  if (r == 0) return 2.0;
  for (int i = 2; i <= r; ++i) {
    const double t = trace_m * tm1 - tm2;
    tm2 = tm1;
    tm1 = t;
  }
  return tm1;
}

namespace {

void enumerate_codes_of_length(const BilliardTable& table, int n, double l_max,
                               std::vector<std::vector<int>>& out) {
  const int ne = static_cast<int>(table.elements.size());
  std::vector<int> code(n, 0);
  // iterate sequences with no two adjacent equal entries (cyclically)
  std::function<void(int)> rec = [&](int pos) {
    if (pos == n) {
      if (code[n - 1] == code[0]) return;
      if (!code_is_primitive(code)) return;
      if (canonical_code(code) != code) return;
      out.push_back(code);
      return;
    }
    for (int e = 0; e < ne; ++e) {
      if (pos > 0 && e == code[pos - 1]) continue;
      // canonical codes start with their smallest entry
      if (pos == 0 && e > 0) break;
      code[pos] = e;
      rec(pos + 1);
    }
  };
  (void)l_max;
  rec(0);
}

}  // namespace

std::vector<PeriodicOrbit> enumerate_orbits(const BilliardTable& table,
                                            const EnumerateOptions& opts) {
  if (opts.max_bounces < 2) throw std::invalid_argument("enumerate_orbits: max_bounces >= 2");

  std::vector<std::vector<int>> codes;
  for (int n = 2; n <= opts.max_bounces; ++n)
    enumerate_codes_of_length(table, n, opts.l_max, codes);

  const int n_threads = opts.n_threads > 0
                            ? opts.n_threads
                            : std::max(1u, std::thread::hardware_concurrency());
  std::vector<PeriodicOrbit> primitives;
  std::mutex mtx;
  std::atomic<size_t> next{0};
  auto worker = [&]() {
    std::vector<PeriodicOrbit> local;
    for (;;) {
      const size_t i = next.fetch_add(1);
      if (i >= codes.size()) break;
      auto orbit = find_orbit(table, codes[i]);
      if (orbit && orbit->length <= opts.l_max) local.push_back(std::move(*orbit));
    }
    std::scoped_lock lk(mtx);
    for (auto& o : local) primitives.push_back(std::move(o));
  };
  std::vector<std::thread> pool;
  for (int t = 0; t < n_threads; ++t) pool.emplace_back(worker);
  for (auto& th : pool) th.join();

  std::vector<PeriodicOrbit> orbits = primitives;
  if (opts.include_repetitions) {
    for (const auto& p : primitives) {
      for (int r = 2; r * p.length <= opts.l_max; ++r) {
        PeriodicOrbit q = p;
        q.repetitions = r;
        q.length = r * p.length;
        q.primitive_length = p.length;
        q.trace_m = trace_power(p.trace_m, r);
        q.maslov = r * p.maslov;
        q.weight_sq = 1.0 / std::abs(q.trace_m - 2.0);
        q.code.clear();
        q.bounce_s.clear();
        q.bounce_points.clear();
        for (int rep = 0; rep < r; ++rep) {
          q.code.insert(q.code.end(), p.code.begin(), p.code.end());
          q.bounce_s.insert(q.bounce_s.end(), p.bounce_s.begin(), p.bounce_s.end());
          q.bounce_points.insert(q.bounce_points.end(), p.bounce_points.begin(),
                                 p.bounce_points.end());
        }
        orbits.push_back(std::move(q));
      }
    }
  }

  auto key = [](const PeriodicOrbit& o) {
    return std::make_tuple(o.length, o.n_bounces(), o.code);
  };
  std::sort(orbits.begin(), orbits.end(),
            [&](const PeriodicOrbit& a, const PeriodicOrbit& b) { return key(a) < key(b); });
  return orbits;
}

LyapunovEstimate lyapunov_estimate(const BilliardTable& table, int n_bounces, int n_samples,
                                   std::uint64_t seed) {
  if (n_bounces < 100) throw std::invalid_argument("lyapunov_estimate: n_bounces >= 100");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> uni(-1.0, 1.0);

  // bounding box
  double xmax = 0.0;
  for (const auto& e : table.elements)
    for (int i = 0; i <= 32; ++i) {
      const Vec2 p = e.point(e.length() * i / 32.0);
      xmax = std::max({xmax, std::abs(p.x), std::abs(p.y)});
    }

  std::vector<double> lambdas;
  while (static_cast<int>(lambdas.size()) < n_samples) {
    Vec2 p{uni(rng) * xmax, uni(rng) * xmax};
    if (!table.inside(p)) continue;
    const double ang = uni(rng) * std::numbers::pi;
    Ray ray{p, {std::cos(ang), std::sin(ang)}};
    try {
      // accumulate the tangent map (k = 1 convention) with renormalization
      double v1 = 1.0, v2 = 0.0;  // a generic transverse deviation vector
      double log_growth = 0.0, length = 0.0;
      for (int b = 0; b < n_bounces; ++b) {
        auto hit = first_hit(table, ray);
        if (!hit) throw std::runtime_error("ray escaped");
        const auto& e = table.elements[hit->element];
        if (hit->s < kCornerZone || hit->s > e.length() - kCornerZone)
          throw CornerError("corner");
        const Vec2 n = e.normal_in(hit->s);
        const double cosb = std::abs(ray.direction.dot(n));
        if (cosb < kGrazingTol) throw GrazingError("grazing");
        // flight then reflection
        const double l = hit->distance;
        double w1 = v1 + l * v2, w2 = v2;
        const double rs = e.signed_radius();
        const double kick = std::isinf(rs) ? 0.0 : 2.0 / (rs * cosb);
        v1 = -w1;
        v2 = kick * w1 - w2;
        length += l;
        const double nv = std::hypot(v1, v2);
        log_growth += std::log(nv);
        v1 /= nv;
        v2 /= nv;
        const Vec2 out = ray.direction - 2.0 * ray.direction.dot(n) * n;
        ray = Ray{hit->point, out.unit()};
      }
      lambdas.push_back(log_growth / length);
    } catch (const std::runtime_error&) {
      continue;  // grazing/corner trajectories resampled
    }
  }

  LyapunovEstimate est;
  est.n_samples = n_samples;
  double mean = 0.0;
  for (double l : lambdas) mean += l;
  mean /= n_samples;
  double var = 0.0;
  for (double l : lambdas) var += (l - mean) * (l - mean);
  var /= std::max(1, n_samples - 1);
  est.lambda = mean;
  est.std_error = std::sqrt(var / n_samples);
  return est;
}

}  // namespace sc::billiard
