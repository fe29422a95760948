#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "sc/geometry.hpp"

namespace sc::billiard {

// Units here and downstream: hbar = 2m = 1, E = k^2, action S_p = k L_p,
// period identified with orbit length.

struct StabilityMatrix {
  double m11 = 1.0, m12 = 0.0, m21 = 0.0, m22 = 1.0;

  double det() const { return m11 * m22 - m12 * m21; }
  double trace() const { return m11 + m22; }
  StabilityMatrix operator*(const StabilityMatrix& o) const {
    return {m11 * o.m11 + m12 * o.m21, m11 * o.m12 + m12 * o.m22,
            m21 * o.m11 + m22 * o.m21, m21 * o.m12 + m22 * o.m22};
  }
};

struct PeriodicOrbit {
  std::vector<int> code;             // boundary-element indices, one per bounce
  std::vector<double> bounce_s;      // local arclength coordinate per bounce
  std::vector<Vec2> bounce_points;
  double length = 0.0;               // L_p
  double primitive_length = 0.0;     // L_p^prim
  int repetitions = 1;               // r_p
  double trace_m = 0.0;              // Tr M_p
  int maslov = 0;                    // mu_p = 2 * bounce count (Dirichlet, concave)
  double weight_sq = 0.0;            // |F_p|^2 = 1/|Tr M_p - 2|

  int n_bounces() const { return static_cast<int>(code.size()); }
};

// Product of reflection factors (-1, 0; 2k/(R cos b), -1) and flight factors
// (1, l/k; 0, 1); the rightmost factor corresponds to the first segment.
// R is the signed curvature radius (negative on dispersing walls).
StabilityMatrix stability_matrix(const BilliardTable& table, const std::vector<int>& code,
                                 const std::vector<double>& bounce_s, double k = 1.0);

struct NewtonOptions {
  int max_iterations = 100;
  double grad_tol = 1e-10;
  double corner_margin = 1e-6;  // reject bounce coordinates this close to an element end
};

// Newton refinement of the bounce coordinates for a symbolic code;
// stationary points of the total chord length are the periodic orbits.
std::optional<PeriodicOrbit> find_orbit(const BilliardTable& table, const std::vector<int>& code,
                                        const NewtonOptions& opts = {});

// Same, seeded at explicit local arclength coordinates.
std::optional<PeriodicOrbit> find_orbit_seeded(const BilliardTable& table,
                                               const std::vector<int>& code,
                                               std::vector<double> seed,
                                               const NewtonOptions& opts = {});

struct EnumerateOptions {
  int max_bounces = 8;
  double l_max = 12.0;
  bool include_repetitions = true;
  int n_threads = 0;  // 0 = hardware concurrency
};

// All periodic orbits with length <= l_max and at most max_bounces bounces;
// codes deduplicated over cyclic shifts and time reversal, repetitions of
// primitive orbits marked with r_p >= 2. Sorted by length.
std::vector<PeriodicOrbit> enumerate_orbits(const BilliardTable& table,
                                            const EnumerateOptions& opts);

// Lexicographically minimal representative over cyclic shifts of the code
// and of its reversal.
std::vector<int> canonical_code(const std::vector<int>& code);
bool code_is_primitive(const std::vector<int>& code);

struct LyapunovEstimate {
  double lambda = 0.0;      // per unit length
  double std_error = 0.0;
  int n_samples = 0;
};

LyapunovEstimate lyapunov_estimate(const BilliardTable& table, int n_bounces, int n_samples,
                                   std::uint64_t seed);

// Verification helpers
double specular_residual(const BilliardTable& table, const PeriodicOrbit& orbit);
bool chords_interior(const BilliardTable& table, const std::vector<int>& code,
                     const std::vector<double>& bounce_s);

// Tr of the r-th matrix power from Tr M, via the Chebyshev recurrence.
double trace_power(double trace_m, int r);

}  // namespace sc::billiard
