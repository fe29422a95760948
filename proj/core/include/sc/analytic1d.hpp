#pragma once

#include <complex>
#include <functional>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "sc/units.hpp"

namespace sc::analytic1d {

using cplx = std::complex<double>;

// Branch convention used throughout: sqrt(+i) = e^{+i pi/4}, sqrt(-i) = e^{-i pi/4}.

struct Trajectory1D {
  double q_start = 0.0;
  double q_end = 0.0;
  double duration = 0.0;   // > 0
  double action = 0.0;     // Hamilton's principal function R
  int morse_index = 0;     // nu >= 0

  void validate() const;
};

struct ComplexEnergy {
  double re = 0.0;
  double im = 0.0;  // eta >= 0 wherever a retarded quantity is requested
  cplx value() const { return {re, im}; }
};

// Exact kernel of the free particle, t > 0.
cplx free_propagator(const PhysicalUnits& u, double q, double q0, double t);

// Same closed form continued to complex time; used by quadrature oracles.
cplx free_propagator_ct(const PhysicalUnits& u, double q, double q0, cplx t);

// Exact harmonic-oscillator kernel for all t > 0 away from focal points
// omega*t = n*pi, including the Morse phase e^{-i nu pi/2}, nu = floor(omega t/pi).
cplx harmonic_propagator(const PhysicalUnits& u, double omega, double q, double q0, double t);

int harmonic_morse_index(double omega, double t);

// ---------------------------------------------------------------------------
// Discretized path-integral kernel [exp(-i tau T/hbar) exp(-i tau V/hbar)]^N
// on a uniform grid. The kinetic factor is the free kernel on the truncated
// grid, synthesized in the discrete momentum basis so every factor is
// exactly unitary; the potential factor is a diagonal phase at the slice
// start, matching the discrete action sum.
// ---------------------------------------------------------------------------

struct TrotterGrid {
  double q_min = -8.0;
  double q_max = 8.0;
  int n_points = 256;

  std::vector<double> points() const;
  double spacing() const { return (q_max - q_min) / n_points; }
};

struct TrotterResult {
  std::vector<double> grid;
  double weight = 0.0;                 // grid spacing (quadrature weight)
  Eigen::MatrixXcd kernel;             // K(q_a, q_b, t); scaled step product / weight
  bool aliasing_risk = false;          // per-slice potential phase unresolved somewhere
};

TrotterResult trotter_propagator(const PhysicalUnits& u,
                                 const std::function<double(double)>& potential,
                                 const TrotterGrid& grid, double t, int n_slices);

// One Trotter step as a dense matrix (scaled by the grid weight, so the
// product of steps is unitary). Exposed for the unitarity checks.
Eigen::MatrixXcd trotter_step_matrix(const PhysicalUnits& u,
                                     const std::function<double(double)>& potential,
                                     const TrotterGrid& grid, double tau);

// ---------------------------------------------------------------------------
// Stationary phase
// ---------------------------------------------------------------------------

struct StationaryPoint {
  double y = 0.0;
  double phase_second = 0.0;  // phi''(y)
  bool at_endpoint = false;
};

struct StationaryPhaseResult {
  cplx value{0.0, 0.0};
  std::vector<StationaryPoint> points;
  bool no_stationary_point = false;  // endpoint corrections are out of scope
};

// Leading-order approximation of  I = int_a^b A(y) e^{i lambda phi(y)} dy:
//   sum over stationary points of A(y0) sqrt(2 pi/(lambda |phi''|))
//     * e^{i lambda phi(y0) + i pi sgn(phi'')/4},
// endpoint stationary points at half weight. Stationary points located by
// bracketing sign changes of phi' on a scan grid, then bisection; tolerance
// |phi'| < 1e-10 * scale. Throws on a degenerate point (|phi''| below tol).
StationaryPhaseResult stationary_phase_1d(const std::function<double(double)>& amplitude,
                                          const std::function<double(double)>& phase,
                                          const std::function<double(double)>& dphase,
                                          const std::function<double(double)>& d2phase,
                                          double lambda, double a, double b,
                                          int scan_points = 2048);

// ---------------------------------------------------------------------------
// Particle in a box, Dirichlet walls at 0 and L
// ---------------------------------------------------------------------------

// (2m/hbar^2) psi_l(q_<) psi_r(q_>) / W, psi_l = sin(kq), psi_r = sin(k(L-q)),
// W = -k sin(kL); k = sqrt(2mE)/hbar with Im k >= 0.
cplx box_green_exact(double L, ComplexEnergy E, double q, double q0, const PhysicalUnits& u);

// Truncated image-charge sum over bouncing trajectories (images at 2nL +- q0),
// each Dirichlet reflection contributing a sign flip. Requires Im E > 0.
cplx box_green_orbit_sum(double L, ComplexEnergy E, double q, double q0,
                         const PhysicalUnits& u, int max_bounces);

// n-th box eigenvalue (hbar n pi / L)^2 / (2m), n >= 1.
double box_eigenvalue(double L, int n, const PhysicalUnits& u);

}  // namespace sc::analytic1d
