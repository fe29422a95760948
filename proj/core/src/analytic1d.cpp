#include "sc/analytic1d.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace sc::analytic1d {

namespace {
constexpr double pi = std::numbers::pi;
const cplx I{0.0, 1.0};
}  // namespace

void Trajectory1D::validate() const {
  if (!(duration > 0.0)) throw std::invalid_argument("Trajectory1D: duration must be positive");
  if (morse_index < 0) throw std::invalid_argument("Trajectory1D: morse_index must be >= 0");
}

cplx free_propagator(const PhysicalUnits& u, double q, double q0, double t) {
  u.validate();
  if (!(t > 0.0)) throw std::domain_error("free_propagator: t must be positive");
  const double pref = std::sqrt(u.mass / (2.0 * pi * u.hbar * t));
  return pref * std::exp(-I * (pi / 4.0)) *
         std::exp(I * u.mass * (q - q0) * (q - q0) / (2.0 * u.hbar * t));
}

cplx free_propagator_ct(const PhysicalUnits& u, double q, double q0, cplx t) {
  u.validate();
  // sqrt(m/(2 pi i hbar t)) with the principal branch; for real t > 0 this
  // reduces to the e^{-i pi/4} convention above.
  const cplx pref = std::sqrt(u.mass / (2.0 * pi * u.hbar * I * t));
  return pref * std::exp(I * u.mass * (q - q0) * (q - q0) / (2.0 * u.hbar * t));
}

int harmonic_morse_index(double omega, double t) {
  return static_cast<int>(std::floor(omega * t / pi));
}

cplx harmonic_propagator(const PhysicalUnits& u, double omega, double q, double q0, double t) {
  u.validate();
  if (!(t > 0.0)) throw std::domain_error("harmonic_propagator: t must be positive");
  if (!(omega > 0.0)) throw std::domain_error("harmonic_propagator: omega must be positive");
  const double s = std::sin(omega * t);
  const double scale = u.mass * omega / u.hbar;
  if (std::abs(s) < 1e-12)
    throw std::domain_error("harmonic_propagator: focal point omega*t = n*pi (kernel is a delta)");
  const int nu = harmonic_morse_index(omega, t);
  const double pref = std::sqrt(u.mass * omega / (2.0 * pi * u.hbar * std::abs(s)));
  const cplx phase = std::exp(-I * (pi / 4.0)) * std::exp(-I * (pi / 2.0) * double(nu));
  return pref * phase *
         std::exp(I * scale * ((q * q + q0 * q0) * std::cos(omega * t) - 2.0 * q * q0) / (2.0 * s));
}

std::vector<double> TrotterGrid::points() const {
  std::vector<double> q(n_points);
  const double w = spacing();
  for (int i = 0; i < n_points; ++i) q[i] = q_min + i * w;
  return q;
}

Eigen::MatrixXcd trotter_step_matrix(const PhysicalUnits& u,
                                     const std::function<double(double)>& potential,
                                     const TrotterGrid& grid, double tau) {
  u.validate();
  const int n = grid.n_points;
  if (n < 2) throw std::invalid_argument("trotter: grid too small");
  const double w = grid.spacing();
  const auto q = grid.points();

  // Discrete momentum grid of the truncated domain.
  Eigen::VectorXd k(n);
  const double dk = 2.0 * pi / (n * w);
  for (int j = 0; j < n; ++j) k[j] = dk * (j <= n / 2 ? j : j - n);

  Eigen::MatrixXcd W(n, n);
  const double norm = 1.0 / std::sqrt(double(n));
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      W(a, b) = norm * std::exp(-2.0 * pi * I * double(a) * double(b) / double(n));

  Eigen::VectorXcd kin(n), pot(n);
  for (int j = 0; j < n; ++j) kin[j] = std::exp(-I * tau * u.hbar * k[j] * k[j] / (2.0 * u.mass));
  for (int j = 0; j < n; ++j) pot[j] = std::exp(-I * tau * potential(q[j]) / u.hbar);

  Eigen::MatrixXcd F = W.adjoint() * kin.asDiagonal() * W;
  return F * pot.asDiagonal();
}

TrotterResult trotter_propagator(const PhysicalUnits& u,
                                 const std::function<double(double)>& potential,
                                 const TrotterGrid& grid, double t, int n_slices) {
  if (n_slices < 1) throw std::invalid_argument("trotter_propagator: n_slices must be >= 1");
  if (!(t > 0.0)) throw std::domain_error("trotter_propagator: t must be positive");
  const double w = grid.spacing();
  const double tau = t / n_slices;

  // Aliasing risk: the per-slice potential phase must be resolved between
  // neighboring grid points, else the diagonal factor wraps.
  bool aliasing = false;
  {
    const auto q = grid.points();
    for (int j = 0; j + 1 < grid.n_points; ++j)
      if (std::abs(potential(q[j + 1]) - potential(q[j])) * tau / u.hbar > pi) aliasing = true;
  }

  Eigen::MatrixXcd U = trotter_step_matrix(u, potential, grid, tau);
  // binary power
  Eigen::MatrixXcd P = Eigen::MatrixXcd::Identity(grid.n_points, grid.n_points);
  int m = n_slices;
  while (m > 0) {
    if (m & 1) P = P * U;
    m >>= 1;
    if (m > 0) U = U * U;
  }
  TrotterResult res;
  res.grid = grid.points();
  res.weight = w;
  res.kernel = P / w;
  res.aliasing_risk = aliasing;
  return res;
}

StationaryPhaseResult stationary_phase_1d(const std::function<double(double)>& amplitude,
                                          const std::function<double(double)>& phase,
                                          const std::function<double(double)>& dphase,
                                          const std::function<double(double)>& d2phase,
                                          double lambda, double a, double b, int scan_points) {
  if (!(lambda > 0.0)) throw std::invalid_argument("stationary_phase_1d: lambda must be positive");
  if (!(b > a)) throw std::invalid_argument("stationary_phase_1d: empty interval");

  StationaryPhaseResult out;
  const double h = (b - a) / scan_points;

  double scale = 0.0;
  for (int i = 0; i <= scan_points; ++i) scale = std::max(scale, std::abs(dphase(a + i * h)));
  const double tol = 1e-10 * std::max(scale, 1.0);

  std::vector<double> roots;
  double fprev = dphase(a);
  for (int i = 1; i <= scan_points; ++i) {
    const double x = a + i * h;
    const double f = dphase(x);
    if (fprev == 0.0) roots.push_back(a + (i - 1) * h);
    else if (fprev * f < 0.0) {
      double lo = x - h, hi = x, flo = fprev;
      for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi), fm = dphase(mid);
        if (std::abs(fm) < tol) { lo = hi = mid; break; }
        if (flo * fm <= 0.0) hi = mid; else { lo = mid; flo = fm; }
      }
      roots.push_back(0.5 * (lo + hi));
    }
    fprev = f;
  }
  if (std::abs(dphase(b)) == 0.0) roots.push_back(b);

  // merge duplicates
  std::sort(roots.begin(), roots.end());
  roots.erase(std::unique(roots.begin(), roots.end(),
                          [&](double x, double y) { return std::abs(x - y) < 4.0 * h * 1e-6; }),
              roots.end());

  if (roots.empty()) {
    out.no_stationary_point = true;
    return out;
  }

  const cplx I_{0.0, 1.0};
  for (double y0 : roots) {
    const double p2 = d2phase(y0);
    const bool endpoint = (std::abs(y0 - a) < 2.0 * h * 1e-3) || (std::abs(y0 - b) < 2.0 * h * 1e-3);
    if (std::abs(p2) < 1e-12 * std::max(1.0, scale))
      throw std::domain_error("stationary_phase_1d: degenerate stationary point at y = " +
                              std::to_string(y0));
    const double sgn = p2 > 0 ? 1.0 : -1.0;
    cplx term = amplitude(y0) * std::sqrt(2.0 * pi / (lambda * std::abs(p2))) *
                std::exp(I_ * lambda * phase(y0) + I_ * (pi / 4.0) * sgn);
    if (endpoint) term *= 0.5;
    out.value += term;
    out.points.push_back({y0, p2, endpoint});
  }
  return out;
}

namespace {
// k = sqrt(2mE)/hbar with Im k >= 0
cplx wavenumber(ComplexEnergy E, const PhysicalUnits& u) {
  cplx k = std::sqrt(2.0 * u.mass * E.value()) / u.hbar;
  if (k.imag() < 0.0) k = -k;
  return k;
}
}  // namespace

double box_eigenvalue(double L, int n, const PhysicalUnits& u) {
  const double kn = n * pi / L;
  return u.hbar * u.hbar * kn * kn / (2.0 * u.mass);
}

cplx box_green_exact(double L, ComplexEnergy E, double q, double q0, const PhysicalUnits& u) {
  u.validate();
  if (!(L > 0.0)) throw std::invalid_argument("box_green_exact: L must be positive");
  if (q < 0.0 || q > L || q0 < 0.0 || q0 > L)
    throw std::invalid_argument("box_green_exact: q, q0 must lie in [0, L]");
  const cplx k = wavenumber(E, u);
  const cplx skl = std::sin(k * L);
  if (std::abs(skl) < 1e-14 * std::max(1.0, std::abs(k * L)))
    throw std::domain_error("box_green_exact: E at a box eigenvalue (pole)");
  const double qlo = std::min(q, q0), qhi = std::max(q, q0);
  const cplx psi_l = std::sin(k * qlo);
  const cplx psi_r = std::sin(k * (L - qhi));
  const cplx wronskian = -k * skl;
  return (2.0 * u.mass / (u.hbar * u.hbar)) * psi_l * psi_r / wronskian;
}

cplx box_green_orbit_sum(double L, ComplexEnergy E, double q, double q0,
                         const PhysicalUnits& u, int max_bounces) {
  u.validate();
  if (!(E.im > 0.0))
    throw std::domain_error("box_green_orbit_sum: Im E must be positive for convergence");
  if (max_bounces < 0) throw std::invalid_argument("box_green_orbit_sum: max_bounces >= 0");
  const cplx k = wavenumber(E, u);
  const cplx pref = u.mass / (I * u.hbar * u.hbar * k);

  // Images of q0 under the reflection group of [0, L]: 2nL + q0 and 2nL - q0.
  // The bounce count of the trajectory equals the number of wall planes
  // (integer multiples of L) the unfolded straight path crosses; each
  // Dirichlet reflection flips the sign.
  cplx sum = 0.0;
  const int n_max = max_bounces / 2 + 2;
  for (int n = -n_max; n <= n_max; ++n) {
    for (int sgn = 0; sgn < 2; ++sgn) {
      const double img = 2.0 * n * L + (sgn == 0 ? q0 : -q0);
      const double lo = std::min(img, q), hi = std::max(img, q);
      int bounces = 0;
      // count multiples of L strictly inside (lo, hi)
      const int m_lo = static_cast<int>(std::ceil(lo / L + 1e-14));
      const int m_hi = static_cast<int>(std::floor(hi / L - 1e-14));
      if (m_hi >= m_lo) bounces = m_hi - m_lo + 1;
      if (bounces > max_bounces) continue;
      const double sign = (bounces % 2 == 0) ? 1.0 : -1.0;
      sum += sign * std::exp(I * k * std::abs(q - img));
    }
  }
  return pref * sum;
}

}  // namespace sc::analytic1d
