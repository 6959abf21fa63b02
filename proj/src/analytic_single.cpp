#include "pmd/analytic_single.hpp"

#include "pmd/entanglement.hpp"

#include <cmath>
#include <numbers>

namespace pmd {

namespace {

void check_length(double l_over_lc) {
  if (!std::isfinite(l_over_lc) || l_over_lc < 0.0)
    throw Error(ErrorCode::invalid_argument, "length must be non-negative");
}

void check_nu(double nu) {
  if (!std::isfinite(nu) || nu <= 0.0)
    throw Error(ErrorCode::invalid_argument, "nu must be positive");
}

}  // namespace

SingleDecayRates decay_rates_single(const DispersionProfile& profile,
                                    double omega, double omega_p) {
  const double f = profile(omega), fp = profile(omega_p);
  const double e2 = profile.eta() * profile.eta();
  return {0.75 * e2 * (f - fp) * (f - fp),
          0.25 * e2 * (3.0 * f * f + 3.0 * fp * fp + 2.0 * f * fp)};
}

SinglePhotonDensity evolve_single_analytic(const PulseEnvelope& envelope,
                                           const DispersionProfile& profile,
                                           double l_over_lc,
                                           const FrequencyGrid& grid) {
  check_length(l_over_lc);
  const std::vector<double> phi = sample_envelope(envelope, grid);
  const double length = l_over_lc * profile.coherence_length();
  const std::size_t n = grid.size();
  Eigen::MatrixXcd k = Eigen::MatrixXcd::Zero(2 * n, 2 * n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      const auto r = decay_rates_single(profile, grid.nodes[i], grid.nodes[j]);
      const double e1 = std::exp(-r.lambda1 * length);
      const double e2 = std::exp(-r.lambda2 * length);
      const double pp = 0.5 * phi[i] * phi[j];
      k(i, j) = pp * (e1 + e2);
      k(n + i, n + j) = pp * (e1 - e2);
    }
  return SinglePhotonDensity(grid, std::move(k));
}

IntensityProfiles intensity_profiles(const DispersionProfile& profile,
                                     double nu, double l_over_lc,
                                     const std::vector<double>& tau_kappa) {
  profile.require_linear("intensity profiles");
  check_nu(nu);
  check_length(l_over_lc);
  const double x = l_over_lc / (nu * nu);
  const double s6 = 1.0 + 6.0 * x, s2 = 1.0 + 2.0 * x, s4 = 1.0 + 4.0 * x;
  const double pre = std::sqrt(std::numbers::pi / 2.0);
  const double damp = std::exp(-8.0 * l_over_lc / s4) / std::sqrt(s2 * s4);
  IntensityProfiles out;
  out.i1.reserve(tau_kappa.size());
  out.i0.reserve(tau_kappa.size());
  for (double t : tau_kappa) {
    const double a = std::exp(-t * t / (2.0 * s6)) / std::sqrt(s6);
    const double b = std::exp(-t * t / (2.0 * s2)) * damp;
    out.i1.push_back(pre * (a + b));
    out.i0.push_back(pre * (a - b));
  }
  return out;
}

PulseMoments pulse_moments(const DispersionProfile& profile, double nu,
                           double l_over_lc) {
  const double x = l_over_lc / (nu * nu);
  const double span = 14.0 * std::sqrt(1.0 + 6.0 * x);
  const std::size_t n = 4001;
  const double h = 2.0 * span / double(n - 1);
  std::vector<double> tau(n);
  for (std::size_t i = 0; i < n; ++i) tau[i] = -span + h * double(i);
  const IntensityProfiles p = intensity_profiles(profile, nu, l_over_lc, tau);
  double m0 = 0.0, m2 = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double w = (i == 0 || i + 1 == n) ? 0.5 * h : h;
    const double v = p.i1[i] + p.i0[i];
    m0 += w * v;
    m2 += w * v * tau[i] * tau[i];
  }
  return {2.0 * m2 / m0, m0};
}

PurityReport purities(const DispersionProfile& profile, double nu,
                      double l_over_lc) {
  profile.require_linear("closed-form purities");
  check_nu(nu);
  check_length(l_over_lc);
  const double x = l_over_lc / (nu * nu);
  const double s6 = 1.0 + 6.0 * x, s2 = 1.0 + 2.0 * x, s4 = 1.0 + 4.0 * x;
  const double decay = std::exp(-16.0 * l_over_lc / s4);
  PurityReport r;
  r.mu_omega = 1.0 / std::sqrt(s6);
  r.mu_s = 0.5 * (1.0 + decay / s4);
  r.mu_total = 0.5 * (1.0 / std::sqrt(s6) + decay / std::sqrt(s2 * s4));
  return r;
}

PurityReport purity_numeric(const SinglePhotonDensity& rho) {
  const WeightedOperator op = to_operator(rho);
  const double scale = std::max(1.0, op.matrix().cwiseAbs().maxCoeff());
  if (op.hermiticity_error() > 1e-8 * scale)
    throw Error(ErrorCode::invalid_argument, "density is not Hermitian");
  PurityReport r;
  r.mu_total = purity(op);
  r.mu_omega = purity(reduce(op, {1}));
  r.mu_s = purity(reduce(op, {0}));
  return r;
}

}  // namespace pmd
