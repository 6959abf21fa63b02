#include "pmd/analytic_separate.hpp"

#include <boost/math/tools/roots.hpp>

#include <cmath>
#include <cstdint>

namespace pmd {

namespace {

void check_widths(double a, double b) {
  if (!(std::isfinite(a) && a > 0.0 && std::isfinite(b) && b > 0.0))
    throw Error(ErrorCode::invalid_argument,
                "alpha*omega0 and beta*omega0 must be positive");
}

void check_length(double l) {
  if (!std::isfinite(l) || l < 0.0)
    throw Error(ErrorCode::invalid_argument, "length must be non-negative");
}

SeparateDecayRates rates_from_f(double eta, double fa, double fb, double fap,
                                double fbp) {
  const double q = 0.25 * eta * eta;
  const double da = fa - fap, db = fb - fbp;
  const double sa = 3.0 * fa * fa + 2.0 * fa * fap + 3.0 * fap * fap;
  const double sb = 3.0 * fb * fb + 2.0 * fb * fbp + 3.0 * fbp * fbp;
  return {q * (3.0 * da * da + 3.0 * db * db), q * (3.0 * da * da + sb),
          q * (sa + 3.0 * db * db), q * (sa + sb)};
}

}  // namespace

SeparateDecayRates decay_rates_separate(const DispersionProfile& profile,
                                        double omega_a, double omega_b,
                                        double omega_ap, double omega_bp) {
  return rates_from_f(profile.eta(), profile(omega_a), profile(omega_b),
                      profile(omega_ap), profile(omega_bp));
}

Eigen::Matrix4d assemble_m2(const DispersionProfile& profile, double omega_a,
                            double omega_b, double omega_ap, double omega_bp) {
  const double fa = profile(omega_a), fb = profile(omega_b);
  const double fap = profile(omega_ap), fbp = profile(omega_bp);
  const double m1 = -3.0 * (fa * fa + fb * fb + fap * fap + fbp * fbp) +
                    2.0 * fa * fap + 2.0 * fb * fbp;
  const double m2 = 4.0 * fb * fbp;
  const double m3 = 4.0 * fa * fap;
  Eigen::Matrix4d m;
  m << m1, m2, m3, 0.0,
       m2, m1, 0.0, m3,
       m3, 0.0, m1, m2,
       0.0, m3, m2, m1;
  return 0.25 * profile.eta() * profile.eta() * m;
}

Eigen::Matrix4d separate_eigenvectors() {
  Eigen::Matrix4d v;
  v << 1.0, -1.0, -1.0, 1.0,
       1.0, 1.0, -1.0, -1.0,
       1.0, -1.0, 1.0, -1.0,
       1.0, 1.0, 1.0, 1.0;
  return 0.5 * v;
}

TwoPhotonDensity evolve_separate(const PulseEnvelope& envelope, BellLabel bell,
                                 const DispersionProfile& profile,
                                 double l_over_lc, const FrequencyGrid& grid) {
  check_length(l_over_lc);
  const Eigen::MatrixXd phi = sample_pair_envelope(envelope, grid);
  const double length = l_over_lc * profile.coherence_length();
  const double eta = profile.eta();
  std::vector<double> f(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) f[i] = profile(grid.nodes[i]);

  const Eigen::Vector4d amp = bell_amplitudes(bell);
  const Eigen::Matrix4d input = amp * amp.transpose();
  // Population vector (1111, 1010, 0101, 0000) projected on the eigenbasis;
  // the remaining nonzero Bell coherences all decay at zeta4.
  const Eigen::Matrix4d vecs = separate_eigenvectors();
  const Eigen::Vector4d pop0 = input.diagonal();
  const Eigen::Vector4d coeff = vecs.transpose() * pop0;
  Eigen::Matrix4d coh = input;
  coh.diagonal().setZero();

  return TwoPhotonDensity(
      grid, [=](std::size_t a, std::size_t b, std::size_t ap,
                std::size_t bp) -> Eigen::Matrix4cd {
        const SeparateDecayRates z = rates_from_f(eta, f[a], f[b], f[ap], f[bp]);
        const Eigen::Vector4d decay(std::exp(-z.zeta1 * length),
                                    std::exp(-z.zeta2 * length),
                                    std::exp(-z.zeta3 * length),
                                    std::exp(-z.zeta4 * length));
        const double pp = phi(a, b) * phi(ap, bp);
        Eigen::Matrix4d m = coh * decay(3);
        m.diagonal() = vecs * coeff.cwiseProduct(decay);
        return (pp * m).cast<cplx>();
      });
}

TwoPhotonDensity evolve_separate_singlet(const PulseEnvelope& envelope,
                                         const DispersionProfile& profile,
                                         double l_over_lc,
                                         const FrequencyGrid& grid) {
  return evolve_separate(envelope, BellLabel::singlet, profile, l_over_lc, grid);
}

double chi_factor(double alpha_omega0, double beta_omega0, double l_over_lc) {
  check_widths(alpha_omega0, beta_omega0);
  check_length(l_over_lc);
  const double ra = 1.0 + 2.0 * l_over_lc / (alpha_omega0 * alpha_omega0);
  const double rb = 1.0 + 2.0 * l_over_lc / (beta_omega0 * beta_omega0);
  return std::exp(-16.0 * l_over_lc / rb) / std::sqrt(ra * rb);
}

double polarization_negativity_raw(double chi) { return 0.75 * chi - 0.25; }

double polarization_negativity(double chi) {
  if (!(chi >= 0.0 && chi <= 1.0))
    throw Error(ErrorCode::domain, "decoherence factor outside [0, 1]");
  return std::max(0.0, polarization_negativity_raw(chi));
}

double critical_length_pol(double alpha_omega0, double beta_omega0) {
  check_widths(alpha_omega0, beta_omega0);
  const auto g = [&](double l) {
    return chi_factor(alpha_omega0, beta_omega0, l) - 1.0 / 3.0;
  };
  double hi = 1e-6;
  while (g(hi) > 0.0) {
    hi *= 2.0;
    if (hi > 1e300)
      throw Error(ErrorCode::numeric, "critical length bracket not found");
  }
  const double lo = hi > 1e-6 ? 0.5 * hi : 0.0;
  std::uintmax_t iters = 200;
  const auto r = boost::math::tools::toms748_solve(
      g, lo, hi, boost::math::tools::eps_tolerance<double>(50), iters);
  return 0.5 * (r.first + r.second);
}

double frequency_negativity_separate(double alpha_omega0, double beta_omega0,
                                     double l_over_lc) {
  check_widths(alpha_omega0, beta_omega0);
  check_length(l_over_lc);
  const double a2 = alpha_omega0 * alpha_omega0;
  const double b2 = beta_omega0 * beta_omega0;
  const double s = 3.0 * l_over_lc;
  if (a2 > b2 + s) return 0.5 * (std::sqrt(a2 / (b2 + s)) - 1.0);
  if (b2 > a2 + s) return 0.5 * (std::sqrt(b2 / (a2 + s)) - 1.0);
  return 0.0;
}

double critical_length_freq(double alpha_omega0, double beta_omega0) {
  check_widths(alpha_omega0, beta_omega0);
  return std::abs(alpha_omega0 * alpha_omega0 - beta_omega0 * beta_omega0) /
         3.0;
}

SeparateNegativityReport separate_negativity(double alpha_omega0,
                                             double beta_omega0,
                                             double l_over_lc) {
  SeparateNegativityReport r;
  r.chi = chi_factor(alpha_omega0, beta_omega0, l_over_lc);
  r.n_s_raw = polarization_negativity_raw(r.chi);
  r.n_s = polarization_negativity(r.chi);
  r.n_omega = frequency_negativity_separate(alpha_omega0, beta_omega0, l_over_lc);
  r.l_crit_pol = critical_length_pol(alpha_omega0, beta_omega0);
  r.l_crit_freq = critical_length_freq(alpha_omega0, beta_omega0);
  return r;
}

}  // namespace pmd
