#include "pmd/analytic_common.hpp"

#include <cmath>
#include <limits>
#include <numbers>

namespace pmd {

namespace {

void check_length(double l) {
  if (!std::isfinite(l) || l < 0.0)
    throw Error(ErrorCode::invalid_argument, "length must be non-negative");
}

void check_width(double a, const char* name) {
  if (!std::isfinite(a) || a <= 0.0)
    throw Error(ErrorCode::invalid_argument, std::string(name) + " must be positive");
}

CommonFiberSpectrum spectrum_from_f(double eta, double fa, double fb,
                                    double fap, double fbp) {
  CommonFiberSpectrum s;
  const double p = fa - fb, q = fap - fbp;
  const double dd = (fa + fb) - (fap + fbp);
  const double pq2 = p * p + q * q;
  s.v11_1 = -3.0 * pq2;
  s.v12_1 = 2.0 * std::numbers::sqrt3 * p * q;
  s.v22_1 = -2.0 * dd * dd - pq2;

  const double sq = fa * fa + fb * fb + fap * fap + fbp * fbp;
  const double ab = fa * fb + fap * fbp;
  const double aa = fa * fap + fb * fbp;
  const double cross = fb * fap + fa * fbp;
  s.v11_2 = -3.0 * sq - 2.0 * ab - 2.0 * aa - 2.0 * cross;
  s.v_3(0, 0) = -3.0 * sq + 2.0 * ab - 2.0 * aa + 2.0 * cross;
  s.v_3(1, 1) = -3.0 * sq - 2.0 * ab + 2.0 * aa + 2.0 * cross;
  s.v_3(2, 2) = -3.0 * sq + 2.0 * ab + 2.0 * aa - 2.0 * cross;
  s.v_3(0, 1) = s.v_3(1, 0) = 4.0 * (fb * fap - fa * fbp);
  s.v_3(0, 2) = s.v_3(2, 0) = 4.0 * (fa * fb - fap * fbp);
  s.v_3(1, 2) = s.v_3(2, 1) = 4.0 * (fb * fbp - fa * fap);

  const double d2 = p * p - q * q;
  s.omega = -3.0 * (d2 * d2 + 2.0 * pq2 * dd * dd);
  const double diff = 2.0 * dd * dd - 2.0 * pq2;
  s.discriminant = std::sqrt(diff * diff + 48.0 * p * p * q * q);
  const double sum = 4.0 * pq2 + 2.0 * dd * dd;
  const double e2 = eta * eta;
  s.xi1 = 0.125 * e2 * (sum + s.discriminant);
  s.xi2 = (sum + s.discriminant) > 0.0
              ? 0.5 * e2 * (-s.omega) / (sum + s.discriminant)
              : 0.0;
  return s;
}

CommonAmplitudes amplitudes(const CommonFiberSpectrum& s, double length) {
  const double e1 = std::exp(-s.xi1 * length);
  const double e2 = std::exp(-s.xi2 * length);
  if (s.discriminant == 0.0) return {e1, 0.0};
  const double r = (s.v11_1 - s.v22_1) / s.discriminant;
  return {0.5 * ((1.0 - r) * e1 + (1.0 + r) * e2),
          s.v12_1 / s.discriminant * (e2 - e1)};
}

}  // namespace

std::array<double, 9> mprime_elements(const DispersionProfile& profile,
                                      double omega_a, double omega_b,
                                      double omega_ap, double omega_bp) {
  const double fa = profile(omega_a), fb = profile(omega_b);
  const double fap = profile(omega_ap), fbp = profile(omega_bp);
  const double sq = fa * fa + fb * fb + fap * fap + fbp * fbp;
  const double ab = fa * fb + fap * fbp;
  const double aa = fa * fap + fb * fbp;
  const double cross = fb * fap + fa * fbp;
  return {-3.0 * sq - 2.0 * ab + 2.0 * aa + 2.0 * cross,
          -3.0 * sq + 2.0 * ab + 2.0 * aa - 2.0 * cross,
          -3.0 * sq + 2.0 * ab - 2.0 * aa + 2.0 * cross,
          4.0 * fb * fbp,
          4.0 * fa * fap,
          4.0 * fb * fap,
          4.0 * fa * fbp,
          4.0 * fa * fb,
          4.0 * fap * fbp};
}

Matrix6d assemble_mprime(const DispersionProfile& profile, double omega_a,
                         double omega_b, double omega_ap, double omega_bp) {
  const auto m = mprime_elements(profile, omega_a, omega_b, omega_ap, omega_bp);
  const double m1 = m[0], m2 = m[1], m3 = m[2], m4 = m[3], m5 = m[4],
               m6 = m[5], m7 = m[6], m8 = m[7], m9 = m[8];
  Matrix6d out;
  out << m1, m4, m5, 0.0, m6, m7,
         m4, m2, 0.0, m5, -m9, -m8,
         m5, 0.0, m2, m4, -m8, -m9,
         0.0, m5, m4, m1, m7, m6,
         m6, -m9, -m8, m7, m3, 0.0,
         m7, -m8, -m9, m6, 0.0, m3;
  return 0.25 * profile.eta() * profile.eta() * out;
}

Matrix6d common_unitary() {
  const double r2 = 1.0 / std::numbers::sqrt2;
  const double r3 = 1.0 / std::numbers::sqrt3;
  const double r6 = r2 * r3;
  const double h3 = 0.5 * r3;
  Matrix6d u;
  u << 0.0, r3, -r6, 0.0, -r2, 0.0,
       0.5, h3, r6, 0.0, 0.0, -r2,
       0.5, h3, r6, 0.0, 0.0, r2,
       0.0, r3, -r6, 0.0, r2, 0.0,
       -0.5, h3, r6, -r2, 0.0, 0.0,
       -0.5, h3, r6, r2, 0.0, 0.0;
  return u;
}

CommonFiberSpectrum common_spectrum(const DispersionProfile& profile,
                                    double omega_a, double omega_b,
                                    double omega_ap, double omega_bp) {
  return spectrum_from_f(profile.eta(), profile(omega_a), profile(omega_b),
                         profile(omega_ap), profile(omega_bp));
}

Matrix6d assemble_v(const CommonFiberSpectrum& s, double eta) {
  Matrix6d v = Matrix6d::Zero();
  v(0, 0) = s.v11_1;
  v(0, 1) = v(1, 0) = s.v12_1;
  v(1, 1) = s.v22_1;
  v(2, 2) = s.v11_2;
  v.block<3, 3>(3, 3) = s.v_3;
  return 0.25 * eta * eta * v;
}

CommonAmplitudes common_amplitudes(const CommonFiberSpectrum& spectrum,
                                   double length) {
  check_length(length);
  return amplitudes(spectrum, length);
}

Eigen::Matrix4d common_block(const CommonAmplitudes& v) {
  const double d = v.v2 / std::numbers::sqrt3;
  Eigen::Matrix4d m = Eigen::Matrix4d::Zero();
  m(0, 0) = m(3, 3) = d;
  m(1, 1) = m(2, 2) = 0.5 * v.v1 + 0.5 * d;
  m(1, 2) = m(2, 1) = -0.5 * v.v1 + 0.5 * d;
  return m;
}

TwoPhotonDensity evolve_common_singlet(const PulseEnvelope& envelope,
                                       const DispersionProfile& profile,
                                       double l_over_lc,
                                       const FrequencyGrid& grid) {
  check_length(l_over_lc);
  const Eigen::MatrixXd phi = sample_pair_envelope(envelope, grid);
  const double length = l_over_lc * profile.coherence_length();
  const double eta = profile.eta();
  std::vector<double> f(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) f[i] = profile(grid.nodes[i]);
  return TwoPhotonDensity(
      grid, [=](std::size_t a, std::size_t b, std::size_t ap,
                std::size_t bp) -> Eigen::Matrix4cd {
        const auto s = spectrum_from_f(eta, f[a], f[b], f[ap], f[bp]);
        const double pp = phi(a, b) * phi(ap, bp);
        return (pp * common_block(amplitudes(s, length))).cast<cplx>();
      });
}

double upsilon(double alpha_omega0, double l_over_lc) {
  check_width(alpha_omega0, "alpha*omega0");
  check_length(l_over_lc);
  return 1.0 / std::sqrt(1.0 + 4.0 * l_over_lc / (alpha_omega0 * alpha_omega0));
}

double upsilon_quadrature(const PulseEnvelope& envelope,
                          const DispersionProfile& profile, double l_over_lc,
                          std::size_t nodes) {
  check_length(l_over_lc);
  if (envelope.is_single())
    throw Error(ErrorCode::invalid_argument, "expected a photon-pair envelope");
  if (nodes < 8) throw Error(ErrorCode::invalid_argument, "too few nodes");
  const double w0 = envelope.omega0();
  const double k = 2.0 * profile.eta() * profile.eta() * l_over_lc *
                   profile.coherence_length();
  const double step = 1e-4 * w0;
  const double slope = (profile(w0 + step) - profile(w0 - step)) / (2.0 * step);
  const double alpha = envelope.alpha(), sw = 0.5 / envelope.beta();
  const double half = 9.0;
  // Trapezoid rule on a rotated grid whose difference axis spans su widths.
  const auto integrate = [&](double su, bool damped) {
    const double hu = 2.0 * half * su / double(nodes - 1);
    const double hw = 2.0 * half * sw / double(nodes - 1);
    double sum = 0.0;
    for (std::size_t i = 0; i < nodes; ++i) {
      const double u = -half * su + hu * double(i);
      const double wu = (i == 0 || i + 1 == nodes) ? 0.5 : 1.0;
      for (std::size_t j = 0; j < nodes; ++j) {
        const double w = -half * sw + hw * double(j);
        const double ww = (j == 0 || j + 1 == nodes) ? 0.5 : 1.0;
        const double oa = w0 + 0.5 * (w + u), ob = w0 + 0.5 * (w - u);
        const double amp = envelope.amplitude(oa, ob);
        double v = wu * ww * amp * amp;
        if (damped) {
          const double df = profile(oa) - profile(ob);
          v *= std::exp(-k * df * df);
        }
        sum += v;
      }
    }
    return sum * hu * hw;
  };
  const double su_damped =
      0.5 / std::sqrt(alpha * alpha + 0.5 * k * slope * slope);
  return integrate(su_damped, true) / integrate(0.5 / alpha, false);
}

CommonNegativityReport polarization_negativity_common(double alpha_omega0,
                                                      double l_over_lc) {
  CommonNegativityReport r;
  r.upsilon = upsilon(alpha_omega0, l_over_lc);
  r.n_s_raw = 0.75 * r.upsilon - 0.25;
  r.n_s = std::max(0.0, r.n_s_raw);
  r.l_crit_pol = 2.0 * alpha_omega0 * alpha_omega0;
  return r;
}

const char* verdict_name(WitnessVerdict v) {
  switch (v) {
    case WitnessVerdict::entangled:
      return "entangled";
    case WitnessVerdict::not_witnessed:
      return "not_witnessed";
    case WitnessVerdict::inconclusive:
      return "inconclusive";
  }
  return "unknown";
}

double g_threshold(double l_over_lc, double delta) {
  const double x = 8.0 * delta * delta * l_over_lc;
  const double ln3 = std::log(3.0);
  if (std::abs(x - ln3) <= 1e-12 * ln3)
    return std::numeric_limits<double>::quiet_NaN();
  const double log_ratio =
      x > ln3 ? std::numbers::ln2 - std::log1p(-3.0 * std::exp(-x))
              : std::numbers::ln2 + x - std::log(3.0 - std::exp(x));
  return log_ratio / (2.0 * delta * delta);
}

double g_threshold_printed(double l_over_lc, double delta) {
  const double x = 8.0 * delta * delta * l_over_lc;
  if (x <= std::log(3.0)) return std::numeric_limits<double>::quiet_NaN();
  const double log_excess = x + std::log1p(-3.0 * std::exp(-x));
  return 4.0 * l_over_lc -
         (log_excess - std::log(4.0)) / (4.0 * delta * delta);
}

PptWitness ppt_witness(double alpha_omega0, double beta_omega0,
                       double l_over_lc, double omega_a, double omega_b) {
  check_width(alpha_omega0, "alpha*omega0");
  check_width(beta_omega0, "beta*omega0");
  check_length(l_over_lc);
  const double delta = omega_a - omega_b;
  if (!std::isfinite(delta) || delta == 0.0)
    throw Error(ErrorCode::domain, "witness needs distinct frequencies");
  const double a2 = alpha_omega0 * alpha_omega0;
  const double b2 = beta_omega0 * beta_omega0;
  PptWitness w;
  w.correlated_ratio = std::exp(-4.0 * (a2 - b2) * delta * delta);
  w.correlated = w.correlated_ratio < 1.0 ? WitnessVerdict::entangled
                                          : WitnessVerdict::not_witnessed;
  w.g = g_threshold(l_over_lc, delta);
  w.g_printed = g_threshold_printed(l_over_lc, delta);
  if (std::isnan(w.g)) {
    w.anticorrelated_witness = std::numeric_limits<double>::quiet_NaN();
    w.anticorrelated = WitnessVerdict::inconclusive;
  } else {
    w.anticorrelated_witness = b2 - a2 - w.g;
    w.anticorrelated = w.anticorrelated_witness > 0.0
                           ? WitnessVerdict::entangled
                           : WitnessVerdict::not_witnessed;
  }
  return w;
}

PptWitness ppt_submatrix_tests(const PulseEnvelope& envelope,
                               const DispersionProfile& profile,
                               double l_over_lc, double omega_a,
                               double omega_b) {
  profile.require_linear("submatrix witnesses");
  if (envelope.is_single())
    throw Error(ErrorCode::invalid_argument, "expected a photon-pair envelope");
  const double w0 = envelope.omega0();
  return ppt_witness(envelope.alpha() * w0, envelope.beta() * w0, l_over_lc,
                     omega_a / w0, omega_b / w0);
}

}  // namespace pmd
