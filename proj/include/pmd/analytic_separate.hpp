#pragma once

#include "pmd/core.hpp"

namespace pmd {

struct SeparateDecayRates {
  double zeta1 = 0.0;
  double zeta2 = 0.0;
  double zeta3 = 0.0;
  double zeta4 = 0.0;
};

SeparateDecayRates decay_rates_separate(const DispersionProfile& profile,
                                        double omega_a, double omega_b,
                                        double omega_ap, double omega_bp);

// Coupling of (rho_1111, rho_1010, rho_0101, rho_0000) for two photons in
// independent fibers, including the eta^2/4 prefactor.
Eigen::Matrix4d assemble_m2(const DispersionProfile& profile, double omega_a,
                            double omega_b, double omega_ap, double omega_bp);

// Columns are the eigenvectors belonging to zeta1..zeta4.
Eigen::Matrix4d separate_eigenvectors();

TwoPhotonDensity evolve_separate(const PulseEnvelope& envelope, BellLabel bell,
                                 const DispersionProfile& profile,
                                 double l_over_lc, const FrequencyGrid& grid);
TwoPhotonDensity evolve_separate_singlet(const PulseEnvelope& envelope,
                                         const DispersionProfile& profile,
                                         double l_over_lc,
                                         const FrequencyGrid& grid);

// Closed forms below take the dimensionless products alpha*omega0 and
// beta*omega0 and assume linear dispersion.
double chi_factor(double alpha_omega0, double beta_omega0, double l_over_lc);

double polarization_negativity_raw(double chi);
double polarization_negativity(double chi);

double critical_length_pol(double alpha_omega0, double beta_omega0);

double frequency_negativity_separate(double alpha_omega0, double beta_omega0,
                                     double l_over_lc);
double critical_length_freq(double alpha_omega0, double beta_omega0);

struct SeparateNegativityReport {
  double chi = 1.0;
  double n_s_raw = 0.5;
  double n_s = 0.5;
  double n_omega = 0.0;
  double l_crit_pol = 0.0;
  double l_crit_freq = 0.0;
};

SeparateNegativityReport separate_negativity(double alpha_omega0,
                                             double beta_omega0,
                                             double l_over_lc);

}  // namespace pmd
