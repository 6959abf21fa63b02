#pragma once

#include "pmd/core.hpp"

#include <vector>

namespace pmd {

struct SingleDecayRates {
  double lambda1 = 0.0;
  double lambda2 = 0.0;
};

SingleDecayRates decay_rates_single(const DispersionProfile& profile,
                                    double omega, double omega_p);

// Output of a |1>-polarized single-photon pulse after l_over_lc coherence
// lengths.
SinglePhotonDensity evolve_single_analytic(const PulseEnvelope& envelope,
                                           const DispersionProfile& profile,
                                           double l_over_lc,
                                           const FrequencyGrid& grid);

struct IntensityProfiles {
  std::vector<double> i1;
  std::vector<double> i0;
};

// Averaged output intensity in both polarizations; tau is given in units of
// 1/kappa.
IntensityProfiles intensity_profiles(const DispersionProfile& profile,
                                     double nu, double l_over_lc,
                                     const std::vector<double>& tau_kappa);

struct PulseMoments {
  // 2 <tau^2> of I1 + I0, in units of 1/kappa^2.
  double width_sq = 0.0;
  // Integral of I1 + I0 over kappa*tau.
  double integral = 0.0;
};

// Numerical moments of the total intensity on a wide, fine tau grid.
PulseMoments pulse_moments(const DispersionProfile& profile, double nu,
                           double l_over_lc);

struct PurityReport {
  double mu_omega = 1.0;
  double mu_s = 1.0;
  double mu_total = 1.0;
};

PurityReport purities(const DispersionProfile& profile, double nu,
                      double l_over_lc);
PurityReport purity_numeric(const SinglePhotonDensity& rho);

}  // namespace pmd
