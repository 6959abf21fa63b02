#pragma once

#include "pmd/core.hpp"

#include <array>

namespace pmd {

using Matrix6d = Eigen::Matrix<double, 6, 6>;

// Unscaled coupling elements m'_1..m'_9 of the six singlet-sector
// populations and coherences (1111, 1010, 0101, 0000, 1001, 0110).
std::array<double, 9> mprime_elements(const DispersionProfile& profile,
                                      double omega_a, double omega_b,
                                      double omega_ap, double omega_bp);
// Full coupling matrix including the eta^2/4 prefactor.
Matrix6d assemble_mprime(const DispersionProfile& profile, double omega_a,
                         double omega_b, double omega_ap, double omega_bp);

// Constant rotation that block-diagonalizes the coupling matrix.
Matrix6d common_unitary();

struct CommonFiberSpectrum {
  // Block entries without the eta^2/4 prefactor.
  double v11_1 = 0.0;
  double v12_1 = 0.0;
  double v22_1 = 0.0;
  double v11_2 = 0.0;
  Eigen::Matrix3d v_3 = Eigen::Matrix3d::Zero();
  // (V12)^2 - V11 V22 of the first block; never positive.
  double omega = 0.0;
  // sqrt((V11 - V22)^2 + 4 V12^2) of the first block.
  double discriminant = 0.0;
  double xi1 = 0.0;
  double xi2 = 0.0;
};

CommonFiberSpectrum common_spectrum(const DispersionProfile& profile,
                                    double omega_a, double omega_b,
                                    double omega_ap, double omega_bp);

// Block-diagonal coupling in the rotated frame, eta^2/4 included.
Matrix6d assemble_v(const CommonFiberSpectrum& spectrum, double eta);

struct CommonAmplitudes {
  double v1 = 1.0;
  double v2 = 0.0;
};

// Kernel amplitudes per unit phi(a,b) phi*(a',b') after a physical length.
CommonAmplitudes common_amplitudes(const CommonFiberSpectrum& spectrum,
                                   double length);

// Polarization block of the evolved singlet for given amplitudes.
Eigen::Matrix4d common_block(const CommonAmplitudes& v);

TwoPhotonDensity evolve_common_singlet(const PulseEnvelope& envelope,
                                       const DispersionProfile& profile,
                                       double l_over_lc,
                                       const FrequencyGrid& grid);

double upsilon(double alpha_omega0, double l_over_lc);
// Double integral of |phi|^2 exp(-2 eta^2 (f_A - f_B)^2 L) on a rotated
// (difference, sum) trapezoid grid.
double upsilon_quadrature(const PulseEnvelope& envelope,
                          const DispersionProfile& profile, double l_over_lc,
                          std::size_t nodes = 96);

struct CommonNegativityReport {
  double upsilon = 1.0;
  double n_s_raw = 0.5;
  double n_s = 0.5;
  double l_crit_pol = 0.0;
};

CommonNegativityReport polarization_negativity_common(double alpha_omega0,
                                                      double l_over_lc);

enum class WitnessVerdict { entangled, not_witnessed, inconclusive };
const char* verdict_name(WitnessVerdict v);

struct PptWitness {
  // diag product / off-diagonal product at the (a,b),(b,a) points.
  double correlated_ratio = 1.0;
  WitnessVerdict correlated = WitnessVerdict::not_witnessed;
  // Threshold on beta^2 - alpha^2 (units of omega0^-2) at the (a,a),(b,b)
  // points; NaN when inconclusive.
  double g = 0.0;
  double g_printed = 0.0;
  double anticorrelated_witness = 0.0;
  WitnessVerdict anticorrelated = WitnessVerdict::not_witnessed;
};

// Frequencies are given in units of omega0.
PptWitness ppt_witness(double alpha_omega0, double beta_omega0,
                       double l_over_lc, double omega_a, double omega_b);
PptWitness ppt_submatrix_tests(const PulseEnvelope& envelope,
                               const DispersionProfile& profile,
                               double l_over_lc, double omega_a,
                               double omega_b);

double g_threshold(double l_over_lc, double delta);
double g_threshold_printed(double l_over_lc, double delta);

}  // namespace pmd
