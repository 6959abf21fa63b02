#pragma once

#include "pmd/core.hpp"

#include <array>
#include <cstdint>
#include <memory>
#include <vector>

namespace pmd {

struct TrajectoryConfig {
  std::size_t n_trajectories = 10000;
  // Segment length in units of L_c; 0 selects min(L/256, 1/512).
  double dz_over_lc = 0.0;
  std::uint64_t seed = 0;
  // 0 uses the hardware concurrency.
  unsigned workers = 1;
};

struct BirefringenceRealization {
  double segment_length = 0.0;
  double length = 0.0;
  std::vector<std::array<double, 3>> segments;
};

// Segment length in units of L_c actually used for a run of l_over_lc.
double resolve_segment_length(const TrajectoryConfig& cfg, double l_over_lc);

// Piecewise-constant white-noise birefringence over a physical length.
// Components are N(0, 2 eta^2 / dz) on ceil(length / dz) equal segments.
BirefringenceRealization sample_realization(const FiberParameters& params,
                                            double length, double dz,
                                            std::uint64_t seed,
                                            std::uint64_t stream);

// Propagates one Jones vector per node through every segment.
std::vector<JonesVector> evolve_single(const std::vector<JonesVector>& input,
                                       const BirefringenceRealization& b,
                                       const DispersionProfile& profile,
                                       const std::vector<double>& nodes);

struct EnsembleSingle {
  SinglePhotonDensity mean;
  // Standard errors of the real and imaginary kernel parts.
  Eigen::MatrixXd se_real;
  Eigen::MatrixXd se_imag;
  std::size_t trajectories = 0;
  double segment_length_over_lc = 0.0;

  double se_re(int s, int sp, std::size_t i, std::size_t j) const;
  double se_im(int s, int sp, std::size_t i, std::size_t j) const;
};

EnsembleSingle ensemble_single(const PulseEnvelope& envelope,
                               const DispersionProfile& profile,
                               double l_over_lc, const FrequencyGrid& grid,
                               const TrajectoryConfig& cfg);

enum class FiberMode { separate, common };

struct EnsembleTwo {
  TwoPhotonDensity mean;
  // Raw kernel and errors over index (pol, a, b), pol = 2 slot(s_A) + slot(s_B).
  std::shared_ptr<const Eigen::MatrixXcd> kernel;
  Eigen::MatrixXd se_real;
  Eigen::MatrixXd se_imag;
  std::size_t trajectories = 0;
  double segment_length_over_lc = 0.0;

  std::size_t index(int sa, int sb, std::size_t a, std::size_t b) const;
};

EnsembleTwo ensemble_two(const PulseEnvelope& envelope, BellLabel bell,
                         const DispersionProfile& profile, double l_over_lc,
                         const FrequencyGrid& grid, const TrajectoryConfig& cfg,
                         FiberMode mode);

}  // namespace pmd
