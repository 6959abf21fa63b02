#pragma once

#include <Eigen/Dense>

#include <complex>
#include <cstddef>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

namespace pmd {

using cplx = std::complex<double>;

enum class ErrorCode {
  invalid_argument = 1,
  unsupported = 2,
  domain = 3,
  numeric = 4,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

using WarningHandler = std::function<void(const std::string&)>;

// Process-wide sink for non-fatal diagnostics. Default writes to stderr.
void set_warning_handler(WarningHandler handler);
void warn(const std::string& message);

struct FiberParameters {
  double eta = 2.0;
  double gamma = 1.0;
  double sigma2 = 0.0;
  double omega0 = 1.0;

  void validate() const;
  double coherence_length() const;
};

enum class DispersionMode { linear, quadratic };

class DispersionProfile {
 public:
  DispersionProfile(const FiberParameters& params, DispersionMode mode);

  double operator()(double omega) const {
    if (mode_ == DispersionMode::linear) return params_.gamma * omega;
    return params_.gamma * omega +
           params_.sigma2 * omega * (omega - params_.omega0);
  }

  DispersionMode mode() const { return mode_; }
  const FiberParameters& params() const { return params_; }
  double eta() const { return params_.eta; }
  double omega0() const { return params_.omega0; }
  double coherence_length() const { return params_.coherence_length(); }

  // Throws ErrorCode::unsupported unless the profile is linear.
  void require_linear(const char* operation) const;

 private:
  FiberParameters params_;
  DispersionMode mode_;
};

DispersionProfile make_dispersion(const FiberParameters& params,
                                  DispersionMode mode = DispersionMode::linear);

// Gaussian frequency envelopes. Single: width kappa around omega0.
// Double: inverse widths alpha (difference) and beta (sum) of a photon pair.
class PulseEnvelope {
 public:
  static PulseEnvelope single(double kappa, double omega0);
  static PulseEnvelope pair(double alpha, double beta, double omega0);

  bool is_single() const { return single_; }
  double kappa() const { return kappa_; }
  double alpha() const { return alpha_; }
  double beta() const { return beta_; }
  double omega0() const { return omega0_; }

  // Standard deviation of |phi|^2 along one frequency axis.
  double width() const;

  double amplitude(double omega) const;
  double amplitude(double omega_a, double omega_b) const;

 private:
  PulseEnvelope() = default;
  bool single_ = true;
  double kappa_ = 0.0;
  double alpha_ = 0.0;
  double beta_ = 0.0;
  double omega0_ = 0.0;
};

struct FrequencyGrid {
  std::vector<double> nodes;
  std::vector<double> weights;
  double omega0 = 0.0;
  double width = 0.0;
  double half_width_widths = 0.0;

  std::size_t size() const { return nodes.size(); }
  // Index of the node equal to omega within rel_tol of the spacing, or throws.
  std::size_t index_of(double omega, double rel_tol = 1e-9) const;
};

FrequencyGrid make_grid(const PulseEnvelope& envelope, std::size_t n_nodes,
                        double half_width_widths = 6.0);

// Envelope sampled on the grid and rescaled to unit quadrature norm.
std::vector<double> sample_envelope(const PulseEnvelope& envelope,
                                    const FrequencyGrid& grid);
// n x n matrix phi(omega_i, omega_j), unit quadrature norm.
Eigen::MatrixXd sample_pair_envelope(const PulseEnvelope& envelope,
                                     const FrequencyGrid& grid);

// Raw quadrature of |phi|^2 on the grid, before renormalization.
double envelope_norm(const PulseEnvelope& envelope, const FrequencyGrid& grid);

struct JonesVector {
  cplx c1{1.0, 0.0};
  cplx c0{0.0, 0.0};
  double norm2() const { return std::norm(c1) + std::norm(c0); }
};

enum class BellLabel { singlet, triplet0, triplet_plus, triplet_minus };

// Amplitudes over the composite basis (11, 10, 01, 00).
Eigen::Vector4d bell_amplitudes(BellLabel bell);
const char* bell_name(BellLabel bell);

// Polarization slot: |1> is slot 0, |0> is slot 1.
constexpr std::size_t slot(int s) { return s == 1 ? 0 : 1; }

class SinglePhotonDensity {
 public:
  SinglePhotonDensity(FrequencyGrid grid, Eigen::MatrixXcd kernel);

  const FrequencyGrid& grid() const { return grid_; }
  std::size_t nodes() const { return grid_.size(); }
  // Raw kernel, rows and columns ordered (slot * n + node).
  const Eigen::MatrixXcd& kernel() const { return kernel_; }
  cplx operator()(int s, int sp, std::size_t i, std::size_t j) const {
    const std::size_t n = grid_.size();
    return kernel_(slot(s) * n + i, slot(sp) * n + j);
  }

  // Kernel scaled by sqrt(w_i w_j) so that operator algebra is matrix algebra.
  Eigen::MatrixXcd weighted() const;
  double trace() const;

 private:
  FrequencyGrid grid_;
  Eigen::MatrixXcd kernel_;
};

// Polarization block of a two-photon kernel for one frequency quadruple
// (a, b, a', b'); rows (s_A s_B), columns (s_A' s_B') in order 11, 10, 01, 00.
using TwoPhotonBlock =
    std::function<Eigen::Matrix4cd(std::size_t, std::size_t, std::size_t,
                                   std::size_t)>;

class TwoPhotonDensity {
 public:
  TwoPhotonDensity(FrequencyGrid grid, TwoPhotonBlock block);

  const FrequencyGrid& grid() const { return grid_; }
  std::size_t nodes() const { return grid_.size(); }
  Eigen::Matrix4cd block(std::size_t a, std::size_t b, std::size_t ap,
                         std::size_t bp) const {
    return block_(a, b, ap, bp);
  }
  cplx operator()(int sa, int sb, int sap, int sbp, std::size_t a,
                  std::size_t b, std::size_t ap, std::size_t bp) const {
    return block_(a, b, ap, bp)(2 * slot(sa) + slot(sb),
                                2 * slot(sap) + slot(sbp));
  }

  double trace() const;
  // Full (4 n^2) x (4 n^2) weighted operator, index (pol, a, b) with
  // pol = 2 slot(s_A) + slot(s_B). Only for small grids.
  Eigen::MatrixXcd weighted_dense() const;

 private:
  FrequencyGrid grid_;
  TwoPhotonBlock block_;
};

SinglePhotonDensity input_single_state(const PulseEnvelope& envelope,
                                       const FrequencyGrid& grid);
TwoPhotonDensity input_two_state(const PulseEnvelope& envelope, BellLabel bell,
                                 const FrequencyGrid& grid);

struct DensityCheck {
  double hermiticity_error = 0.0;
  double trace = 0.0;
  double min_eigenvalue = 0.0;
};

DensityCheck check_density(const SinglePhotonDensity& rho);
DensityCheck check_density(const TwoPhotonDensity& rho);

}  // namespace pmd
