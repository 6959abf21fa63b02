#include "pmd/core.hpp"

#include <cmath>
#include <iostream>
#include <mutex>
#include <numbers>
#include <sstream>

namespace pmd {

namespace {

std::mutex warning_mutex;
WarningHandler warning_handler;

void require(bool ok, ErrorCode code, const std::string& msg) {
  if (!ok) throw Error(code, msg);
}

}  // namespace

void set_warning_handler(WarningHandler handler) {
  std::lock_guard<std::mutex> lock(warning_mutex);
  warning_handler = std::move(handler);
}

void warn(const std::string& message) {
  std::lock_guard<std::mutex> lock(warning_mutex);
  if (warning_handler)
    warning_handler(message);
  else
    std::cerr << "warning: " << message << '\n';
}

void FiberParameters::validate() const {
  require(std::isfinite(eta) && eta > 0.0, ErrorCode::invalid_argument,
          "eta must be positive");
  require(std::isfinite(gamma) && gamma > 0.0, ErrorCode::invalid_argument,
          "gamma must be positive");
  require(std::isfinite(omega0) && omega0 > 0.0, ErrorCode::invalid_argument,
          "omega0 must be positive");
  require(std::isfinite(sigma2) && sigma2 >= 0.0, ErrorCode::invalid_argument,
          "sigma2 must be non-negative");
  const double lc = coherence_length();
  require(std::isfinite(lc) && lc > 0.0, ErrorCode::invalid_argument,
          "coherence length is not finite");
}

double FiberParameters::coherence_length() const {
  return 4.0 / (eta * eta * gamma * gamma * omega0 * omega0);
}

DispersionProfile::DispersionProfile(const FiberParameters& params,
                                     DispersionMode mode)
    : params_(params), mode_(mode) {
  params_.validate();
}

void DispersionProfile::require_linear(const char* operation) const {
  if (mode_ != DispersionMode::linear)
    throw Error(ErrorCode::unsupported,
                std::string(operation) + " requires linear dispersion");
}

DispersionProfile make_dispersion(const FiberParameters& params,
                                  DispersionMode mode) {
  return DispersionProfile(params, mode);
}

PulseEnvelope PulseEnvelope::single(double kappa, double omega0) {
  require(std::isfinite(kappa) && kappa > 0.0, ErrorCode::invalid_argument,
          "kappa must be positive");
  require(std::isfinite(omega0) && omega0 > 0.0, ErrorCode::invalid_argument,
          "omega0 must be positive");
  PulseEnvelope e;
  e.single_ = true;
  e.kappa_ = kappa;
  e.omega0_ = omega0;
  return e;
}

PulseEnvelope PulseEnvelope::pair(double alpha, double beta, double omega0) {
  require(std::isfinite(alpha) && alpha > 0.0, ErrorCode::invalid_argument,
          "alpha must be positive");
  require(std::isfinite(beta) && beta > 0.0, ErrorCode::invalid_argument,
          "beta must be positive");
  require(std::isfinite(omega0) && omega0 > 0.0, ErrorCode::invalid_argument,
          "omega0 must be positive");
  PulseEnvelope e;
  e.single_ = false;
  e.alpha_ = alpha;
  e.beta_ = beta;
  e.omega0_ = omega0;
  return e;
}

double PulseEnvelope::width() const {
  if (single_) return 0.5 * kappa_;
  return 0.25 * std::sqrt(1.0 / (alpha_ * alpha_) + 1.0 / (beta_ * beta_));
}

double PulseEnvelope::amplitude(double omega) const {
  require(single_, ErrorCode::invalid_argument,
          "single-frequency amplitude of a pair envelope");
  const double d = omega - omega0_;
  return std::pow(2.0 / (kappa_ * kappa_ * std::numbers::pi), 0.25) *
         std::exp(-d * d / (kappa_ * kappa_));
}

double PulseEnvelope::amplitude(double omega_a, double omega_b) const {
  require(!single_, ErrorCode::invalid_argument,
          "pair amplitude of a single envelope");
  const double u = omega_a - omega_b;
  const double w = omega_a + omega_b - 2.0 * omega0_;
  return std::sqrt(4.0 * alpha_ * beta_ / std::numbers::pi) *
         std::exp(-alpha_ * alpha_ * u * u - beta_ * beta_ * w * w);
}

std::size_t FrequencyGrid::index_of(double omega, double rel_tol) const {
  const std::size_t n = nodes.size();
  const double h = (nodes.back() - nodes.front()) / double(n - 1);
  const double k = std::round((omega - nodes.front()) / h);
  if (k >= 0.0 && k < double(n)) {
    const auto i = static_cast<std::size_t>(k);
    if (std::abs(nodes[i] - omega) <= rel_tol * h) return i;
  }
  std::ostringstream msg;
  msg << "frequency " << omega << " is not a grid node";
  throw Error(ErrorCode::invalid_argument, msg.str());
}

FrequencyGrid make_grid(const PulseEnvelope& envelope, std::size_t n_nodes,
                        double half_width_widths) {
  require(n_nodes >= 3, ErrorCode::invalid_argument,
          "grid needs at least 3 nodes");
  require(std::isfinite(half_width_widths) && half_width_widths >= 3.0,
          ErrorCode::invalid_argument,
          "grid half-width must be at least 3 envelope widths");
  if (n_nodes < 16)
    warn("grid with " + std::to_string(n_nodes) +
         " nodes may not resolve the envelope");

  FrequencyGrid g;
  g.omega0 = envelope.omega0();
  g.width = envelope.width();
  g.half_width_widths = half_width_widths;
  const double half = half_width_widths * g.width;
  const double h = 2.0 * half / double(n_nodes - 1);
  g.nodes.resize(n_nodes);
  g.weights.assign(n_nodes, h);
  const double mid = 0.5 * double(n_nodes - 1);
  for (std::size_t i = 0; i < n_nodes; ++i)
    g.nodes[i] = g.omega0 + h * (double(i) - mid);
  g.weights.front() = g.weights.back() = 0.5 * h;
  return g;
}

double envelope_norm(const PulseEnvelope& envelope, const FrequencyGrid& grid) {
  const std::size_t n = grid.size();
  double s = 0.0;
  if (envelope.is_single()) {
    for (std::size_t i = 0; i < n; ++i) {
      const double p = envelope.amplitude(grid.nodes[i]);
      s += grid.weights[i] * p * p;
    }
  } else {
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) {
        const double p = envelope.amplitude(grid.nodes[i], grid.nodes[j]);
        s += grid.weights[i] * grid.weights[j] * p * p;
      }
  }
  return s;
}

std::vector<double> sample_envelope(const PulseEnvelope& envelope,
                                    const FrequencyGrid& grid) {
  require(envelope.is_single(), ErrorCode::invalid_argument,
          "expected a single-photon envelope");
  const double scale = 1.0 / std::sqrt(envelope_norm(envelope, grid));
  std::vector<double> phi(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i)
    phi[i] = scale * envelope.amplitude(grid.nodes[i]);
  return phi;
}

Eigen::MatrixXd sample_pair_envelope(const PulseEnvelope& envelope,
                                     const FrequencyGrid& grid) {
  require(!envelope.is_single(), ErrorCode::invalid_argument,
          "expected a photon-pair envelope");
  const std::size_t n = grid.size();
  Eigen::MatrixXd phi(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      phi(i, j) = envelope.amplitude(grid.nodes[i], grid.nodes[j]);
  phi /= std::sqrt(envelope_norm(envelope, grid));
  return phi;
}

Eigen::Vector4d bell_amplitudes(BellLabel bell) {
  const double r = std::numbers::sqrt2 / 2.0;
  switch (bell) {
    case BellLabel::singlet:
      return {0.0, r, -r, 0.0};
    case BellLabel::triplet0:
      return {0.0, r, r, 0.0};
    case BellLabel::triplet_plus:
      return {r, 0.0, 0.0, r};
    case BellLabel::triplet_minus:
      return {r, 0.0, 0.0, -r};
  }
  throw Error(ErrorCode::invalid_argument, "unknown Bell label");
}

const char* bell_name(BellLabel bell) {
  switch (bell) {
    case BellLabel::singlet:
      return "singlet";
    case BellLabel::triplet0:
      return "triplet0";
    case BellLabel::triplet_plus:
      return "triplet_plus";
    case BellLabel::triplet_minus:
      return "triplet_minus";
  }
  return "unknown";
}

SinglePhotonDensity::SinglePhotonDensity(FrequencyGrid grid,
                                         Eigen::MatrixXcd kernel)
    : grid_(std::move(grid)), kernel_(std::move(kernel)) {
  const auto n = Eigen::Index(2 * grid_.size());
  require(kernel_.rows() == n && kernel_.cols() == n,
          ErrorCode::invalid_argument, "kernel size does not match grid");
}

Eigen::MatrixXcd SinglePhotonDensity::weighted() const {
  const std::size_t n = grid_.size();
  Eigen::VectorXd s(2 * n);
  for (std::size_t i = 0; i < n; ++i)
    s(i) = s(n + i) = std::sqrt(grid_.weights[i]);
  return s.asDiagonal() * kernel_ * s.asDiagonal();
}

double SinglePhotonDensity::trace() const {
  const std::size_t n = grid_.size();
  double t = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    t += grid_.weights[i] * (kernel_(i, i).real() + kernel_(n + i, n + i).real());
  return t;
}

TwoPhotonDensity::TwoPhotonDensity(FrequencyGrid grid, TwoPhotonBlock block)
    : grid_(std::move(grid)), block_(std::move(block)) {
  require(static_cast<bool>(block_), ErrorCode::invalid_argument,
          "empty two-photon kernel");
}

double TwoPhotonDensity::trace() const {
  const std::size_t n = grid_.size();
  double t = 0.0;
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = 0; b < n; ++b)
      t += grid_.weights[a] * grid_.weights[b] *
           block_(a, b, a, b).trace().real();
  return t;
}

Eigen::MatrixXcd TwoPhotonDensity::weighted_dense() const {
  const std::size_t n = grid_.size();
  const std::size_t nn = n * n;
  Eigen::MatrixXcd m(4 * nn, 4 * nn);
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = 0; b < n; ++b)
      for (std::size_t ap = 0; ap < n; ++ap)
        for (std::size_t bp = 0; bp < n; ++bp) {
          const Eigen::Matrix4cd blk = block_(a, b, ap, bp);
          const double s = std::sqrt(grid_.weights[a] * grid_.weights[b] *
                                     grid_.weights[ap] * grid_.weights[bp]);
          for (int p = 0; p < 4; ++p)
            for (int q = 0; q < 4; ++q)
              m(Eigen::Index(p * nn + a * n + b),
                Eigen::Index(q * nn + ap * n + bp)) = s * blk(p, q);
        }
  return m;
}

SinglePhotonDensity input_single_state(const PulseEnvelope& envelope,
                                       const FrequencyGrid& grid) {
  const std::vector<double> phi = sample_envelope(envelope, grid);
  const std::size_t n = grid.size();
  Eigen::MatrixXcd k = Eigen::MatrixXcd::Zero(2 * n, 2 * n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) k(i, j) = phi[i] * phi[j];
  return SinglePhotonDensity(grid, std::move(k));
}

TwoPhotonDensity input_two_state(const PulseEnvelope& envelope, BellLabel bell,
                                 const FrequencyGrid& grid) {
  const Eigen::MatrixXd phi = sample_pair_envelope(envelope, grid);
  const Eigen::Vector4d amp = bell_amplitudes(bell);
  const Eigen::Matrix4cd proj = (amp * amp.transpose()).cast<cplx>();
  return TwoPhotonDensity(
      grid, [phi, proj](std::size_t a, std::size_t b, std::size_t ap,
                        std::size_t bp) -> Eigen::Matrix4cd {
        return phi(a, b) * phi(ap, bp) * proj;
      });
}

namespace {

DensityCheck check_weighted(const Eigen::MatrixXcd& w) {
  DensityCheck c;
  c.hermiticity_error = (w - w.adjoint()).cwiseAbs().maxCoeff();
  c.trace = w.trace().real();
  const Eigen::MatrixXcd h = 0.5 * (w + w.adjoint());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(h, Eigen::EigenvaluesOnly);
  c.min_eigenvalue = es.eigenvalues().minCoeff();
  return c;
}

}  // namespace

DensityCheck check_density(const SinglePhotonDensity& rho) {
  return check_weighted(rho.weighted());
}

DensityCheck check_density(const TwoPhotonDensity& rho) {
  return check_weighted(rho.weighted_dense());
}

}  // namespace pmd
