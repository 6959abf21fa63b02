#include "pmd/stochastic.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <map>
#include <mutex>
#include <random>
#include <sstream>
#include <thread>

namespace pmd {

namespace {

constexpr std::size_t block_size = 64;

struct Moments {
  Eigen::MatrixXd re, im, re2, im2;

  explicit Moments(Eigen::Index d)
      : re(Eigen::MatrixXd::Zero(d, d)),
        im(Eigen::MatrixXd::Zero(d, d)),
        re2(Eigen::MatrixXd::Zero(d, d)),
        im2(Eigen::MatrixXd::Zero(d, d)) {}

  // Accumulates the upper triangle of psi psi^dagger; see mirror().
  void add(const Eigen::VectorXcd& psi) {
    const Eigen::Index d = psi.size();
    for (Eigen::Index c = 0; c < d; ++c) {
      const double ac = psi(c).real(), bc = psi(c).imag();
      double* pre = re.col(c).data();
      double* pim = im.col(c).data();
      double* pre2 = re2.col(c).data();
      double* pim2 = im2.col(c).data();
      for (Eigen::Index r = 0; r <= c; ++r) {
        const double ar = psi(r).real(), br = psi(r).imag();
        const double x = ar * ac + br * bc, y = br * ac - ar * bc;
        pre[r] += x;
        pim[r] += y;
        pre2[r] += x * x;
        pim2[r] += y * y;
      }
    }
  }

  void mirror() {
    for (Eigen::Index c = 0; c < re.cols(); ++c)
      for (Eigen::Index r = c + 1; r < re.rows(); ++r) {
        re(r, c) = re(c, r);
        im(r, c) = -im(c, r);
        re2(r, c) = re2(c, r);
        im2(r, c) = im2(c, r);
      }
  }
};

// Neumaier-compensated running sums of block partials.
class CompensatedMoments {
 public:
  explicit CompensatedMoments(Eigen::Index d) : sum_(d), comp_(d) {}

  void add(const Moments& m) {
    add(sum_.re, comp_.re, m.re);
    add(sum_.im, comp_.im, m.im);
    add(sum_.re2, comp_.re2, m.re2);
    add(sum_.im2, comp_.im2, m.im2);
  }

  Moments total() const {
    Moments t = sum_;
    t.re += comp_.re;
    t.im += comp_.im;
    t.re2 += comp_.re2;
    t.im2 += comp_.im2;
    return t;
  }

 private:
  static void add(Eigen::MatrixXd& s, Eigen::MatrixXd& c,
                  const Eigen::MatrixXd& x) {
    for (Eigen::Index k = 0; k < s.size(); ++k) {
      const double a = s(k), b = x(k), t = a + b;
      c(k) += std::abs(a) >= std::abs(b) ? (a - t) + b : (b - t) + a;
      s(k) = t;
    }
  }

  Moments sum_, comp_;
};

using Trajectory = std::function<void(std::size_t, Eigen::VectorXcd&)>;

struct EnsembleResult {
  Eigen::MatrixXcd mean;
  Eigen::MatrixXd se_re, se_im;
};

// Blocks of trajectories are merged strictly in block order, so the result
// does not depend on the number of workers.
EnsembleResult run_ensemble(Eigen::Index dim, std::size_t n,
                            unsigned workers, const Trajectory& trajectory) {
  const std::size_t n_blocks = (n + block_size - 1) / block_size;
  CompensatedMoments acc(dim);
  std::mutex mu;
  std::map<std::size_t, Moments> pending;
  std::size_t next_merge = 0;
  std::atomic<std::size_t> next_block{0};

  const auto work = [&] {
    Eigen::VectorXcd psi(dim);
    for (;;) {
      const std::size_t k = next_block.fetch_add(1);
      if (k >= n_blocks) return;
      Moments m(dim);
      const std::size_t end = std::min(n, (k + 1) * block_size);
      for (std::size_t t = k * block_size; t < end; ++t) {
        trajectory(t, psi);
        m.add(psi);
      }
      std::lock_guard<std::mutex> lock(mu);
      pending.emplace(k, std::move(m));
      for (auto it = pending.find(next_merge); it != pending.end();
           it = pending.find(next_merge)) {
        acc.add(it->second);
        pending.erase(it);
        ++next_merge;
      }
    }
  };

  if (workers <= 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    std::exception_ptr failure;
    std::mutex fail_mu;
    for (unsigned w = 0; w < workers; ++w)
      pool.emplace_back([&] {
        try {
          work();
        } catch (...) {
          std::lock_guard<std::mutex> lock(fail_mu);
          if (!failure) failure = std::current_exception();
          next_block.store(n_blocks);
        }
      });
    for (auto& th : pool) th.join();
    if (failure) std::rethrow_exception(failure);
  }

  Moments tot = acc.total();
  tot.mirror();
  const double nn = double(n);
  EnsembleResult r;
  r.mean.resize(dim, dim);
  r.mean.real() = tot.re / nn;
  r.mean.imag() = tot.im / nn;
  const auto se = [nn](const Eigen::MatrixXd& s, const Eigen::MatrixXd& s2) {
    Eigen::MatrixXd v = (s2.array() - s.array().square() / nn) / (nn - 1.0);
    return Eigen::MatrixXd((v.array().max(0.0) / nn).sqrt());
  };
  r.se_re = se(tot.re, tot.re2);
  r.se_im = se(tot.im, tot.im2);
  return r;
}

unsigned resolve_workers(unsigned w) {
  if (w != 0) return w;
  return std::max(1u, std::thread::hardware_concurrency());
}

void check_config(const TrajectoryConfig& cfg) {
  if (cfg.n_trajectories < 2)
    throw Error(ErrorCode::invalid_argument, "need at least 2 trajectories");
  if (!std::isfinite(cfg.dz_over_lc) || cfg.dz_over_lc < 0.0)
    throw Error(ErrorCode::invalid_argument, "segment length must be >= 0");
}

void warn_rotation(const DispersionProfile& profile, const FrequencyGrid& grid,
                   double dz) {
  double fmax = 0.0;
  for (double w : grid.nodes) fmax = std::max(fmax, std::abs(profile(w)));
  const double typical = 0.5 * fmax * std::sqrt(6.0 * profile.eta() *
                                                profile.eta() * dz);
  if (typical > 0.5) {
    std::ostringstream msg;
    msg << "typical rotation per segment " << typical
        << " rad exceeds 0.5; reduce the segment length";
    warn(msg.str());
  }
}

// Output of U(omega)|1> for every node; the SU(2) matrix follows from it.
std::vector<JonesVector> propagate_basis(const BirefringenceRealization& b,
                                         const DispersionProfile& profile,
                                         const std::vector<double>& nodes) {
  return evolve_single(std::vector<JonesVector>(nodes.size()), b, profile,
                       nodes);
}

}  // namespace

double resolve_segment_length(const TrajectoryConfig& cfg, double l_over_lc) {
  check_config(cfg);
  if (!std::isfinite(l_over_lc) || l_over_lc < 0.0)
    throw Error(ErrorCode::invalid_argument, "length must be non-negative");
  if (l_over_lc == 0.0) return 0.0;
  if (cfg.dz_over_lc == 0.0) return std::min(l_over_lc / 256.0, 1.0 / 512.0);
  if (cfg.dz_over_lc > l_over_lc / 32.0 * (1.0 + 1e-12)) {
    std::ostringstream msg;
    msg << "segment length " << cfg.dz_over_lc << " exceeds L/32 = "
        << l_over_lc / 32.0;
    throw Error(ErrorCode::invalid_argument, msg.str());
  }
  return cfg.dz_over_lc;
}

BirefringenceRealization sample_realization(const FiberParameters& params,
                                            double length, double dz,
                                            std::uint64_t seed,
                                            std::uint64_t stream) {
  if (!std::isfinite(params.eta) || params.eta < 0.0)
    throw Error(ErrorCode::invalid_argument, "eta must be non-negative");
  if (!std::isfinite(length) || length < 0.0)
    throw Error(ErrorCode::invalid_argument, "length must be non-negative");
  BirefringenceRealization r;
  r.length = length;
  if (length == 0.0) return r;
  if (!std::isfinite(dz) || dz <= 0.0)
    throw Error(ErrorCode::invalid_argument, "segment length must be positive");
  const auto count =
      static_cast<std::size_t>(std::ceil(length / dz * (1.0 - 1e-12)));
  r.segment_length = length / double(count);
  r.segments.resize(count);
  if (params.eta == 0.0) {
    for (auto& s : r.segments) s = {0.0, 0.0, 0.0};
    return r;
  }
  std::seed_seq seq{std::uint32_t(seed), std::uint32_t(seed >> 32),
                    std::uint32_t(stream), std::uint32_t(stream >> 32)};
  std::mt19937_64 gen(seq);
  std::normal_distribution<double> normal(
      0.0, params.eta * std::sqrt(2.0 / r.segment_length));
  for (auto& s : r.segments) {
    s[0] = normal(gen);
    s[1] = normal(gen);
    s[2] = normal(gen);
  }
  return r;
}

std::vector<JonesVector> evolve_single(const std::vector<JonesVector>& input,
                                       const BirefringenceRealization& b,
                                       const DispersionProfile& profile,
                                       const std::vector<double>& nodes) {
  if (input.size() != nodes.size())
    throw Error(ErrorCode::invalid_argument, "one Jones vector per node");
  std::vector<JonesVector> out = input;
  std::vector<double> f(nodes.size());
  for (std::size_t i = 0; i < nodes.size(); ++i) f[i] = profile(nodes[i]);
  std::vector<double> re1(out.size()), im1(out.size()), re0(out.size()),
      im0(out.size());
  for (std::size_t i = 0; i < out.size(); ++i) {
    re1[i] = out[i].c1.real();
    im1[i] = out[i].c1.imag();
    re0[i] = out[i].c0.real();
    im0[i] = out[i].c0.imag();
  }
  // c1' = c c1 - i s (n3 c1 + (n1 - i n2) c0)
  // c0' = c c0 - i s ((n1 + i n2) c1 - n3 c0)
  for (const auto& seg : b.segments) {
    const double mag =
        std::sqrt(seg[0] * seg[0] + seg[1] * seg[1] + seg[2] * seg[2]);
    if (mag == 0.0) continue;
    const double n1 = seg[0] / mag, n2 = seg[1] / mag, n3 = seg[2] / mag;
    const double scale = 0.5 * mag * b.segment_length;
    for (std::size_t i = 0; i < out.size(); ++i) {
      const double half = f[i] * scale;
      const double c = std::cos(half), s = std::sin(half);
      const double a1 = re1[i], b1 = im1[i], a0 = re0[i], b0 = im0[i];
      const double t1r = n3 * a1 + n1 * a0 + n2 * b0;
      const double t1i = n3 * b1 + n1 * b0 - n2 * a0;
      const double t0r = n1 * a1 - n2 * b1 - n3 * a0;
      const double t0i = n1 * b1 + n2 * a1 - n3 * b0;
      re1[i] = c * a1 + s * t1i;
      im1[i] = c * b1 - s * t1r;
      re0[i] = c * a0 + s * t0i;
      im0[i] = c * b0 - s * t0r;
    }
  }
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i].c1 = cplx(re1[i], im1[i]);
    out[i].c0 = cplx(re0[i], im0[i]);
  }
  return out;
}

double EnsembleSingle::se_re(int s, int sp, std::size_t i, std::size_t j) const {
  const std::size_t n = mean.nodes();
  return se_real(Eigen::Index(slot(s) * n + i), Eigen::Index(slot(sp) * n + j));
}

double EnsembleSingle::se_im(int s, int sp, std::size_t i, std::size_t j) const {
  const std::size_t n = mean.nodes();
  return se_imag(Eigen::Index(slot(s) * n + i), Eigen::Index(slot(sp) * n + j));
}

EnsembleSingle ensemble_single(const PulseEnvelope& envelope,
                               const DispersionProfile& profile,
                               double l_over_lc, const FrequencyGrid& grid,
                               const TrajectoryConfig& cfg) {
  const double dz_lc = resolve_segment_length(cfg, l_over_lc);
  const double lc = profile.coherence_length();
  const double length = l_over_lc * lc, dz = dz_lc * lc;
  if (length > 0.0) warn_rotation(profile, grid, dz);
  const std::vector<double> phi = sample_envelope(envelope, grid);
  const std::size_t n = grid.size();
  const FiberParameters params = profile.params();

  const auto trajectory = [&](std::size_t t, Eigen::VectorXcd& psi) {
    const auto b = sample_realization(params, length, dz, cfg.seed, t);
    const auto out = propagate_basis(b, profile, grid.nodes);
    for (std::size_t i = 0; i < n; ++i) {
      psi(Eigen::Index(i)) = phi[i] * out[i].c1;
      psi(Eigen::Index(n + i)) = phi[i] * out[i].c0;
    }
  };
  EnsembleResult r = run_ensemble(Eigen::Index(2 * n), cfg.n_trajectories,
                                  resolve_workers(cfg.workers), trajectory);
  return EnsembleSingle{SinglePhotonDensity(grid, std::move(r.mean)),
                        std::move(r.se_re), std::move(r.se_im),
                        cfg.n_trajectories, dz_lc};
}

std::size_t EnsembleTwo::index(int sa, int sb, std::size_t a,
                               std::size_t b) const {
  const std::size_t n = mean.nodes();
  return (2 * slot(sa) + slot(sb)) * n * n + a * n + b;
}

EnsembleTwo ensemble_two(const PulseEnvelope& envelope, BellLabel bell,
                         const DispersionProfile& profile, double l_over_lc,
                         const FrequencyGrid& grid, const TrajectoryConfig& cfg,
                         FiberMode mode) {
  const double dz_lc = resolve_segment_length(cfg, l_over_lc);
  const double lc = profile.coherence_length();
  const double length = l_over_lc * lc, dz = dz_lc * lc;
  if (length > 0.0) warn_rotation(profile, grid, dz);
  const Eigen::MatrixXd phi = sample_pair_envelope(envelope, grid);
  const Eigen::Vector4d amp = bell_amplitudes(bell);
  const std::size_t n = grid.size(), nn = n * n;
  const FiberParameters params = profile.params();

  const auto su2 = [](const JonesVector& v) {
    Eigen::Matrix2cd u;
    u << v.c1, -std::conj(v.c0), v.c0, std::conj(v.c1);
    return u;
  };

  const auto trajectory = [&](std::size_t t, Eigen::VectorXcd& psi) {
    std::vector<JonesVector> ua, ub;
    if (mode == FiberMode::common) {
      const auto b = sample_realization(params, length, dz, cfg.seed, t);
      ua = propagate_basis(b, profile, grid.nodes);
      ub = ua;
    } else {
      const auto ba = sample_realization(params, length, dz, cfg.seed, 2 * t);
      const auto bb = sample_realization(params, length, dz, cfg.seed, 2 * t + 1);
      ua = propagate_basis(ba, profile, grid.nodes);
      ub = propagate_basis(bb, profile, grid.nodes);
    }
    for (std::size_t a = 0; a < n; ++a) {
      const Eigen::Matrix2cd u = su2(ua[a]);
      for (std::size_t b = 0; b < n; ++b) {
        const Eigen::Matrix2cd v = su2(ub[b]);
        for (int i = 0; i < 2; ++i)
          for (int j = 0; j < 2; ++j) {
            cplx s = 0.0;
            for (int k = 0; k < 2; ++k)
              for (int l = 0; l < 2; ++l)
                s += u(i, k) * v(j, l) * amp(2 * k + l);
            psi(Eigen::Index(std::size_t(2 * i + j) * nn + a * n + b)) =
                phi(a, b) * s;
          }
      }
    }
  };
  EnsembleResult r = run_ensemble(Eigen::Index(4 * nn), cfg.n_trajectories,
                                  resolve_workers(cfg.workers), trajectory);
  auto kernel = std::make_shared<const Eigen::MatrixXcd>(std::move(r.mean));
  TwoPhotonDensity mean(
      grid, [kernel, n, nn](std::size_t a, std::size_t b, std::size_t ap,
                            std::size_t bp) -> Eigen::Matrix4cd {
        Eigen::Matrix4cd m;
        for (int p = 0; p < 4; ++p)
          for (int q = 0; q < 4; ++q)
            m(p, q) = (*kernel)(Eigen::Index(std::size_t(p) * nn + a * n + b),
                                Eigen::Index(std::size_t(q) * nn + ap * n + bp));
        return m;
      });
  return EnsembleTwo{std::move(mean), kernel, std::move(r.se_re),
                     std::move(r.se_im), cfg.n_trajectories, dz_lc};
}

}  // namespace pmd
