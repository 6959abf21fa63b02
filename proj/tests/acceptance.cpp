// Acceptance run: one PASS/FAIL line per criterion, nonzero exit on failure.
// argv[1] is the path of the command-line executable.

#include "pmd/analytic_common.hpp"
#include "pmd/analytic_separate.hpp"
#include "pmd/analytic_single.hpp"
#include "pmd/entanglement.hpp"
#include "pmd/stochastic.hpp"

#include <Eigen/Eigenvalues>
#include <boost/math/tools/roots.hpp>

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

using namespace pmd;

namespace {

// Collects failed sub-checks and the worst observed deviations.
class Tally {
 public:
  void check(bool ok, const std::string& what) {
    ++checks_;
    if (!ok) {
      ++failures_;
      if (failures_ <= 5) failed_.push_back(what);
    }
  }
  void note(const std::string& text) { notes_.push_back(text); }
  bool passed() const { return failures_ == 0 && checks_ > 0; }

  std::string summary() const {
    std::ostringstream s;
    s << checks_ << " checks";
    if (failures_) s << ", " << failures_ << " failed";
    for (const auto& n : notes_) s << "; " << n;
    for (const auto& f : failed_) s << "; FAILED " << f;
    return s.str();
  }

 private:
  int checks_ = 0;
  int failures_ = 0;
  std::vector<std::string> notes_;
  std::vector<std::string> failed_;
};

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

double rel(double got, double want) {
  return std::abs(got - want) / std::max(std::abs(want), 1e-300);
}

const DispersionProfile& fiber() {
  static const DispersionProfile f = make_dispersion(FiberParameters{});
  return f;
}

void single_photon_kernel(Tally& t) {
  double worst_z = 0.0, slowest = 0.0;
  std::uint64_t seed = 1000;
  for (double nu : {10.0, 20.0})
    for (double l : {0.01, 0.1, 1.0, 10.0}) {
      const auto env = PulseEnvelope::single(1.0 / nu, 1.0);
      const auto grid = make_grid(env, 13);
      const auto exact = evolve_single_analytic(env, fiber(), l, grid);
      TrajectoryConfig cfg;
      cfg.n_trajectories = 10000;
      cfg.seed = seed++;
      const auto start = std::chrono::steady_clock::now();
      const auto mc = ensemble_single(env, fiber(), l, grid, cfg);
      const double secs =
          std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
      slowest = std::max(slowest, secs);
      t.check(secs < 60.0, "runtime nu=" + fmt(nu) + " L=" + fmt(l));
      const std::size_t c = grid.index_of(1.0);
      const std::array<std::array<std::size_t, 2>, 3> points{
          {{c, c}, {grid.index_of(1.0 + 1.0 / nu), c}, {grid.index_of(1.0 - 1.0 / nu), c}}};
      for (const auto& p : points)
        for (int s : {1, 0})
          for (int sp : {1, 0}) {
            const cplx d = mc.mean(s, sp, p[0], p[1]) - exact(s, sp, p[0], p[1]);
            const double se_re = mc.se_re(s, sp, p[0], p[1]);
            const double se_im = mc.se_im(s, sp, p[0], p[1]);
            const std::string where = "nu=" + fmt(nu) + " L=" + fmt(l);
            t.check(std::abs(d.real()) <= 4.0 * se_re + 1e-12, where + " re");
            t.check(std::abs(d.imag()) <= 4.0 * se_im + 1e-12, where + " im");
            if (se_re > 0.0) worst_z = std::max(worst_z, std::abs(d.real()) / se_re);
            if (se_im > 0.0) worst_z = std::max(worst_z, std::abs(d.imag()) / se_im);
          }
    }
  t.note("max |z| " + fmt(worst_z));
  t.note("slowest point " + fmt(slowest) + " s");
}

void purity_curves(Tally& t) {
  double worst = 0.0;
  for (double nu : {5.0, 10.0, 20.0})
    for (double l : {0.0, 0.01, 0.1, 1.0, 10.0}) {
      const auto env = PulseEnvelope::single(1.0 / nu, 1.0);
      const auto grid = make_grid(env, 128);
      const auto num = purity_numeric(evolve_single_analytic(env, fiber(), l, grid));
      const auto cf = purities(fiber(), nu, l);
      for (auto [got, want] : {std::pair{num.mu_omega, cf.mu_omega},
                               std::pair{num.mu_s, cf.mu_s},
                               std::pair{num.mu_total, cf.mu_total}}) {
        worst = std::max(worst, rel(got, want));
        t.check(rel(got, want) <= 1e-4, "nu=" + fmt(nu) + " L=" + fmt(l));
      }
    }
  t.note("max relative deviation " + fmt(worst));
  for (double nu : {10.0, 20.0}) {
    const double mu_s = purities(fiber(), nu, 1e3).mu_s;
    t.check(std::abs(mu_s - 0.5) <= 1e-3, "mu_s(1e3) nu=" + fmt(nu));
    t.note("mu_s(1e3, nu=" + fmt(nu) + ") - 1/2 = " + fmt(mu_s - 0.5));
  }
}

void pulse_spreading(Tally& t) {
  double worst_w = 0.0, worst_i = 0.0;
  for (double nu : {10.0, 20.0}) {
    const double base = pulse_moments(fiber(), nu, 0.0).integral;
    for (double l : {0.0, 0.1, 1.0, 5.0, 10.0, 25.0, 50.0, 100.0}) {
      const auto m = pulse_moments(fiber(), nu, l);
      const double want = 2.0 * (1.0 + 6.0 * l / (nu * nu));
      worst_w = std::max(worst_w, rel(m.width_sq, want));
      worst_i = std::max(worst_i, rel(m.integral, base));
      t.check(rel(m.width_sq, want) <= 1e-4, "width nu=" + fmt(nu) + " L=" + fmt(l));
      t.check(rel(m.integral, base) <= 1e-6, "integral nu=" + fmt(nu) + " L=" + fmt(l));
    }
  }
  t.note("width^2 max rel " + fmt(worst_w));
  t.note("integral max rel " + fmt(worst_i));
}

void critical_curve(Tally& t) {
  const double alpha = 1000.0;
  std::vector<double> lc;
  for (int k = 0; k <= 70; ++k) lc.push_back(critical_length_pol(alpha, std::pow(10.0, -2.0 + 0.1 * k)));
  const auto peak = std::size_t(std::max_element(lc.begin(), lc.end()) - lc.begin());
  t.check(peak > 0 && peak < lc.size() - 1, "interior peak");
  t.check(lc.front() < 0.99 * lc[peak], "rise before the peak");
  t.check(lc.back() < 0.99 * lc[peak], "fall after the peak");
  t.check(rel(lc[lc.size() - 2], lc.back()) < 1e-6, "levels off");
  t.note("peak L_crit " + fmt(lc[peak]) + " at beta*omega0=" + fmt(std::pow(10.0, -2.0 + 0.1 * double(peak))));

  // Root of the large-beta reduced equation, solved independently.
  const auto reduced = [&](double l) {
    return std::exp(-16.0 * l) / std::sqrt(1.0 + 2.0 * l / (alpha * alpha)) - 1.0 / 3.0;
  };
  std::uintmax_t iters = 200;
  const auto root = boost::math::tools::toms748_solve(
      reduced, 1e-6, 1.0, boost::math::tools::eps_tolerance<double>(52), iters);
  const double asymptote = 0.5 * (root.first + root.second);
  const double far = critical_length_pol(alpha, 1e12);
  t.check(rel(far, asymptote) <= 1e-8, "asymptote");
  t.note("asymptote rel " + fmt(rel(far, asymptote)));

  double worst = 0.0;
  for (double beta : {0.1, 1.0, 10.0, 1e3, 1e5})
    for (int k = 0; k <= 12; ++k) {
      const double l = 1e-3 * std::pow(1e3, k / 12.0);
      const double chi = chi_factor(alpha, beta, l);
      const auto r = separate_negativity(alpha, beta, l);
      t.check(r.n_s == std::max(0.0, 0.75 * chi - 0.25), "surface construction");
    }
  // Generic negativity of evolved kernels where N_s > 0.
  for (auto [a, b] : {std::pair{1000.0, 1000.0}, std::pair{1000.0, 300.0}, std::pair{1000.0, 3000.0}})
    for (double frac : {0.0, 0.3, 0.6, 0.9}) {
      const double l = frac * critical_length_pol(a, b);
      const auto env = PulseEnvelope::pair(a, b, 1.0);
      const auto rho = evolve_separate_singlet(env, fiber(), l, make_grid(env, 96));
      const double n = bipartite_negativity(polarization_reduction(rho), {0}).negativity;
      const double want = polarization_negativity(chi_factor(a, b, l));
      worst = std::max(worst, std::abs(n - want));
      t.check(std::abs(n - want) <= 1e-6, "generic N_s beta=" + fmt(b) + " L=" + fmt(l));
    }
  t.note("generic N_s max abs " + fmt(worst));
}

double frequency_negativity_numeric(double a, double b, double l, std::size_t n) {
  const auto env = PulseEnvelope::pair(a, b, 1.0);
  const auto rho = evolve_separate_singlet(env, fiber(), l, make_grid(env, n));
  return bipartite_negativity(frequency_reduction(rho), {0}).negativity;
}

void frequency_negativity(Tally& t, std::size_t nodes) {
  double worst = 0.0, beyond = 0.0, step = 0.0;
  for (auto [a, b] : {std::pair{10.0, 5.0}, std::pair{5.0, 10.0}, std::pair{20.0, 5.0}}) {
    const double lc = critical_length_freq(a, b);
    t.check(rel(lc, std::abs(a * a - b * b) / 3.0) < 1e-15, "critical length");
    for (double frac : {0.0, 0.1, 0.9}) {
      const double want = frequency_negativity_separate(a, b, frac * lc);
      const double got = frequency_negativity_numeric(a, b, frac * lc, nodes);
      const double coarse = frequency_negativity_numeric(a, b, frac * lc, nodes - 8);
      worst = std::max(worst, std::abs(got - want));
      step = std::max(step, std::abs(got - coarse));
      t.check(std::abs(got - want) <= 1e-3, "a=" + fmt(a) + " b=" + fmt(b) + " L=" + fmt(frac * lc));
    }
    for (double frac : {1.1, 2.0}) {
      const double got = frequency_negativity_numeric(a, b, frac * lc, nodes);
      beyond = std::max(beyond, got);
      t.check(frequency_negativity_separate(a, b, frac * lc) == 0.0, "closed form beyond");
      t.check(got <= 1e-10, "numeric beyond a=" + fmt(a) + " b=" + fmt(b));
    }
  }
  t.note(std::to_string(nodes) + "^2 grid, max abs " + fmt(worst));
  t.note("change from " + std::to_string(nodes - 8) + "^2 " + fmt(step));
  t.note("max beyond critical " + fmt(beyond));
}

void eigenstructure(Tally& t) {
  std::mt19937_64 gen(2024);
  std::uniform_real_distribution<double> u(0.5, 1.5);
  std::mt19937_64 band(2025);
  std::uniform_real_distribution<double> near(0.95, 1.05);
  const Eigen::Matrix4d vecs = separate_eigenvectors();
  const Matrix6d rot = common_unitary();
  const double unitarity = (rot.transpose() * rot - Matrix6d::Identity()).cwiseAbs().maxCoeff();
  t.check(unitarity < 1e-14, "rotation unitary");
  double m2_eval = 0.0, m2_evec = 0.0, off_block = 0.0, xi_err = 0.0;
  double block_err = 0.0, band_err = 0.0;
  int misordered = 0;
  for (int k = 0; k < 100; ++k) {
    const double a = u(gen), b = u(gen), ap = u(gen), bp = u(gen);

    const Eigen::Matrix4d m2 = assemble_m2(fiber(), a, b, ap, bp);
    const auto z = decay_rates_separate(fiber(), a, b, ap, bp);
    const Eigen::Vector4d zeta(z.zeta1, z.zeta2, z.zeta3, z.zeta4);
    const double zscale = zeta.cwiseAbs().maxCoeff();
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix4d> es(m2);
    Eigen::Vector4d want = -zeta;
    std::sort(want.data(), want.data() + 4);
    m2_eval = std::max(m2_eval, (es.eigenvalues() - want).cwiseAbs().maxCoeff() / zscale);
    for (int i = 0; i < 4; ++i)
      m2_evec = std::max(m2_evec,
                         (m2 * vecs.col(i) + zeta(i) * vecs.col(i)).cwiseAbs().maxCoeff() / zscale);

    const Matrix6d mp = assemble_mprime(fiber(), a, b, ap, bp);
    const Matrix6d r = rot.transpose() * mp * rot;
    const double mscale = mp.cwiseAbs().maxCoeff();
    Matrix6d mask = Matrix6d::Ones();
    mask.block<2, 2>(0, 0).setZero();
    mask(2, 2) = 0.0;
    mask.block<3, 3>(3, 3).setZero();
    off_block = std::max(off_block, r.cwiseProduct(mask).cwiseAbs().maxCoeff() / mscale);

    const auto s = common_spectrum(fiber(), a, b, ap, bp);
    const Matrix6d v = assemble_v(s, fiber().eta());
    Eigen::SelfAdjointEigenSolver<Matrix6d> vs(v);
    Eigen::Matrix<double, 6, 1> mags = vs.eigenvalues().cwiseAbs();
    std::sort(mags.data(), mags.data() + 6);
    const double vscale = mags(5);
    const double err = std::max(std::abs(mags(0) - s.xi2), std::abs(mags(1) - s.xi1)) / vscale;
    xi_err = std::max(xi_err, err);
    misordered += err >= 1e-12;
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> lead(v.topLeftCorner<2, 2>());
    block_err = std::max(block_err, std::max(std::abs(lead.eigenvalues()(0) + s.xi1),
                                             std::abs(lead.eigenvalues()(1) + s.xi2)) / vscale);

    // Same comparison for a quadruple within a narrow band around omega0.
    const auto sn = common_spectrum(fiber(), near(band), near(band), near(band), near(band));
    Eigen::SelfAdjointEigenSolver<Matrix6d> ns(assemble_v(sn, fiber().eta()));
    Eigen::Matrix<double, 6, 1> nm = ns.eigenvalues().cwiseAbs();
    std::sort(nm.data(), nm.data() + 6);
    band_err = std::max(band_err,
                        std::max(std::abs(nm(0) - sn.xi2), std::abs(nm(1) - sn.xi1)) / nm(5));
  }
  t.check(m2_eval < 1e-12, "M2 eigenvalues");
  t.check(m2_evec < 1e-12, "M2 eigenvectors");
  t.check(off_block < 1e-12, "off-block residue");
  t.check(xi_err < 1e-12, "xi are the two smallest-magnitude eigenvalues of V");
  t.note("M2 eigenvalues " + fmt(m2_eval));
  t.note("eigenvectors " + fmt(m2_evec));
  t.note("unitarity " + fmt(unitarity));
  t.note("off-block " + fmt(off_block));
  t.note("xi vs V " + fmt(xi_err) + " over [0.5, 1.5], " + std::to_string(misordered) +
         "/100 quadruples with another eigenvalue below xi1");
  t.note("xi vs leading block " + fmt(block_err));
  t.note("xi vs V over [0.95, 1.05] " + fmt(band_err));
}

void common_limits(Tally& t) {
  const auto env = PulseEnvelope::pair(10.0, 5.0, 1.0);
  const auto grid = make_grid(env, 17);
  const auto phi = sample_pair_envelope(env, grid);
  const std::size_t i = 6, j = 10;
  struct Manifold {
    std::array<std::size_t, 4> q;
    std::array<double, 6> row;
  };
  const std::array<Manifold, 3> manifolds{{
      {{i, j, i, j}, {0.25, 0.25, 0.25, 0.25, 0.0, 0.0}},
      {{i, i, j, j}, {0.0, 0.5, 0.5, 0.0, -0.5, -0.5}},
      {{i, j, j, i}, {-0.25, 0.0, 0.0, -0.25, -0.25, -0.25}},
  }};
  double min_xi1 = INFINITY;
  for (const auto& m : manifolds) {
    const auto s = common_spectrum(fiber(), grid.nodes[m.q[0]], grid.nodes[m.q[1]],
                                   grid.nodes[m.q[2]], grid.nodes[m.q[3]]);
    min_xi1 = std::min(min_xi1, s.xi1);
  }
  const double l = 1e3 / min_xi1;
  const auto rho = evolve_common_singlet(env, fiber(), l, grid);
  double worst = 0.0;
  for (const auto& m : manifolds) {
    const auto& q = m.q;
    const Eigen::Matrix4d blk =
        rho.block(q[0], q[1], q[2], q[3]).real() / (phi(q[0], q[1]) * phi(q[2], q[3]));
    const std::array<double, 6> got{blk(0, 0), blk(1, 1), blk(2, 2), blk(3, 3), blk(1, 2), blk(2, 1)};
    for (std::size_t k = 0; k < 6; ++k) {
      worst = std::max(worst, std::abs(got[k] - m.row[k]));
      t.check(std::abs(got[k] - m.row[k]) <= 1e-8, "manifold row entry");
    }
  }
  t.note("L/L_c=" + fmt(l) + ", max abs " + fmt(worst));

  const auto at0 = evolve_common_singlet(env, fiber(), 0.0, grid);
  bool invariant = true;
  for (double len : {0.1, 10.0, 1e3, 1e6}) {
    const auto r = evolve_common_singlet(env, fiber(), len, grid);
    for (std::size_t a = 0; a < grid.size(); ++a) invariant &= r.block(a, a, a, a) == at0.block(a, a, a, a);
  }
  t.check(invariant, "decoherence-free point exactly invariant");
}

void common_polarization(Tally& t) {
  double worst_cross = 0.0;
  for (double a : {1.0, 3.0, 10.0, 30.0}) {
    double lo = 0.0, hi = 1.0;
    while (polarization_negativity_common(a, hi).n_s_raw > 0.0) hi *= 2.0;
    while (hi - lo > 1e-13 * hi) {
      const double mid = 0.5 * (lo + hi);
      (polarization_negativity_common(a, mid).n_s_raw > 0.0 ? lo : hi) = mid;
    }
    const double cross = 0.5 * (lo + hi);
    worst_cross = std::max(worst_cross, rel(cross, 2.0 * a * a));
    t.check(rel(cross, 2.0 * a * a) <= 1e-6, "crossing alpha=" + fmt(a));
  }
  t.note("crossing max rel " + fmt(worst_cross));

  double worst_q = 0.0;
  for (double a : {2.0, 10.0, 50.0})
    for (double l : {0.01, 0.1, 1.0, 10.0, 50.0}) {
      const double q = upsilon_quadrature(PulseEnvelope::pair(a, 3.0, 1.0), fiber(), l);
      worst_q = std::max(worst_q, rel(q, upsilon(a, l)));
      t.check(rel(q, upsilon(a, l)) <= 1e-6, "quadrature alpha=" + fmt(a) + " L=" + fmt(l));
    }
  t.note("quadrature max rel " + fmt(worst_q));

  for (double a : {0.3, 1.0, 10.0, 1000.0})
    for (double b : {0.1, 1.0, 10.0, 1000.0, 1e5})
      for (int k = 0; k <= 50; ++k) {
        const double l = std::pow(10.0, -4.0 + 0.14 * k);
        t.check(upsilon(a, l) >= chi_factor(a, b, l), "upsilon >= chi");
      }
}

// Polarization-traced common-fiber kernel at (a, b; a', b').
double traced(const PulseEnvelope& env, double l, double a, double b, double ap, double bp) {
  const auto v = common_amplitudes(common_spectrum(fiber(), a, b, ap, bp), l);
  return env.amplitude(a, b) * env.amplitude(ap, bp) * common_block(v).trace();
}

void witnesses(Tally& t) {
  const double wa = 1.05, wb = 0.95, delta = wa - wb;
  double worst_ratio = 0.0;
  for (auto [a, b] : {std::pair{10.0, 5.0}, std::pair{5.0, 10.0}, std::pair{20.0, 3.0}})
    for (double l : {0.1, 1.0, 100.0}) {
      const auto env = PulseEnvelope::pair(a, b, 1.0);
      const double d1 = traced(env, l, wa, wb, wa, wb);
      const double d2 = traced(env, l, wb, wa, wb, wa);
      const double off = traced(env, l, wb, wb, wa, wa);
      const double want = std::exp(-4.0 * (a * a - b * b) * delta * delta);
      const double kernel_ratio = d1 * d2 / (off * off);
      const double r = ppt_witness(a, b, l, wa, wb).correlated_ratio;
      worst_ratio = std::max({worst_ratio, rel(kernel_ratio, want), rel(r, want)});
      t.check(rel(kernel_ratio, want) <= 1e-10 && rel(r, want) <= 1e-10,
              "ratio a=" + fmt(a) + " b=" + fmt(b) + " L=" + fmt(l));
    }
  t.note("ratio max rel " + fmt(worst_ratio));

  // Flip of the anticorrelated submatrix, located by bisection on beta^2.
  double worst_flip = 0.0;
  const double alpha = 5.0;
  for (double l : {0.5, 5.0, 50.0, 1e3}) {
    const double g = g_threshold(l, delta);
    const auto margin = [&](double beta_sq) {
      const auto env = PulseEnvelope::pair(alpha, std::sqrt(beta_sq), 1.0);
      const double d1 = traced(env, l, wa, wa, wa, wa);
      const double d2 = traced(env, l, wb, wb, wb, wb);
      const double off = traced(env, l, wb, wa, wa, wb);
      return off * off - d1 * d2;
    };
    double lo = alpha * alpha, hi = alpha * alpha + 4.0 * g + 10.0;
    if (!(margin(lo) <= 0.0 && margin(hi) > 0.0)) {
      t.check(false, "bracket L=" + fmt(l));
      continue;
    }
    while (hi - lo > 1e-8 * hi) {
      const double mid = 0.5 * (lo + hi);
      (margin(mid) > 0.0 ? hi : lo) = mid;
    }
    const double flip = 0.5 * (lo + hi);
    const double want = alpha * alpha + g;
    worst_flip = std::max(worst_flip, rel(flip, want));
    t.check(rel(flip, want) <= 1e-8, "flip L=" + fmt(l));
    const auto below = ppt_witness(alpha, std::sqrt(want * (1.0 - 1e-8)), l, wa, wb);
    const auto above = ppt_witness(alpha, std::sqrt(want * (1.0 + 1e-8)), l, wa, wb);
    t.check(below.anticorrelated == WitnessVerdict::not_witnessed &&
                above.anticorrelated == WitnessVerdict::entangled,
            "verdict flip L=" + fmt(l));
  }
  t.note("flip max rel " + fmt(worst_flip));
}

std::string capture(const std::string& command) {
  std::string out;
  FILE* pipe = popen((command + " 2>/dev/null").c_str(), "r");
  if (!pipe) return out;
  char buf[4096];
  std::size_t n;
  while ((n = std::fread(buf, 1, sizeof buf, pipe)) > 0) out.append(buf, n);
  const int status = pclose(pipe);
  if (status != 0) out = "exit status " + std::to_string(status);
  return out;
}

void determinism(Tally& t, const std::string& cli) {
  const std::string base = "'" + cli + "' validate --seed 20240517 --mc-n 2000 --l-over-lc 0.5";
  const std::string first = capture(base + " --workers 1");
  t.check(first.find("check,analytic,mc,stderr,z") != std::string::npos, "validate output");
  t.check(capture(base + " --workers 1") == first, "repeat run");
  t.check(capture(base + " --workers 4") == first, "4 workers");
  t.check(capture(base + " --workers 8") == first, "8 workers");
  t.note(std::to_string(first.size()) + " bytes compared");
}

}  // namespace

int main(int argc, char** argv) {
  set_warning_handler([](const std::string&) {});
  const std::string cli = argc > 1 ? argv[1] : "pmdsim";

  const std::vector<std::pair<std::string, std::function<void(Tally&)>>> criteria{
      {"single-photon Monte Carlo kernel", single_photon_kernel},
      {"purity curves", purity_curves},
      {"pulse spreading", pulse_spreading},
      {"critical-length curve and surface", critical_curve},
      {"separate-fiber frequency negativity", [](Tally& t) { frequency_negativity(t, 48); }},
      {"coupling eigenstructure", eigenstructure},
      {"common-fiber long-length limits", common_limits},
      {"common-fiber polarization negativity", common_polarization},
      {"PPT witnesses", witnesses},
      {"validation determinism", [&](Tally& t) { determinism(t, cli); }},
  };

  int failed = 0;
  for (std::size_t k = 0; k < criteria.size(); ++k) {
    Tally t;
    const auto start = std::chrono::steady_clock::now();
    try {
      criteria[k].second(t);
    } catch (const std::exception& e) {
      t.check(false, std::string("exception: ") + e.what());
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const bool ok = t.passed();
    failed += !ok;
    std::cout << "criterion " << k + 1 << " [" << criteria[k].first << "]: "
              << (ok ? "PASS" : "FAIL") << " (" << t.summary() << "; " << fmt(secs) << " s)"
              << std::endl;
  }
  std::cout << criteria.size() - std::size_t(failed) << "/" << criteria.size()
            << " criteria passed" << std::endl;
  return failed == 0 ? 0 : 1;
}
