#include "pmdsim.h"

#include "pmd/analytic_common.hpp"
#include "pmd/analytic_separate.hpp"
#include "pmd/analytic_single.hpp"
#include "pmd/entanglement.hpp"
#include "pmd/stochastic.hpp"

#include <cmath>
#include <mutex>
#include <new>
#include <optional>
#include <string>

struct pmd_grid {
  pmd::PulseEnvelope envelope;
  pmd::FrequencyGrid grid;
};

struct pmd_single {
  pmd::SinglePhotonDensity rho;
  std::optional<Eigen::MatrixXd> se_re, se_im;
};

struct pmd_pair {
  pmd::TwoPhotonDensity rho;
  std::optional<pmd::EnsembleTwo> mc;
};

namespace {

thread_local std::string last_error;

std::mutex callback_mutex;
pmd_warning_fn callback_fn = nullptr;
void* callback_user = nullptr;

pmd_status fail(pmd_status s, const char* what) {
  last_error = what;
  return s;
}

template <class F>
pmd_status guarded(F&& f) {
  try {
    last_error.clear();
    f();
    return PMD_OK;
  } catch (const pmd::Error& e) {
    switch (e.code()) {
      case pmd::ErrorCode::invalid_argument:
        return fail(PMD_ERR_INVALID_ARGUMENT, e.what());
      case pmd::ErrorCode::unsupported:
        return fail(PMD_ERR_UNSUPPORTED, e.what());
      case pmd::ErrorCode::domain:
        return fail(PMD_ERR_DOMAIN, e.what());
      case pmd::ErrorCode::numeric:
        return fail(PMD_ERR_NUMERIC, e.what());
    }
    return fail(PMD_ERR_INTERNAL, e.what());
  } catch (const std::bad_alloc&) {
    return fail(PMD_ERR_ALLOCATION, "out of memory");
  } catch (const std::exception& e) {
    return fail(PMD_ERR_INTERNAL, e.what());
  } catch (...) {
    return fail(PMD_ERR_INTERNAL, "unknown failure");
  }
}

void need(const void* p, const char* name) {
  if (!p)
    throw pmd::Error(pmd::ErrorCode::invalid_argument,
                     std::string(name) + " is null");
}

pmd::DispersionProfile profile_of(const pmd_fiber* fiber) {
  pmd_fiber f;
  if (fiber)
    f = *fiber;
  else
    pmd_fiber_default(&f);
  pmd::FiberParameters p{f.eta, f.gamma, f.sigma2, f.omega0};
  return pmd::make_dispersion(p, f.quadratic ? pmd::DispersionMode::quadratic
                                             : pmd::DispersionMode::linear);
}

pmd::TrajectoryConfig config_of(const pmd_mc_config* cfg) {
  need(cfg, "config");
  pmd::TrajectoryConfig c;
  c.n_trajectories = cfg->trajectories;
  c.dz_over_lc = cfg->dz_over_lc;
  c.seed = cfg->seed;
  c.workers = cfg->workers;
  return c;
}

pmd::BellLabel bell_of(pmd_bell b) {
  switch (b) {
    case PMD_SINGLET:
      return pmd::BellLabel::singlet;
    case PMD_TRIPLET0:
      return pmd::BellLabel::triplet0;
    case PMD_TRIPLET_PLUS:
      return pmd::BellLabel::triplet_plus;
    case PMD_TRIPLET_MINUS:
      return pmd::BellLabel::triplet_minus;
  }
  throw pmd::Error(pmd::ErrorCode::invalid_argument, "unknown Bell label");
}

int polarization(int s) {
  if (s != 0 && s != 1)
    throw pmd::Error(pmd::ErrorCode::invalid_argument,
                     "polarization index must be 0 or 1");
  return s;
}

std::size_t node(const pmd::FrequencyGrid& g, std::size_t i) {
  if (i >= g.size())
    throw pmd::Error(pmd::ErrorCode::invalid_argument, "node index out of range");
  return i;
}

pmd_verdict verdict_of(pmd::WitnessVerdict v) {
  switch (v) {
    case pmd::WitnessVerdict::entangled:
      return PMD_ENTANGLED;
    case pmd::WitnessVerdict::not_witnessed:
      return PMD_NOT_WITNESSED;
    case pmd::WitnessVerdict::inconclusive:
      return PMD_INCONCLUSIVE;
  }
  return PMD_INCONCLUSIVE;
}

}  // namespace

extern "C" {

const char* pmd_version(void) { return "1.0.0"; }

const char* pmd_status_string(pmd_status status) {
  switch (status) {
    case PMD_OK:
      return "ok";
    case PMD_ERR_INVALID_ARGUMENT:
      return "invalid argument";
    case PMD_ERR_UNSUPPORTED:
      return "unsupported";
    case PMD_ERR_DOMAIN:
      return "domain error";
    case PMD_ERR_NUMERIC:
      return "numerical failure";
    case PMD_ERR_ALLOCATION:
      return "allocation failure";
    case PMD_ERR_INTERNAL:
      return "internal error";
  }
  return "unknown status";
}

const char* pmd_last_error(void) { return last_error.c_str(); }

void pmd_set_warning_callback(pmd_warning_fn fn, void* user) {
  {
    std::lock_guard<std::mutex> lock(callback_mutex);
    callback_fn = fn;
    callback_user = user;
  }
  if (!fn) {
    pmd::set_warning_handler(nullptr);
    return;
  }
  pmd::set_warning_handler([](const std::string& msg) {
    std::lock_guard<std::mutex> lock(callback_mutex);
    if (callback_fn) callback_fn(msg.c_str(), callback_user);
  });
}

void pmd_fiber_default(pmd_fiber* out) {
  if (!out) return;
  *out = pmd_fiber{2.0, 1.0, 0.0, 1.0, 0};
}

pmd_status pmd_coherence_length(const pmd_fiber* fiber, double* out) {
  return guarded([&] {
    need(out, "out");
    *out = profile_of(fiber).coherence_length();
  });
}

pmd_status pmd_purities(double nu, double l_over_lc, pmd_purity* out) {
  return guarded([&] {
    need(out, "out");
    const auto r = pmd::purities(profile_of(nullptr), nu, l_over_lc);
    *out = pmd_purity{r.mu_omega, r.mu_s, r.mu_total};
  });
}

pmd_status pmd_intensity(double nu, double l_over_lc, const double* tau,
                         size_t n, double* i1, double* i0) {
  return guarded([&] {
    if (n == 0) return;
    need(tau, "tau");
    need(i1, "i1");
    need(i0, "i0");
    const auto p = pmd::intensity_profiles(profile_of(nullptr), nu, l_over_lc,
                                           std::vector<double>(tau, tau + n));
    std::copy(p.i1.begin(), p.i1.end(), i1);
    std::copy(p.i0.begin(), p.i0.end(), i0);
  });
}

pmd_status pmd_pulse_moments(double nu, double l_over_lc, double* width_sq,
                             double* integral) {
  return guarded([&] {
    need(width_sq, "width_sq");
    need(integral, "integral");
    const auto m = pmd::pulse_moments(profile_of(nullptr), nu, l_over_lc);
    *width_sq = m.width_sq;
    *integral = m.integral;
  });
}

pmd_status pmd_chi(double alpha_omega0, double beta_omega0, double l_over_lc,
                   double* out) {
  return guarded([&] {
    need(out, "out");
    *out = pmd::chi_factor(alpha_omega0, beta_omega0, l_over_lc);
  });
}

pmd_status pmd_critical_length_pol(double alpha_omega0, double beta_omega0,
                                   double* out) {
  return guarded([&] {
    need(out, "out");
    *out = pmd::critical_length_pol(alpha_omega0, beta_omega0);
  });
}

pmd_status pmd_separate(double alpha_omega0, double beta_omega0,
                        double l_over_lc, pmd_separate_report* out) {
  return guarded([&] {
    need(out, "out");
    const auto r = pmd::separate_negativity(alpha_omega0, beta_omega0, l_over_lc);
    *out = pmd_separate_report{r.chi,     r.n_s_raw,    r.n_s,
                               r.n_omega, r.l_crit_pol, r.l_crit_freq};
  });
}

pmd_status pmd_common(double alpha_omega0, double l_over_lc,
                      pmd_common_report* out) {
  return guarded([&] {
    need(out, "out");
    const auto r = pmd::polarization_negativity_common(alpha_omega0, l_over_lc);
    *out = pmd_common_report{r.upsilon, r.n_s_raw, r.n_s, r.l_crit_pol};
  });
}

pmd_status pmd_witness(double alpha_omega0, double beta_omega0,
                       double l_over_lc, double omega_a, double omega_b,
                       pmd_ppt_witness* out) {
  return guarded([&] {
    need(out, "out");
    const auto w =
        pmd::ppt_witness(alpha_omega0, beta_omega0, l_over_lc, omega_a, omega_b);
    *out = pmd_ppt_witness{w.correlated_ratio,       verdict_of(w.correlated),
                           w.g,
                           w.g_printed,              w.anticorrelated_witness,
                           verdict_of(w.anticorrelated)};
  });
}

pmd_status pmd_grid_single(const pmd_fiber* fiber, double nu, size_t nodes,
                           double half_width, pmd_grid** out) {
  return guarded([&] {
    need(out, "out");
    *out = nullptr;
    if (!(std::isfinite(nu) && nu > 0.0))
      throw pmd::Error(pmd::ErrorCode::invalid_argument, "nu must be positive");
    const double w0 = profile_of(fiber).omega0();
    auto env = pmd::PulseEnvelope::single(w0 / nu, w0);
    auto g = pmd::make_grid(env, nodes, half_width);
    *out = new pmd_grid{env, std::move(g)};
  });
}

pmd_status pmd_grid_pair(const pmd_fiber* fiber, double alpha_omega0,
                         double beta_omega0, size_t nodes, double half_width,
                         pmd_grid** out) {
  return guarded([&] {
    need(out, "out");
    *out = nullptr;
    const double w0 = profile_of(fiber).omega0();
    auto env = pmd::PulseEnvelope::pair(alpha_omega0 / w0, beta_omega0 / w0, w0);
    auto g = pmd::make_grid(env, nodes, half_width);
    *out = new pmd_grid{env, std::move(g)};
  });
}

void pmd_grid_free(pmd_grid* grid) { delete grid; }

size_t pmd_grid_size(const pmd_grid* grid) {
  return grid ? grid->grid.size() : 0;
}

pmd_status pmd_grid_node(const pmd_grid* grid, size_t i, double* omega) {
  return guarded([&] {
    need(grid, "grid");
    need(omega, "omega");
    *omega = grid->grid.nodes[node(grid->grid, i)] / grid->grid.omega0;
  });
}

pmd_status pmd_grid_index(const pmd_grid* grid, double omega, size_t* out) {
  return guarded([&] {
    need(grid, "grid");
    need(out, "out");
    *out = grid->grid.index_of(omega * grid->grid.omega0);
  });
}

pmd_status pmd_single_analytic(const pmd_fiber* fiber, const pmd_grid* grid,
                               double l_over_lc, pmd_single** out) {
  return guarded([&] {
    need(grid, "grid");
    need(out, "out");
    *out = nullptr;
    auto rho = pmd::evolve_single_analytic(grid->envelope, profile_of(fiber),
                                           l_over_lc, grid->grid);
    *out = new pmd_single{std::move(rho), std::nullopt, std::nullopt};
  });
}

pmd_status pmd_single_monte_carlo(const pmd_fiber* fiber, const pmd_grid* grid,
                                  double l_over_lc, const pmd_mc_config* cfg,
                                  pmd_single** out) {
  return guarded([&] {
    need(grid, "grid");
    need(out, "out");
    *out = nullptr;
    auto e = pmd::ensemble_single(grid->envelope, profile_of(fiber), l_over_lc,
                                  grid->grid, config_of(cfg));
    *out = new pmd_single{std::move(e.mean), std::move(e.se_real),
                          std::move(e.se_imag)};
  });
}

void pmd_single_free(pmd_single* rho) { delete rho; }

pmd_status pmd_single_element(const pmd_single* rho, int s, int sp, size_t i,
                              size_t j, double* re, double* im) {
  return guarded([&] {
    need(rho, "density");
    need(re, "re");
    need(im, "im");
    const auto& g = rho->rho.grid();
    const pmd::cplx v =
        rho->rho(polarization(s), polarization(sp), node(g, i), node(g, j));
    *re = v.real();
    *im = v.imag();
  });
}

pmd_status pmd_single_stderr(const pmd_single* rho, int s, int sp, size_t i,
                             size_t j, double* re, double* im) {
  return guarded([&] {
    need(rho, "density");
    need(re, "re");
    need(im, "im");
    const auto& g = rho->rho.grid();
    const std::size_t n = g.size();
    const auto r = Eigen::Index(pmd::slot(polarization(s)) * n + node(g, i));
    const auto c = Eigen::Index(pmd::slot(polarization(sp)) * n + node(g, j));
    *re = rho->se_re ? (*rho->se_re)(r, c) : 0.0;
    *im = rho->se_im ? (*rho->se_im)(r, c) : 0.0;
  });
}

pmd_status pmd_single_trace(const pmd_single* rho, double* out) {
  return guarded([&] {
    need(rho, "density");
    need(out, "out");
    *out = rho->rho.trace();
  });
}

pmd_status pmd_single_purity(const pmd_single* rho, pmd_purity* out) {
  return guarded([&] {
    need(rho, "density");
    need(out, "out");
    const auto r = pmd::purity_numeric(rho->rho);
    *out = pmd_purity{r.mu_omega, r.mu_s, r.mu_total};
  });
}

pmd_status pmd_pair_analytic(const pmd_fiber* fiber, const pmd_grid* grid,
                             pmd_bell bell, pmd_fiber_mode mode,
                             double l_over_lc, pmd_pair** out) {
  return guarded([&] {
    need(grid, "grid");
    need(out, "out");
    *out = nullptr;
    const auto profile = profile_of(fiber);
    const auto label = bell_of(bell);
    if (mode == PMD_COMMON) {
      if (label != pmd::BellLabel::singlet)
        throw pmd::Error(pmd::ErrorCode::unsupported,
                         "common-fiber closed form covers the singlet only");
      *out = new pmd_pair{pmd::evolve_common_singlet(grid->envelope, profile,
                                                     l_over_lc, grid->grid),
                          std::nullopt};
    } else if (mode == PMD_SEPARATE) {
      *out = new pmd_pair{pmd::evolve_separate(grid->envelope, label, profile,
                                               l_over_lc, grid->grid),
                          std::nullopt};
    } else {
      throw pmd::Error(pmd::ErrorCode::invalid_argument, "unknown fiber mode");
    }
  });
}

pmd_status pmd_pair_monte_carlo(const pmd_fiber* fiber, const pmd_grid* grid,
                                pmd_bell bell, pmd_fiber_mode mode,
                                double l_over_lc, const pmd_mc_config* cfg,
                                pmd_pair** out) {
  return guarded([&] {
    need(grid, "grid");
    need(out, "out");
    *out = nullptr;
    if (mode != PMD_COMMON && mode != PMD_SEPARATE)
      throw pmd::Error(pmd::ErrorCode::invalid_argument, "unknown fiber mode");
    auto e = pmd::ensemble_two(
        grid->envelope, bell_of(bell), profile_of(fiber), l_over_lc, grid->grid,
        config_of(cfg),
        mode == PMD_COMMON ? pmd::FiberMode::common : pmd::FiberMode::separate);
    auto rho = e.mean;
    *out = new pmd_pair{std::move(rho), std::move(e)};
  });
}

void pmd_pair_free(pmd_pair* rho) { delete rho; }

pmd_status pmd_pair_element(const pmd_pair* rho, int sa, int sb, int sap,
                            int sbp, size_t a, size_t b, size_t ap, size_t bp,
                            double* re, double* im) {
  return guarded([&] {
    need(rho, "density");
    need(re, "re");
    need(im, "im");
    const auto& g = rho->rho.grid();
    const pmd::cplx v =
        rho->rho(polarization(sa), polarization(sb), polarization(sap),
                 polarization(sbp), node(g, a), node(g, b), node(g, ap),
                 node(g, bp));
    *re = v.real();
    *im = v.imag();
  });
}

pmd_status pmd_pair_stderr(const pmd_pair* rho, int sa, int sb, int sap,
                           int sbp, size_t a, size_t b, size_t ap, size_t bp,
                           double* re, double* im) {
  return guarded([&] {
    need(rho, "density");
    need(re, "re");
    need(im, "im");
    const auto& g = rho->rho.grid();
    if (!rho->mc) {
      *re = *im = 0.0;
      return;
    }
    const auto r = Eigen::Index(rho->mc->index(
        polarization(sa), polarization(sb), node(g, a), node(g, b)));
    const auto c = Eigen::Index(rho->mc->index(
        polarization(sap), polarization(sbp), node(g, ap), node(g, bp)));
    *re = rho->mc->se_real(r, c);
    *im = rho->mc->se_imag(r, c);
  });
}

pmd_status pmd_pair_trace(const pmd_pair* rho, double* out) {
  return guarded([&] {
    need(rho, "density");
    need(out, "out");
    *out = rho->rho.trace();
  });
}

pmd_status pmd_pair_polarization_negativity(const pmd_pair* rho, double cutoff,
                                            double* out) {
  return guarded([&] {
    need(rho, "density");
    need(out, "out");
    pmd::NegativityOptions opt;
    opt.cutoff = cutoff;
    *out = pmd::bipartite_negativity(pmd::polarization_reduction(rho->rho), {0},
                                     opt)
               .negativity;
  });
}

pmd_status pmd_pair_frequency_negativity(const pmd_pair* rho, double cutoff,
                                         double* out) {
  return guarded([&] {
    need(rho, "density");
    need(out, "out");
    pmd::NegativityOptions opt;
    opt.cutoff = cutoff;
    *out =
        pmd::bipartite_negativity(pmd::frequency_reduction(rho->rho), {0}, opt)
            .negativity;
  });
}

}  // extern "C"
