#ifndef PMDSIM_H
#define PMDSIM_H

#include <stddef.h>
#include <stdint.h>

#if defined(PMDSIM_BUILDING)
#define PMDSIM_API __attribute__((visibility("default")))
#else
#define PMDSIM_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum pmd_status {
  PMD_OK = 0,
  PMD_ERR_INVALID_ARGUMENT = 1,
  PMD_ERR_UNSUPPORTED = 2,
  PMD_ERR_DOMAIN = 3,
  PMD_ERR_NUMERIC = 4,
  PMD_ERR_ALLOCATION = 5,
  PMD_ERR_INTERNAL = 6
} pmd_status;

PMDSIM_API const char* pmd_version(void);
PMDSIM_API const char* pmd_status_string(pmd_status status);
/* Message of the last failure on the calling thread, "" if none. */
PMDSIM_API const char* pmd_last_error(void);

typedef void (*pmd_warning_fn)(const char* message, void* user);
/* NULL restores the default (stderr). */
PMDSIM_API void pmd_set_warning_callback(pmd_warning_fn fn, void* user);

typedef struct pmd_fiber {
  double eta;
  double gamma;
  double sigma2;
  double omega0;
  int quadratic;
} pmd_fiber;

/* eta = 2, gamma = 1, omega0 = 1, linear: L_c = 1. */
PMDSIM_API void pmd_fiber_default(pmd_fiber* out);
PMDSIM_API pmd_status pmd_coherence_length(const pmd_fiber* fiber, double* out);

/* Closed forms. Lengths in units of L_c, widths as nu = omega0/kappa,
   alpha*omega0 and beta*omega0, frequencies in units of omega0. */

typedef struct pmd_purity {
  double mu_omega;
  double mu_s;
  double mu_total;
} pmd_purity;

PMDSIM_API pmd_status pmd_purities(double nu, double l_over_lc, pmd_purity* out);
/* tau in units of 1/kappa. */
PMDSIM_API pmd_status pmd_intensity(double nu, double l_over_lc,
                                    const double* tau, size_t n, double* i1,
                                    double* i0);
PMDSIM_API pmd_status pmd_pulse_moments(double nu, double l_over_lc,
                                        double* width_sq, double* integral);

typedef struct pmd_separate_report {
  double chi;
  double n_s_raw;
  double n_s;
  double n_omega;
  double l_crit_pol;
  double l_crit_freq;
} pmd_separate_report;

PMDSIM_API pmd_status pmd_chi(double alpha_omega0, double beta_omega0,
                              double l_over_lc, double* out);
PMDSIM_API pmd_status pmd_critical_length_pol(double alpha_omega0,
                                              double beta_omega0, double* out);
PMDSIM_API pmd_status pmd_separate(double alpha_omega0, double beta_omega0,
                                   double l_over_lc, pmd_separate_report* out);

typedef struct pmd_common_report {
  double upsilon;
  double n_s_raw;
  double n_s;
  double l_crit_pol;
} pmd_common_report;

PMDSIM_API pmd_status pmd_common(double alpha_omega0, double l_over_lc,
                                 pmd_common_report* out);

typedef enum pmd_verdict {
  PMD_ENTANGLED = 0,
  PMD_NOT_WITNESSED = 1,
  PMD_INCONCLUSIVE = 2
} pmd_verdict;

typedef struct pmd_ppt_witness {
  double correlated_ratio;
  pmd_verdict correlated;
  double g;
  double g_printed;
  double anticorrelated_witness;
  pmd_verdict anticorrelated;
} pmd_ppt_witness;

PMDSIM_API pmd_status pmd_witness(double alpha_omega0, double beta_omega0,
                                  double l_over_lc, double omega_a,
                                  double omega_b, pmd_ppt_witness* out);

/* Frequency grid bound to its envelope. */
typedef struct pmd_grid pmd_grid;

PMDSIM_API pmd_status pmd_grid_single(const pmd_fiber* fiber, double nu,
                                      size_t nodes, double half_width,
                                      pmd_grid** out);
PMDSIM_API pmd_status pmd_grid_pair(const pmd_fiber* fiber,
                                    double alpha_omega0, double beta_omega0,
                                    size_t nodes, double half_width,
                                    pmd_grid** out);
PMDSIM_API void pmd_grid_free(pmd_grid* grid);
PMDSIM_API size_t pmd_grid_size(const pmd_grid* grid);
PMDSIM_API pmd_status pmd_grid_node(const pmd_grid* grid, size_t i,
                                    double* omega);
PMDSIM_API pmd_status pmd_grid_index(const pmd_grid* grid, double omega,
                                     size_t* out);

typedef struct pmd_mc_config {
  size_t trajectories;
  double dz_over_lc;
  uint64_t seed;
  unsigned workers;
} pmd_mc_config;

typedef struct pmd_single pmd_single;

PMDSIM_API pmd_status pmd_single_analytic(const pmd_fiber* fiber,
                                          const pmd_grid* grid,
                                          double l_over_lc, pmd_single** out);
PMDSIM_API pmd_status pmd_single_monte_carlo(const pmd_fiber* fiber,
                                             const pmd_grid* grid,
                                             double l_over_lc,
                                             const pmd_mc_config* cfg,
                                             pmd_single** out);
PMDSIM_API void pmd_single_free(pmd_single* rho);
PMDSIM_API pmd_status pmd_single_element(const pmd_single* rho, int s, int sp,
                                         size_t i, size_t j, double* re,
                                         double* im);
/* Standard errors; zero for closed-form densities. */
PMDSIM_API pmd_status pmd_single_stderr(const pmd_single* rho, int s, int sp,
                                        size_t i, size_t j, double* re,
                                        double* im);
PMDSIM_API pmd_status pmd_single_trace(const pmd_single* rho, double* out);
PMDSIM_API pmd_status pmd_single_purity(const pmd_single* rho, pmd_purity* out);

typedef enum pmd_bell {
  PMD_SINGLET = 0,
  PMD_TRIPLET0 = 1,
  PMD_TRIPLET_PLUS = 2,
  PMD_TRIPLET_MINUS = 3
} pmd_bell;

typedef enum pmd_fiber_mode { PMD_SEPARATE = 0, PMD_COMMON = 1 } pmd_fiber_mode;

typedef struct pmd_pair pmd_pair;

PMDSIM_API pmd_status pmd_pair_analytic(const pmd_fiber* fiber,
                                        const pmd_grid* grid, pmd_bell bell,
                                        pmd_fiber_mode mode, double l_over_lc,
                                        pmd_pair** out);
PMDSIM_API pmd_status pmd_pair_monte_carlo(const pmd_fiber* fiber,
                                           const pmd_grid* grid, pmd_bell bell,
                                           pmd_fiber_mode mode,
                                           double l_over_lc,
                                           const pmd_mc_config* cfg,
                                           pmd_pair** out);
PMDSIM_API void pmd_pair_free(pmd_pair* rho);
PMDSIM_API pmd_status pmd_pair_element(const pmd_pair* rho, int sa, int sb,
                                       int sap, int sbp, size_t a, size_t b,
                                       size_t ap, size_t bp, double* re,
                                       double* im);
PMDSIM_API pmd_status pmd_pair_stderr(const pmd_pair* rho, int sa, int sb,
                                      int sap, int sbp, size_t a, size_t b,
                                      size_t ap, size_t bp, double* re,
                                      double* im);
PMDSIM_API pmd_status pmd_pair_trace(const pmd_pair* rho, double* out);
/* Negativity across the photon cut after tracing out frequency or
   polarization; eigenvalues above -cutoff count as zero. */
PMDSIM_API pmd_status pmd_pair_polarization_negativity(const pmd_pair* rho,
                                                       double cutoff,
                                                       double* out);
PMDSIM_API pmd_status pmd_pair_frequency_negativity(const pmd_pair* rho,
                                                    double cutoff, double* out);

#ifdef __cplusplus
}
#endif

#endif
