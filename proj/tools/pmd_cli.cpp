#include "pmd_cli.hpp"

#include "pmdsim.h"

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>

namespace pmdcli {

namespace {

struct ApiError : std::runtime_error {
  pmd_status status;
  ApiError(pmd_status s, const std::string& what)
      : std::runtime_error(what), status(s) {}
};

void check(pmd_status s, const char* call) {
  if (s != PMD_OK)
    throw ApiError(s, std::string(call) + ": " + pmd_last_error());
}

#define PMD_CHECK(expr) check((expr), #expr)

double parse_number(const std::string& text) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(text, &used);
  } catch (const std::exception&) {
    throw ConfigError("not a number: '" + text + "'");
  }
  if (used != text.size()) throw ConfigError("not a number: '" + text + "'");
  if (!std::isfinite(v)) throw ConfigError("non-finite value: '" + text + "'");
  return v;
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> parts;
  std::string cur;
  std::istringstream in(s);
  while (std::getline(in, cur, sep)) parts.push_back(cur);
  if (!s.empty() && s.back() == sep) parts.emplace_back();
  return parts;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t");
  return s.substr(b, e - b + 1);
}

std::vector<double> parse_one_range(const std::string& text) {
  const auto f = split(text, ':');
  if (f.size() == 1) return {parse_number(f[0])};
  if (f.size() != 3 && f.size() != 4)
    throw ConfigError("range must be start:stop:count[:log]: '" + text + "'");
  const double start = parse_number(f[0]), stop = parse_number(f[1]);
  const double count_d = parse_number(f[2]);
  if (count_d < 1 || count_d != std::floor(count_d))
    throw ConfigError("range count must be a positive integer: '" + text + "'");
  const auto count = static_cast<std::size_t>(count_d);
  bool log = false;
  if (f.size() == 4) {
    if (f[3] != "log") throw ConfigError("unknown range scale '" + f[3] + "'");
    log = true;
    if (start <= 0.0 || stop <= 0.0)
      throw ConfigError("log range needs positive bounds: '" + text + "'");
  }
  std::vector<double> v(count);
  if (count == 1) {
    v[0] = start;
    return v;
  }
  for (std::size_t i = 0; i < count; ++i) {
    const double t = double(i) / double(count - 1);
    v[i] = log ? std::pow(10.0, std::log10(start) +
                                    t * (std::log10(stop) - std::log10(start)))
               : start + t * (stop - start);
  }
  v.front() = start;
  v.back() = stop;
  return v;
}

std::vector<double> range_or(const std::string& text, const char* fallback) {
  return parse_range(text.empty() ? std::string(fallback) : text);
}

std::string text_or(const std::string& text, const char* fallback) {
  return text.empty() ? std::string(fallback) : text;
}

std::string join(const std::vector<std::string>& cols) {
  std::string s;
  for (std::size_t i = 0; i < cols.size(); ++i) {
    if (i) s += ',';
    s += cols[i];
  }
  return s;
}

class CsvWriter {
 public:
  CsvWriter(std::ostream& out, const std::string& config,
            const std::vector<std::string>& header)
      : out_(out) {
    out_ << "# " << config << '\n' << join(header) << '\n';
  }

  void row(const std::vector<std::string>& cells) {
    out_ << join(cells) << '\n';
    ++rows_;
  }

  std::size_t rows() const { return rows_; }

 private:
  std::ostream& out_;
  std::size_t rows_ = 0;
};

std::vector<std::string> cells(std::initializer_list<double> v) {
  std::vector<std::string> c;
  for (double x : v) c.push_back(format_double(x));
  return c;
}

struct Grid {
  pmd_grid* g = nullptr;
  ~Grid() { pmd_grid_free(g); }
};
struct Single {
  pmd_single* p = nullptr;
  ~Single() { pmd_single_free(p); }
};
struct Pair {
  pmd_pair* p = nullptr;
  ~Pair() { pmd_pair_free(p); }
};

pmd_fiber fiber_of(const RunConfig& cfg) {
  pmd_fiber f;
  pmd_fiber_default(&f);
  f.eta = cfg.eta;
  return f;
}

pmd_mc_config mc_of(const RunConfig& cfg, std::uint64_t seed) {
  return pmd_mc_config{cfg.mc_n, cfg.mc_dz, seed, cfg.workers};
}

// Effective configuration echoed into every CSV; output paths and the worker
// count are excluded because they do not affect the numbers.
std::string describe(const RunConfig& cfg, const std::vector<std::pair<std::string, std::string>>& extra) {
  std::string s = "pmdsim " + cfg.command;
  if (!cfg.mode.empty()) s += " mode=" + cfg.mode;
  for (const auto& [k, v] : extra) s += " " + k + "=" + v;
  return s;
}

std::string fmt_size(std::size_t v) { return std::to_string(v); }

int cmd_purity(const RunConfig& cfg, std::ostream& csv, std::ostream& summary) {
  const auto nus = range_or(cfg.nu, "20");
  const auto ls = range_or(cfg.l_over_lc, "1e-3:1e2:50:log");
  for (double nu : nus)
    if (!(nu > 0.0)) throw ConfigError("nu must be positive");
  const std::size_t nodes = cfg.nodes ? cfg.nodes : 128;
  std::vector<std::pair<std::string, std::string>> echo{
      {"nu", text_or(cfg.nu, "20")},
      {"l-over-lc", text_or(cfg.l_over_lc, "1e-3:1e2:50:log")}};
  std::vector<std::string> header{"nu", "L_over_Lc", "mu_omega", "mu_s",
                                  "mu_total"};
  if (cfg.numeric) {
    echo.push_back({"nodes", fmt_size(nodes)});
    echo.push_back({"half-width", format_double(cfg.half_width)});
    echo.push_back({"eta", format_double(cfg.eta)});
    header.insert(header.end(),
                  {"mu_omega_numeric", "mu_s_numeric", "mu_total_numeric"});
  }
  CsvWriter w(csv, describe(cfg, echo), header);
  const pmd_fiber fiber = fiber_of(cfg);
  std::size_t violations = 0;
  for (double nu : nus) {
    Grid grid;
    if (cfg.numeric)
      PMD_CHECK(pmd_grid_single(&fiber, nu, nodes, cfg.half_width, &grid.g));
    for (double l : ls) {
      pmd_purity p;
      PMD_CHECK(pmd_purities(nu, l, &p));
      if (p.mu_omega * p.mu_s > p.mu_total * (1.0 + 1e-12)) ++violations;
      auto row = cells({nu, l, p.mu_omega, p.mu_s, p.mu_total});
      if (cfg.numeric) {
        Single rho;
        PMD_CHECK(pmd_single_analytic(&fiber, grid.g, l, &rho.p));
        pmd_purity q;
        PMD_CHECK(pmd_single_purity(rho.p, &q));
        for (auto& c : cells({q.mu_omega, q.mu_s, q.mu_total})) row.push_back(c);
      }
      w.row(row);
    }
  }
  summary << "purity: " << w.rows() << " rows; product bound violations: "
          << violations << '\n';
  return exit_ok;
}

int cmd_pulse(const RunConfig& cfg, std::ostream& csv, std::ostream& summary) {
  const auto nus = range_or(cfg.nu, "20");
  const auto ls = range_or(cfg.l_over_lc, "0:100:11");
  const auto taus = range_or(cfg.tau, "-15:15:301");
  CsvWriter w(csv,
              describe(cfg, {{"nu", text_or(cfg.nu, "20")},
                             {"l-over-lc", text_or(cfg.l_over_lc, "0:100:11")},
                             {"tau", text_or(cfg.tau, "-15:15:301")}}),
              {"nu", "L_over_Lc", "tau_kappa", "I1", "I0", "width_sq",
               "width_sq_expected", "integral"});
  double worst_width = 0.0, worst_integral = 0.0;
  for (double nu : nus) {
    double width0 = 0.0, integral0 = 0.0;
    PMD_CHECK(pmd_pulse_moments(nu, 0.0, &width0, &integral0));
    for (double l : ls) {
      double width = 0.0, integral = 0.0;
      PMD_CHECK(pmd_pulse_moments(nu, l, &width, &integral));
      const double expected = 2.0 * (1.0 + 6.0 * l / (nu * nu));
      worst_width = std::max(worst_width, std::abs(width / expected - 1.0));
      worst_integral =
          std::max(worst_integral, std::abs(integral / integral0 - 1.0));
      std::vector<double> i1(taus.size()), i0(taus.size());
      PMD_CHECK(pmd_intensity(nu, l, taus.data(), taus.size(), i1.data(),
                              i0.data()));
      for (std::size_t k = 0; k < taus.size(); ++k)
        w.row(cells({nu, l, taus[k], i1[k], i0[k], width, expected, integral}));
    }
  }
  summary << "pulse: " << w.rows()
          << " rows; max relative width deviation "
          << format_double(worst_width) << "; max relative integral drift "
          << format_double(worst_integral) << '\n';
  return exit_ok;
}

std::string critical_path(const RunConfig& cfg) {
  if (!cfg.out_critical.empty()) return cfg.out_critical;
  if (cfg.out.empty()) return "";
  const auto dot = cfg.out.rfind('.');
  const auto slash = cfg.out.rfind('/');
  if (dot == std::string::npos || (slash != std::string::npos && dot < slash))
    return cfg.out + "_critical.csv";
  return cfg.out.substr(0, dot) + "_critical" + cfg.out.substr(dot);
}

int cmd_fig2(const RunConfig& cfg, std::ostream& csv, std::ostream& summary) {
  const char* da = "1000";
  const char* db = "1e-2:1e5:71:log";
  const char* dl = "1e-3:1:61:log";
  const auto alphas = range_or(cfg.alpha, da);
  const auto betas = range_or(cfg.beta, db);
  const auto ls = range_or(cfg.l_over_lc, dl);
  const std::string config =
      describe(cfg, {{"alpha-omega0", text_or(cfg.alpha, da)},
                     {"beta-omega0", text_or(cfg.beta, db)},
                     {"l-over-lc", text_or(cfg.l_over_lc, dl)}});
  CsvWriter w(csv, config,
              {"alpha_omega0", "beta_omega0", "L_over_Lc", "chi", "N_s"});
  std::vector<std::vector<double>> crit(alphas.size(),
                                        std::vector<double>(betas.size()));
  for (std::size_t ia = 0; ia < alphas.size(); ++ia)
    for (std::size_t ib = 0; ib < betas.size(); ++ib) {
      PMD_CHECK(pmd_critical_length_pol(alphas[ia], betas[ib], &crit[ia][ib]));
      for (double l : ls) {
        pmd_separate_report r;
        PMD_CHECK(pmd_separate(alphas[ia], betas[ib], l, &r));
        w.row(cells({alphas[ia], betas[ib], l, r.chi, r.n_s}));
      }
    }

  const std::string path = critical_path(cfg);
  std::ofstream file;
  std::ostream* cout = &csv;
  if (!path.empty()) {
    file.open(path, std::ios::binary);
    if (!file) throw ConfigError("cannot open '" + path + "' for writing");
    cout = &file;
  }
  CsvWriter c(*cout, config,
              {"alpha_omega0", "beta_omega0", "L_crit_over_Lc"});
  for (std::size_t ia = 0; ia < alphas.size(); ++ia) {
    for (std::size_t ib = 0; ib < betas.size(); ++ib)
      c.row(cells({alphas[ia], betas[ib], crit[ia][ib]}));
    const auto peak = std::max_element(crit[ia].begin(), crit[ia].end());
    double asymptote = 0.0;
    PMD_CHECK(pmd_critical_length_pol(alphas[ia], 1e12, &asymptote));
    summary << "fig2: alpha_omega0=" << format_double(alphas[ia])
            << " peak L_crit=" << format_double(*peak) << " at beta_omega0="
            << format_double(betas[std::size_t(peak - crit[ia].begin())])
            << "; large-beta asymptote " << format_double(asymptote) << '\n';
  }
  summary << "fig2: " << w.rows() << " surface rows, " << c.rows()
          << " critical rows" << (path.empty() ? "" : " in " + path) << '\n';
  return exit_ok;
}

const char* verdict_text(pmd_verdict v) {
  switch (v) {
    case PMD_ENTANGLED:
      return "entangled";
    case PMD_NOT_WITNESSED:
      return "not-witnessed";
    case PMD_INCONCLUSIVE:
      return "inconclusive";
  }
  return "unknown";
}

int cmd_neg(const RunConfig& cfg, std::ostream& csv, std::ostream& summary) {
  const char* da = "10";
  const char* db = "5";
  const char* dl = "0:1:11";
  const auto alphas = range_or(cfg.alpha, da);
  const auto betas = range_or(cfg.beta, db);
  const auto ls = range_or(cfg.l_over_lc, dl);
  std::vector<std::pair<std::string, std::string>> echo{
      {"alpha-omega0", text_or(cfg.alpha, da)}};
  if (cfg.mode != "common-pol")
    echo.push_back({"beta-omega0", text_or(cfg.beta, db)});
  echo.push_back({"l-over-lc", text_or(cfg.l_over_lc, dl)});
  const std::size_t nodes = cfg.nodes ? cfg.nodes : 32;
  const pmd_fiber fiber = fiber_of(cfg);

  if (cfg.mode == "sep-pol") {
    CsvWriter w(csv, describe(cfg, echo),
                {"alpha_omega0", "beta_omega0", "L_over_Lc", "chi", "N_s_raw",
                 "N_s", "L_crit_pol"});
    for (double a : alphas)
      for (double b : betas)
        for (double l : ls) {
          pmd_separate_report r;
          PMD_CHECK(pmd_separate(a, b, l, &r));
          w.row(cells({a, b, l, r.chi, r.n_s_raw, r.n_s, r.l_crit_pol}));
        }
    summary << "neg sep-pol: " << w.rows() << " rows\n";
  } else if (cfg.mode == "sep-freq") {
    std::vector<std::string> header{"alpha_omega0", "beta_omega0", "L_over_Lc",
                                    "N_omega", "L_crit_freq"};
    if (cfg.numeric) {
      echo.push_back({"nodes", fmt_size(nodes)});
      echo.push_back({"half-width", format_double(cfg.half_width)});
      echo.push_back({"cutoff", format_double(cfg.cutoff)});
      header.push_back("N_omega_numeric");
    }
    CsvWriter w(csv, describe(cfg, echo), header);
    double worst = 0.0;
    for (double a : alphas)
      for (double b : betas) {
        Grid grid;
        if (cfg.numeric)
          PMD_CHECK(pmd_grid_pair(&fiber, a, b, nodes, cfg.half_width, &grid.g));
        for (double l : ls) {
          pmd_separate_report r;
          PMD_CHECK(pmd_separate(a, b, l, &r));
          auto row = cells({a, b, l, r.n_omega, r.l_crit_freq});
          if (cfg.numeric) {
            Pair rho;
            PMD_CHECK(pmd_pair_analytic(&fiber, grid.g, PMD_SINGLET,
                                        PMD_SEPARATE, l, &rho.p));
            double n = 0.0;
            PMD_CHECK(pmd_pair_frequency_negativity(rho.p, cfg.cutoff, &n));
            worst = std::max(worst, std::abs(n - r.n_omega));
            row.push_back(format_double(n));
          }
          w.row(row);
        }
      }
    summary << "neg sep-freq: " << w.rows() << " rows";
    if (cfg.numeric)
      summary << "; max |numeric - closed form| " << format_double(worst);
    summary << '\n';
  } else if (cfg.mode == "common-pol") {
    CsvWriter w(csv, describe(cfg, echo),
                {"alpha_omega0", "L_over_Lc", "upsilon", "N_s_raw", "N_s",
                 "L_crit_pol"});
    for (double a : alphas)
      for (double l : ls) {
        pmd_common_report r;
        PMD_CHECK(pmd_common(a, l, &r));
        w.row(cells({a, l, r.upsilon, r.n_s_raw, r.n_s, r.l_crit_pol}));
      }
    summary << "neg common-pol: " << w.rows() << " rows\n";
  } else if (cfg.mode == "common-ppt") {
    echo.push_back({"omega-a", format_double(cfg.omega_a)});
    echo.push_back({"omega-b", format_double(cfg.omega_b)});
    CsvWriter w(csv, describe(cfg, echo),
                {"alpha_omega0", "beta_omega0", "L_over_Lc", "omega_a",
                 "omega_b", "correlated_ratio", "correlated", "g",
                 "g_printed", "anticorrelated_witness", "anticorrelated"});
    for (double a : alphas)
      for (double b : betas)
        for (double l : ls) {
          pmd_ppt_witness r;
          PMD_CHECK(pmd_witness(a, b, l, cfg.omega_a, cfg.omega_b, &r));
          auto row = cells({a, b, l, cfg.omega_a, cfg.omega_b,
                            r.correlated_ratio});
          row.push_back(verdict_text(r.correlated));
          for (auto& c : cells({r.g, r.g_printed, r.anticorrelated_witness}))
            row.push_back(c);
          row.push_back(verdict_text(r.anticorrelated));
          w.row(row);
        }
    summary << "neg common-ppt: " << w.rows() << " rows\n";
  } else {
    throw ConfigError("unknown neg mode '" + cfg.mode + "'");
  }
  return exit_ok;
}

struct Check {
  std::string name;
  double analytic, mc, se;
};

double z_score(const Check& c) {
  const double se = std::max(c.se, 1e-12 * std::max(1.0, std::abs(c.analytic)));
  return (c.mc - c.analytic) / se;
}

std::size_t nearest(const pmd_grid* g, double omega) {
  const std::size_t n = pmd_grid_size(g);
  std::size_t best = 0;
  double dist = INFINITY;
  for (std::size_t i = 0; i < n; ++i) {
    double w = 0.0;
    PMD_CHECK(pmd_grid_node(g, i, &w));
    if (std::abs(w - omega) < dist) {
      dist = std::abs(w - omega);
      best = i;
    }
  }
  return best;
}

std::string tag(const char* key, double v) {
  return std::string(key) + "=" + format_double(v);
}

void single_suite(const RunConfig& cfg, std::uint64_t seed, double nu,
                  double l, std::vector<Check>& out) {
  const pmd_fiber fiber = fiber_of(cfg);
  Grid grid;
  PMD_CHECK(pmd_grid_single(&fiber, nu, cfg.nodes ? cfg.nodes : 13,
                            cfg.half_width, &grid.g));
  Single an, mc;
  PMD_CHECK(pmd_single_analytic(&fiber, grid.g, l, &an.p));
  const pmd_mc_config mcc = mc_of(cfg, seed);
  PMD_CHECK(pmd_single_monte_carlo(&fiber, grid.g, l, &mcc, &mc.p));
  const double kappa = 1.0 / nu;
  const std::size_t c = nearest(grid.g, 1.0);
  const std::pair<const char*, std::size_t> rows[] = {
      {"w0", c},
      {"w0+kappa", nearest(grid.g, 1.0 + kappa)},
      {"w0-kappa", nearest(grid.g, 1.0 - kappa)}};
  const std::string prefix =
      "single " + tag("nu", nu) + " " + tag("L", l) + " ";
  const auto add = [&](const std::string& label, int s, int sp, std::size_t i,
                       std::size_t j, bool imag) {
    double ar, ai, mr, mi, sr, si;
    PMD_CHECK(pmd_single_element(an.p, s, sp, i, j, &ar, &ai));
    PMD_CHECK(pmd_single_element(mc.p, s, sp, i, j, &mr, &mi));
    PMD_CHECK(pmd_single_stderr(mc.p, s, sp, i, j, &sr, &si));
    out.push_back(imag ? Check{prefix + label + " im", ai, mi, si}
                       : Check{prefix + label, ar, mr, sr});
  };
  for (const auto& [name, i] : rows) {
    add(std::string("rho11(") + name + ",w0)", 1, 1, i, c, false);
    add(std::string("rho00(") + name + ",w0)", 0, 0, i, c, false);
  }
  add("rho10(w0,w0)", 1, 0, c, c, false);
  add("rho10(w0,w0)", 1, 0, c, c, true);
}

struct PairPoint {
  const char* name;
  int sa, sb, sap, sbp;
  int da, db, dap, dbp;
};

void pair_suite(const RunConfig& cfg, std::uint64_t seed, double a, double b,
                double l, pmd_bell bell, pmd_fiber_mode mode,
                const char* label, std::vector<Check>& out) {
  const pmd_fiber fiber = fiber_of(cfg);
  Grid grid;
  PMD_CHECK(pmd_grid_pair(&fiber, a, b, cfg.pair_nodes, cfg.half_width, &grid.g));
  Pair an, mc;
  PMD_CHECK(pmd_pair_analytic(&fiber, grid.g, bell, mode, l, &an.p));
  const pmd_mc_config mcc = mc_of(cfg, seed);
  PMD_CHECK(pmd_pair_monte_carlo(&fiber, grid.g, bell, mode, l, &mcc, &mc.p));
  const auto c = static_cast<int>(nearest(grid.g, 1.0));
  const int n = static_cast<int>(pmd_grid_size(grid.g));
  static const PairPoint points[] = {
      {"rho1111(c,c,c,c)", 1, 1, 1, 1, 0, 0, 0, 0},
      {"rho1010(c,c,c,c)", 1, 0, 1, 0, 0, 0, 0, 0},
      {"rho1001(c,c,c,c)", 1, 0, 0, 1, 0, 0, 0, 0},
      {"rho1100(c,c,c,c)", 1, 1, 0, 0, 0, 0, 0, 0},
      {"rho1111(c+1,c,c+1,c)", 1, 1, 1, 1, 1, 0, 1, 0},
      {"rho1010(c+1,c-1,c,c)", 1, 0, 1, 0, 1, -1, 0, 0},
      {"rho1001(c+1,c-1,c,c)", 1, 0, 0, 1, 1, -1, 0, 0},
      {"rho1111(c+1,c,c,c+1)", 1, 1, 1, 1, 1, 0, 0, 1},
  };
  const std::string prefix = std::string(label) + " " + tag("alpha", a) + " " +
                             tag("beta", b) + " " + tag("L", l) + " ";
  for (const auto& p : points) {
    const int idx[4] = {c + p.da, c + p.db, c + p.dap, c + p.dbp};
    if (std::any_of(idx, idx + 4, [n](int i) { return i < 0 || i >= n; }))
      continue;
    double ar, ai, mr, mi, sr, si;
    const auto args = [&](auto fn, pmd_pair* rho, double* re, double* im) {
      PMD_CHECK(fn(rho, p.sa, p.sb, p.sap, p.sbp, std::size_t(idx[0]),
                   std::size_t(idx[1]), std::size_t(idx[2]),
                   std::size_t(idx[3]), re, im));
    };
    args(pmd_pair_element, an.p, &ar, &ai);
    args(pmd_pair_element, mc.p, &mr, &mi);
    args(pmd_pair_stderr, mc.p, &sr, &si);
    out.push_back(Check{prefix + p.name, ar, mr, sr});
  }
}

int cmd_validate(const RunConfig& cfg, std::ostream& csv, std::ostream& summary) {
  if (!cfg.seed) throw ConfigError("validate requires --seed");
  const char* dnu = "20";
  const char* da = "20";
  const char* db = "5";
  const char* dl = "0.1,1";
  const auto nus = range_or(cfg.nu, dnu);
  const auto alphas = range_or(cfg.alpha, da);
  const auto betas = range_or(cfg.beta, db);
  const auto ls = range_or(cfg.l_over_lc, dl);
  const std::uint64_t seed = *cfg.seed;
  CsvWriter w(
      csv,
      describe(cfg, {{"nu", text_or(cfg.nu, dnu)},
                     {"alpha-omega0", text_or(cfg.alpha, da)},
                     {"beta-omega0", text_or(cfg.beta, db)},
                     {"l-over-lc", text_or(cfg.l_over_lc, dl)},
                     {"nodes", fmt_size(cfg.nodes ? cfg.nodes : 13)},
                     {"pair-nodes", fmt_size(cfg.pair_nodes)},
                     {"half-width", format_double(cfg.half_width)},
                     {"mc-n", fmt_size(cfg.mc_n)},
                     {"mc-dz", format_double(cfg.mc_dz)},
                     {"seed", std::to_string(seed)},
                     {"eta", format_double(cfg.eta)}}),
      {"check", "analytic", "mc", "stderr", "z"});

  std::vector<Check> checks;
  std::uint64_t suite = 0;
  for (double nu : nus)
    for (double l : ls) single_suite(cfg, seed + suite++, nu, l, checks);
  for (double a : alphas)
    for (double b : betas)
      for (double l : ls) {
        pair_suite(cfg, seed + suite++, a, b, l, PMD_SINGLET, PMD_SEPARATE,
                   "separate-singlet", checks);
        pair_suite(cfg, seed + suite++, a, b, l, PMD_TRIPLET_PLUS,
                   PMD_SEPARATE, "separate-triplet+", checks);
        pair_suite(cfg, seed + suite++, a, b, l, PMD_SINGLET, PMD_COMMON,
                   "common-singlet", checks);
      }

  double worst = 0.0;
  std::size_t failed = 0;
  for (const auto& c : checks) {
    const double z = z_score(c);
    worst = std::max(worst, std::abs(z));
    if (!(std::abs(z) <= 4.0)) ++failed;
    w.row({c.name, format_double(c.analytic), format_double(c.mc),
           format_double(c.se), format_double(z)});
  }
  summary << "validate: " << checks.size() << " checks, max |z| "
          << format_double(worst) << ", " << failed << " beyond 4: "
          << (failed ? "FAIL" : "PASS") << '\n';
  return failed ? exit_validation : exit_ok;
}

std::unique_ptr<CLI::App> build_app(RunConfig& cfg) {
  auto app = std::make_unique<CLI::App>(
      "Decoherence and disentanglement of photons in fibers with "
      "polarization mode dispersion");
  app->set_config("--config", "", "Key-value file; flags take precedence");
  app->require_subcommand(1);
  app->add_option("--nu", cfg.nu, "omega0/kappa (range)");
  app->add_option("--alpha-omega0", cfg.alpha, "alpha*omega0 (range)");
  app->add_option("--beta-omega0", cfg.beta, "beta*omega0 (range)");
  app->add_option("--l-over-lc", cfg.l_over_lc,
                  "Fiber length in units of L_c (start:stop:count[:log])");
  app->add_option("--tau", cfg.tau, "Delay grid in units of 1/kappa (range)");
  app->add_option("--nodes", cfg.nodes, "Frequency grid nodes")
      ->check(CLI::Range(std::size_t(3), std::size_t(1) << 20));
  app->add_option("--pair-nodes", cfg.pair_nodes,
                  "Per-photon grid nodes of the two-photon validation suites")
      ->check(CLI::Range(std::size_t(3), std::size_t(64)));
  app->add_option("--half-width", cfg.half_width,
                  "Grid half-width in envelope widths")
      ->check(CLI::Range(3.0, 1e6));
  app->add_option("--mc-n", cfg.mc_n, "Monte Carlo trajectories")
      ->check(CLI::Range(std::size_t(2), std::size_t(1) << 40));
  app->add_option("--mc-dz", cfg.mc_dz,
                  "Noise segment length in units of L_c (0: automatic)")
      ->check(CLI::NonNegativeNumber);
  app->add_option("--seed", cfg.seed, "Monte Carlo seed");
  app->add_option("--workers", cfg.workers, "Worker threads (0: all cores)");
  app->add_option("--eta", cfg.eta, "Birefringence strength")
      ->check(CLI::PositiveNumber);
  app->add_option("--omega-a", cfg.omega_a,
                  "Photon A frequency for witnesses, units of omega0");
  app->add_option("--omega-b", cfg.omega_b,
                  "Photon B frequency for witnesses, units of omega0");
  app->add_option("--cutoff", cfg.cutoff, "Negativity eigenvalue cutoff")
      ->check(CLI::NonNegativeNumber);
  app->add_flag("--numeric", cfg.numeric,
                "Add discretized-kernel columns (purity, neg sep-freq)");
  app->add_option("--out", cfg.out, "CSV output file (default: stdout)");
  app->add_option("--out-critical", cfg.out_critical,
                  "Critical-curve CSV for fig2");

  const std::pair<const char*, const char*> commands[] = {
      {"purity", "Frequency, polarization and total purities"},
      {"pulse", "Output intensity profiles and pulse width"},
      {"fig2", "Separate-fiber negativity surface and critical curve"},
      {"neg", "Negativities and witnesses"},
      {"validate", "Monte Carlo versus closed-form checks"}};
  for (const auto& [name, help] : commands) {
    auto* sub = app->add_subcommand(name, help);
    sub->fallthrough();
    sub->callback([&cfg, n = std::string(name)] { cfg.command = n; });
    if (std::string(name) == "neg")
      sub->add_option("mode", cfg.mode, "sep-pol | sep-freq | common-pol | common-ppt")
          ->required()
          ->check(CLI::IsMember(
              {"sep-pol", "sep-freq", "common-pol", "common-ppt"}));
  }
  return app;
}

}  // namespace

std::vector<double> parse_range(const std::string& text) {
  std::vector<double> all;
  for (const auto& part : split(text, ',')) {
    const std::string t = trim(part);
    if (t.empty()) throw ConfigError("empty range element in '" + text + "'");
    const auto v = parse_one_range(t);
    all.insert(all.end(), v.begin(), v.end());
  }
  if (all.empty()) throw ConfigError("empty range");
  return all;
}

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

RunConfig parse_arguments(int argc, const char* const* argv) {
  RunConfig cfg;
  auto app = build_app(cfg);
  try {
    app->parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    throw ConfigError(e.what());
  }
  return cfg;
}

int execute(const RunConfig& cfg, std::ostream& csv, std::ostream& summary) {
  if (cfg.command == "purity") return cmd_purity(cfg, csv, summary);
  if (cfg.command == "pulse") return cmd_pulse(cfg, csv, summary);
  if (cfg.command == "fig2") return cmd_fig2(cfg, csv, summary);
  if (cfg.command == "neg") return cmd_neg(cfg, csv, summary);
  if (cfg.command == "validate") return cmd_validate(cfg, csv, summary);
  throw ConfigError("unknown subcommand '" + cfg.command + "'");
}

int run(int argc, const char* const* argv, std::ostream& out,
        std::ostream& err) {
  RunConfig cfg;
  auto app = build_app(cfg);
  try {
    app->parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app->help();
    return exit_ok;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return exit_config;
  }

  pmd_set_warning_callback(
      [](const char* msg, void* user) {
        *static_cast<std::ostream*>(user) << "warning: " << msg << '\n';
      },
      &err);
  int code = exit_ok;
  try {
    if (cfg.out.empty()) {
      code = execute(cfg, out, err);
    } else {
      std::ofstream file(cfg.out, std::ios::binary);
      if (!file) throw ConfigError("cannot open '" + cfg.out + "' for writing");
      code = execute(cfg, file, out);
      file.close();
      if (!file) throw std::runtime_error("failed writing '" + cfg.out + "'");
    }
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << '\n';
    code = exit_config;
  } catch (const ApiError& e) {
    err << "error: " << e.what() << '\n';
    code = (e.status == PMD_ERR_INVALID_ARGUMENT ||
            e.status == PMD_ERR_DOMAIN || e.status == PMD_ERR_UNSUPPORTED)
               ? exit_config
               : exit_failure;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    code = exit_failure;
  }
  pmd_set_warning_callback(nullptr, nullptr);
  return code;
}

}  // namespace pmdcli
