#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace pmdcli {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// "start:stop:count[:log]", a single number, or a comma-separated list of
// either form.
std::vector<double> parse_range(const std::string& text);

std::string format_double(double v);

struct RunConfig {
  std::string command;
  std::string mode;
  // Range texts; empty selects the subcommand default.
  std::string nu, alpha, beta, l_over_lc, tau;
  // 0 selects the subcommand default.
  std::size_t nodes = 0;
  std::size_t pair_nodes = 7;
  double half_width = 6.0;
  std::size_t mc_n = 10000;
  double mc_dz = 0.0;
  std::optional<std::uint64_t> seed;
  unsigned workers = 1;
  double eta = 2.0;
  double omega_a = 1.05;
  double omega_b = 0.95;
  double cutoff = 1e-10;
  bool numeric = false;
  std::string out;
  std::string out_critical;
};

enum ExitCode { exit_ok = 0, exit_failure = 1, exit_config = 2, exit_validation = 3 };

// Parses arguments (including an optional --config file) into a RunConfig.
RunConfig parse_arguments(int argc, const char* const* argv);

// Runs the configured subcommand, writing CSV to `csv` and the summary to
// `summary`. Returns an ExitCode.
int execute(const RunConfig& cfg, std::ostream& csv, std::ostream& summary);

// Full front end: parsing, file handling and error reporting.
int run(int argc, const char* const* argv, std::ostream& out,
        std::ostream& err);

}  // namespace pmdcli
