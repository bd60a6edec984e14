#pragma once

#include <cstdint>
#include <filesystem>
#include <limits>
#include <random>
#include <string>
#include <vector>

#include "fracsem/calderon.hpp"
#include "fracsem/grid.hpp"
#include "fracsem/solver.hpp"

namespace fracsem::cli {

inline constexpr const char* kVersion = "0.1.0";

/// One term of a spatial profile.
///   constant: value
///   bump:     amplitude exp(1 - 1/(1 - rho^2)) for rho = |x - center| / width < 1
///   gaussian: amplitude exp(-rho^2)
struct ProfileTerm {
  std::string kind = "constant";
  Point center{};
  double width = 1.0;
  double amplitude = 0.0;
  double value = 0.0;
};

struct Profile {
  std::vector<ProfileTerm> terms;

  double operator()(const Point& x) const;
  static Profile constant(double v);
};

struct ExperimentConfig {
  std::string experiment;
  Domain domain = Domain::interval(-1.0, 1.0);
  double s = 0.5;
  double h = 1.0 / 64.0;
  double R = 4.0;
  std::string nonlinearity = "zero";
  Profile coefficient = Profile::constant(1.0);
  Profile potential = Profile::constant(0.0);
  Profile source = Profile::constant(0.0);
  Profile g = Profile::constant(0.0);
  Profile h_dir = Profile::constant(0.0);
  double window_min = 0.5;
  double window_max = std::numeric_limits<double>::infinity();
  WindowSide window_side = WindowSide::Both;
  std::vector<double> eta_schedule = default_eta_schedule();
  NewtonConfig newton;
  double regularization = 0.0;
  double noise = 0.0;
  int noise_draws = 20;
  int recover_iters = 500;
  int trials = 100;
  int probe_windows = 4;
  int probe_step = 4;
  double cutoff_radius = 0.0;
  std::uint64_t seed = 1;
  std::string resolved;   // canonical JSON of the fields above
};

/// Parses and validates a JSON config; throws Error(ConfigParse | Validation | ...).
ExperimentConfig parse_config(const std::string& text);

/// Runs one experiment; writes CSVs and manifest.json, or errors.json on failure.
/// Returns the process exit status.
int run(const ExperimentConfig& cfg, const std::filesystem::path& out_dir);

/// Reads the config, applies the subcommand, runs; config errors are reported like run errors.
int run_file(const std::string& subcommand, const std::filesystem::path& config,
             const std::filesystem::path& out_dir);

struct RandomData {
  std::vector<double> a;
  std::vector<double> f;
  Field g;
};

/// Nonnegative potential, source and smooth exterior data of random shape.
RandomData random_nonnegative_data(const NonlocalOperator& op, std::mt19937_64& rng);

}  // namespace fracsem::cli
