#pragma once

#include <cstdint>
#include <functional>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "conewave/besov.hpp"
#include "conewave/sampling.hpp"

namespace conewave {

struct ExperimentConfig {
  std::string experiment = "decoupling";

  // Cone and group.
  std::string cone = "product";
  int cone_dim = 1;  // rank for product, ambient dimension for lorentz
  std::string group = "abelian";  // abelian | heisenberg | diagonal
  int group_n = 1;                // complex dimension of E for diagonal groups
  std::vector<double> group_direction;

  // Grid: per-axis counts and half widths (a single entry is broadcast).
  std::vector<int> grid_count{256};
  std::vector<double> grid_half_width{32.0};
  int e_count = 32;
  double e_half_width = 4.0;

  // Lattice.
  double delta = 0.3;
  double R = 2.25;
  std::string region = "annulus";  // annulus | log_box
  double scale_lo = 0.5;
  double scale_hi = 2.0;
  double angle = 0.5;
  std::vector<double> box_lo;
  std::vector<double> box_hi;
  double shell_c = 4.0;
  std::string bump_mode = "partition_sq";
  std::string transport = "triangular";

  // Besov parameters.
  std::vector<double> s;
  double p = 2.0;
  double q = 2.0;

  // Trials.
  int trials = 20;
  std::uint64_t seed = 1;
  int threads = 0;  // 0: hardware concurrency
  int terms = 3;
  double bump_radius = 0.25;

  // Decoupling.
  bool weighted = false;
  double weight_c = 0.0;

  // Blow-up family.
  int k_max = 100;
  int blowup_j = -1;  // -1: coordinate with the largest s_j

  // Multiplier.
  std::string multiplier = "one";  // one | delta_power | angular
  double tau = 1.0;
  int t_samples = 20;
  double p0 = 0.0;  // 0: min(p, p')
  int symbol_grid_count = 64;
  double symbol_grid_half_width = 3.0;

  // Comparison.
  bool single_term = false;
  int single_j = 0;
  double single_offset = 1.1;

  // Sampling and Young.
  std::vector<double> deltas;
  double p1 = 0.5;
  double p2 = 0.5;
  double p3 = 0.5;
  std::vector<int> refine_counts;

  std::string output_dir = "out";
  bool plot = false;
};

struct TrialRow {
  int trial = 0;
  std::uint64_t seed = 0;
  double ratio = 0.0;
  double lhs = 0.0;
  double rhs = 0.0;
  std::vector<std::pair<std::string, double>> extras;
};

struct TrajectoryPoint {
  double x = 0.0;
  double y = 0.0;
};

struct Check {
  std::string name;
  bool passed = false;
  double value = 0.0;
  double bound = 0.0;
};

struct TrialReport {
  std::string experiment;
  std::vector<TrialRow> rows;
  double max_ratio = 0.0;
  double min_ratio = 0.0;
  double median_ratio = 0.0;
  std::string sweep_label;
  std::vector<TrajectoryPoint> trajectory;
  std::vector<Check> checks;
  std::vector<std::pair<std::string, double>> summary;

  // Recomputes max/min/median from the rows.
  void finalize();
  bool passed() const;
  void add_check(std::string name, bool ok, double value, double bound);
  double summary_value(const std::string& key) const;
};

// Per-trial seed derived from (seed, trial).
std::uint64_t trial_seed(std::uint64_t seed, int trial);
// Runs fn(i) for i in [0, count) on a pool of worker threads.
void parallel_for(int count, int threads, const std::function<void(int)>& fn);
double least_squares_slope(const std::vector<double>& x, const std::vector<double>& y);

SiegelData siegel_from_config(const ExperimentConfig& cfg);
Grid grid_from_config(const ExperimentConfig& cfg, const SiegelData& siegel);
Region region_from_config(const ExperimentConfig& cfg, const ConeDescriptor& cone);
PowerExponent s_from_config(const ExperimentConfig& cfg, const ConeDescriptor& cone);

// Bounding box of a region in dual coordinates, padded by `pad` in the invariant metric.
std::pair<Vec, Vec> region_box(const ConeDescriptor& cone, const Region& region, double pad);
// Sum of `terms` randomly placed, randomly translated C-infinity bumps whose supports lie in the region.
ScalarSymbol random_band_limited(const SpectralContext& ctx, const Region& region, std::mt19937_64& rng, int terms,
                                 double radius);

// Primal element (e - e_j) + e_j/(k+1) of a product cone.
TriangularElement blowup_element(const ConeDescriptor& cone, int j, int k);

TrialReport run_decoupling(const ExperimentConfig& cfg);
TrialReport run_blowup(const ExperimentConfig& cfg);
TrialReport run_multiplier(const ExperimentConfig& cfg);
TrialReport run_comparison(const ExperimentConfig& cfg);
TrialReport run_calibrate(const ExperimentConfig& cfg);
TrialReport run_lattice(const ExperimentConfig& cfg);
TrialReport run_sampling(const ExperimentConfig& cfg);
TrialReport run_young(const ExperimentConfig& cfg);
TrialReport run_embedding(const ExperimentConfig& cfg);
TrialReport run_experiment(const ExperimentConfig& cfg);

std::vector<std::string> experiment_names();

}  // namespace conewave
