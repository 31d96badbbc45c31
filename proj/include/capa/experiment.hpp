// SPDX-License-Identifier: Apache-2.0
//
// capa-beam: multi-user beamforming for continuous-aperture arrays

#ifndef CAPA_EXPERIMENT_HPP
#define CAPA_EXPERIMENT_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "capa/spda.hpp"

namespace capa {

enum class Design {
  mrt,
  zf,
  mmse,
  optimal,
  spda_mrt,
  spda_zf,
  spda_mmse,
  spda_optimal,
};

std::string design_name(Design d);
Design design_from_name(const std::string& name);

/// Parameters of one reproducible sweep. Serialized as JSON; the CLI loads
/// it from --config.
struct ExperimentConfig {
  std::string sweep;            // power | aperture | users | convergence | gains
  std::vector<double> grid;     // sweep values; users sweep holds K values
  int trials = 100;
  std::uint64_t base_seed = 1;
  int quad_order_x = 20;
  int quad_order_y = 20;
  std::vector<Design> designs;
  int num_users = 4;
  double aperture_area = 0.1;    // m^2, square aperture
  double frequency_hz = 2.4e9;
  double noise_power = 5.6e-3;   // V^2/m^2
  double power_budget = 1e-3;    // A^2
  double user_power = 0.25e-3;   // A^2; users sweep sets P = K * user_power
  UserRegion region;
  OptimizerOptions optimizer;
  bool allow_large_optimal = false;  // lift the K <= 3 guard on optimal rows
  double gain_power_lo = 1e-3;   // A^2, multiplexing-gain bracket
  double gain_power_hi = 0.1;
  int workers = 0;               // 0 = hardware concurrency

  void validate() const;
};

ExperimentConfig config_from_json(const std::string& text);
std::string config_to_json(const ExperimentConfig& config);

/// One evaluated (sweep value, design, trial) cell. Wall time is tracked in
/// the run metadata, not per row, so result files are byte-reproducible.
struct ResultRow {
  double sweep_value = 0.0;
  std::string design;
  int trial = 0;
  std::uint64_t seed = 0;
  int num_users = 0;
  double sum_rate = 0.0;
  double avg_rate = 0.0;
  std::vector<double> sinrs;
  double tx_power = 0.0;
  int iterations = 0;
  std::string status = "ok";
};

struct AggregateRow {
  double sweep_value = 0.0;
  std::string design;
  int count = 0;
  double mean_sum_rate = 0.0;
  double stderr_sum_rate = 0.0;
  double mean_avg_rate = 0.0;
  double stderr_avg_rate = 0.0;
};

struct GainRow {
  int trial = 0;
  std::uint64_t seed = 0;
  double mux_capa_zf = 0.0;
  double mux_spda_zf = 0.0;
  double gain_capa = 0.0;
  double gain_spda = 0.0;
  double gain_ratio = 0.0;
};

struct ExperimentOutput {
  std::vector<ResultRow> rows;
  std::vector<AggregateRow> aggregates;
  std::vector<TraceRow> trace;   // convergence runs
  std::vector<GainRow> gains;    // gain runs
  double wall_ms = 0.0;
  bool ok = true;                // false when any row errored
};

/// Per-trial seed: splitmix64 of the base seed combined with the trial
/// index, so all designs and sweep values share scenarios within a trial.
std::uint64_t trial_seed(std::uint64_t base_seed, int trial_index);

/// Build the trial scenario for a sweep cell (power budget and aperture
/// depend on the sweep kind).
Scenario scenario_for_trial(const ExperimentConfig& config, double sweep_value,
                            int trial_index);

/// Evaluate one design on one scenario. Never throws; errors land in the
/// returned row's status.
ResultRow evaluate_design(Design design, const Scenario& scenario,
                          const QuadratureGrid& grid,
                          const ExperimentConfig& config);

ExperimentOutput run_power_sweep(const ExperimentConfig& config);
ExperimentOutput run_aperture_sweep(const ExperimentConfig& config);
ExperimentOutput run_user_sweep(const ExperimentConfig& config);
/// Single-scenario bound trace; base_seed names the scenario directly.
ExperimentOutput run_convergence(const ExperimentConfig& config);
ExperimentOutput run_gain_analysis(const ExperimentConfig& config);

/// Dispatch on config.sweep.
ExperimentOutput run_experiment(const ExperimentConfig& config);

/// Write the run to disk: RFC 4180 CSV at out_path (rows, trace or gains
/// depending on the sweep), aggregates at out_path + ".agg.csv" when
/// applicable, and metadata JSON at out_path + ".meta.json".
void write_outputs(const ExperimentOutput& output,
                   const ExperimentConfig& config,
                   const std::string& out_path);

}  // namespace capa

#endif  // CAPA_EXPERIMENT_HPP
