// SPDX-License-Identifier: Apache-2.0
//
// capa-beam: multi-user beamforming for continuous-aperture arrays

#include "capa/experiment.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <future>
#include <stdexcept>
#include <thread>

#include <json.hpp>

#include "capa/kernels.hpp"
#include "capa/power_alloc.hpp"

namespace capa {

namespace {

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

std::string join_sinrs(const std::vector<double>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) s += ';';
    s += fmt(v[i]);
  }
  return s;
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

bool is_spda(Design d) {
  return d == Design::spda_mrt || d == Design::spda_zf ||
         d == Design::spda_mmse || d == Design::spda_optimal;
}

bool is_optimal(Design d) {
  return d == Design::optimal || d == Design::spda_optimal;
}

// Heuristic design on a Gram matrix: unit-power directions, waterfilled
// powers, columns rescaled.
BeamCoefficients heuristic_design(Design d, const CorrelationMatrix& Q,
                                  double power_budget, double noise_power) {
  const int K = Q.num_users();
  const PowerVector ones = PowerVector::Ones(K);
  BeamCoefficients dirs;
  switch (d) {
    case Design::mrt:
    case Design::spda_mrt:
      dirs = mrt(Q, ones);
      break;
    case Design::zf:
    case Design::spda_zf:
      dirs = zf(Q, ones);
      break;
    case Design::mmse:
    case Design::spda_mmse:
      dirs = mmse(Q, power_budget, noise_power, ones);
      break;
    default:
      throw std::logic_error("heuristic_design: not a heuristic design");
  }
  const Eigen::VectorXd g = effective_gains(Q, dirs);
  const PowerVector p = waterfill_sum_rate(g, noise_power, power_budget);
  for (int k = 0; k < K; ++k) dirs.A.col(k) *= std::sqrt(p(k));
  return dirs;
}

void aggregate(ExperimentOutput& out) {
  // Grouped by (sweep value, design), preserving first-seen order.
  struct Acc {
    double value;
    std::string design;
    std::vector<double> sums, avgs;
  };
  std::vector<Acc> accs;
  for (const auto& r : out.rows) {
    if (r.status != "ok") continue;
    Acc* a = nullptr;
    for (auto& cand : accs)
      if (cand.value == r.sweep_value && cand.design == r.design) {
        a = &cand;
        break;
      }
    if (!a) {
      accs.push_back({r.sweep_value, r.design, {}, {}});
      a = &accs.back();
    }
    a->sums.push_back(r.sum_rate);
    a->avgs.push_back(r.avg_rate);
  }
  for (const auto& a : accs) {
    const auto stats = [](const std::vector<double>& v) {
      const double n = static_cast<double>(v.size());
      double mean = 0.0;
      for (double x : v) mean += x;
      mean /= n;
      double var = 0.0;
      for (double x : v) var += (x - mean) * (x - mean);
      const double se = v.size() > 1 ? std::sqrt(var / (n * (n - 1))) : 0.0;
      return std::pair<double, double>(mean, se);
    };
    const auto [ms, ses] = stats(a.sums);
    const auto [ma, sea] = stats(a.avgs);
    out.aggregates.push_back({a.value, a.design,
                              static_cast<int>(a.sums.size()), ms, ses, ma,
                              sea});
  }
}

ExperimentOutput run_sweep(const ExperimentConfig& config) {
  config.validate();
  const auto t0 = std::chrono::steady_clock::now();
  ExperimentOutput out;

  const int workers = config.workers > 0
                          ? config.workers
                          : static_cast<int>(std::max(
                                1u, std::thread::hardware_concurrency()));

  // One task per trial; each covers every sweep value and design, so the
  // designs see identical scenarios (paired comparison).
  std::vector<std::future<std::vector<ResultRow>>> futures;
  futures.reserve(static_cast<std::size_t>(config.trials));
  std::atomic<int> next_trial{0};

  const auto run_trial = [&config](int trial) {
    std::vector<ResultRow> rows;
    for (double value : config.grid) {
      const Scenario sc = scenario_for_trial(config, value, trial);
      const QuadratureGrid grid =
          build_grid(sc.aperture, config.quad_order_x, config.quad_order_y);
      for (Design d : config.designs) {
        ResultRow r = evaluate_design(d, sc, grid, config);
        r.sweep_value = value;
        r.trial = trial;
        rows.push_back(std::move(r));
      }
    }
    return rows;
  };

  // Small fixed worker pool with deterministic (trial-index) merge order.
  std::vector<std::vector<ResultRow>> per_trial(
      static_cast<std::size_t>(config.trials));
  {
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (;;) {
          const int t = next_trial.fetch_add(1);
          if (t >= config.trials) return;
          per_trial[static_cast<std::size_t>(t)] = run_trial(t);
        }
      });
    }
    for (auto& th : pool) th.join();
  }
  for (auto& rows : per_trial)
    for (auto& r : rows) {
      if (r.status != "ok" && r.status.rfind("skipped", 0) != 0)
        out.ok = false;
      out.rows.push_back(std::move(r));
    }

  aggregate(out);
  out.wall_ms = std::chrono::duration<double, std::milli>(
                    std::chrono::steady_clock::now() - t0)
                    .count();
  return out;
}

}  // namespace

std::string design_name(Design d) {
  switch (d) {
    case Design::mrt: return "mrt";
    case Design::zf: return "zf";
    case Design::mmse: return "mmse";
    case Design::optimal: return "optimal";
    case Design::spda_mrt: return "spda-mrt";
    case Design::spda_zf: return "spda-zf";
    case Design::spda_mmse: return "spda-mmse";
    case Design::spda_optimal: return "spda-optimal";
  }
  return "?";
}

Design design_from_name(const std::string& name) {
  for (Design d : {Design::mrt, Design::zf, Design::mmse, Design::optimal,
                   Design::spda_mrt, Design::spda_zf, Design::spda_mmse,
                   Design::spda_optimal})
    if (design_name(d) == name) return d;
  throw std::invalid_argument("unknown design '" + name + "'");
}

void ExperimentConfig::validate() const {
  if (sweep != "power" && sweep != "aperture" && sweep != "users" &&
      sweep != "convergence" && sweep != "gains")
    throw std::invalid_argument("config: unknown sweep kind '" + sweep + "'");
  if (trials < 1) throw std::invalid_argument("config: trials must be >= 1");
  const bool needs_grid =
      sweep == "power" || sweep == "aperture" || sweep == "users";
  if (needs_grid && grid.empty())
    throw std::invalid_argument("config: empty sweep grid");
  if (needs_grid && designs.empty())
    throw std::invalid_argument("config: no designs selected");
  if (quad_order_x < 1 || quad_order_y < 1)
    throw std::invalid_argument("config: quadrature orders must be >= 1");
  if (num_users < 1)
    throw std::invalid_argument("config: num_users must be >= 1");
}

std::uint64_t trial_seed(std::uint64_t base_seed, int trial_index) {
  return splitmix64(base_seed ^
                    (0x9e3779b97f4a7c15ULL *
                     (static_cast<std::uint64_t>(trial_index) + 1)));
}

Scenario scenario_for_trial(const ExperimentConfig& config, double sweep_value,
                            int trial_index) {
  double area = config.aperture_area;
  double budget = config.power_budget;
  int users = config.num_users;
  if (config.sweep == "power") {
    budget = sweep_value;
  } else if (config.sweep == "aperture") {
    area = sweep_value;
  } else if (config.sweep == "users") {
    users = static_cast<int>(sweep_value);
    budget = users * config.user_power;
  }
  const double side = std::sqrt(area);
  const double wavelength = kSpeedOfLight / config.frequency_hz;
  return random_scenario(trial_seed(config.base_seed, trial_index), users,
                         config.region, Aperture{side, side}, wavelength,
                         config.noise_power, budget);
}

ResultRow evaluate_design(Design design, const Scenario& scenario,
                          const QuadratureGrid& grid,
                          const ExperimentConfig& config) {
  ResultRow row;
  row.design = design_name(design);
  row.seed = scenario.seed;
  row.num_users = scenario.num_users();
  try {
    if (is_optimal(design) && scenario.num_users() > 3 &&
        !config.allow_large_optimal) {
      row.status = "skipped: optimal design guarded to K <= 3";
      return row;
    }

    CorrelationMatrix Q;
    if (is_spda(design)) {
      const SpdaArray arr =
          make_spda_array(scenario.aperture, scenario.wavelength);
      Q = spda_gram(spda_channels(arr, scenario));
    } else {
      Q = correlation_matrix(grid, sample_channel(grid, scenario));
    }

    BeamCoefficients A;
    if (is_optimal(design)) {
      const PolyblockResult r =
          polyblock_maximize(Q, scenario.noise_power, scenario.power_budget,
                             sum_rate_utility(), config.optimizer);
      A = r.A;
      row.iterations = r.iterations;
      if (!r.converged) row.status = "not-converged";
    } else {
      A = heuristic_design(design, Q, scenario.power_budget,
                           scenario.noise_power);
    }

    const SinrVector gamma = sinr(Q, A, scenario.noise_power);
    row.sum_rate = sum_rate(gamma);
    row.avg_rate = average_rate(gamma);
    row.sinrs.assign(gamma.data(), gamma.data() + gamma.size());
    row.tx_power = transmit_power(Q, A);
  } catch (const std::exception& e) {
    row.status = std::string("error: ") + e.what();
  }
  return row;
}

ExperimentOutput run_power_sweep(const ExperimentConfig& config) {
  return run_sweep(config);
}
ExperimentOutput run_aperture_sweep(const ExperimentConfig& config) {
  return run_sweep(config);
}
ExperimentOutput run_user_sweep(const ExperimentConfig& config) {
  return run_sweep(config);
}

ExperimentOutput run_convergence(const ExperimentConfig& config) {
  config.validate();
  const auto t0 = std::chrono::steady_clock::now();
  ExperimentOutput out;
  // A convergence trace is a single-scenario diagnostic, so the base seed
  // names the scenario directly instead of being hashed per trial.
  const double side = std::sqrt(config.aperture_area);
  const Scenario sc = random_scenario(
      config.base_seed, config.num_users, config.region, Aperture{side, side},
      kSpeedOfLight / config.frequency_hz, config.noise_power,
      config.power_budget);
  const QuadratureGrid grid =
      build_grid(sc.aperture, config.quad_order_x, config.quad_order_y);
  const CorrelationMatrix Q =
      correlation_matrix(grid, sample_channel(grid, sc));
  const PolyblockResult r =
      polyblock_maximize(Q, sc.noise_power, sc.power_budget,
                         sum_rate_utility(), config.optimizer);
  out.trace = r.trace;
  out.ok = r.converged;
  out.wall_ms = std::chrono::duration<double, std::milli>(
                    std::chrono::steady_clock::now() - t0)
                    .count();
  return out;
}

ExperimentOutput run_gain_analysis(const ExperimentConfig& config) {
  config.validate();
  const auto t0 = std::chrono::steady_clock::now();
  ExperimentOutput out;
  for (int trial = 0; trial < config.trials; ++trial) {
    GainRow g;
    g.trial = trial;
    g.seed = trial_seed(config.base_seed, trial);
    try {
      const Scenario base = scenario_for_trial(config, 0.0, trial);
      const QuadratureGrid grid =
          build_grid(base.aperture, config.quad_order_x, config.quad_order_y);
      const CorrelationMatrix Q =
          correlation_matrix(grid, sample_channel(grid, base));
      const SpdaArray arr = make_spda_array(base.aperture, base.wavelength);
      const Eigen::MatrixXcd H = spda_channels(arr, base);
      const CorrelationMatrix G = spda_gram(H);

      const auto rate_with = [&](const CorrelationMatrix& gram) {
        return [&, gram](double P) {
          const BeamCoefficients A =
              heuristic_design(Design::zf, gram, P, base.noise_power);
          return sum_rate(sinr(gram, A, base.noise_power));
        };
      };
      g.mux_capa_zf = multiplexing_gain_estimate(
          rate_with(Q), config.gain_power_lo, config.gain_power_hi);
      g.mux_spda_zf = multiplexing_gain_estimate(
          rate_with(G), config.gain_power_lo, config.gain_power_hi);
      g.gain_capa = beamforming_gain_capa(Q);
      g.gain_spda = beamforming_gain_spda(H);
      g.gain_ratio = g.gain_capa / g.gain_spda;
    } catch (const std::exception& e) {
      out.ok = false;
    }
    out.gains.push_back(g);
  }
  out.wall_ms = std::chrono::duration<double, std::milli>(
                    std::chrono::steady_clock::now() - t0)
                    .count();
  return out;
}

ExperimentOutput run_experiment(const ExperimentConfig& config) {
  config.validate();
  if (config.sweep == "power") return run_power_sweep(config);
  if (config.sweep == "aperture") return run_aperture_sweep(config);
  if (config.sweep == "users") return run_user_sweep(config);
  if (config.sweep == "convergence") return run_convergence(config);
  return run_gain_analysis(config);
}

ExperimentConfig config_from_json(const std::string& text) {
  const nlohmann::json j = nlohmann::json::parse(text);
  ExperimentConfig c;
  c.sweep = j.at("sweep");
  c.grid = j.value("grid", std::vector<double>{});
  c.trials = j.value("trials", c.trials);
  c.base_seed = j.value("seed", c.base_seed);
  c.quad_order_x = j.value("quad_order_x", c.quad_order_x);
  c.quad_order_y = j.value("quad_order_y", c.quad_order_y);
  for (const auto& name : j.value("designs", std::vector<std::string>{}))
    c.designs.push_back(design_from_name(name));
  c.num_users = j.value("users", c.num_users);
  c.aperture_area = j.value("aperture_area", c.aperture_area);
  c.frequency_hz = j.value("frequency_hz", c.frequency_hz);
  c.noise_power = j.value("noise_power", c.noise_power);
  c.power_budget = j.value("power_budget", c.power_budget);
  c.user_power = j.value("user_power", c.user_power);
  if (j.contains("region")) {
    const auto& r = j.at("region");
    c.region.ux = r.value("ux", c.region.ux);
    c.region.uy = r.value("uy", c.region.uy);
    c.region.z_min = r.value("z_min", c.region.z_min);
    c.region.z_max = r.value("z_max", c.region.z_max);
  }
  if (j.contains("optimizer")) {
    const auto& o = j.at("optimizer");
    c.optimizer.epsilon_gap = o.value("epsilon_gap", c.optimizer.epsilon_gap);
    c.optimizer.epsilon_bisect =
        o.value("epsilon_bisect", c.optimizer.epsilon_bisect);
    c.optimizer.max_iter = o.value("max_iter", c.optimizer.max_iter);
  }
  c.allow_large_optimal = j.value("allow_large_optimal", c.allow_large_optimal);
  c.gain_power_lo = j.value("gain_power_lo", c.gain_power_lo);
  c.gain_power_hi = j.value("gain_power_hi", c.gain_power_hi);
  c.workers = j.value("workers", c.workers);
  c.validate();
  return c;
}

std::string config_to_json(const ExperimentConfig& c) {
  nlohmann::json j;
  j["sweep"] = c.sweep;
  j["grid"] = c.grid;
  j["trials"] = c.trials;
  j["seed"] = c.base_seed;
  j["quad_order_x"] = c.quad_order_x;
  j["quad_order_y"] = c.quad_order_y;
  std::vector<std::string> names;
  for (Design d : c.designs) names.push_back(design_name(d));
  j["designs"] = names;
  j["users"] = c.num_users;
  j["aperture_area"] = c.aperture_area;
  j["frequency_hz"] = c.frequency_hz;
  j["noise_power"] = c.noise_power;
  j["power_budget"] = c.power_budget;
  j["user_power"] = c.user_power;
  j["region"] = {{"ux", c.region.ux},
                 {"uy", c.region.uy},
                 {"z_min", c.region.z_min},
                 {"z_max", c.region.z_max}};
  j["optimizer"] = {{"epsilon_gap", c.optimizer.epsilon_gap},
                    {"epsilon_bisect", c.optimizer.epsilon_bisect},
                    {"max_iter", c.optimizer.max_iter}};
  j["allow_large_optimal"] = c.allow_large_optimal;
  j["gain_power_lo"] = c.gain_power_lo;
  j["gain_power_hi"] = c.gain_power_hi;
  j["workers"] = c.workers;
  return j.dump(2);
}

void write_outputs(const ExperimentOutput& output,
                   const ExperimentConfig& config,
                   const std::string& out_path) {
  std::ofstream csv(out_path, std::ios::binary);
  if (!csv) throw std::runtime_error("cannot open output file " + out_path);

  if (config.sweep == "convergence") {
    csv << "n,u_max,u_min,vertex_count,wall_time_ms\r\n";
    for (const auto& t : output.trace)
      csv << t.iteration << ',' << fmt(t.upper_bound) << ','
          << fmt(t.lower_bound) << ',' << t.vertex_count << ','
          << fmt(t.wall_ms) << "\r\n";
  } else if (config.sweep == "gains") {
    csv << "trial,seed,mux_capa_zf,mux_spda_zf,g_capa,g_spda,g_ratio\r\n";
    for (const auto& g : output.gains)
      csv << g.trial << ',' << g.seed << ',' << fmt(g.mux_capa_zf) << ','
          << fmt(g.mux_spda_zf) << ',' << fmt(g.gain_capa) << ','
          << fmt(g.gain_spda) << ',' << fmt(g.gain_ratio) << "\r\n";
  } else {
    csv << "sweep,value,design,trial,seed,users,sum_rate,avg_rate,sinr,"
           "tx_power,iterations,status\r\n";
    for (const auto& r : output.rows) {
      csv << config.sweep << ',' << fmt(r.sweep_value) << ','
          << csv_field(r.design) << ',' << r.trial << ',' << r.seed << ','
          << r.num_users << ',' << fmt(r.sum_rate) << ',' << fmt(r.avg_rate)
          << ',' << csv_field(join_sinrs(r.sinrs)) << ',' << fmt(r.tx_power)
          << ',' << r.iterations << ',' << csv_field(r.status) << "\r\n";
    }
    std::ofstream agg(out_path + ".agg.csv", std::ios::binary);
    agg << "sweep,value,design,n,mean_sum_rate,stderr_sum_rate,"
           "mean_avg_rate,stderr_avg_rate\r\n";
    for (const auto& a : output.aggregates)
      agg << config.sweep << ',' << fmt(a.sweep_value) << ','
          << csv_field(a.design) << ',' << a.count << ','
          << fmt(a.mean_sum_rate) << ',' << fmt(a.stderr_sum_rate) << ','
          << fmt(a.mean_avg_rate) << ',' << fmt(a.stderr_avg_rate) << "\r\n";
  }

  nlohmann::json meta;
  meta["config"] = nlohmann::json::parse(config_to_json(config));
  meta["wall_ms"] = output.wall_ms;
  meta["ok"] = output.ok;
  meta["rows"] = output.rows.size();
  meta["kernel_backend"] = kernels::backend_name(kernels::active_backend());
  std::ofstream mf(out_path + ".meta.json", std::ios::binary);
  mf << meta.dump(2) << "\n";
}

}  // namespace capa
