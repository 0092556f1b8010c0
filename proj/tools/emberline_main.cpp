// emberline command-line interface: run simulations, calibrate spread
// parameters, benchmark the engine, and exercise the fire-suppression RL
// environment. Exit codes: 0 success, 1 usage error, 2 input/file error,
// 3 numerical failure.
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "emberline/calibrate.hpp"
#include "emberline/engine.hpp"
#include "emberline/errors.hpp"
#include "emberline/geodata.hpp"
#include "emberline/grid.hpp"
#include "emberline/reference.hpp"
#include "emberline/reinforce.hpp"
#include "emberline/rl_env.hpp"
#include "emberline/snapshot.hpp"

namespace fs = std::filesystem;
using namespace emberline;

namespace {

// ---------------------------------------------------------------- shared env

struct EnvOptions {
  std::string kind = "synthetic";  // synthetic | files
  int height = 64;
  int width = 64;
  double forest_density = 0.7;
  double elevation_roughness = 1.0;
  double cellsize = 30.0;
  double wind_speed = 1.0;
  double wind_direction = 0.0;
  std::string dem_path;
  std::string landcover_path;
  std::string fuel_table_path;
  std::vector<std::string> ignite;  // "row,col"; empty = grid center
  std::uint64_t seed = 1;
};

GridState build_environment(const EnvOptions& o) {
  if (o.kind == "synthetic") {
    SyntheticOptions s;
    s.forest_density = o.forest_density;
    s.elevation_roughness = o.elevation_roughness;
    s.cellsize = o.cellsize;
    s.wind_speed = o.wind_speed;
    s.wind_direction = o.wind_direction;
    return synthetic_environment(o.height, o.width, o.seed, s);
  }
  if (o.dem_path.empty() || o.landcover_path.empty()) {
    throw std::invalid_argument("--env files requires --dem and --landcover");
  }
  const Raster dem = parse_ascii_grid_file(o.dem_path);
  const Raster landcover = parse_ascii_grid_file(o.landcover_path);
  const FuelTable table = o.fuel_table_path.empty() ? default_worldcover_table()
                                                    : parse_fuel_table_file(o.fuel_table_path);
  return grid_from_rasters(dem, landcover, table, o.wind_speed, o.wind_direction);
}

CellIndex parse_cell(const std::string& spec, int height, int width) {
  const auto comma = spec.find(',');
  if (comma == std::string::npos) {
    throw std::invalid_argument("ignition '" + spec + "' is not of the form row,col");
  }
  CellIndex cell;
  try {
    cell.row = std::stoi(spec.substr(0, comma));
    cell.col = std::stoi(spec.substr(comma + 1));
  } catch (const std::exception&) {
    throw std::invalid_argument("ignition '" + spec + "' is not of the form row,col");
  }
  if (cell.row < 0 || cell.row >= height || cell.col < 0 || cell.col >= width) {
    throw std::invalid_argument("ignition '" + spec + "' is outside the grid");
  }
  return cell;
}

// Resolves the ignition list (defaulting to the grid center) and returns the
// initial fire layer.
FireLayer initial_fire(int height, int width, std::vector<std::string>& ignite) {
  if (ignite.empty()) {
    ignite.push_back(std::to_string(height / 2) + "," + std::to_string(width / 2));
  }
  FireLayer fire(height, width, FireState::Unburned);
  for (const auto& spec : ignite) {
    const CellIndex cell = parse_cell(spec, height, width);
    fire(cell.row, cell.col) = FireState::Burning;
  }
  return fire;
}

void add_env_options(CLI::App* cmd, EnvOptions& env) {
  cmd->add_option("--env", env.kind, "environment source: synthetic or files")
      ->check(CLI::IsMember({"synthetic", "files"}));
  cmd->add_option("--height", env.height, "synthetic grid height");
  cmd->add_option("--width", env.width, "synthetic grid width");
  cmd->add_option("--forest-density", env.forest_density, "synthetic burnable-cell fraction");
  cmd->add_option("--elevation-roughness", env.elevation_roughness, "synthetic terrain roughness");
  cmd->add_option("--cellsize", env.cellsize, "synthetic cell size in meters");
  cmd->add_option("--wind-speed", env.wind_speed, "uniform wind speed");
  cmd->add_option("--wind-direction", env.wind_direction,
                  "wind direction in radians, from east counter-clockwise");
  cmd->add_option("--dem", env.dem_path, "DEM raster (ESRI ASCII grid)");
  cmd->add_option("--landcover", env.landcover_path, "landcover raster (ESRI ASCII grid)");
  cmd->add_option("--fuel-table", env.fuel_table_path, "fuel table file (default: built-in)");
  cmd->add_option("--ignite", env.ignite, "ignition cell row,col (repeatable; default center)");
  cmd->add_option("--seed", env.seed, "random seed");
}

void add_spread_options(CLI::App* cmd, SimConfig& cfg) {
  cmd->add_option("--p-base", cfg.p_base, "base propagation factor");
  cmd->add_option("--alpha-w1", cfg.alpha_w1, "wind speed influence");
  cmd->add_option("--alpha-w2", cfg.alpha_w2, "wind alignment influence");
  cmd->add_option("--alpha-s", cfg.alpha_s, "slope influence");
  cmd->add_option("--alpha-gamma", cfg.alpha_gamma, "ignition susceptibility scale");
  cmd->add_option("--p-continue", cfg.p_continue, "burning persistence probability");
}

// ------------------------------------------------------------------- run cmd

struct RunOptions {
  EnvOptions env;
  SimConfig spread;
  int steps = 200;
  std::string mode = "stochastic";
  bool record = false;
  std::string out_dir = "out";
  std::string manifest_path;  // replay source
};

Manifest run_manifest(const RunOptions& o) {
  Manifest m;
  m.set("command", "run");
  m.set("env", o.env.kind);
  if (o.env.kind == "synthetic") {
    m.set_int("height", o.env.height);
    m.set_int("width", o.env.width);
    m.set_double("forest_density", o.env.forest_density);
    m.set_double("elevation_roughness", o.env.elevation_roughness);
    m.set_double("cellsize", o.env.cellsize);
  } else {
    m.set("dem", o.env.dem_path);
    m.set("landcover", o.env.landcover_path);
    if (!o.env.fuel_table_path.empty()) m.set("fuel_table", o.env.fuel_table_path);
  }
  m.set_double("wind_speed", o.env.wind_speed);
  m.set_double("wind_direction", o.env.wind_direction);
  std::string ignitions;
  for (const auto& spec : o.env.ignite) {
    if (!ignitions.empty()) ignitions += ' ';
    ignitions += spec;
  }
  m.set("ignite", ignitions);
  m.set_uint("seed", o.env.seed);
  m.set_int("steps", o.steps);
  m.set("mode", o.mode);
  m.set_int("record", o.record ? 1 : 0);
  m.set_double("p_base", o.spread.p_base);
  m.set_double("alpha_w1", o.spread.alpha_w1);
  m.set_double("alpha_w2", o.spread.alpha_w2);
  m.set_double("alpha_s", o.spread.alpha_s);
  m.set_double("alpha_gamma", o.spread.alpha_gamma);
  m.set_double("p_continue", o.spread.p_continue);
  return m;
}

RunOptions options_from_manifest(const Manifest& m, std::string out_dir) {
  if (m.get("command") != "run") {
    throw FileError("manifest: expected command 'run', found '" + m.get("command") + "'");
  }
  RunOptions o;
  o.out_dir = std::move(out_dir);
  o.env.kind = m.get("env");
  if (o.env.kind == "synthetic") {
    o.env.height = static_cast<int>(m.get_int("height"));
    o.env.width = static_cast<int>(m.get_int("width"));
    o.env.forest_density = m.get_double("forest_density");
    o.env.elevation_roughness = m.get_double("elevation_roughness");
    o.env.cellsize = m.get_double("cellsize");
  } else {
    o.env.dem_path = m.get("dem");
    o.env.landcover_path = m.get("landcover");
    o.env.fuel_table_path = m.get_or("fuel_table", "");
  }
  o.env.wind_speed = m.get_double("wind_speed");
  o.env.wind_direction = m.get_double("wind_direction");
  {
    std::istringstream iss(m.get("ignite"));
    std::string tok;
    while (iss >> tok) o.env.ignite.push_back(tok);
  }
  o.env.seed = m.get_uint("seed");
  o.steps = static_cast<int>(m.get_int("steps"));
  o.mode = m.get("mode");
  o.record = m.get_int("record") != 0;
  o.spread.p_base = m.get_double("p_base");
  o.spread.alpha_w1 = m.get_double("alpha_w1");
  o.spread.alpha_w2 = m.get_double("alpha_w2");
  o.spread.alpha_s = m.get_double("alpha_s");
  o.spread.alpha_gamma = m.get_double("alpha_gamma");
  o.spread.p_continue = m.get_double("p_continue");
  return o;
}

// Discrete view of a continuous state for snapshot export: per-cell argmax of
// the probability triple (ties prefer unburned, then burning).
FireLayer argmax_fire(const ContinuousState& s) {
  FireLayer fire(s.height(), s.width());
  for (int i = 0; i < fire.size(); ++i) {
    FireState best = FireState::Unburned;
    double best_p = s.p_un[i];
    if (s.p_burn[i] > best_p) {
      best = FireState::Burning;
      best_p = s.p_burn[i];
    }
    if (s.p_bd[i] > best_p) best = FireState::Burned;
    fire[i] = best;
  }
  return fire;
}

std::string step_file_name(int t) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "step_%06d.snap", t);
  return buf;
}

void print_fractions(const FireFractions& f) {
  std::cout << "unburned " << format_double_exact(f.unburned) << " burning "
            << format_double_exact(f.burning) << " burned " << format_double_exact(f.burned)
            << "\n";
}

int cmd_run(RunOptions o) {
  if (!o.manifest_path.empty()) {
    o = options_from_manifest(read_manifest_file(o.manifest_path), o.out_dir);
  }
  if (o.steps < 0) throw std::invalid_argument("--steps must be >= 0");
  const GridState grid = build_environment(o.env);
  const FireLayer fire0 = initial_fire(grid.height(), grid.width(), o.env.ignite);

  fs::create_directories(o.out_dir);
  FireFractions fractions;
  if (o.mode == "stochastic") {
    const RngKey key{o.env.seed, 0, 0};
    const StochasticRun run = run_stochastic(fire0, grid, o.spread, key, o.steps, o.record);
    if (o.record) {
      for (std::size_t t = 0; t < run.trajectory.size(); ++t) {
        write_snapshot_file(Snapshot{run.trajectory[t], t, std::nullopt},
                            (fs::path(o.out_dir) / step_file_name(static_cast<int>(t))).string());
      }
    }
    write_snapshot_file(Snapshot{run.final_state, static_cast<std::uint64_t>(o.steps), std::nullopt},
                        (fs::path(o.out_dir) / "final.snap").string());
    fractions = fire_fraction_stats(run.final_state);
  } else {
    const ContinuousState initial = state_from_fire(fire0);
    const DeterministicRun<double> run =
        run_deterministic(initial, grid, o.spread, o.steps, o.record);
    if (o.record) {
      for (std::size_t t = 0; t < run.trajectory.size(); ++t) {
        write_snapshot_file(Snapshot{argmax_fire(run.trajectory[t]), t, std::nullopt},
                            (fs::path(o.out_dir) / step_file_name(static_cast<int>(t))).string());
      }
    }
    write_snapshot_file(
        Snapshot{argmax_fire(run.final_state), static_cast<std::uint64_t>(o.steps), std::nullopt},
        (fs::path(o.out_dir) / "final.snap").string());
    fractions = fire_fraction_stats(run.final_state);
  }
  write_manifest_file(run_manifest(o), (fs::path(o.out_dir) / "manifest.txt").string());
  print_fractions(fractions);
  std::cerr << "wrote " << o.out_dir << "/final.snap and " << o.out_dir << "/manifest.txt\n";
  return 0;
}

// ------------------------------------------------------------- calibrate cmd

struct CalibrateOptions {
  EnvOptions env;
  SimConfig init;
  std::string target_path;
  int horizon = 20;
  int iterations = 100;
  LossConfig loss;
  std::string out_dir = "out";
  bool self_test = false;
  int self_test_iterations = 300;
};

int cmd_calibrate(CalibrateOptions o) {
  if (o.self_test) {
    const SelfCalibrationReport report = run_self_calibration(o.env.seed, o.self_test_iterations);
    std::cout << "initial_loss " << format_double_exact(report.initial_loss) << "\n";
    std::cout << "final_loss " << format_double_exact(report.final_loss) << "\n";
    std::cout << "iou " << format_double_exact(report.iou_value) << "\n";
    for (std::size_t i = 0; i < kParamCount; ++i) {
      std::cout << param_name(i) << " true " << format_double_exact(report.true_theta[i])
                << " recovered " << format_double_exact(report.recovered_theta[i]) << "\n";
    }
    const bool ok = report.final_loss < 0.1 * report.initial_loss && report.iou_value > 0.8;
    std::cout << "self_test " << (ok ? "pass" : "fail") << "\n";
    if (!ok) throw NumericalError("self-calibration failed to recover the synthetic target");
    return 0;
  }

  if (o.target_path.empty()) {
    throw std::invalid_argument("calibrate requires --target (or --self-test)");
  }
  const GridState grid = build_environment(o.env);
  const FireLayer fire0 = initial_fire(grid.height(), grid.width(), o.env.ignite);

  const Raster mask_raster = parse_ascii_grid_file(o.target_path);
  CalibrationTarget target;
  target.burn_mask = model_grid(mask_raster);
  target.horizon = o.horizon;

  CalibrationOptions copts;
  copts.iterations = o.iterations;
  copts.init_theta = params_of(o.init);

  const ContinuousState initial = state_from_fire(fire0);
  const CalibrationResult result = calibrate(grid, initial, target, o.loss, copts);

  fs::create_directories(o.out_dir);
  {
    std::ofstream log((fs::path(o.out_dir) / "loss_log.txt").string());
    log << "# iter loss p_base alpha_w1 alpha_w2 alpha_s alpha_gamma p_continue\n";
    for (std::size_t i = 0; i < result.loss_history.size(); ++i) {
      log << i << ' ' << format_double_exact(result.loss_history[i]);
      for (double v : result.theta_history[i]) log << ' ' << format_double_exact(v);
      log << '\n';
    }
  }

  const auto final_run = run_deterministic(initial, grid,
                                           config_from_params(result.best_theta), o.horizon);
  const double final_iou = iou(threshold_mask(burn_probability_map(final_run.final_state)),
                               threshold_mask(target.burn_mask));

  Manifest summary;
  summary.set("command", "calibrate");
  summary.set_int("iterations", o.iterations);
  summary.set_int("horizon", o.horizon);
  summary.set_double("initial_loss", result.initial_loss);
  summary.set_double("best_loss", result.best_loss);
  summary.set_double("iou", final_iou);
  for (std::size_t i = 0; i < kParamCount; ++i) {
    summary.set_double(param_name(i), result.best_theta[i]);
  }
  write_manifest_file(summary, (fs::path(o.out_dir) / "calibration_summary.txt").string());

  std::cout << "initial_loss " << format_double_exact(result.initial_loss) << "\n";
  std::cout << "best_loss " << format_double_exact(result.best_loss) << "\n";
  std::cout << "iou " << format_double_exact(final_iou) << "\n";
  std::cerr << "wrote " << o.out_dir << "/loss_log.txt and " << o.out_dir
            << "/calibration_summary.txt\n";
  return 0;
}

// ------------------------------------------------------------- benchmark cmd

struct BenchmarkOptions {
  std::vector<int> grid_sizes = {32, 64};
  std::vector<int> batch_sizes = {1, 16};
  int steps = 200;
  int repeats = 3;
  std::string mode = "stochastic";
  std::uint64_t seed = 1;
};

struct Timing {
  double mean = 0.0;
  double stddev = 0.0;
};

Timing stats_of(const std::vector<double>& xs) {
  Timing t;
  for (double x : xs) t.mean += x;
  t.mean /= static_cast<double>(xs.size());
  double var = 0.0;
  for (double x : xs) var += (x - t.mean) * (x - t.mean);
  t.stddev = std::sqrt(var / static_cast<double>(xs.size()));
  return t;
}

int cmd_benchmark(const BenchmarkOptions& o) {
  if (o.steps < 1 || o.repeats < 1) {
    throw std::invalid_argument("--steps and --repeats must be >= 1");
  }
  using clock = std::chrono::steady_clock;
  std::printf("# impl grid batch mode steps_per_s_mean steps_per_s_std cell_steps_per_s\n");
  std::printf("# deterministic rows never touch the RNG; stochastic rows include RNG cost\n");
  for (const int size : o.grid_sizes) {
    SyntheticOptions sopts;
    sopts.forest_density = 1.0;
    const GridState grid = synthetic_environment(size, size, o.seed, sopts);
    FireLayer fire0(size, size, FireState::Unburned);
    fire0(size / 2, size / 2) = FireState::Burning;
    const SimConfig cfg;
    const double cells = static_cast<double>(size) * size;

    for (const int batch_size : o.batch_sizes) {
      auto run_engine = [&]() -> double {  // seconds per timed run
        const auto t0 = clock::now();
        if (o.mode == "stochastic") {
          StochasticBatch batch = make_stochastic_batch(fire0, batch_size, o.seed);
          const SpreadTables<double> tables(grid, cfg);
          for (int t = 0; t < o.steps; ++t) step_batch(batch, tables, cfg);
        } else {
          DeterministicBatch batch;
          batch.members.assign(static_cast<std::size_t>(batch_size), state_from_fire(fire0));
          const SpreadTables<double> tables(grid, cfg);
          for (int t = 0; t < o.steps; ++t) step_batch(batch, tables, cfg);
        }
        return std::chrono::duration<double>(clock::now() - t0).count();
      };
      run_engine();  // warm-up
      std::vector<double> sps;
      for (int rep = 0; rep < o.repeats; ++rep) sps.push_back(o.steps / run_engine());
      const Timing t = stats_of(sps);
      std::printf("engine %d %d %s %.1f %.1f %.3e\n", size, batch_size, o.mode.c_str(), t.mean,
                  t.stddev, t.mean * cells * batch_size);
    }

    // Serial reference, batch 1, for comparison with the engine rows.
    auto run_reference = [&]() -> double {
      const auto t0 = clock::now();
      if (o.mode == "stochastic") {
        FireLayer fire = fire0;
        for (int t = 0; t < o.steps; ++t) {
          fire = reference_step_stochastic(fire, grid, cfg,
                                           RngKey{o.seed, static_cast<std::uint64_t>(t), 0});
        }
      } else {
        ContinuousState state = state_from_fire(fire0);
        for (int t = 0; t < o.steps; ++t) state = reference_step_deterministic(state, grid, cfg);
      }
      return std::chrono::duration<double>(clock::now() - t0).count();
    };
    run_reference();  // warm-up
    std::vector<double> sps;
    for (int rep = 0; rep < o.repeats; ++rep) sps.push_back(o.steps / run_reference());
    const Timing t = stats_of(sps);
    std::printf("reference %d 1 %s %.1f %.1f %.3e\n", size, o.mode.c_str(), t.mean, t.stddev,
                t.mean * cells);
  }
  return 0;
}

// --------------------------------------------------------------- rl-demo cmd

struct RlDemoOptions {
  std::string preset = "default";
  std::string policy = "heuristic";
  int episodes = 200;       // evaluation episodes (training episodes for --policy train)
  int eval_episodes = 100;  // evaluation episodes after training
  double lr = 0.005;
  double discount = 0.98;
  std::uint64_t seed = 1;
  std::string trace_dir;
  int height = 0;  // 0 = keep preset value
  int width = 0;
  int capacity = 0;
  int max_steps = 0;
};

void print_stats(const EpisodeStats& stats, int episodes) {
  std::cout << "episodes " << episodes << "\n";
  std::cout << "mean_return " << format_double_exact(stats.mean_return) << "\n";
  std::cout << "std_return " << format_double_exact(stats.std_return) << "\n";
  std::cout << "success_rate " << format_double_exact(stats.success_rate) << "\n";
  std::cout << "mean_steps " << format_double_exact(stats.mean_steps) << "\n";
}

void write_trace(const FireSuppressionEnv& env, const PolicyFn& policy, std::uint64_t seed,
                 const std::string& dir) {
  std::vector<EnvState> trace;
  run_episode(env, policy, seed, 0, &trace);
  fs::create_directories(dir);
  for (std::size_t t = 0; t < trace.size(); ++t) {
    Snapshot snap{trace[t].fire, static_cast<std::uint64_t>(trace[t].step),
                  AgentMark{trace[t].agent, trace[t].water}};
    write_snapshot_file(snap, (fs::path(dir) / step_file_name(static_cast<int>(t))).string());
  }
  std::cerr << "wrote " << trace.size() << " trace snapshots to " << dir << "\n";
}

int cmd_rl_demo(const RlDemoOptions& o) {
  EnvConfig cfg = o.preset == "smoke10" ? smoke10_preset() : default_preset();
  if (o.height > 0) cfg.height = o.height;
  if (o.width > 0) cfg.width = o.width;
  if (o.capacity > 0) cfg.water_capacity = o.capacity;
  if (o.max_steps > 0) cfg.max_episode_steps = o.max_steps;
  const FireSuppressionEnv env(cfg);

  if (o.policy == "heuristic" || o.policy == "random") {
    PolicyFn policy;
    if (o.policy == "heuristic") {
      policy = [](const FireSuppressionEnv&, const EnvState& s, const Observation&) {
        return heuristic_policy(s);
      };
    } else {
      policy = [](const FireSuppressionEnv&, const EnvState& s, const Observation&) {
        return random_policy(RngKey{s.seed, static_cast<std::uint64_t>(s.step), s.stream});
      };
    }
    const EpisodeStats stats = run_batch_episodes(env, policy, o.episodes, o.seed);
    std::cout << "policy " << o.policy << "\n";
    print_stats(stats, o.episodes);
    if (!o.trace_dir.empty()) write_trace(env, policy, o.seed, o.trace_dir);
    return 0;
  }

  if (o.policy != "train") throw std::invalid_argument("--policy must be random, heuristic or train");
  ReinforceOptions ropts;
  ropts.episodes = o.episodes;
  ropts.lr = o.lr;
  ropts.discount = o.discount;
  ropts.seed = o.seed;
  const SoftmaxPolicy init(observation_size(cfg));
  const ReinforceResult trained = train_reinforce(env, init, ropts);
  std::cout << "policy train\n";
  std::cout << "train_episodes " << o.episodes << "\n";
  if (!trained.returns.empty()) {
    const std::size_t decile = std::max<std::size_t>(1, trained.returns.size() / 10);
    double first = 0.0;
    double last = 0.0;
    for (std::size_t i = 0; i < decile; ++i) {
      first += trained.returns[i];
      last += trained.returns[trained.returns.size() - decile + i];
    }
    std::cout << "first_decile_mean " << format_double_exact(first / decile) << "\n";
    std::cout << "final_decile_mean " << format_double_exact(last / decile) << "\n";
  }
  // Evaluate the trained policy on fresh streams.
  const PolicyFn policy = sampling_policy(trained.policy);
  const EpisodeStats stats =
      run_batch_episodes(env, policy, o.eval_episodes, o.seed, 1u << 20);
  print_stats(stats, o.eval_episodes);
  if (!o.trace_dir.empty()) write_trace(env, policy, o.seed, o.trace_dir);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"emberline: batched wildfire-spread simulation, calibration and RL toolkit"};
  app.require_subcommand(1);

  RunOptions run_opts;
  CLI::App* run = app.add_subcommand("run", "simulate fire spread and write snapshots");
  add_env_options(run, run_opts.env);
  add_spread_options(run, run_opts.spread);
  run->add_option("--steps", run_opts.steps, "number of simulation steps");
  run->add_option("--mode", run_opts.mode, "update mode")
      ->check(CLI::IsMember({"stochastic", "deterministic"}));
  run->add_flag("--record", run_opts.record, "write the full trajectory");
  run->add_option("--out-dir", run_opts.out_dir, "output directory");
  run->add_option("--manifest", run_opts.manifest_path, "replay a recorded manifest");

  CalibrateOptions cal_opts;
  cal_opts.env.height = 32;
  cal_opts.env.width = 32;
  CLI::App* cal = app.add_subcommand("calibrate", "fit spread parameters to a burn mask");
  add_env_options(cal, cal_opts.env);
  add_spread_options(cal, cal_opts.init);
  cal->add_option("--target", cal_opts.target_path, "observed burn mask (ASCII grid of 0/1)");
  cal->add_option("--horizon", cal_opts.horizon, "steps to the observation time");
  cal->add_option("--iterations", cal_opts.iterations, "Adam iterations");
  cal->add_option("--bce-weight", cal_opts.loss.bce_weight, "BCE term weight");
  cal->add_option("--mse-weight", cal_opts.loss.mse_weight, "pooled-MSE term weight");
  cal->add_option("--pool-size", cal_opts.loss.pool_size, "average-pooling window");
  cal->add_option("--bce-epsilon", cal_opts.loss.bce_epsilon, "BCE clamp epsilon");
  cal->add_option("--out-dir", cal_opts.out_dir, "output directory");
  cal->add_flag("--self-test", cal_opts.self_test, "run the synthetic recovery check");
  cal->add_option("--self-test-iterations", cal_opts.self_test_iterations,
                  "iteration budget for --self-test");

  BenchmarkOptions bench_opts;
  CLI::App* bench = app.add_subcommand("benchmark", "measure stepping throughput");
  bench->add_option("--grid-sizes", bench_opts.grid_sizes, "square grid sizes");
  bench->add_option("--batch-sizes", bench_opts.batch_sizes, "batch sizes");
  bench->add_option("--steps", bench_opts.steps, "steps per timed run");
  bench->add_option("--repeats", bench_opts.repeats, "timed runs per row");
  bench->add_option("--mode", bench_opts.mode, "update mode")
      ->check(CLI::IsMember({"stochastic", "deterministic"}));
  bench->add_option("--seed", bench_opts.seed, "random seed");

  RlDemoOptions rl_opts;
  CLI::App* rl = app.add_subcommand("rl-demo", "fire-suppression environment demo");
  rl->add_option("--preset", rl_opts.preset, "environment preset")
      ->check(CLI::IsMember({"default", "smoke10"}));
  rl->add_option("--policy", rl_opts.policy, "random, heuristic or train")
      ->check(CLI::IsMember({"random", "heuristic", "train"}));
  rl->add_option("--episodes", rl_opts.episodes,
                 "evaluation episodes (training episodes for --policy train)");
  rl->add_option("--eval-episodes", rl_opts.eval_episodes, "post-training evaluation episodes");
  rl->add_option("--lr", rl_opts.lr, "REINFORCE learning rate");
  rl->add_option("--discount", rl_opts.discount, "REINFORCE discount factor");
  rl->add_option("--seed", rl_opts.seed, "random seed");
  rl->add_option("--trace-dir", rl_opts.trace_dir, "write one episode trace here");
  rl->add_option("--height", rl_opts.height, "override grid height");
  rl->add_option("--width", rl_opts.width, "override grid width");
  rl->add_option("--capacity", rl_opts.capacity, "override water capacity");
  rl->add_option("--max-steps", rl_opts.max_steps, "override episode step limit");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (*run) return cmd_run(run_opts);
    if (*cal) return cmd_calibrate(cal_opts);
    if (*bench) return cmd_benchmark(bench_opts);
    if (*rl) return cmd_rl_demo(rl_opts);
  } catch (const FileError& e) {
    std::cerr << "file error: " << e.what() << "\n";
    return 2;
  } catch (const NumericalError& e) {
    std::cerr << "numerical error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
