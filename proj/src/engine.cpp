#include "emberline/engine.hpp"

#include <cmath>
#include <stdexcept>

namespace emberline {

namespace {

// Exactly one uniform draw per cell per step: a cell is either deciding
// ignition (Unburned) or continuation (Burning), never both.
FireState next_fire_cell(const FireLayer& fire, int i, int r, int c,
                         const SpreadTables<double>& tables, const SimConfig& cfg,
                         const RngKey& key) {
  const FireState s = fire[i];
  if (s == FireState::Burned) return FireState::Burned;
  const double u = rng_uniform(key, static_cast<std::uint64_t>(i), kDrawFireEvent);
  if (s == FireState::Burning) {
    return u < cfg.p_continue ? FireState::Burning : FireState::Burned;
  }
  const double lambda = table_intensity(
      r, c, [&](int rr, int cc) { return fire(rr, cc) == FireState::Burning ? 1.0 : 0.0; },
      tables);
  const double p_ignite = 1.0 - std::exp(-(tables.gamma(i) * lambda));
  return u < p_ignite ? FireState::Burning : FireState::Unburned;
}

void step_stochastic_into(const FireLayer& fire, FireLayer& next, const SpreadTables<double>& tables,
                          const SimConfig& cfg, const RngKey& key, Exec exec) {
  const int w = fire.width();
  const int n = fire.height() * w;
  if (exec == Exec::parallel) {
#pragma omp parallel for schedule(static)
    for (int i = 0; i < n; ++i) next[i] = next_fire_cell(fire, i, i / w, i % w, tables, cfg, key);
  } else {
    for (int i = 0; i < n; ++i) next[i] = next_fire_cell(fire, i, i / w, i % w, tables, cfg, key);
  }
}

}  // namespace

ContinuousState state_from_fire(const FireLayer& fire) {
  const int h = fire.height();
  const int w = fire.width();
  ContinuousState s{Grid<double>(h, w), Grid<double>(h, w), Grid<double>(h, w)};
  for (int i = 0; i < h * w; ++i) {
    s.p_un[i] = fire[i] == FireState::Unburned ? 1.0 : 0.0;
    s.p_burn[i] = fire[i] == FireState::Burning ? 1.0 : 0.0;
    s.p_bd[i] = fire[i] == FireState::Burned ? 1.0 : 0.0;
  }
  return s;
}

void validate_state(const ContinuousState& state, double tol) {
  const int h = state.height();
  const int w = state.width();
  if (state.p_burn.height() != h || state.p_burn.width() != w || state.p_bd.height() != h ||
      state.p_bd.width() != w) {
    throw std::invalid_argument("ContinuousState: component dimensions differ");
  }
  for (int i = 0; i < h * w; ++i) {
    const double un = state.p_un[i];
    const double burn = state.p_burn[i];
    const double bd = state.p_bd[i];
    if (!(un >= 0.0) || !(burn >= 0.0) || !(bd >= 0.0)) {
      throw std::invalid_argument("ContinuousState: negative or NaN component");
    }
    if (std::abs(un + burn + bd - 1.0) > tol) {
      throw std::invalid_argument("ContinuousState: cell probabilities do not sum to 1");
    }
  }
}

WindSchedule::WindSchedule(std::vector<WindField> winds) : winds_(std::move(winds)) {
  for (std::size_t i = 1; i < winds_.size(); ++i) {
    if (winds_[i].height() != winds_[0].height() || winds_[i].width() != winds_[0].width()) {
      throw std::invalid_argument("WindSchedule: wind field dimensions differ across steps");
    }
  }
}

const WindField& WindSchedule::at_step(std::uint64_t t) const {
  if (winds_.empty()) throw std::logic_error("WindSchedule::at_step on empty schedule");
  const std::uint64_t last = winds_.size() - 1;
  return winds_[t < last ? t : last];
}

FireLayer step_stochastic(const FireLayer& fire, const SpreadTables<double>& tables,
                          const SimConfig& cfg, const RngKey& key, Exec exec) {
  FireLayer next(fire.height(), fire.width());
  step_stochastic_into(fire, next, tables, cfg, key, exec);
  return next;
}

FireLayer step_stochastic(const FireLayer& fire, const GridState& grid, const SimConfig& cfg,
                          const RngKey& key, Exec exec) {
  const SpreadTables<double> tables(grid, cfg);
  return step_stochastic(fire, tables, cfg, key, exec);
}

StochasticRun run_stochastic(const FireLayer& initial, const GridState& grid, const SimConfig& cfg,
                             RngKey key, int steps, bool record, const WindSchedule* schedule,
                             Exec exec) {
  SpreadTables<double> tables(grid, cfg);
  StochasticRun out;
  FireLayer cur = initial;
  FireLayer next(initial.height(), initial.width());
  if (record) out.trajectory.push_back(cur);
  for (int t = 0; t < steps; ++t) {
    if (schedule != nullptr && !schedule->empty()) {
      tables.set_wind(schedule->at_step(key.step + static_cast<std::uint64_t>(t)), cfg);
    }
    const RngKey step_key{key.seed, key.step + static_cast<std::uint64_t>(t), key.stream};
    step_stochastic_into(cur, next, tables, cfg, step_key, exec);
    std::swap(cur, next);
    if (record) out.trajectory.push_back(cur);
  }
  out.final_state = std::move(cur);
  return out;
}

StochasticBatch make_stochastic_batch(const FireLayer& initial, int count, std::uint64_t seed,
                                      std::uint64_t first_stream) {
  if (count < 1) throw std::invalid_argument("make_stochastic_batch: count must be >= 1");
  StochasticBatch batch;
  batch.seed = seed;
  batch.members.reserve(static_cast<std::size_t>(count));
  for (int j = 0; j < count; ++j) {
    batch.members.push_back({initial, first_stream + static_cast<std::uint64_t>(j)});
  }
  return batch;
}

void step_batch(StochasticBatch& batch, const SpreadTables<double>& tables, const SimConfig& cfg,
                Exec exec) {
  const auto members = static_cast<int>(batch.members.size());
  if (members == 0) return;
  const int w = batch.members[0].fire.width();
  const int n = batch.members[0].fire.height() * w;
  std::vector<FireLayer> next(batch.members.size());
  for (int m = 0; m < members; ++m) {
    next[m] = FireLayer(batch.members[m].fire.height(), w);
  }
  const auto cell = [&](int m, int i) {
    const RngKey key{batch.seed, batch.step, batch.members[m].stream};
    next[m][i] = next_fire_cell(batch.members[m].fire, i, i / w, i % w, tables, cfg, key);
  };
  if (exec == Exec::parallel) {
    const long long total = static_cast<long long>(members) * n;
#pragma omp parallel for schedule(static)
    for (long long idx = 0; idx < total; ++idx) cell(static_cast<int>(idx / n), static_cast<int>(idx % n));
  } else {
    for (int m = 0; m < members; ++m) {
      for (int i = 0; i < n; ++i) cell(m, i);
    }
  }
  for (int m = 0; m < members; ++m) batch.members[m].fire = std::move(next[m]);
  batch.step += 1;
}

void step_batch(StochasticBatch& batch, const GridState& grid, const SimConfig& cfg, Exec exec) {
  const SpreadTables<double> tables(grid, cfg);
  step_batch(batch, tables, cfg, exec);
}

void step_batch(DeterministicBatch& batch, const SpreadTables<double>& tables, const SimConfig& cfg,
                Exec exec) {
  const auto members = static_cast<int>(batch.members.size());
  if (members == 0) return;
  const int h = batch.members[0].height();
  const int w = batch.members[0].width();
  ContinuousState scratch{Grid<double>(h, w), Grid<double>(h, w), Grid<double>(h, w)};
  for (int m = 0; m < members; ++m) {
    step_deterministic_into(batch.members[m], scratch, tables, cfg, exec);
    std::swap(batch.members[m], scratch);
  }
  batch.step += 1;
}

void step_batch(DeterministicBatch& batch, const GridState& grid, const SimConfig& cfg, Exec exec) {
  const SpreadTables<double> tables(grid, cfg);
  step_batch(batch, tables, cfg, exec);
}

FireFractions fire_fraction_stats(const FireLayer& fire) {
  FireFractions f;
  const double n = fire.size();
  for (FireState s : fire.data()) {
    if (s == FireState::Unburned) f.unburned += 1.0;
    else if (s == FireState::Burning) f.burning += 1.0;
    else f.burned += 1.0;
  }
  f.unburned /= n;
  f.burning /= n;
  f.burned /= n;
  return f;
}

FireFractions fire_fraction_stats(const ContinuousState& state) {
  FireFractions f;
  const double n = state.p_un.size();
  for (int i = 0; i < state.p_un.size(); ++i) {
    f.unburned += state.p_un[i];
    f.burning += state.p_burn[i];
    f.burned += state.p_bd[i];
  }
  f.unburned /= n;
  f.burning /= n;
  f.burned /= n;
  return f;
}

}  // namespace emberline
