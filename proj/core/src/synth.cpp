#include "rfsense/synth.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "json.hpp"

#include "rfsense/errors.hpp"
#include "rfsense/rng.hpp"

namespace rfsense {

namespace {

using ordered_json = nlohmann::ordered_json;

}  // namespace

void ScenarioConfig::validate() const {
  meta.validate();
  if (!(duration_s > 0.0)) throw ConfigError("scenario: duration_s must be > 0");
  const auto cells = static_cast<std::size_t>(meta.num_pairs) * meta.num_subcarriers;
  if (baseline_loss_db.size() != cells) {
    throw ConfigError("scenario: baseline_loss_db must carry num_pairs x num_subcarriers values");
  }
  for (double v : baseline_loss_db) {
    if (!std::isfinite(v)) throw ConfigError("scenario: baseline_loss_db values must be finite");
  }
  if (!(dip_depth_db > 0.0)) throw ConfigError("scenario: dip_depth_db must be > 0");
  if (!(dip_width_s > 0.0)) throw ConfigError("scenario: dip_width_s must be > 0");
  if (!(noise_std_db >= 0.0)) throw ConfigError("scenario: noise_std_db must be >= 0");
  if (!std::isfinite(antenna_spacing_s)) {
    throw ConfigError("scenario: antenna_spacing_s must be finite");
  }
  for (const Crossing& crossing : crossings) {
    if (crossing.center_time_s < 0.0 || crossing.center_time_s > duration_s) {
      throw ConfigError("scenario: crossing times must lie within [0, duration_s]");
    }
    if (crossing.direction != 1 && crossing.direction != -1) {
      throw ConfigError("scenario: crossing direction must be +1 or -1");
    }
  }
  if (const auto* linecross = std::get_if<TxLineCross>(&tx_regime)) {
    if (!(linecross->period_min_s > 0.0) || linecross->period_min_s > linecross->period_max_s) {
      throw ConfigError("scenario: linecross period bounds must satisfy 0 < min <= max");
    }
  }
  if (const auto* random = std::get_if<TxRandom>(&tx_regime)) {
    if (random->levels_db.empty()) {
      throw ConfigError("scenario: random regime needs at least one level");
    }
    for (double level : random->levels_db) {
      if (!std::isfinite(level)) throw ConfigError("scenario: tx levels must be finite");
    }
  }
}

double crossing_dip_db(double dt_s, double depth_db, double width_s) {
  if (std::abs(dt_s) >= width_s / 2.0) return 0.0;
  return depth_db / 2.0 * (1.0 + std::cos(2.0 * std::numbers::pi * dt_s / width_s));
}

namespace {

/// Per-pair dip center for one crossing. Direction +1 walks pairs in
/// increasing spatial order; -1 mirrors the stagger around center_time.
double pair_crossing_time(const Crossing& crossing, double spatial, double spacing_s) {
  return crossing.center_time_s + crossing.direction * spatial * spacing_s;
}

std::vector<double> build_schedule(const ScenarioConfig& config, std::int64_t packets) {
  std::vector<double> schedule(static_cast<std::size_t>(packets), 0.0);
  const double rate = config.meta.nominal_rate_hz;

  if (const auto* random = std::get_if<TxRandom>(&config.tx_regime)) {
    RandomStream rng(config.rng_seed, RngStream::tx_schedule);
    for (auto& value : schedule) {
      value = random->levels_db[rng.pick_index(random->levels_db.size())];
    }
  } else if (const auto* linecross = std::get_if<TxLineCross>(&config.tx_regime)) {
    RandomStream rng(config.rng_seed, RngStream::tx_schedule);
    std::vector<double> excursions;
    double t = rng.uniform(linecross->period_min_s, linecross->period_max_s);
    while (t < config.duration_s) {
      excursions.push_back(t);
      t += rng.uniform(linecross->period_min_s, linecross->period_max_s);
    }
    for (std::int64_t n = 0; n < packets; ++n) {
      double tn = static_cast<double>(n) / rate;
      double dip = 0.0;
      for (double center : excursions) {
        dip += crossing_dip_db(tn - center, config.dip_depth_db, config.dip_width_s);
      }
      schedule[static_cast<std::size_t>(n)] = -dip;
    }
  }
  return schedule;
}

}  // namespace

SynthResult gen_trace(const ScenarioConfig& config) {
  config.validate();
  const double rate = config.meta.nominal_rate_hz;
  const auto packets = static_cast<std::int64_t>(std::llround(config.duration_s * rate));
  const int J = config.meta.num_pairs;
  const int N = config.meta.num_subcarriers;

  SynthResult result;
  result.tx_schedule = build_schedule(config, packets);

  result.trace.meta = config.meta;
  result.trace.frames.reserve(static_cast<std::size_t>(packets));

  RandomStream noise(config.rng_seed, RngStream::cell_noise);
  for (std::int64_t n = 0; n < packets; ++n) {
    Frame frame;
    frame.packet = n;
    frame.timestamp = static_cast<double>(n) / rate;
    frame.cells = CellGrid(J, N);
    const double tx = result.tx_schedule[static_cast<std::size_t>(n)];
    for (int j = 0; j < J; ++j) {
      double dip = 0.0;
      for (const Crossing& crossing : config.crossings) {
        double center = pair_crossing_time(crossing, config.meta.spatial_index[j],
                                           config.antenna_spacing_s);
        dip += crossing_dip_db(frame.timestamp - center, config.dip_depth_db,
                               config.dip_width_s);
      }
      for (int k = 0; k < N; ++k) {
        double value = tx - config.baseline_loss_db[static_cast<std::size_t>(j) * N + k] - dip;
        if (config.noise_std_db > 0.0) value += noise.gaussian(config.noise_std_db);
        frame.cells.set(j, k, value);
      }
    }
    result.trace.frames.push_back(std::move(frame));
  }

  for (const Crossing& crossing : config.crossings) {
    result.truth.events.push_back(
        {crossing.center_time_s, config.meta.link_id, crossing.direction});
  }
  std::sort(result.truth.events.begin(), result.truth.events.end(),
            [](const CrossingEvent& a, const CrossingEvent& b) { return a.time_s < b.time_s; });
  return result;
}

Trace apply_tx_schedule(const Trace& trace, std::span<const double> schedule,
                        double noise_std_db, std::uint64_t rng_seed) {
  if (schedule.size() != trace.frames.size()) {
    throw DataError("apply_tx_schedule: schedule carries " + std::to_string(schedule.size()) +
                    " entries for " + std::to_string(trace.frames.size()) + " frames");
  }
  if (!(noise_std_db >= 0.0)) {
    throw ConfigError("apply_tx_schedule: noise_std_db must be >= 0");
  }
  Trace out = trace;
  RandomStream noise(rng_seed, RngStream::cell_noise);
  for (std::size_t n = 0; n < out.frames.size(); ++n) {
    Frame& frame = out.frames[n];
    for (int j = 0; j < frame.cells.num_pairs(); ++j) {
      for (int k = 0; k < frame.cells.num_subcarriers(); ++k) {
        if (!frame.cells.present(j, k)) continue;
        double value = frame.cells.raw(j, k) + schedule[n];
        if (noise_std_db > 0.0) value += noise.gaussian(noise_std_db);
        frame.cells.set(j, k, value);
      }
    }
  }
  return out;
}

namespace {

ordered_json regime_to_json(const TxRegime& regime) {
  if (std::holds_alternative<TxNormal>(regime)) {
    return ordered_json{{"type", "normal"}};
  }
  if (const auto* linecross = std::get_if<TxLineCross>(&regime)) {
    return ordered_json{{"type", "linecross"},
                        {"period_min_s", linecross->period_min_s},
                        {"period_max_s", linecross->period_max_s}};
  }
  const auto& random = std::get<TxRandom>(regime);
  return ordered_json{{"type", "random"}, {"levels_db", random.levels_db}};
}

TxRegime regime_from_json(const nlohmann::json& j) {
  const auto type = j.at("type").get<std::string>();
  if (type == "normal") return TxNormal{};
  if (type == "linecross") {
    TxLineCross regime;
    regime.period_min_s = j.value("period_min_s", regime.period_min_s);
    regime.period_max_s = j.value("period_max_s", regime.period_max_s);
    return regime;
  }
  if (type == "random") {
    TxRandom regime;
    regime.levels_db = j.at("levels_db").get<std::vector<double>>();
    return regime;
  }
  throw ConfigError("scenario: unknown tx regime '" + type + "'");
}

}  // namespace

ScenarioConfig ScenarioConfig::from_json_text(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("scenario: invalid JSON: ") + e.what());
  }
  ScenarioConfig config;
  try {
    const auto& meta = j.at("meta");
    config.meta.link_id = meta.at("link_id").get<std::string>();
    config.meta.num_pairs = meta.at("num_pairs").get<int>();
    config.meta.num_subcarriers = meta.at("num_subcarriers").get<int>();
    config.meta.nominal_rate_hz = meta.at("nominal_rate_hz").get<double>();
    config.meta.spatial_index.assign(
        static_cast<std::size_t>(std::max(config.meta.num_pairs, 0)), 0.0);
    const auto& spatial = meta.at("spatial_index");
    for (auto it = spatial.begin(); it != spatial.end(); ++it) {
      int pair = std::stoi(it.key());
      if (pair < 0 || pair >= config.meta.num_pairs) {
        throw ConfigError("scenario: spatial_index pair id out of range");
      }
      config.meta.spatial_index[static_cast<std::size_t>(pair)] = it.value().get<double>();
    }

    config.duration_s = j.at("duration_s").get<double>();
    const auto cells =
        static_cast<std::size_t>(config.meta.num_pairs) * config.meta.num_subcarriers;
    const auto& baseline = j.at("baseline_loss_db");
    if (baseline.is_number()) {
      config.baseline_loss_db.assign(cells, baseline.get<double>());
    } else {
      config.baseline_loss_db.clear();
      config.baseline_loss_db.reserve(cells);
      for (const auto& row : baseline) {
        for (const auto& value : row) {
          config.baseline_loss_db.push_back(value.get<double>());
        }
      }
    }
    config.antenna_spacing_s = j.value("antenna_spacing_s", config.antenna_spacing_s);
    if (j.contains("crossings")) {
      for (const auto& c : j.at("crossings")) {
        config.crossings.push_back(
            {c.at("center_time_s").get<double>(), c.at("direction").get<int>()});
      }
    }
    config.dip_depth_db = j.value("dip_depth_db", config.dip_depth_db);
    config.dip_width_s = j.value("dip_width_s", config.dip_width_s);
    config.noise_std_db = j.value("noise_std_db", config.noise_std_db);
    if (j.contains("tx_regime")) config.tx_regime = regime_from_json(j.at("tx_regime"));
    config.rng_seed = j.value("rng_seed", config.rng_seed);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("scenario: ") + e.what());
  }
  config.validate();
  return config;
}

std::string ScenarioConfig::to_json_text(int indent) const {
  ordered_json spatial = ordered_json::object();
  for (int j = 0; j < meta.num_pairs; ++j) {
    spatial[std::to_string(j)] = meta.spatial_index[static_cast<std::size_t>(j)];
  }
  ordered_json baseline = ordered_json::array();
  for (int j = 0; j < meta.num_pairs; ++j) {
    ordered_json row = ordered_json::array();
    for (int k = 0; k < meta.num_subcarriers; ++k) {
      row.push_back(baseline_loss_db[static_cast<std::size_t>(j) * meta.num_subcarriers + k]);
    }
    baseline.push_back(std::move(row));
  }
  ordered_json crossings_json = ordered_json::array();
  for (const Crossing& c : crossings) {
    crossings_json.push_back({{"center_time_s", c.center_time_s}, {"direction", c.direction}});
  }
  ordered_json j{{"meta",
                  {{"link_id", meta.link_id},
                   {"num_pairs", meta.num_pairs},
                   {"num_subcarriers", meta.num_subcarriers},
                   {"nominal_rate_hz", meta.nominal_rate_hz},
                   {"spatial_index", spatial}}},
                 {"duration_s", duration_s},
                 {"baseline_loss_db", baseline},
                 {"antenna_spacing_s", antenna_spacing_s},
                 {"crossings", crossings_json},
                 {"dip_depth_db", dip_depth_db},
                 {"dip_width_s", dip_width_s},
                 {"noise_std_db", noise_std_db},
                 {"tx_regime", regime_to_json(tx_regime)},
                 {"rng_seed", rng_seed}};
  return j.dump(indent);
}

}  // namespace rfsense
