#include "neckmcl/config.hpp"

#include <charconv>
#include <cmath>
#include <fmt/format.h>
#include <functional>
#include <sstream>

#include "neckmcl/csv.hpp"
#include "neckmcl/error.hpp"

namespace neckmcl {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

template <class T>
T parse_number(const std::string& key, const std::string& value) {
  T v{};
  const auto* end = value.data() + value.size();
  const auto [ptr, ec] = std::from_chars(value.data(), end, v);
  if (ec != std::errc() || ptr != end) {
    throw Error(ErrorCode::Config, fmt::format("config: bad value '{}' for '{}'", value, key));
  }
  if constexpr (std::is_floating_point_v<T>) {
    if (!std::isfinite(v)) throw Error(ErrorCode::Config, fmt::format("config: '{}' must be finite", key));
  }
  return v;
}

struct Entry {
  ConfigKey key;
  std::function<void(RunConfig&, const std::string&)> set;
  std::function<std::string(const RunConfig&)> get;
};

template <class T>
Entry number(std::string key, std::string doc, T RunConfig::*top) {
  return {{key, std::move(doc)},
          [key, top](RunConfig& c, const std::string& v) { c.*top = parse_number<T>(key, v); },
          [top](const RunConfig& c) { return fmt::format("{}", c.*top); }};
}

template <class S, class T>
Entry nested(std::string key, std::string doc, S RunConfig::*group, T S::*field, bool positive = false) {
  return {{key, std::move(doc)},
          [key, group, field, positive](RunConfig& c, const std::string& v) {
            const T parsed = parse_number<T>(key, v);
            if (positive && !(parsed > T{})) throw Error(ErrorCode::Config, fmt::format("config: '{}' must be positive", key));
            c.*group.*field = parsed;
          },
          [group, field](const RunConfig& c) { return fmt::format("{}", c.*group.*field); }};
}

const std::vector<Entry>& entries() {
  static const std::vector<Entry> table = [] {
    using RC = RunConfig;
    std::vector<Entry> t;
    t.push_back(number("seed", "master seed for every random stream", &RC::seed));

    t.push_back(nested("oracle.gravity_gain", "pitch passive-torque gain g_p, deg/s^2", &RC::oracle, &oracle::OracleConfig::gravity_gain, true));
    t.push_back(nested("oracle.yaw_gain", "yaw passive-torque gain k_y, deg/s^2", &RC::oracle, &oracle::OracleConfig::yaw_gain, true));
    t.push_back(nested("oracle.inertia", "oracle moment of inertia (normalised)", &RC::oracle, &oracle::OracleConfig::inertia, true));
    t.push_back(nested("oracle.exponent", "torque exponent of the oracle MCL map", &RC::oracle, &oracle::OracleConfig::exponent, true));
    t.push_back(nested("oracle.cap", "saturation of oracle MCL", &RC::oracle, &oracle::OracleConfig::cap, true));
    t.push_back(nested("oracle.sigma0", "main-sequence width intercept, s", &RC::oracle, &oracle::OracleConfig::sigma0, true));
    t.push_back(nested("oracle.sigma_slope", "main-sequence width slope, s/deg", &RC::oracle, &oracle::OracleConfig::sigma_slope, true));
    t.push_back(nested("oracle.sigma_jitter", "relative width jitter (uniform +-)", &RC::oracle, &oracle::OracleConfig::sigma_jitter));
    t.push_back(nested("oracle.velocity_noise", "relative velocity noise", &RC::oracle, &oracle::OracleConfig::velocity_noise));
    t.push_back(nested("oracle.emg_scale", "EMG carrier RMS at MCL 1, mV", &RC::oracle, &oracle::OracleConfig::emg_scale, true));
    t.push_back(nested("oracle.drift_amplitude", "EMG baseline drift amplitude, mV", &RC::oracle, &oracle::OracleConfig::drift_amplitude));
    t.push_back(nested("oracle.stationary_s", "stationary lead-in per session, s", &RC::oracle, &oracle::OracleConfig::stationary_s, true));
    t.push_back(nested("oracle.hold_s", "hold at the target per session, s", &RC::oracle, &oracle::OracleConfig::hold_s));
    t.push_back(nested("oracle.participants_pilot", "repetitions of the pilot protocol", &RC::oracle, &oracle::OracleConfig::participants_pilot, true));
    t.push_back(nested("oracle.participants_eval", "repetitions of the evaluation protocol", &RC::oracle, &oracle::OracleConfig::participants_eval, true));

    t.push_back(nested("pipeline.detrend_s", "detrend moving-mean window, s", &RC::pipeline, &emg::PipelineConfig::detrend_window_s, true));
    t.push_back(nested("pipeline.band_low_hz", "bandpass low cutoff, Hz", &RC::pipeline, &emg::PipelineConfig::band_low_hz, true));
    t.push_back(nested("pipeline.band_high_hz", "bandpass high cutoff, Hz", &RC::pipeline, &emg::PipelineConfig::band_high_hz, true));
    t.push_back(nested("pipeline.band_order", "bandpass order (multiple of 4)", &RC::pipeline, &emg::PipelineConfig::band_order, true));
    t.push_back(nested("pipeline.envelope_s", "RMS envelope window, s", &RC::pipeline, &emg::PipelineConfig::envelope_window_s, true));
    t.push_back(nested("pipeline.percentile_low", "lower percentile for percentile normalisation", &RC::pipeline, &emg::PipelineConfig::percentile_low));
    t.push_back(nested("pipeline.percentile_high", "upper percentile for percentile normalisation", &RC::pipeline, &emg::PipelineConfig::percentile_high));
    t.push_back({{"pipeline.normalization", "minmax or percentile"},
                 [](RC& c, const std::string& v) {
                   if (v == "minmax") c.pipeline.normalization = emg::Normalization::MinMax;
                   else if (v == "percentile") c.pipeline.normalization = emg::Normalization::Percentile;
                   else throw Error(ErrorCode::Config, fmt::format("config: bad value '{}' for 'pipeline.normalization'", v));
                 },
                 [](const RC& c) { return std::string(c.pipeline.normalization == emg::Normalization::MinMax ? "minmax" : "percentile"); }});

    t.push_back(nested("mclnet.epochs", "training epochs", &RC::mclnet, &mcl::TrainConfig::epochs, true));
    t.push_back(nested("mclnet.lr", "initial learning rate", &RC::mclnet, &mcl::TrainConfig::learning_rate, true));
    t.push_back(nested("mclnet.lr_drop_epoch", "epoch at which the rate drops", &RC::mclnet, &mcl::TrainConfig::lr_drop_epoch));
    t.push_back(nested("mclnet.lr_drop_factor", "learning-rate drop factor", &RC::mclnet, &mcl::TrainConfig::lr_drop_factor, true));
    t.push_back(nested("mclnet.batch", "batch size", &RC::mclnet, &mcl::TrainConfig::batch_size, true));
    t.push_back(nested("mclnet.weight_decay", "decoupled weight decay", &RC::mclnet, &mcl::TrainConfig::weight_decay));
    t.push_back(number("mclnet.stride", "training window stride (1-4)", &RC::mclnet_stride));
    t.push_back(number("mclnet.target_shift", "target shift in samples (delay studies)", &RC::mclnet_target_shift));
    t.push_back({{"mclnet.targets", "oracle (ground truth) or emg (pipeline output)"},
                 [](RC& c, const std::string& v) {
                   if (v == "oracle") c.mclnet_targets = MclTargets::Oracle;
                   else if (v == "emg") c.mclnet_targets = MclTargets::Emg;
                   else throw Error(ErrorCode::Config, fmt::format("config: bad value '{}' for 'mclnet.targets'", v));
                 },
                 [](const RC& c) { return std::string(c.mclnet_targets == MclTargets::Oracle ? "oracle" : "emg"); }});

    t.push_back(nested("trajnet.epochs", "training epochs", &RC::trajnet, &trajnet::TrainConfig::epochs, true));
    t.push_back(nested("trajnet.lr", "initial learning rate", &RC::trajnet, &trajnet::TrainConfig::learning_rate, true));
    t.push_back(nested("trajnet.lr_drop_epoch", "epoch at which the rate drops", &RC::trajnet, &trajnet::TrainConfig::lr_drop_epoch));
    t.push_back(nested("trajnet.lr_drop_factor", "learning-rate drop factor", &RC::trajnet, &trajnet::TrainConfig::lr_drop_factor, true));
    t.push_back(nested("trajnet.batch", "batch size", &RC::trajnet, &trajnet::TrainConfig::batch_size, true));
    t.push_back(nested("trajnet.weight_decay", "decoupled weight decay", &RC::trajnet, &trajnet::TrainConfig::weight_decay));
    t.push_back({{"trajnet.loss", "parameters or curve"},
                 [](RC& c, const std::string& v) { c.trajnet.loss = trajnet::parse_loss_space(v); },
                 [](const RC& c) { return std::string(trajnet::to_string(c.trajnet.loss)); }});

    t.push_back(number("eval.stride", "inference window stride (1-4)", &RC::eval_stride));
    t.push_back({{"eval.normalizer", "range or mean"},
                 [](RC& c, const std::string& v) { c.eval_normalizer = metrics::parse_normalizer(v); },
                 [](const RC& c) { return std::string(metrics::to_string(c.eval_normalizer)); }});

    t.push_back(number("scanpath.total", "total rotation budget, degrees", &RC::scan_total));
    t.push_back(number("scanpath.steps", "number of steps", &RC::scan_steps));
    t.push_back(number("scanpath.min_step", "minimum step, degrees", &RC::scan_min_step));
    t.push_back(number("scanpath.partitions", "partitions in a study manifest", &RC::scan_partitions));
    return t;
  }();
  return table;
}

const Entry& find(const std::string& key) {
  for (const auto& e : entries()) {
    if (e.key.key == key) return e;
  }
  throw Error(ErrorCode::Config, fmt::format("config: unknown key '{}'", key));
}

void validate(const RunConfig& c) {
  const auto stride_ok = [](std::size_t s) { return s >= 1 && s <= kin::kDefaultStride; };
  if (!stride_ok(c.mclnet_stride) || !stride_ok(c.eval_stride)) {
    throw Error(ErrorCode::Config, "config: strides must be in 1..4");
  }
  if (c.pipeline.band_order % 4 != 0) throw Error(ErrorCode::Config, "config: pipeline.band_order must be a multiple of 4");
  if (!(c.pipeline.band_low_hz < c.pipeline.band_high_hz)) {
    throw Error(ErrorCode::Config, "config: pipeline.band_low_hz must be below pipeline.band_high_hz");
  }
  if (c.scan_steps == 0 || !(c.scan_total > 0.0) || c.scan_min_step * static_cast<double>(c.scan_steps) > c.scan_total) {
    throw Error(ErrorCode::Config, "config: infeasible scanpath.total / scanpath.steps / scanpath.min_step");
  }
}

}  // namespace

const std::vector<ConfigKey>& config_keys() {
  static const std::vector<ConfigKey> keys = [] {
    std::vector<ConfigKey> k;
    for (const auto& e : entries()) k.push_back(e.key);
    return k;
  }();
  return keys;
}

void set_config_value(RunConfig& cfg, const std::string& key, const std::string& value) {
  find(key).set(cfg, value);
}

std::string get_config_value(const RunConfig& cfg, const std::string& key) { return find(key).get(cfg); }

RunConfig parse_config(const std::string& text, const std::string& source) {
  RunConfig cfg;
  std::istringstream in(text);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw Error(ErrorCode::Config, fmt::format("{}:{}: expected 'key = value'", source, lineno));
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    try {
      set_config_value(cfg, key, value);
    } catch (const Error& e) {
      throw Error(ErrorCode::Config, fmt::format("{}:{}: {}", source, lineno, e.what()));
    }
  }
  validate(cfg);
  return cfg;
}

RunConfig load_config(const std::filesystem::path& path) {
  return parse_config(io::read_file(path), path.string());
}

std::string dump_config(const RunConfig& cfg) {
  std::string out;
  for (const auto& e : entries()) out += fmt::format("{} = {}\n", e.key.key, e.get(cfg));
  return out;
}

}  // namespace neckmcl
