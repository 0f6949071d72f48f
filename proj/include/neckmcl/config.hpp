#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "neckmcl/emg.hpp"
#include "neckmcl/evaluation.hpp"
#include "neckmcl/mclnet.hpp"
#include "neckmcl/oracle.hpp"
#include "neckmcl/trajnet.hpp"

namespace neckmcl {

enum class MclTargets { Oracle, Emg };

/// Everything a CLI run can be configured with. Defaults are the values the
/// library uses when no config file is given.
struct RunConfig {
  std::uint64_t seed = 1;
  oracle::OracleConfig oracle;
  emg::PipelineConfig pipeline;

  mcl::TrainConfig mclnet;
  std::size_t mclnet_stride = kin::kDefaultStride;
  int mclnet_target_shift = 0;
  MclTargets mclnet_targets = MclTargets::Oracle;

  trajnet::TrainConfig trajnet;

  std::size_t eval_stride = kin::kDefaultStride;
  metrics::Normalizer eval_normalizer = metrics::Normalizer::Range;

  double scan_total = 900.0;
  std::size_t scan_steps = 30;
  double scan_min_step = 5.0;
  std::size_t scan_partitions = 6;
};

struct ConfigKey {
  std::string key;
  std::string doc;
};

/// Every accepted key with its documentation.
const std::vector<ConfigKey>& config_keys();

/// Sets one key; unknown keys and unparsable values are Config errors.
void set_config_value(RunConfig& cfg, const std::string& key, const std::string& value);
std::string get_config_value(const RunConfig& cfg, const std::string& key);

/// Flat `key = value` lines; `#` starts a comment.
RunConfig parse_config(const std::string& text, const std::string& source);
RunConfig load_config(const std::filesystem::path& path);

/// All keys with current values, one per line, in `key = value` form.
std::string dump_config(const RunConfig& cfg);

}  // namespace neckmcl
