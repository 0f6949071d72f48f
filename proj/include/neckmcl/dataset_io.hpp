#pragma once

#include <filesystem>
#include <string>

#include "neckmcl/oracle.hpp"

namespace neckmcl::io {

/// Dataset directory layout:
///   manifest.json            protocol, split, seed, config hash, anchors, sessions
///   sessions/<id>.traj.csv   20 Hz trajectory
///   sessions/<id>.mcl.csv    20 Hz ground-truth MCL
///   sessions/<id>.emg.csv    2000 Hz raw EMG (only when generated)
void write_dataset(const std::filesystem::path& dir, const oracle::SyntheticDataset& data,
                   const oracle::OracleConfig& cfg);

/// Reads a directory written by write_dataset. With `load_emg` false the
/// EMG files are not parsed even when listed.
oracle::SyntheticDataset read_dataset(const std::filesystem::path& dir, bool load_emg = false);

/// "train" for the pilot protocol, "eval" otherwise.
const char* split_name(oracle::Protocol p);

}  // namespace neckmcl::io
