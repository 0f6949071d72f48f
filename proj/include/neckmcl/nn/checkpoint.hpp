#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "neckmcl/nn/layers.hpp"

namespace neckmcl::nn {

struct NamedArray {
  std::vector<std::size_t> shape;
  std::vector<double> values;
};

/// Named parameter arrays grouped into sections, serialised as one JSON
/// document with a format version. Doubles are written with round-trip
/// precision, so save/load reproduces values bit-for-bit.
class Checkpoint {
 public:
  static constexpr int kFormatVersion = 1;

  std::string kind;
  std::map<std::string, std::string> metadata;
  std::map<std::string, std::map<std::string, NamedArray>> sections;

  void put(const std::string& section, const std::vector<ParamRef>& params);
  /// Copies stored values into `params`; missing names or shape mismatches
  /// are Parse errors.
  void get(const std::string& section, std::vector<ParamRef>& params) const;

  void put_array(const std::string& section, const std::string& name, NamedArray array);
  const NamedArray& array(const std::string& section, const std::string& name) const;

  std::string dump() const;
  static Checkpoint parse(const std::string& text);

  void save(const std::filesystem::path& path) const;
  static Checkpoint load(const std::filesystem::path& path);
};

}  // namespace neckmcl::nn
