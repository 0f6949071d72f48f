#include "neckmcl/nn/checkpoint.hpp"

#include <fmt/format.h>
#include <fstream>
#include <json.hpp>
#include <sstream>

#include "neckmcl/error.hpp"

namespace neckmcl::nn {

using nlohmann::json;

void Checkpoint::put(const std::string& section, const std::vector<ParamRef>& params) {
  auto& dest = sections[section];
  for (const auto& p : params) dest[p.name] = NamedArray{p.shape, {p.value.begin(), p.value.end()}};
}

void Checkpoint::get(const std::string& section, std::vector<ParamRef>& params) const {
  for (auto& p : params) {
    const NamedArray& a = array(section, p.name);
    if (a.shape != p.shape || a.values.size() != p.value.size()) {
      throw Error(ErrorCode::Parse, fmt::format("checkpoint: shape mismatch for {}/{}", section, p.name));
    }
    std::copy(a.values.begin(), a.values.end(), p.value.begin());
  }
}

void Checkpoint::put_array(const std::string& section, const std::string& name, NamedArray array) {
  sections[section][name] = std::move(array);
}

const NamedArray& Checkpoint::array(const std::string& section, const std::string& name) const {
  const auto s = sections.find(section);
  if (s == sections.end()) throw Error(ErrorCode::Parse, fmt::format("checkpoint: missing section '{}'", section));
  const auto a = s->second.find(name);
  if (a == s->second.end()) {
    throw Error(ErrorCode::Parse, fmt::format("checkpoint: missing parameter '{}/{}'", section, name));
  }
  return a->second;
}

std::string Checkpoint::dump() const {
  json doc;
  doc["format_version"] = kFormatVersion;
  doc["kind"] = kind;
  doc["metadata"] = metadata;
  json secs = json::object();
  for (const auto& [section, arrays] : sections) {
    json entries = json::object();
    for (const auto& [name, a] : arrays) entries[name] = {{"shape", a.shape}, {"values", a.values}};
    secs[section] = std::move(entries);
  }
  doc["sections"] = std::move(secs);
  return doc.dump(1) + "\n";
}

Checkpoint Checkpoint::parse(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::Parse, fmt::format("checkpoint: {}", e.what()));
  }
  try {
    const int version = doc.at("format_version").get<int>();
    if (version != kFormatVersion) {
      throw Error(ErrorCode::Parse, fmt::format("checkpoint: unsupported format_version {}", version));
    }
    Checkpoint ckpt;
    ckpt.kind = doc.at("kind").get<std::string>();
    if (doc.contains("metadata")) ckpt.metadata = doc.at("metadata").get<std::map<std::string, std::string>>();
    for (const auto& [section, entries] : doc.at("sections").items()) {
      for (const auto& [name, entry] : entries.items()) {
        NamedArray a;
        a.shape = entry.at("shape").get<std::vector<std::size_t>>();
        a.values = entry.at("values").get<std::vector<double>>();
        std::size_t expected = 1;
        for (std::size_t d : a.shape) expected *= d;
        if (expected != a.values.size()) {
          throw Error(ErrorCode::Parse, fmt::format("checkpoint: {}/{} value count does not match shape", section, name));
        }
        ckpt.sections[section][name] = std::move(a);
      }
    }
    return ckpt;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::Parse, fmt::format("checkpoint: malformed document: {}", e.what()));
  }
}

void Checkpoint::save(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::Io, fmt::format("cannot write checkpoint '{}'", path.string()));
  out << dump();
  if (!out) throw Error(ErrorCode::Io, fmt::format("failed writing checkpoint '{}'", path.string()));
}

Checkpoint Checkpoint::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, fmt::format("cannot read checkpoint '{}'", path.string()));
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse(ss.str());
}

}  // namespace neckmcl::nn
