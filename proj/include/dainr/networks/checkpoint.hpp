#pragma once

#include <bit>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "dainr/baselines/hashinr.hpp"
#include "dainr/networks/model.hpp"

namespace dainr {

// Checkpoint layout:
//   8 bytes   "DAINRCKP"
//   u32 LE    format version (1)
//   u64 LE    header length H
//   H bytes   JSON header: {"model", "config", "metadata", "tensors": [{name, shape, offset}]}
//   float32 LE parameter blobs, concatenated in header order; offsets count floats.
inline constexpr char kCheckpointMagic[8] = {'D', 'A', 'I', 'N', 'R', 'C', 'K', 'P'};
inline constexpr std::uint32_t kCheckpointVersion = 1;

inline nlohmann::json to_json(const HashGridConfig& c) {
  return {{"levels", c.levels},         {"table_size", c.table_size},
          {"features", c.features},     {"min_resolution", c.min_resolution},
          {"growth", c.growth},         {"max_resolution", c.max_resolution},
          {"init_range", c.init_range}};
}

inline HashGridConfig hash_config_from_json(const nlohmann::json& j) {
  HashGridConfig c;
  c.levels = j.at("levels");
  c.table_size = j.at("table_size");
  c.features = j.at("features");
  c.min_resolution = j.at("min_resolution");
  c.growth = j.at("growth");
  c.max_resolution = j.at("max_resolution");
  c.init_range = j.at("init_range");
  return c;
}

inline nlohmann::json to_json(const DaInrConfig& c) {
  return {{"rows", c.rows},
          {"cols", c.cols},
          {"hash", to_json(c.hash)},
          {"spatial_bands", c.spatial_encoding.bands},
          {"temporal_bands", c.temporal_encoding.bands},
          {"hidden_width", c.hidden_width},
          {"hidden_layers", c.hidden_layers},
          {"deformation_init_scale", c.deformation_init_scale},
          {"use_features", c.use_features},
          {"feature_channels", c.feature_channels},
          {"feature_input_frames", c.feature_input_frames},
          {"seed", c.seed}};
}

inline DaInrConfig dainr_config_from_json(const nlohmann::json& j) {
  DaInrConfig c;
  c.rows = j.at("rows");
  c.cols = j.at("cols");
  c.hash = hash_config_from_json(j.at("hash"));
  c.spatial_encoding.bands = j.at("spatial_bands");
  c.temporal_encoding.bands = j.at("temporal_bands");
  c.hidden_width = j.at("hidden_width");
  c.hidden_layers = j.at("hidden_layers");
  c.deformation_init_scale = j.at("deformation_init_scale");
  c.use_features = j.at("use_features");
  c.feature_channels = j.at("feature_channels");
  c.feature_input_frames = j.at("feature_input_frames");
  c.seed = j.at("seed");
  return c;
}

inline nlohmann::json to_json(const HashInrConfig& c) {
  return {{"rows", c.rows},
          {"cols", c.cols},
          {"frames", c.frames},
          {"hash", to_json(c.hash)},
          {"hidden_width", c.hidden_width},
          {"hidden_layers", c.hidden_layers},
          {"seed", c.seed}};
}

inline HashInrConfig hashinr_config_from_json(const nlohmann::json& j) {
  HashInrConfig c;
  c.rows = j.at("rows");
  c.cols = j.at("cols");
  c.frames = j.at("frames");
  c.hash = hash_config_from_json(j.at("hash"));
  c.hidden_width = j.at("hidden_width");
  c.hidden_layers = j.at("hidden_layers");
  c.seed = j.at("seed");
  return c;
}

namespace detail {

template <class T>
void write_checkpoint(const std::filesystem::path& path, const std::string& kind,
                      const nlohmann::json& config, const nlohmann::json& metadata,
                      const std::vector<std::pair<std::string, ad::Tensor<T>>>& tensors) {
  nlohmann::json list = nlohmann::json::array();
  std::uint64_t offset = 0;
  for (const auto& [name, t] : tensors) {
    list.push_back({{"name", name}, {"shape", t.shape()}, {"offset", offset}});
    offset += t.numel();
  }
  const std::string header =
      nlohmann::json{{"model", kind}, {"config", config}, {"metadata", metadata}, {"tensors", list}}
          .dump();
  std::vector<unsigned char> bytes(kCheckpointMagic, kCheckpointMagic + 8);
  auto put = [&bytes](std::uint64_t v, int n) {
    for (int b = 0; b < n; ++b) bytes.push_back(static_cast<unsigned char>(v >> (8 * b)));
  };
  put(kCheckpointVersion, 4);
  put(header.size(), 8);
  bytes.insert(bytes.end(), header.begin(), header.end());
  for (const auto& [name, t] : tensors)
    for (T v : t.values()) put(std::bit_cast<std::uint32_t>(static_cast<float>(v)), 4);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("failed writing " + path.string());
}

struct RawCheckpoint {
  nlohmann::json header;
  std::vector<float> values;
};

inline RawCheckpoint read_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open checkpoint " + path.string());
  std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  auto fail = [&](const std::string& why) { throw IoError(path.string() + ": " + why); };
  if (bytes.size() < 20 || !std::equal(kCheckpointMagic, kCheckpointMagic + 8, bytes.begin()))
    fail("not a checkpoint (bad magic)");
  auto get = [&bytes](std::size_t at, int n) {
    std::uint64_t v = 0;
    for (int b = 0; b < n; ++b) v |= static_cast<std::uint64_t>(bytes[at + b]) << (8 * b);
    return v;
  };
  if (get(8, 4) != kCheckpointVersion) fail("unsupported checkpoint version " + std::to_string(get(8, 4)));
  const std::uint64_t header_len = get(12, 8);
  if (20 + header_len > bytes.size()) fail("truncated header");
  RawCheckpoint raw;
  try {
    raw.header = nlohmann::json::parse(bytes.begin() + 20, bytes.begin() + 20 + header_len);
  } catch (const nlohmann::json::exception& e) {
    fail(std::string("corrupt header: ") + e.what());
  }
  const std::size_t body = 20 + header_len;
  if ((bytes.size() - body) % 4 != 0) fail("parameter section is not a whole number of floats");
  raw.values.resize((bytes.size() - body) / 4);
  for (std::size_t i = 0; i < raw.values.size(); ++i)
    raw.values[i] = std::bit_cast<float>(static_cast<std::uint32_t>(get(body + 4 * i, 4)));
  return raw;
}

template <class T>
void fill_tensors(const RawCheckpoint& raw, const std::vector<std::pair<std::string, ad::Tensor<T>>>& tensors) {
  const auto& list = raw.header.at("tensors");
  require(list.size() == tensors.size(), "checkpoint tensor count does not match the model");
  for (std::size_t i = 0; i < tensors.size(); ++i) {
    const auto& entry = list[i];
    auto t = tensors[i].second;
    if (entry.at("name") != tensors[i].first)
      throw IoError("checkpoint tensor " + std::to_string(i) + " is '" +
                    entry.at("name").get<std::string>() + "', model expects '" + tensors[i].first + "'");
    if (entry.at("shape").get<ad::Shape>() != t.shape())
      throw IoError("checkpoint tensor '" + tensors[i].first + "' has the wrong shape");
    const std::uint64_t offset = entry.at("offset");
    if (offset + t.numel() > raw.values.size()) throw IoError("checkpoint parameter section truncated");
    auto v = t.values();
    for (std::size_t k = 0; k < v.size(); ++k) v[k] = static_cast<T>(raw.values[offset + k]);
  }
}

}  // namespace detail

template <class T>
void save_checkpoint(const std::filesystem::path& path, const DaInrModel<T>& model,
                     const nlohmann::json& metadata = nlohmann::json::object()) {
  detail::write_checkpoint<T>(path, "dainr", to_json(model.config()), metadata, model.named_parameters());
}

template <class T>
void save_checkpoint(const std::filesystem::path& path, const HashInrModel<T>& model,
                     const nlohmann::json& metadata = nlohmann::json::object()) {
  detail::write_checkpoint<T>(path, "hashinr", to_json(model.config()), metadata,
                              model.named_parameters());
}

// Model kind ("dainr" or "hashinr") and metadata of a checkpoint file.
inline std::pair<std::string, nlohmann::json> checkpoint_info(const std::filesystem::path& path) {
  auto raw = detail::read_checkpoint(path);
  return {raw.header.at("model").get<std::string>(), raw.header.value("metadata", nlohmann::json::object())};
}

template <class T>
DaInrModel<T> load_dainr_checkpoint(const std::filesystem::path& path) {
  auto raw = detail::read_checkpoint(path);
  try {
    if (raw.header.at("model") != "dainr") throw IoError(path.string() + ": not a DA-INR checkpoint");
    DaInrModel<T> model(dainr_config_from_json(raw.header.at("config")));
    detail::fill_tensors(raw, model.named_parameters());
    return model;
  } catch (const nlohmann::json::exception& e) {
    throw IoError(path.string() + ": " + e.what());
  }
}

template <class T>
HashInrModel<T> load_hashinr_checkpoint(const std::filesystem::path& path) {
  auto raw = detail::read_checkpoint(path);
  try {
    if (raw.header.at("model") != "hashinr") throw IoError(path.string() + ": not a HashINR checkpoint");
    HashInrModel<T> model(hashinr_config_from_json(raw.header.at("config")));
    detail::fill_tensors(raw, model.named_parameters());
    return model;
  } catch (const nlohmann::json::exception& e) {
    throw IoError(path.string() + ": " + e.what());
  }
}

}  // namespace dainr
