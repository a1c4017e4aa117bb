#pragma once

#include <cstdint>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "dainr/core/error.hpp"
#include "dainr/core/raw_io.hpp"

namespace dainr::cli {

struct ConfigKey {
  std::string name;
  std::string default_value;
  std::string help;
};

// Every accepted key with its default. Keys are flat, sections are dotted.
inline const std::vector<ConfigKey>& config_keys() {
  static const std::vector<ConfigKey> keys{
      {"method", "dainr", "dainr | hashinr | zerofill"},
      {"seed", "0", "seed for coil maps, noise, model init and frame order"},
      {"dataset", "", "dataset directory (reconstruct, evaluate, interpolate)"},
      {"recon", "", "reconstruction directory (evaluate)"},
      {"phantom.name", "cardiac", "cardiac | uptake"},
      {"phantom.size", "64", "image size N"},
      {"phantom.frames", "16", "frame count"},
      {"phantom.coils", "4", "receive coils"},
      {"phantom.edge_width", "1.5", "edge ramp in pixels, 0 for hard edges"},
      {"sim.spokes", "7", "spokes per frame"},
      {"sim.samples_per_spoke", "0", "readout samples, 0 means N"},
      {"sim.start_index", "0", "golden-angle index of the first spoke"},
      {"sim.operator", "exact", "exact (NDFT) | gridded (NUFFT)"},
      {"sim.noise_std", "0", "complex Gaussian noise per component"},
      {"train.iterations", "500", "optimisation steps"},
      {"train.lr", "0.001", "AdamW learning rate"},
      {"train.weight_decay", "0", "AdamW decoupled weight decay"},
      {"train.schedule", "cyclic", "cyclic | random frame order"},
      {"train.early_stop", "true", "stop when the loss plateaus"},
      {"train.canonical_frame", "0", "frame rendered without deformation"},
      {"hash.levels", "8", "hash grid levels L"},
      {"hash.log2_table_size", "14", "log2 of entries per level T"},
      {"hash.features", "2", "features per entry F"},
      {"hash.min_resolution", "8", "coarsest grid N_min"},
      {"hash.max_resolution", "64", "finest grid N_max, 0 to use hash.growth"},
      {"hash.growth", "2", "growth ratio b when hash.max_resolution is 0"},
      {"model.hidden_width", "64", "MLP width"},
      {"model.hidden_layers", "5", "MLP hidden layers"},
      {"model.spatial_bands", "10", "frequency bands for x, y"},
      {"model.temporal_bands", "6", "frequency bands for t"},
      {"model.features", "auto", "image features: on | off | auto (on for temporal interpolation)"},
      {"model.feature_channels", "16", "feature channels"},
      {"hashinr.lambda_tv", "0", "temporal TV weight"},
      {"hashinr.lambda_lowrank", "0", "nuclear norm weight"},
      {"interp.mode", "none", "none | spatial | temporal"},
      {"interp.factor", "2", "spatial subsample factor: 1.2 | 1.5 | 2"},
      {"interp.keep_every", "2", "temporal: keep every k-th frame, 2 | 3"},
      {"eval.metrics", "auto", "full | roi | auto (full when ground truth exists)"},
  };
  return keys;
}

class RunConfig {
 public:
  RunConfig() {
    for (const auto& k : config_keys()) values_[k.name] = k.default_value;
  }

  static bool known(const std::string& key) {
    for (const auto& k : config_keys())
      if (k.name == key) return true;
    return false;
  }

  void set(const std::string& key, const std::string& value) {
    if (!known(key)) throw InvalidArgument("unknown config key '" + key + "'");
    values_[key] = value;
  }

  // `key = value` lines; '#' starts a comment. Repeated keys are rejected.
  void parse(const std::string& text, const std::string& origin = "config") {
    std::istringstream in(text);
    std::string line;
    std::map<std::string, int> seen;
    for (int lineno = 1; std::getline(in, line); ++lineno) {
      if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
      const auto body = trim(line);
      if (body.empty()) continue;
      const auto eq = body.find('=');
      const std::string where = origin + ":" + std::to_string(lineno);
      if (eq == std::string::npos) throw InvalidArgument(where + ": expected 'key = value'");
      const auto key = trim(body.substr(0, eq));
      if (!known(key)) throw InvalidArgument(where + ": unknown config key '" + key + "'");
      if (seen.count(key))
        throw InvalidArgument(where + ": '" + key + "' already set on line " + std::to_string(seen[key]));
      seen[key] = lineno;
      values_[key] = trim(body.substr(eq + 1));
    }
  }

  void load(const std::filesystem::path& path) { parse(read_text(path), path.string()); }

  const std::string& str(const std::string& key) const {
    auto it = values_.find(key);
    if (it == values_.end()) throw InvalidArgument("unknown config key '" + key + "'");
    return it->second;
  }

  long long integer(const std::string& key) const {
    const auto& s = str(key);
    try {
      std::size_t used = 0;
      const long long v = std::stoll(s, &used);
      if (used == s.size()) return v;
    } catch (const std::exception&) {
    }
    throw InvalidArgument("config key '" + key + "' must be an integer, got '" + s + "'");
  }

  double real(const std::string& key) const {
    const auto& s = str(key);
    try {
      std::size_t used = 0;
      const double v = std::stod(s, &used);
      if (used == s.size()) return v;
    } catch (const std::exception&) {
    }
    throw InvalidArgument("config key '" + key + "' must be a number, got '" + s + "'");
  }

  bool boolean(const std::string& key) const {
    const auto& s = str(key);
    if (s == "true" || s == "1" || s == "on") return true;
    if (s == "false" || s == "0" || s == "off") return false;
    throw InvalidArgument("config key '" + key + "' must be true or false, got '" + s + "'");
  }

  // Every key in documentation order, one per line.
  std::string resolved() const {
    std::string out;
    for (const auto& k : config_keys()) out += k.name + " = " + values_.at(k.name) + "\n";
    return out;
  }

 private:
  static std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    const auto b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
  }

  std::map<std::string, std::string> values_;
};

}  // namespace dainr::cli
