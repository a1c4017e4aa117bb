#pragma once

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "dainr/core/raw_io.hpp"
#include "dainr/phantom/phantom.hpp"
#include "dainr/phantom/simulate.hpp"

namespace dainr {

// In-memory form of a dataset directory:
//   manifest.json      shapes, trajectory header, operator, seeds
//   gt.f32             [frames, N, N, 2]  (optional)
//   coils.f32          [C, N, N, 2]       (optional)
//   trajectory.f32     [frames, K, 2]     (kx, ky), informational
//   density.f32        [frames, K]
//   kspace.f32         [frames, C, K, 2]
//   rois/<name>.f32    [N, N], nonzero inside the region
// All arrays are row-major little-endian float32, complex interleaved (re, im).
struct DatasetBundle {
  std::optional<ImageSequence<float>> ground_truth;
  CoilSensitivities<float> coils;
  KSpaceAcquisition<float> acquisition;
  OperatorKind op = OperatorKind::exact;
  double noise_std = 0.0;
  std::uint64_t noise_seed = 0;
  std::uint64_t seed = 0;
  std::string phantom;
  std::map<std::string, RealImage> rois;

  int image_size() const { return acquisition.image_size; }
  int frames() const { return acquisition.frames(); }
  bool has_coils() const { return coils.count() > 0; }
};

namespace detail {

inline std::vector<float> flatten(const ImageSequence<float>& seq) {
  std::vector<float> out;
  out.reserve(static_cast<std::size_t>(seq.size()) * seq.rows() * seq.cols() * 2);
  for (const auto& f : seq.frames)
    for (auto v : f.data) {
      out.push_back(v.real());
      out.push_back(v.imag());
    }
  return out;
}

inline ImageSequence<float> unflatten(const std::vector<float>& v, int count, int rows, int cols) {
  ImageSequence<float> seq(count, rows, cols);
  std::size_t i = 0;
  for (auto& f : seq.frames)
    for (auto& p : f.data) {
      p = {v[i], v[i + 1]};
      i += 2;
    }
  return seq;
}

inline nlohmann::json array_entry(const std::string& file, std::vector<int> shape) {
  return {{"file", file}, {"dtype", "float32-le"}, {"shape", shape}};
}

inline std::filesystem::path array_path(const std::filesystem::path& dir, const nlohmann::json& arrays,
                                        const std::string& key) {
  return dir / arrays.at(key).at("file").get<std::string>();
}

}  // namespace detail

inline nlohmann::json dataset_manifest(const DatasetBundle& d) {
  const auto& acq = d.acquisition;
  const int n = acq.image_size;
  const int k = acq.trajectories.empty() ? 0 : static_cast<int>(acq.trajectories.front().size());
  nlohmann::json arrays;
  if (d.ground_truth) arrays["ground_truth"] = detail::array_entry("gt.f32", {acq.frames(), n, n, 2});
  if (d.has_coils()) arrays["coils"] = detail::array_entry("coils.f32", {d.coils.count(), n, n, 2});
  arrays["trajectory"] = detail::array_entry("trajectory.f32", {acq.frames(), k, 2});
  arrays["density"] = detail::array_entry("density.f32", {acq.frames(), k});
  arrays["kspace"] = detail::array_entry("kspace.f32", {acq.frames(), acq.coils(), k, 2});
  nlohmann::json rois = nlohmann::json::object();
  for (const auto& [name, mask] : d.rois) rois[name] = detail::array_entry("rois/" + name + ".f32", {n, n});
  const double af = acq.trajectory_kind == kCartesianTrajectory
                        ? 1.0
                        : acceleration_factor(n, acq.spokes_per_frame);
  return {
      {"format", "dainr-dataset"},
      {"version", 1},
      {"image_size", n},
      {"frames", acq.frames()},
      {"coils", acq.coils()},
      {"trajectory",
       {{"kind", acq.trajectory_kind},
        {"spokes_per_frame", acq.spokes_per_frame},
        {"samples_per_spoke", acq.samples_per_spoke},
        {"start_index", acq.start_index},
        {"acceleration_factor", std::round(af * 10.0) / 10.0}}},
      {"operator", to_string(d.op)},
      {"noise", {{"std", d.noise_std}, {"seed", d.noise_seed}}},
      {"seed", d.seed},
      {"phantom", d.phantom},
      {"arrays", arrays},
      {"rois", rois},
  };
}

inline void save_dataset(const DatasetBundle& d, const std::filesystem::path& dir) {
  const auto& acq = d.acquisition;
  require(acq.frames() >= 1, "dataset has no frames");
  require(acq.trajectories.size() == acq.samples.size(), "trajectory/sample frame count mismatch");
  std::filesystem::create_directories(dir);
  const auto manifest = dataset_manifest(d);
  write_text(dir / "manifest.json", manifest.dump(2) + "\n");
  if (d.ground_truth) write_f32(dir / "gt.f32", detail::flatten(*d.ground_truth));
  if (d.has_coils()) {
    ImageSequence<float> maps;
    maps.frames = d.coils.maps;
    write_f32(dir / "coils.f32", detail::flatten(maps));
  }
  std::vector<float> traj, density, kspace;
  for (int f = 0; f < acq.frames(); ++f) {
    for (std::size_t s = 0; s < acq.trajectories[f].size(); ++s) {
      traj.push_back(static_cast<float>(acq.trajectories[f].k[s][0]));
      traj.push_back(static_cast<float>(acq.trajectories[f].k[s][1]));
      density.push_back(static_cast<float>(acq.trajectories[f].density[s]));
    }
    for (const auto& coil : acq.samples[f])
      for (auto v : coil) {
        kspace.push_back(v.real());
        kspace.push_back(v.imag());
      }
  }
  write_f32(dir / "trajectory.f32", traj);
  write_f32(dir / "density.f32", density);
  write_f32(dir / "kspace.f32", kspace);
  if (!d.rois.empty()) std::filesystem::create_directories(dir / "rois");
  for (const auto& [name, mask] : d.rois) {
    std::vector<float> v(mask.data.begin(), mask.data.end());
    write_f32(dir / "rois" / (name + ".f32"), v);
  }
}

// Reads an N x N mask file; any nonzero value is inside.
inline RealImage load_mask(const std::filesystem::path& path, int size) {
  auto v = read_f32(path, static_cast<std::size_t>(size) * size);
  RealImage mask(size, size);
  for (std::size_t i = 0; i < v.size(); ++i) mask.data[i] = v[i] != 0.0f ? 1.0 : 0.0;
  return mask;
}

// Trajectories are rebuilt in double precision from the manifest header; the
// stored float32 copy must agree with them.
inline DatasetBundle load_dataset(const std::filesystem::path& dir) {
  nlohmann::json m;
  try {
    m = nlohmann::json::parse(read_text(dir / "manifest.json"));
  } catch (const nlohmann::json::exception& e) {
    throw IoError((dir / "manifest.json").string() + ": " + e.what());
  }
  DatasetBundle d;
  try {
    require(m.at("format") == "dainr-dataset", "not a dataset manifest");
    require(m.at("version") == 1, "unsupported dataset version");
    const int n = m.at("image_size");
    const int frames = m.at("frames");
    const int coils = m.at("coils");
    require(n >= 1 && frames >= 1 && coils >= 1, "manifest has non-positive sizes");
    const auto& t = m.at("trajectory");
    auto& acq = d.acquisition;
    acq.image_size = n;
    acq.trajectory_kind = t.at("kind").get<std::string>();
    acq.spokes_per_frame = t.at("spokes_per_frame");
    acq.samples_per_spoke = t.at("samples_per_spoke");
    acq.start_index = t.at("start_index");
    acq.trajectories = build_trajectories(acq.trajectory_kind, frames, n, acq.spokes_per_frame,
                                          acq.samples_per_spoke, acq.start_index);
    d.op = parse_operator(m.at("operator").get<std::string>());
    d.noise_std = m.at("noise").at("std");
    d.noise_seed = m.at("noise").at("seed");
    d.seed = m.at("seed");
    d.phantom = m.at("phantom").get<std::string>();

    const auto& arrays = m.at("arrays");
    const std::size_t k = acq.trajectories.front().size();
    auto stored_traj = read_f32(detail::array_path(dir, arrays, "trajectory"), frames * k * 2);
    for (int f = 0; f < frames; ++f)
      for (std::size_t s = 0; s < k; ++s)
        for (int a = 0; a < 2; ++a)
          require(std::abs(stored_traj[(f * k + s) * 2 + a] - acq.trajectories[f].k[s][a]) < 1e-5,
                  "stored trajectory disagrees with the manifest header");
    auto kspace = read_f32(detail::array_path(dir, arrays, "kspace"), frames * coils * k * 2);
    acq.samples.assign(frames, CoilSamples<float>(coils, std::vector<std::complex<float>>(k)));
    std::size_t i = 0;
    for (auto& frame : acq.samples)
      for (auto& coil : frame)
        for (auto& v : coil) {
          v = {kspace[i], kspace[i + 1]};
          i += 2;
        }
    if (arrays.contains("ground_truth")) {
      auto gt = read_f32(detail::array_path(dir, arrays, "ground_truth"),
                         static_cast<std::size_t>(frames) * n * n * 2);
      d.ground_truth = detail::unflatten(gt, frames, n, n);
    }
    if (arrays.contains("coils")) {
      auto maps = read_f32(detail::array_path(dir, arrays, "coils"),
                           static_cast<std::size_t>(coils) * n * n * 2);
      d.coils.maps = detail::unflatten(maps, coils, n, n).frames;
    }
    if (m.contains("rois"))
      for (const auto& [name, entry] : m.at("rois").items())
        d.rois[name] = load_mask(dir / entry.at("file").get<std::string>(), n);
  } catch (const nlohmann::json::exception& e) {
    throw IoError((dir / "manifest.json").string() + ": " + e.what());
  }
  return d;
}

// Re-simulates the acquisition from the stored ground truth and returns the
// worst per-frame relative l2 deviation from the stored samples.
inline double round_trip_error(const DatasetBundle& d) {
  require(d.ground_truth.has_value(), "round trip needs ground truth");
  require(d.has_coils(), "round trip needs coil maps");
  const auto& acq = d.acquisition;
  if (acq.trajectory_kind == kCartesianTrajectory) {
    double worst = 0.0;
    for (int f = 0; f < acq.frames(); ++f) {
      auto ref = forward_model(d.ground_truth->frames[f].cast<double>(), d.coils.cast<double>(),
                               Ndft<double>(acq.trajectories[f], acq.image_size));
      double num = 0, den = 0;
      for (int c = 0; c < acq.coils(); ++c)
        for (std::size_t s = 0; s < ref[c].size(); ++s) {
          num += std::norm(ref[c][s] - std::complex<double>(acq.samples[f][c][s]));
          den += std::norm(ref[c][s]);
        }
      worst = std::max(worst, den > 0 ? std::sqrt(num / den) : std::sqrt(num));
    }
    return worst;
  }
  SimulationOptions opts;
  opts.spokes_per_frame = acq.spokes_per_frame;
  opts.samples_per_spoke = acq.samples_per_spoke;
  opts.start_index = acq.start_index;
  opts.op = d.op;
  opts.noise_std = d.noise_std;
  opts.noise_seed = d.noise_seed;
  auto again = retrospective_undersample(d.ground_truth->cast<double>(), d.coils.cast<double>(), opts);
  double worst = 0.0;
  for (int f = 0; f < acq.frames(); ++f) {
    double num = 0, den = 0;
    for (int c = 0; c < acq.coils(); ++c)
      for (std::size_t s = 0; s < again.samples[f][c].size(); ++s) {
        const auto stored = std::complex<double>(acq.samples[f][c][s]);
        num += std::norm(again.samples[f][c][s] - stored);
        den += std::norm(again.samples[f][c][s]);
      }
    worst = std::max(worst, den > 0 ? std::sqrt(num / den) : std::sqrt(num));
  }
  return worst;
}

// Ground truth of a fully sampled Cartesian dataset: coil-combined inverse DFT.
inline ImageSequence<double> cartesian_ground_truth(const DatasetBundle& d) {
  const auto& acq = d.acquisition;
  require(acq.trajectory_kind == kCartesianTrajectory, "dataset is not Cartesian");
  ImageSequence<double> out;
  const auto coils = d.has_coils() ? d.coils.cast<double>() : unit_coil<double>(acq.image_size, acq.image_size);
  require(coils.count() == acq.coils(), "Cartesian dataset without maps must be single-coil");
  for (int f = 0; f < acq.frames(); ++f) {
    CoilSamples<double> samples;
    for (const auto& c : acq.samples[f]) samples.emplace_back(c.begin(), c.end());
    out.frames.push_back(forward_model_adjoint(samples, coils,
                                               Ndft<double>(acq.trajectories[f], acq.image_size), true));
  }
  return out;
}


struct PhantomDatasetConfig {
  std::string phantom = "cardiac";
  int size = 64;
  int frames = 16;
  int coils = 4;
  double edge_width = 1.5;
  std::uint64_t seed = 0;
  SimulationOptions sim;
};

// Phantom, coil maps and retrospective acquisition in one bundle. Coil maps
// use `seed`, noise uses `seed + 1`. ROI masks are the frame-0 footprints of
// the phantom's named regions of interest.
inline DatasetBundle make_phantom_dataset(const PhantomDatasetConfig& cfg) {
  require(cfg.coils >= 1, "need at least one coil");
  const auto spec = named_phantom(cfg.phantom, cfg.size, cfg.frames, cfg.edge_width);
  const auto gt = generate_phantom(spec);
  const auto maps = generate_coil_maps<double>(cfg.size, cfg.coils, cfg.seed);
  auto sim = cfg.sim;
  sim.noise_seed = cfg.seed + 1;
  // Simulate from the float32-rounded inputs that will be stored, so the
  // stored bundle re-simulates exactly.
  const auto gt32 = gt.cast<float>();
  const auto maps32 = maps.cast<float>();
  auto acq = retrospective_undersample(gt32.cast<double>(), maps32.cast<double>(), sim);
  DatasetBundle d;
  d.ground_truth = gt32;
  d.coils = maps32;
  d.acquisition = acq.cast<float>();
  d.op = sim.op;
  d.noise_std = sim.noise_std;
  d.noise_seed = sim.noise_seed;
  d.seed = cfg.seed;
  d.phantom = cfg.phantom;
  const std::vector<std::string> rois =
      cfg.phantom == "cardiac" ? std::vector<std::string>{"blood_pool", "myocardium"}
                               : std::vector<std::string>{"aorta", "liver", "kidney"};
  for (const auto& name : rois) d.rois[name] = component_mask(spec, name, 0);
  return d;
}

}  // namespace dainr
