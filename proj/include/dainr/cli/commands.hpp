#pragma once

#include <cmath>
#include <filesystem>
#include <iostream>
#include <map>
#include <string>

#include <json.hpp>

#include "dainr/cli/config.hpp"
#include "dainr/core/pgm.hpp"
#include "dainr/evaluation/metrics.hpp"
#include "dainr/networks/checkpoint.hpp"
#include "dainr/training/pipeline.hpp"

namespace dainr::cli {

namespace fs = std::filesystem;

struct Invocation {
  RunConfig config;
  fs::path out;
  bool force = false;
  std::map<std::string, fs::path> rois;  // extra ROI masks for evaluate
  std::ostream* log = &std::cerr;
};

// Creates `dir`, refusing to reuse a non-empty directory unless forced, in
// which case its contents are removed first.
inline void prepare_output(const fs::path& dir, bool force) {
  require(!dir.empty(), "no output directory given (use --out)");
  if (fs::exists(dir)) {
    require(fs::is_directory(dir), dir.string() + " exists and is not a directory");
    if (!fs::is_empty(dir)) {
      require(force, "output directory " + dir.string() + " is not empty (use --force to overwrite)");
      for (const auto& entry : fs::directory_iterator(dir)) fs::remove_all(entry.path());
    }
  }
  fs::create_directories(dir);
}

inline PhantomDatasetConfig phantom_config(const RunConfig& c) {
  PhantomDatasetConfig p;
  p.phantom = c.str("phantom.name");
  p.size = static_cast<int>(c.integer("phantom.size"));
  p.frames = static_cast<int>(c.integer("phantom.frames"));
  p.coils = static_cast<int>(c.integer("phantom.coils"));
  p.edge_width = c.real("phantom.edge_width");
  p.seed = static_cast<std::uint64_t>(c.integer("seed"));
  p.sim.spokes_per_frame = static_cast<int>(c.integer("sim.spokes"));
  p.sim.samples_per_spoke = static_cast<int>(c.integer("sim.samples_per_spoke"));
  p.sim.start_index = c.integer("sim.start_index");
  p.sim.op = parse_operator(c.str("sim.operator"));
  p.sim.noise_std = c.real("sim.noise_std");
  require(p.size >= 8, "phantom.size must be at least 8");
  require(p.frames >= 1, "phantom.frames must be positive");
  require(p.sim.spokes_per_frame >= 1, "sim.spokes must be positive");
  require(p.sim.samples_per_spoke >= 0, "sim.samples_per_spoke must be non-negative");
  return p;
}

inline ReconstructionOptions reconstruction_options(const RunConfig& c) {
  ReconstructionOptions o;
  o.method = parse_method(c.str("method"));
  o.iterations = static_cast<int>(c.integer("train.iterations"));
  o.lr = c.real("train.lr");
  o.weight_decay = c.real("train.weight_decay");
  o.schedule = parse_schedule(c.str("train.schedule"));
  o.early_stop = c.boolean("train.early_stop");
  o.seed = static_cast<std::uint64_t>(c.integer("seed"));
  o.canonical_frame = static_cast<int>(c.integer("train.canonical_frame"));
  o.hash.levels = static_cast<int>(c.integer("hash.levels"));
  const auto log2t = c.integer("hash.log2_table_size");
  require(log2t >= 1 && log2t <= 30, "hash.log2_table_size must be in [1, 30]");
  o.hash.table_size = std::uint64_t{1} << log2t;
  o.hash.features = static_cast<int>(c.integer("hash.features"));
  o.hash.min_resolution = static_cast<int>(c.integer("hash.min_resolution"));
  o.hash.max_resolution = static_cast<int>(c.integer("hash.max_resolution"));
  o.hash.growth = c.real("hash.growth");
  o.hidden_width = static_cast<int>(c.integer("model.hidden_width"));
  o.hidden_layers = static_cast<int>(c.integer("model.hidden_layers"));
  o.spatial_bands = static_cast<int>(c.integer("model.spatial_bands"));
  o.temporal_bands = static_cast<int>(c.integer("model.temporal_bands"));
  o.feature_channels = static_cast<int>(c.integer("model.feature_channels"));
  o.weights.temporal_tv = c.real("hashinr.lambda_tv");
  o.weights.low_rank = c.real("hashinr.lambda_lowrank");
  o.interpolation.kind = parse_interpolation(c.str("interp.mode"));
  o.interpolation.factor = c.real("interp.factor");
  o.interpolation.keep_every = static_cast<int>(c.integer("interp.keep_every"));
  const auto& features = c.str("model.features");
  if (features == "auto")
    o.use_features = o.interpolation.kind == InterpolationKind::temporal;
  else if (features == "on" || features == "off")
    o.use_features = features == "on";
  else
    throw InvalidArgument("model.features must be on, off or auto, got '" + features + "'");
  return o;
}

inline fs::path required_path(const RunConfig& c, const std::string& key, const std::string& flag) {
  const auto& p = c.str(key);
  require(!p.empty(), "no " + key + " directory given (use " + flag + ")");
  require(fs::is_directory(p), key + " directory " + p + " does not exist");
  return p;
}

inline void write_previews(const fs::path& dir, const std::vector<RealImage>& frames, const std::string& stem,
                           double lo = 0.0, double hi = 1.0) {
  fs::create_directories(dir);
  for (std::size_t k = 0; k < frames.size(); ++k) {
    char name[64];
    std::snprintf(name, sizeof name, "%s_%03zu.pgm", stem.c_str(), k);
    write_pgm(dir / name, frames[k], lo, hi);
  }
}

inline void cmd_simulate(const Invocation& inv) {
  const auto cfg = phantom_config(inv.config);
  prepare_output(inv.out, inv.force);
  const auto d = make_phantom_dataset(cfg);
  save_dataset(d, inv.out);
  write_text(inv.out / "config.resolved", inv.config.resolved());
  const double err = round_trip_error(load_dataset(inv.out));
  require(err < 1e-5, "written dataset failed the round-trip check (relative error " + std::to_string(err) + ")");
  *inv.log << "simulate: " << cfg.phantom << " N=" << cfg.size << " frames=" << cfg.frames
           << " coils=" << cfg.coils << " spokes=" << cfg.sim.spokes_per_frame
           << " AF=" << d.acquisition.acceleration() << " -> " << inv.out.string() << "\n";
}

// Writes frames.f32 and manifest.json; `extra` adds method-specific fields.
inline void save_reconstruction(const fs::path& dir, const ImageSequence<float>& frames,
                                nlohmann::json extra = nlohmann::json::object()) {
  const int n = frames.rows();
  nlohmann::json manifest{
      {"format", "dainr-recon"},
      {"version", 1},
      {"image_size", n},
      {"frames", frames.size()},
      {"arrays", {{"frames", detail::array_entry("frames.f32", {frames.size(), n, n, 2})}}},
  };
  manifest.update(extra);
  write_f32(dir / "frames.f32", detail::flatten(frames));
  write_text(dir / "manifest.json", manifest.dump(2) + "\n");
}

// Complex frames of a reconstruction directory.
inline ImageSequence<float> load_reconstruction(const fs::path& dir) {
  nlohmann::json m;
  try {
    m = nlohmann::json::parse(read_text(dir / "manifest.json"));
    require(m.at("format") == "dainr-recon", dir.string() + " is not a reconstruction directory");
    const int frames = m.at("frames");
    const int n = m.at("image_size");
    auto v = read_f32(dir / m.at("arrays").at("frames").at("file").get<std::string>(),
                      static_cast<std::size_t>(frames) * n * n * 2);
    return detail::unflatten(v, frames, n, n);
  } catch (const nlohmann::json::exception& e) {
    throw IoError((dir / "manifest.json").string() + ": " + e.what());
  }
}

// Interpolation scores: temporal mode reports per-frame PSNR with a kept flag
// (needs ground truth); spatial mode at an integer ratio reports the PSNR
// between the box-downsampled high-resolution render and the r = 1 render.
inline std::string interpolation_scores(const DatasetBundle& d, const ReconstructionOptions& opts,
                                        const ReconstructionResult& r) {
  std::ostringstream out;
  out.precision(9);
  if (opts.interpolation.kind == InterpolationKind::temporal) {
    if (!d.ground_truth) return "";
    const auto rep = evaluate_sequence(&*d.ground_truth, r.frames);
    out << "frame,kept,psnr_db\n";
    for (int k = 0; k < r.frames.size(); ++k)
      out << k << ',' << (k % opts.interpolation.keep_every == 0) << ',' << format_psnr(rep.psnr_db[k]) << '\n';
    return out.str();
  }
  const int ratio = static_cast<int>(std::lround(r.render_ratio));
  if (std::abs(r.render_ratio - ratio) > 1e-12 || r.dainr->uses_features()) return "";
  const auto low = render_sequence(*r.dainr, r.frames.size(), opts.canonical_frame, 1.0).cast<double>();
  ImageSequence<double> down;
  for (const auto& f : r.frames.frames) down.frames.push_back(box_downsample(f, ratio));
  const auto rep = evaluate_sequence(&low, down);
  out << "frame,downsample_psnr_db\n";
  for (int k = 0; k < r.frames.size(); ++k) out << k << ',' << format_psnr(rep.psnr_db[k]) << '\n';
  return out.str();
}

inline void cmd_reconstruct(const Invocation& inv, bool interpolate = false) {
  const auto opts = reconstruction_options(inv.config);
  if (interpolate)
    require(opts.interpolation.kind != InterpolationKind::none,
            "interpolate needs interp.mode = spatial or temporal");
  const auto dataset_dir = required_path(inv.config, "dataset", "--dataset");
  const auto d = load_dataset(dataset_dir);
  if (opts.interpolation.kind == InterpolationKind::temporal)
    require(d.frames() >= 4, "temporal interpolation needs at least 4 frames, dataset has " +
                                 std::to_string(d.frames()));
  prepare_output(inv.out, inv.force);
  const auto r = reconstruct(d, opts);

  const int n = r.frames.rows();
  nlohmann::json manifest{
      {"method", to_string(opts.method)},
      {"train_size", r.train_size},
      {"render_ratio", r.render_ratio},
      {"train_frames", r.train_frames},
      {"intensity_scale", r.intensity_scale},
      {"iterations_run", r.train.iterations_run()},
      {"stopped_early", r.train.stopped_early},
      {"interpolation",
       {{"mode", to_string(opts.interpolation.kind)},
        {"factor", opts.interpolation.factor},
        {"keep_every", opts.interpolation.keep_every}}},
  };
  if (opts.method == Method::hashinr)
    manifest["hashinr"] = {{"lambda_tv", opts.weights.temporal_tv}, {"lambda_lowrank", opts.weights.low_rank}};
  save_reconstruction(inv.out, r.frames.cast<float>(), manifest);
  write_text(inv.out / "config.resolved", inv.config.resolved());
  if (opts.method != Method::zerofill) {
    write_text(inv.out / "loss.csv", loss_trace_csv(r.train.trace));
    const nlohmann::json meta{{"frames", r.frames.size()},
                              {"canonical_frame", opts.canonical_frame},
                              {"intensity_scale", r.intensity_scale},
                              {"render_ratio", r.render_ratio}};
    if (r.dainr) save_checkpoint(inv.out / "checkpoint.bin", *r.dainr, meta);
    if (r.hashinr) save_checkpoint(inv.out / "checkpoint.bin", *r.hashinr, meta);
  }
  write_previews(inv.out / "previews", normalize_sequence(r.frames), "frame");
  if (opts.interpolation.kind != InterpolationKind::none) {
    const auto scores = interpolation_scores(d, opts, r);
    if (!scores.empty()) write_text(inv.out / "interpolation.csv", scores);
  }
  *inv.log << "reconstruct: " << to_string(opts.method) << ", " << r.frames.size() << " frames of " << n
           << "x" << n;
  if (!r.train.trace.empty())
    *inv.log << ", " << r.train.iterations_run() << " iterations, final loss " << r.train.trace.back().loss;
  *inv.log << " -> " << inv.out.string() << "\n";
}

inline void cmd_evaluate(const Invocation& inv) {
  const auto dataset_dir = required_path(inv.config, "dataset", "--dataset");
  const auto recon_dir = required_path(inv.config, "recon", "--recon");
  const auto d = load_dataset(dataset_dir);
  const auto recon = load_reconstruction(recon_dir);
  require(recon.size() == d.frames() && recon.rows() == d.image_size(),
          "reconstruction shape does not match the dataset (" + std::to_string(recon.size()) + " frames of " +
              std::to_string(recon.rows()) + " vs " + std::to_string(d.frames()) + " of " +
              std::to_string(d.image_size()) + ")");
  const auto& mode = inv.config.str("eval.metrics");
  require(mode == "auto" || mode == "full" || mode == "roi", "eval.metrics must be full, roi or auto");
  const bool full = mode == "full" || (mode == "auto" && d.ground_truth.has_value());
  require(!full || d.ground_truth.has_value(), "PSNR/SSIM requested but the dataset has no ground truth");
  auto rois = d.rois;
  for (const auto& [name, path] : inv.rois) rois[name] = load_mask(path, d.image_size());
  require(full || !rois.empty(), "ROI-only evaluation needs at least one ROI mask (use --roi name=path)");
  prepare_output(inv.out, inv.force);
  const auto report = evaluate_sequence(full ? &*d.ground_truth : nullptr, recon, rois);
  write_text(inv.out / "metrics.csv", report.to_csv());
  write_text(inv.out / "config.resolved", inv.config.resolved());
  if (full) {
    const auto ref = normalize_sequence(*d.ground_truth);
    const auto test = normalize_sequence(recon);
    std::vector<RealImage> maps;
    for (int k = 0; k < recon.size(); ++k) maps.push_back(error_map(ref[k], test[k]));
    write_previews(inv.out / "error_maps", maps, "error", 0.0, 0.25);
    nlohmann::json summary{{"mean_psnr_db", report.mean_psnr()}, {"mean_ssim", report.mean_ssim()}};
    write_text(inv.out / "summary.json", summary.dump(2) + "\n");
    *inv.log << "evaluate: mean PSNR " << format_psnr(report.mean_psnr()) << " dB, mean SSIM "
             << report.mean_ssim() << " -> " << inv.out.string() << "\n";
  } else {
    *inv.log << "evaluate: ROI curves for " << rois.size() << " region(s) -> " << inv.out.string() << "\n";
  }
}

}  // namespace dainr::cli
