#pragma once

#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include "dainr/autodiff/adamw.hpp"
#include "dainr/core/rng.hpp"

namespace dainr {

enum class FrameSchedule { cyclic, random };

inline FrameSchedule parse_schedule(const std::string& name) {
  if (name == "cyclic") return FrameSchedule::cyclic;
  if (name == "random") return FrameSchedule::random;
  throw InvalidArgument("unknown frame schedule '" + name + "' (expected cyclic or random)");
}

inline std::string to_string(FrameSchedule s) {
  return s == FrameSchedule::cyclic ? "cyclic" : "random";
}

struct TrainConfig {
  int iterations = 2000;
  ad::AdamWOptions optimizer;
  FrameSchedule schedule = FrameSchedule::cyclic;
  std::uint64_t seed = 0;
  bool early_stop = true;
  int plateau_window = 200;
  double plateau_tolerance = 1e-5;
  int snapshot_every = 100;

  void validate() const {
    require(iterations >= 1, "iterations must be at least 1");
    optimizer.validate();
    require(plateau_window >= 1, "plateau window must be positive");
    require(plateau_tolerance >= 0.0, "plateau tolerance must be non-negative");
    require(snapshot_every >= 1, "snapshot interval must be positive");
  }
};

struct LossRecord {
  int iteration = 0;
  int frame = 0;  // -1 when the step used every frame
  double loss = 0.0;
};

struct TrainResult {
  std::vector<LossRecord> trace;
  bool stopped_early = false;
  int iterations_run() const { return static_cast<int>(trace.size()); }
};

inline std::string loss_trace_csv(const std::vector<LossRecord>& trace) {
  std::ostringstream out;
  out.precision(9);
  out << "iteration,frame,loss\n";
  for (const auto& r : trace) out << r.iteration << ',' << r.frame << ',' << r.loss << '\n';
  return out.str();
}

// Builds the loss of one optimisation step for the given frame on the tape.
template <class T>
using StepLoss = std::function<ad::Tensor<T>(ad::Tape<T>&, int frame)>;

// Mean loss of the last `window` steps against the window before it.
inline bool plateaued(const std::vector<LossRecord>& trace, int window, double tolerance) {
  const std::size_t w = static_cast<std::size_t>(window);
  if (trace.size() < 2 * w) return false;
  double recent = 0.0, previous = 0.0;
  for (std::size_t i = trace.size() - w; i < trace.size(); ++i) recent += trace[i].loss;
  for (std::size_t i = trace.size() - 2 * w; i < trace.size() - w; ++i) previous += trace[i].loss;
  if (previous == 0.0) return recent == 0.0;
  return std::abs(previous - recent) / std::abs(previous) < tolerance;
}

// AdamW over `params`, one frame per step from `frames` (cyclic or seeded
// random order). A frame index of -1 in `frames` is passed through unchanged.
// On a non-finite loss or gradient the parameters are restored from the last
// snapshot and NumericalError is thrown.
template <class T>
TrainResult optimize(const std::vector<ad::Tensor<T>>& params, const std::vector<int>& frames,
                     const StepLoss<T>& step_loss, const TrainConfig& cfg) {
  cfg.validate();
  require(!frames.empty(), "no frames to train on");
  ad::AdamW<T> opt(params, cfg.optimizer);
  Rng rng(cfg.seed ^ 0x7a11c0deULL);
  TrainResult result;
  std::vector<std::vector<T>> snapshot;
  int snapshot_iteration = 0;
  auto take_snapshot = [&](int iteration) {
    snapshot.clear();
    for (const auto& p : params) snapshot.emplace_back(p.values().begin(), p.values().end());
    snapshot_iteration = iteration;
  };
  auto restore = [&] {
    for (std::size_t i = 0; i < params.size(); ++i) {
      auto handle = params[i];
      auto v = handle.values();
      std::copy(snapshot[i].begin(), snapshot[i].end(), v.begin());
    }
  };
  take_snapshot(0);
  for (int it = 0; it < cfg.iterations; ++it) {
    const int frame = cfg.schedule == FrameSchedule::cyclic
                          ? frames[static_cast<std::size_t>(it) % frames.size()]
                          : frames[rng.next() % frames.size()];
    opt.zero_grad();
    ad::Tape<T> tape;
    auto loss = step_loss(tape, frame);
    const double value = static_cast<double>(loss.item());
    if (!std::isfinite(value)) {
      restore();
      throw NumericalError("loss became non-finite at iteration " + std::to_string(it) +
                           " (frame " + std::to_string(frame) +
                           "); parameters restored to iteration " +
                           std::to_string(snapshot_iteration));
    }
    tape.backward(loss);
    try {
      opt.step();
    } catch (const NumericalError& e) {
      restore();
      throw NumericalError(std::string(e.what()) + "; parameters restored to iteration " +
                           std::to_string(snapshot_iteration));
    }
    result.trace.push_back({it, frame, value});
    if ((it + 1) % cfg.snapshot_every == 0) take_snapshot(it + 1);
    if (cfg.early_stop && plateaued(result.trace, cfg.plateau_window, cfg.plateau_tolerance)) {
      result.stopped_early = true;
      break;
    }
  }
  return result;
}

}  // namespace dainr
