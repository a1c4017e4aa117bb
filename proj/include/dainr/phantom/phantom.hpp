#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <string>
#include <vector>

#include "dainr/core/error.hpp"
#include "dainr/core/image.hpp"

namespace dainr {

// Sinusoidal modulation amplitude * sin(2 pi k / period + phase) of frame k.
// A zero period means one cycle over the whole sequence.
struct Modulation {
  double amplitude = 0.0;
  double period = 0.0;
  double phase = 0.0;

  double at(int frame, int frames) const {
    if (amplitude == 0.0) return 0.0;
    const double p = period > 0.0 ? period : frames;
    return amplitude * std::sin(2.0 * std::numbers::pi * frame / p + phase);
  }
};

// Contrast uptake: baseline until `start`, then a linear rise of `slope` per
// frame, capped at `plateau`.
struct UptakeCurve {
  bool enabled = false;
  double baseline = 0.0;
  double start = 0.0;
  double slope = 0.0;
  double plateau = 1.0;

  double at(int frame) const {
    if (!enabled) return 1.0;
    const double rise = slope * std::max(0.0, frame - start);
    return std::min(plateau, baseline + rise);
  }
};

// One ellipse in [-1, 1]^2 coordinates (x along columns, y along rows).
// Axis modulations are relative (a(k) = a (1 + m(k))); centre modulations
// are absolute offsets.
struct EllipseComponent {
  std::string name;
  double cx = 0.0;
  double cy = 0.0;
  double a = 0.5;
  double b = 0.5;
  double rotation = 0.0;  // radians
  std::complex<double> intensity{1.0, 0.0};
  Modulation cx_mod;
  Modulation cy_mod;
  Modulation a_mod;
  Modulation b_mod;
  UptakeCurve uptake;

  struct State {
    double cx, cy, a, b;
    std::complex<double> intensity;
  };

  State at(int frame, int frames) const {
    return {cx + cx_mod.at(frame, frames), cy + cy_mod.at(frame, frames),
            a * (1.0 + a_mod.at(frame, frames)), b * (1.0 + b_mod.at(frame, frames)),
            intensity * uptake.at(frame)};
  }
};

struct DynamicPhantomSpec {
  int size = 64;
  int frames = 16;
  std::vector<EllipseComponent> components;
  // Width in pixels of a linear edge ramp; 0 rasterises hard edges (a pixel
  // belongs to an ellipse iff its quadratic form is <= 1).
  double edge_width = 0.0;
};

namespace detail {

inline double ellipse_form(const EllipseComponent::State& s, double rotation, double x, double y) {
  const double dx = x - s.cx;
  const double dy = y - s.cy;
  const double c = std::cos(rotation);
  const double sn = std::sin(rotation);
  const double u = c * dx + sn * dy;
  const double v = -sn * dx + c * dy;
  return (u * u) / (s.a * s.a) + (v * v) / (s.b * s.b);
}

// Half-extent of the rotated ellipse's bounding box along x and y.
inline std::array<double, 2> ellipse_extent(const EllipseComponent::State& s, double rotation) {
  const double c = std::cos(rotation);
  const double sn = std::sin(rotation);
  return {std::sqrt(s.a * s.a * c * c + s.b * s.b * sn * sn),
          std::sqrt(s.a * s.a * sn * sn + s.b * s.b * c * c)};
}

}  // namespace detail

inline void validate(const DynamicPhantomSpec& spec) {
  require(spec.size >= 2, "phantom size must be at least 2");
  require(spec.frames >= 1, "phantom needs at least one frame");
  require(spec.edge_width >= 0.0, "edge width must be non-negative");
  for (const auto& comp : spec.components) {
    for (int k = 0; k < spec.frames; ++k) {
      const auto s = comp.at(k, spec.frames);
      require(s.a > 0.0 && s.b > 0.0,
              "component '" + comp.name + "' has a non-positive axis at frame " + std::to_string(k));
      require(std::isfinite(std::abs(s.intensity)) && std::abs(s.intensity) <= 1e3,
              "component '" + comp.name + "' intensity out of bounds");
      const auto ext = detail::ellipse_extent(s, comp.rotation);
      require(std::abs(s.cx) + ext[0] <= 1.0 && std::abs(s.cy) + ext[1] <= 1.0,
              "component '" + comp.name + "' leaves the field of view at frame " +
                  std::to_string(k));
    }
  }
}

// Membership of pixel (r, c) in a component at a given state, in [0, 1].
inline double ellipse_membership(const EllipseComponent::State& s, double rotation, int r, int c,
                                 int size, double edge_width) {
  const double x = lattice_coordinate(c, size);
  const double y = lattice_coordinate(r, size);
  const double q = detail::ellipse_form(s, rotation, x, y);
  if (edge_width <= 0.0) return q <= 1.0 ? 1.0 : 0.0;
  // Approximate signed distance to the boundary in pixels.
  const double radius_px = 0.5 * size * std::min(s.a, s.b);
  const double dist = (std::sqrt(q) - 1.0) * radius_px;
  return std::clamp(0.5 - dist / edge_width, 0.0, 1.0);
}

inline ImageSequence<double> generate_phantom(const DynamicPhantomSpec& spec) {
  validate(spec);
  ImageSequence<double> seq(spec.frames, spec.size, spec.size);
  for (int k = 0; k < spec.frames; ++k) {
    auto& frame = seq[k];
    for (const auto& comp : spec.components) {
      const auto s = comp.at(k, spec.frames);
      for (int r = 0; r < spec.size; ++r)
        for (int c = 0; c < spec.size; ++c) {
          const double m = ellipse_membership(s, comp.rotation, r, c, spec.size, spec.edge_width);
          if (m > 0.0) frame(r, c) += m * s.intensity;
        }
    }
  }
  return seq;
}

// Hard mask of a named component at one frame.
inline RealImage component_mask(const DynamicPhantomSpec& spec, const std::string& name,
                                int frame = 0) {
  for (const auto& comp : spec.components) {
    if (comp.name != name) continue;
    const auto s = comp.at(frame, spec.frames);
    RealImage mask(spec.size, spec.size);
    for (int r = 0; r < spec.size; ++r)
      for (int c = 0; c < spec.size; ++c)
        mask(r, c) = ellipse_membership(s, comp.rotation, r, c, spec.size, 0.0);
    return mask;
  }
  throw InvalidArgument("phantom has no component named '" + name + "'");
}

// Beating-ellipse cardiac analog: torso, lungs, a myocardial ring whose blood
// pool contracts once per `cycle` frames, and a slow respiratory drift.
inline DynamicPhantomSpec cardiac_phantom(int size = 64, int frames = 16, double edge_width = 1.5) {
  DynamicPhantomSpec spec;
  spec.size = size;
  spec.frames = frames;
  spec.edge_width = edge_width;
  const Modulation breathing{0.03, 0.0, 0.0};
  const Modulation beat{0.22, 0.0, 0.0};

  EllipseComponent torso{.name = "torso", .cx = 0.0, .cy = 0.0, .a = 0.82, .b = 0.66};
  torso.intensity = std::polar(0.25, 0.1);
  torso.b_mod = {0.04, 0.0, 0.0};
  spec.components.push_back(torso);

  for (double side : {-1.0, 1.0}) {
    EllipseComponent lung{.name = side < 0 ? "lung_left" : "lung_right",
                          .cx = 0.42 * side, .cy = -0.05, .a = 0.22, .b = 0.36,
                          .rotation = 0.2 * side};
    lung.intensity = {-0.18, 0.0};
    lung.cy_mod = breathing;
    spec.components.push_back(lung);
  }

  EllipseComponent myocardium{.name = "myocardium", .cx = 0.02, .cy = 0.08, .a = 0.3, .b = 0.26,
                              .rotation = -0.4};
  myocardium.intensity = std::polar(0.35, 0.25);
  myocardium.a_mod = {0.08, 0.0, 0.0};
  myocardium.b_mod = {0.08, 0.0, 0.0};
  myocardium.cy_mod = breathing;
  spec.components.push_back(myocardium);

  EllipseComponent blood{.name = "blood_pool", .cx = 0.02, .cy = 0.08, .a = 0.19, .b = 0.15,
                         .rotation = -0.4};
  blood.intensity = std::polar(0.6, 0.3);
  blood.a_mod = beat;
  blood.b_mod = beat;
  blood.cy_mod = breathing;
  spec.components.push_back(blood);

  EllipseComponent spine{.name = "spine", .cx = 0.0, .cy = 0.5, .a = 0.08, .b = 0.07};
  spine.intensity = {0.45, 0.0};
  spec.components.push_back(spine);
  return spec;
}

// Contrast-uptake analog: an aorta that enhances early and fast, and a
// liver-like region that enhances late and slowly.
inline DynamicPhantomSpec uptake_phantom(int size = 64, int frames = 16, double edge_width = 1.5) {
  DynamicPhantomSpec spec;
  spec.size = size;
  spec.frames = frames;
  spec.edge_width = edge_width;

  EllipseComponent body{.name = "body", .cx = 0.0, .cy = 0.0, .a = 0.85, .b = 0.62};
  body.intensity = {0.2, 0.0};
  spec.components.push_back(body);

  EllipseComponent liver{.name = "liver", .cx = -0.3, .cy = -0.05, .a = 0.38, .b = 0.3,
                         .rotation = 0.3};
  liver.intensity = {0.5, 0.0};
  liver.uptake = {.enabled = true, .baseline = 0.3, .start = frames * 0.3,
                  .slope = 1.4 / frames, .plateau = 0.9};
  spec.components.push_back(liver);

  EllipseComponent aorta{.name = "aorta", .cx = 0.12, .cy = 0.25, .a = 0.09, .b = 0.09};
  aorta.intensity = {0.8, 0.0};
  aorta.uptake = {.enabled = true, .baseline = 0.15, .start = frames * 0.15,
                  .slope = 4.0 / frames, .plateau = 1.0};
  spec.components.push_back(aorta);

  EllipseComponent kidney{.name = "kidney", .cx = 0.45, .cy = 0.1, .a = 0.14, .b = 0.2,
                          .rotation = -0.3};
  kidney.intensity = {0.6, 0.0};
  kidney.uptake = {.enabled = true, .baseline = 0.2, .start = frames * 0.2,
                   .slope = 2.0 / frames, .plateau = 0.95};
  spec.components.push_back(kidney);
  return spec;
}

inline DynamicPhantomSpec named_phantom(const std::string& name, int size, int frames,
                                        double edge_width) {
  if (name == "cardiac") return cardiac_phantom(size, frames, edge_width);
  if (name == "uptake") return uptake_phantom(size, frames, edge_width);
  throw InvalidArgument("unknown phantom '" + name + "' (expected cardiac or uptake)");
}

}  // namespace dainr
