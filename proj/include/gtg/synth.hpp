#pragma once

#include <cstdint>

#include "gtg/tracking.hpp"

namespace gtg {

// Deterministic scenario generator: C distinctly-colored two-tone targets
// rendered into every frame with optional pixel noise, per-frame brightness
// drift and random occlusion. Stands in for real surveillance footage in the
// quantitative tests.
struct SynthParams {
  int num_targets = 3;
  int num_frames = 30;
  int patch_w = 16;
  int patch_h = 32;
  double hue_separation = 1.0 / 3.0;  // base hue of target t is t * hue_separation
  double pixel_noise = 0.0;           // additive amplitude on [0,1] channels
  double illumination_drift = 0.0;    // per-frame brightness factor in [1-d, 1+d]
  double occlusion_rate = 0.0;        // per (frame, target) drop probability
  uint64_t seed = 1;

  void validate() const;  // throws InvalidParams
};

struct Rgb8 {
  uint8_t r, g, b;
};

// Inverse hexcone, h in [0,1), s,v in [0,1]; used by the renderer.
Rgb8 hsv_to_rgb(double h, double s, double v);

// Builds the whole scenario in memory (frames, detections with truth ids,
// patches). Writing it to disk with write_scenario reproduces the exact same
// bytes for the same params; the draw order of the SplitMix64 stream is part
// of the format contract (see README).
Scenario generate_scenario(const SynthParams& params);

}  // namespace gtg
