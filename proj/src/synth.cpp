#include "gtg/synth.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "gtg/rng.hpp"

namespace gtg {

void SynthParams::validate() const {
  if (num_targets < 2) throw InvalidParams("need at least 2 targets");
  if (num_frames < 1) throw InvalidParams("need at least 1 frame");
  if (patch_w < 8 || patch_h < 8) throw InvalidParams("patch must be at least 8x8");
  if (!(hue_separation > 0.0) || hue_separation > 1.0)
    throw InvalidParams("hue_separation must be in (0,1]");
  if (num_targets * hue_separation > 1.0 + 1e-9)
    throw InvalidParams("hues overflow the circle: targets * hue_separation > 1");
  if (pixel_noise < 0.0 || pixel_noise > 1.0) throw InvalidParams("pixel_noise must be in [0,1]");
  if (illumination_drift < 0.0 || illumination_drift > 1.0)
    throw InvalidParams("illumination_drift must be in [0,1]");
  if (occlusion_rate < 0.0 || occlusion_rate >= 1.0)
    throw InvalidParams("occlusion_rate must be in [0,1)");
}

Rgb8 hsv_to_rgb(double h, double s, double v) {
  const double h6 = h * 6.0;
  const int sector = std::min(5, static_cast<int>(h6));
  const double f = h6 - sector;
  const double p = v * (1.0 - s);
  const double q = v * (1.0 - s * f);
  const double t = v * (1.0 - s * (1.0 - f));
  double r, g, b;
  switch (sector) {
    case 0: r = v; g = t; b = p; break;
    case 1: r = q; g = v; b = p; break;
    case 2: r = p; g = v; b = t; break;
    case 3: r = p; g = q; b = v; break;
    case 4: r = t; g = p; b = v; break;
    default: r = v; g = p; b = q; break;
  }
  auto to8 = [](double x) { return static_cast<uint8_t>(std::lround(x * 255.0)); };
  return {to8(r), to8(g), to8(b)};
}

namespace {

struct TargetStyle {
  double torso_h, torso_s, torso_v;
  double legs_h, legs_s, legs_v;
  int torso_rows;  // rows [0, torso_rows) are torso, the rest legs
};

// Targets differ in hue, band contrast and band split so their covariance
// descriptors differ structurally, not just by a mean shift (which covariance
// would not see).
TargetStyle style_for(int t, const SynthParams& p) {
  const double u =
      (p.num_targets > 1) ? static_cast<double>(t - 1) / (p.num_targets - 1) : 0.0;
  TargetStyle s;
  s.torso_h = std::fmod(t * p.hue_separation, 1.0);
  s.torso_s = 0.85;
  s.torso_v = 0.85;
  s.legs_h = std::fmod(t * p.hue_separation + 0.5 * p.hue_separation, 1.0);
  s.legs_s = 0.45 + 0.2 * u;
  s.legs_v = 0.35 + 0.25 * u;
  const double split = 0.35 + 0.3 * u;
  s.torso_rows = std::clamp(static_cast<int>(std::lround(split * p.patch_h)), 1, p.patch_h - 1);
  return s;
}

constexpr int kMargin = 8;
constexpr int kGap = 12;
constexpr int kJitter = 4;  // < kGap/2 and < kMargin, so slots never collide

// horizontal oscillation inside the slot; pure function of (t, frame)
int slot_x(int t, int frame, const SynthParams& p) {
  const double phase = 2.0 * std::numbers::pi * frame / 40.0 + 2.4 * t;
  const int wobble = static_cast<int>(std::lround(kJitter * std::sin(phase)));
  return kMargin + (t - 1) * (p.patch_w + kGap) + wobble;
}

}  // namespace

Scenario generate_scenario(const SynthParams& params) {
  params.validate();

  const int c = params.num_targets;
  const int frame_w = 2 * kMargin + c * params.patch_w + (c - 1) * kGap;
  const int frame_h = 2 * kMargin + params.patch_h;

  std::vector<TargetStyle> styles;
  for (int t = 1; t <= c; ++t) styles.push_back(style_for(t, params));

  // draw order per frame: 1 brightness, then per target 1 occlusion and, if
  // visible, 3 noise values per pixel in row-major order
  SplitMix64 rng(params.seed);

  Scenario s;
  s.num_targets = c;
  for (int f = 0; f < params.num_frames; ++f) {
    Image frame;
    frame.width = frame_w;
    frame.height = frame_h;
    frame.rgb.assign(static_cast<size_t>(frame_w) * frame_h * 3, 0);
    for (int y = 0; y < frame_h; ++y) {
      for (int x = 0; x < frame_w; ++x) {
        uint8_t* px = frame.px(x, y);
        px[0] = 24;
        px[1] = 24;
        px[2] = 28;
      }
    }

    const double brightness =
        1.0 - params.illumination_drift + 2.0 * params.illumination_drift * rng.next_double();

    for (int t = 1; t <= c; ++t) {
      const double occ = rng.next_double();
      if (occ < params.occlusion_rate) continue;

      const TargetStyle& st = styles[t - 1];
      const int x0 = slot_x(t, f, params);
      const int y0 = kMargin;
      for (int py = 0; py < params.patch_h; ++py) {
        const bool torso = py < st.torso_rows;
        const Rgb8 base = torso ? hsv_to_rgb(st.torso_h, st.torso_s, st.torso_v)
                                : hsv_to_rgb(st.legs_h, st.legs_s, st.legs_v);
        const double base01[3] = {base.r / 255.0, base.g / 255.0, base.b / 255.0};
        for (int px = 0; px < params.patch_w; ++px) {
          uint8_t* out = frame.px(x0 + px, y0 + py);
          for (int ch = 0; ch < 3; ++ch) {
            const double eta = rng.next_double();
            const double noisy =
                base01[ch] * brightness + (2.0 * eta - 1.0) * params.pixel_noise;
            out[ch] = static_cast<uint8_t>(std::lround(std::clamp(noisy, 0.0, 1.0) * 255.0));
          }
        }
      }
      s.detections.push_back(Detection{f, BBox{x0, y0, params.patch_w, params.patch_h}, t});
    }

    s.frame_ids.push_back(f);
    s.frames.push_back(std::move(frame));
  }

  finalize_scenario(s);
  return s;
}

}  // namespace gtg
