#include "gtg/descriptor.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <memory>
#include <numbers>

namespace gtg {

Hsv rgb_to_hsv(uint8_t r, uint8_t g, uint8_t b) {
  const double rf = r / 255.0, gf = g / 255.0, bf = b / 255.0;
  const double maxc = std::max({rf, gf, bf});
  const double minc = std::min({rf, gf, bf});
  const double delta = maxc - minc;

  Hsv out{0.0, 0.0, maxc};
  if (delta == 0.0) return out;  // achromatic: H = S = 0

  out.s = delta / maxc;
  double h6;
  if (maxc == rf) {
    h6 = (gf - bf) / delta;
    if (h6 < 0.0) h6 += 6.0;
  } else if (maxc == gf) {
    h6 = (bf - rf) / delta + 2.0;
  } else {
    h6 = (rf - gf) / delta + 4.0;
  }
  out.h = h6 / 6.0;
  if (out.h >= 1.0) out.h = 0.0;  // keep H in [0,1)
  return out;
}

FeatureMatrix extract_features(const PixelPatch& patch) {
  const int w = patch.width, h = patch.height;
  if (w < 4 || h < 4)
    throw PatchTooSmall("extract_features: patch " + std::to_string(w) + "x" +
                        std::to_string(h) + " is below the 4x4 minimum");

  FeatureMatrix f;
  f.width = w;
  f.height = h;
  f.count = w * h;
  f.data.resize(static_cast<size_t>(f.count) * kFeatureDim);

  // HSV per pixel; V doubles as the intensity channel for the gradients
  std::vector<double> hch(f.count), sch(f.count), vch(f.count);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const uint8_t* p = patch.px(x, y);
      const Hsv hsv = rgb_to_hsv(p[0], p[1], p[2]);
      const int idx = y * w + x;
      hch[idx] = hsv.h;
      sch[idx] = hsv.s;
      vch[idx] = hsv.v;
    }
  }

  auto v_at = [&](int x, int y) {
    // replicate border padding
    x = std::clamp(x, 0, w - 1);
    y = std::clamp(y, 0, h - 1);
    return vch[static_cast<size_t>(y) * w + x];
  };

  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      // 3x3 Sobel responses on V
      const double gx = (v_at(x + 1, y - 1) + 2.0 * v_at(x + 1, y) + v_at(x + 1, y + 1)) -
                        (v_at(x - 1, y - 1) + 2.0 * v_at(x - 1, y) + v_at(x - 1, y + 1));
      const double gy = (v_at(x - 1, y + 1) + 2.0 * v_at(x, y + 1) + v_at(x + 1, y + 1)) -
                        (v_at(x - 1, y - 1) + 2.0 * v_at(x, y - 1) + v_at(x + 1, y - 1));
      const double mag = std::sqrt(gx * gx + gy * gy);
      double o;
      if (gx == 0.0) {
        o = (gy == 0.0) ? 0.0 : (gy > 0.0 ? 1.0 : -1.0) * (std::numbers::pi / 2.0);
      } else {
        o = std::atan(gy / gx);
      }

      const int row = y * w + x;
      double* z = f.data.data() + static_cast<size_t>(row) * kFeatureDim;
      z[0] = static_cast<double>(x);
      z[1] = static_cast<double>(y);
      z[2] = hch[row];
      z[3] = sch[row];
      z[4] = vch[row];
      z[5] = gx;
      z[6] = gy;
      z[7] = mag;
      z[8] = o;
    }
  }
  return f;
}

SymMatrix covariance_of_rows(const std::vector<double>& rows, int n, int d) {
  if (n < 2) throw DegeneratePatch("covariance needs at least 2 samples, got " + std::to_string(n));

  std::vector<double> mu(d, 0.0);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < d; ++j) mu[j] += rows[static_cast<size_t>(i) * d + j];
  for (int j = 0; j < d; ++j) mu[j] /= n;

  SymMatrix c(d);
  std::vector<double> acc(static_cast<size_t>(d) * (d + 1) / 2, 0.0);
  std::vector<double> dev(d);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < d; ++j) dev[j] = rows[static_cast<size_t>(i) * d + j] - mu[j];
    size_t t = 0;
    for (int r = 0; r < d; ++r)
      for (int col = 0; col <= r; ++col) acc[t++] += dev[r] * dev[col];
  }
  const double scale = 1.0 / (n - 1);
  size_t t = 0;
  for (int r = 0; r < d; ++r)
    for (int col = 0; col <= r; ++col) c.set(r, col, acc[t++] * scale);
  return c;
}

SymMatrix regularize_covariance(const SymMatrix& c) {
  const double eps = 1e-6 * (c.trace() / c.dim()) + 1e-10;
  SymMatrix out = c;
  for (int i = 0; i < c.dim(); ++i) out.set(i, i, c.at(i, i) + eps);
  return out;
}

CovarianceDescriptor compute_covariance(const FeatureMatrix& features, int patch_id) {
  const SymMatrix c = covariance_of_rows(features.data, features.count, kFeatureDim);
  return CovarianceDescriptor{SpdMatrix(regularize_covariance(c)), patch_id};
}

double forstner_distance(const SpdMatrix& a, const SpdMatrix& b) {
  if (a.dim() != b.dim())
    throw DimensionMismatch("forstner_distance: dimensions " + std::to_string(a.dim()) +
                            " vs " + std::to_string(b.dim()));
  const std::vector<double> lambda = generalized_eigenvalues(a.sym(), b);
  double s = 0.0;
  for (double l : lambda) {
    if (l <= 0.0)
      throw NotPositiveDefinite("forstner_distance: nonpositive generalized eigenvalue");
    const double ll = std::log(l);
    s += ll * ll;
  }
  return std::sqrt(s);
}

double forstner_distance(const CovarianceDescriptor& a, const CovarianceDescriptor& b) {
  return forstner_distance(a.matrix, b.matrix);
}

std::vector<CovarianceDescriptor> compute_descriptors(const std::vector<PixelPatch>& patches,
                                                      ExecMode mode) {
  const int n = static_cast<int>(patches.size());
  std::vector<std::unique_ptr<CovarianceDescriptor>> slots(n);
  std::exception_ptr failure;

  auto worker = [&](int i) { slots[i] = std::make_unique<CovarianceDescriptor>(
                                 compute_covariance(extract_features(patches[i]), i)); };

  if (mode == ExecMode::parallel) {
#pragma omp parallel for schedule(dynamic)
    for (int i = 0; i < n; ++i) {
      try {
        worker(i);
      } catch (...) {
#pragma omp critical
        if (!failure) failure = std::current_exception();
      }
    }
  } else {
    for (int i = 0; i < n; ++i) worker(i);
  }
  if (failure) std::rethrow_exception(failure);

  std::vector<CovarianceDescriptor> out;
  out.reserve(n);
  for (int i = 0; i < n; ++i) out.push_back(std::move(*slots[i]));
  return out;
}

}  // namespace gtg
