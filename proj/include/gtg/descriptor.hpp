#pragma once

#include <cstdint>
#include <vector>

#include "gtg/linalg.hpp"
#include "gtg/parallel.hpp"

namespace gtg {

struct Hsv {
  double h, s, v;  // all in [0,1], h in [0,1)
};

// Hexcone HSV. Achromatic pixels (max channel == min channel) get H = S = 0.
Hsv rgb_to_hsv(uint8_t r, uint8_t g, uint8_t b);

// Row-major 8-bit RGB patch.
struct PixelPatch {
  int width = 0;
  int height = 0;
  std::vector<uint8_t> rgb;  // 3 * width * height, interleaved

  const uint8_t* px(int x, int y) const {
    return rgb.data() + 3 * (static_cast<size_t>(y) * width + x);
  }
};

inline constexpr int kFeatureDim = 9;

// One row per pixel, row-major pixel order. Feature layout per row:
// [x, y, H, S, V, Gx, Gy, mag, o] with x,y in pixel units (patch-local),
// H,S,V in [0,1], Gx/Gy the 3x3 Sobel responses on the V channel with
// replicate border padding, mag = sqrt(Gx^2+Gy^2), and o = atan(Gy/Gx)
// (o = +-pi/2 when Gx = 0 and Gy != 0, o = 0 when both vanish).
struct FeatureMatrix {
  int width = 0;
  int height = 0;
  int count = 0;                // rows == width*height
  std::vector<double> data;     // count * kFeatureDim

  double at(int row, int f) const { return data[static_cast<size_t>(row) * kFeatureDim + f]; }
};

// Throws PatchTooSmall when width or height < 4.
FeatureMatrix extract_features(const PixelPatch& patch);

struct CovarianceDescriptor {
  SpdMatrix matrix;
  int patch_id = 0;
};

// Sample covariance of n row vectors of length d: 1/(n-1) sum (z - mu)(z - mu)^T.
// No regularization; throws DegeneratePatch when n < 2.
SymMatrix covariance_of_rows(const std::vector<double>& rows, int n, int d);

// Regularized covariance C + eps*I with eps = 1e-6 * trace(C)/d + 1e-10,
// which keeps the result SPD even for constant-color patches.
SymMatrix regularize_covariance(const SymMatrix& c);

CovarianceDescriptor compute_covariance(const FeatureMatrix& features, int patch_id = 0);

// rho(a,b) = sqrt(sum_k ln^2 lambda_k(a,b)) over the generalized eigenvalues
// of the pair. A metric on SPD matrices of equal dimension.
double forstner_distance(const SpdMatrix& a, const SpdMatrix& b);
double forstner_distance(const CovarianceDescriptor& a, const CovarianceDescriptor& b);

// Batch extraction over a patch collection; patch_id is the index. Schedule-
// independent: the parallel path matches the serial one bitwise.
std::vector<CovarianceDescriptor> compute_descriptors(const std::vector<PixelPatch>& patches,
                                                      ExecMode mode = ExecMode::parallel);

}  // namespace gtg
