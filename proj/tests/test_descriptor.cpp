#include <doctest.h>

#include <cmath>
#include <numbers>

#include "gtg/descriptor.hpp"
#include "helpers.hpp"

using namespace gtg;

namespace {

template <typename F>
PixelPatch make_patch(int w, int h, F&& color) {
  PixelPatch p;
  p.width = w;
  p.height = h;
  p.rgb.resize(static_cast<size_t>(w) * h * 3);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      const auto [r, g, b] = color(x, y);
      uint8_t* px = p.rgb.data() + 3 * (static_cast<size_t>(y) * w + x);
      px[0] = r;
      px[1] = g;
      px[2] = b;
    }
  return p;
}

struct Rgb {
  uint8_t r, g, b;
};

SpdMatrix scaled_identity(int d, double s) {
  std::vector<double> diag(d, s);
  return SpdMatrix(SymMatrix::diagonal(diag));
}

// congruence transform M^T a M (exactly symmetric in exact arithmetic)
SymMatrix congruence(const Matrix& m, const SymMatrix& a) {
  const int n = a.dim();
  Matrix am(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      double s = 0.0;
      for (int k = 0; k < n; ++k) s += a.at(i, k) * m.at(k, j);
      am.at(i, j) = s;
    }
  Matrix mam(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      double s = 0.0;
      for (int k = 0; k < n; ++k) s += m.at(k, i) * am.at(k, j);
      mam.at(i, j) = s;
    }
  return SymMatrix::symmetric_part(mam);
}

}  // namespace

TEST_SUITE("descriptor") {

TEST_CASE("hexcone anchors") {
  const Hsv red = rgb_to_hsv(255, 0, 0);
  CHECK(red.h == 0.0);
  CHECK(red.s == 1.0);
  CHECK(red.v == 1.0);

  const Hsv gray = rgb_to_hsv(128, 128, 128);
  CHECK(gray.h == 0.0);
  CHECK(gray.s == 0.0);
  CHECK(gray.v == doctest::Approx(128.0 / 255.0).epsilon(1e-15));

  // hexcone formula for pure green: (b-r)/delta + 2 = 2, /6 = 1/3
  const Hsv green = rgb_to_hsv(0, 255, 0);
  CHECK(green.h == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
  CHECK(green.s == 1.0);
  CHECK(green.v == 1.0);
}

TEST_CASE("hsv stays in range over the whole cube") {
  SplitMix64 rng(21);
  for (int rep = 0; rep < 2000; ++rep) {
    const Hsv h = rgb_to_hsv(static_cast<uint8_t>(rng.next_below(256)),
                             static_cast<uint8_t>(rng.next_below(256)),
                             static_cast<uint8_t>(rng.next_below(256)));
    CHECK(h.h >= 0.0);
    CHECK(h.h < 1.0);
    CHECK(h.s >= 0.0);
    CHECK(h.s <= 1.0);
    CHECK(h.v >= 0.0);
    CHECK(h.v <= 1.0);
  }
}

TEST_CASE("constant gray patch has zero saturation and zero gradients") {
  const PixelPatch p = make_patch(5, 4, [](int, int) { return Rgb{77, 77, 77}; });
  const FeatureMatrix f = extract_features(p);
  REQUIRE(f.count == 20);
  for (int r = 0; r < f.count; ++r) {
    CHECK(f.at(r, 3) == 0.0);  // S
    CHECK(f.at(r, 5) == 0.0);  // Gx
    CHECK(f.at(r, 6) == 0.0);  // Gy
    CHECK(f.at(r, 7) == 0.0);  // mag
    CHECK(f.at(r, 8) == 0.0);  // o
  }
}

TEST_CASE("rows are in row-major pixel order") {
  const PixelPatch p = make_patch(4, 4, [](int x, int y) {
    return Rgb{static_cast<uint8_t>(10 * x), static_cast<uint8_t>(10 * y), 0};
  });
  const FeatureMatrix f = extract_features(p);
  // pixel (2,1) lands at row 1*4+2 = 6
  CHECK(f.at(6, 0) == 2.0);
  CHECK(f.at(6, 1) == 1.0);
}

TEST_CASE("too small patches are rejected") {
  const PixelPatch p = make_patch(3, 5, [](int, int) { return Rgb{0, 0, 0}; });
  CHECK_THROWS_AS(extract_features(p), PatchTooSmall);
}

TEST_CASE("vertical step edge: hand-applied Sobel values") {
  // left half black (V=0), right half white (V=1), 8x6
  const PixelPatch p =
      make_patch(8, 6, [](int x, int) { return x < 4 ? Rgb{0, 0, 0} : Rgb{255, 255, 255}; });
  const FeatureMatrix f = extract_features(p);
  for (int y = 0; y < 6; ++y) {
    for (int x = 0; x < 8; ++x) {
      const int r = y * 8 + x;
      CHECK(f.at(r, 6) == 0.0);  // constant along y everywhere
      if (x == 3 || x == 4) {
        // the 3x3 kernel sees the step: (1+2+1) * (1-0) = 4
        CHECK(f.at(r, 5) == 4.0);
        CHECK(f.at(r, 7) == 4.0);
        CHECK(f.at(r, 8) == 0.0);  // atan(0/4)
      } else {
        CHECK(f.at(r, 5) == 0.0);
      }
    }
  }
}

TEST_CASE("horizontal step edge: Gx = 0 convention gives o = +-pi/2") {
  const PixelPatch p =
      make_patch(6, 8, [](int, int y) { return y < 4 ? Rgb{0, 0, 0} : Rgb{255, 255, 255}; });
  const FeatureMatrix f = extract_features(p);
  for (int y : {3, 4}) {
    for (int x = 0; x < 6; ++x) {
      const int r = y * 6 + x;
      CHECK(f.at(r, 5) == 0.0);
      CHECK(f.at(r, 6) == 4.0);
      CHECK(f.at(r, 8) == std::numbers::pi / 2.0);
    }
  }

  const PixelPatch flipped =
      make_patch(6, 8, [](int, int y) { return y < 4 ? Rgb{255, 255, 255} : Rgb{0, 0, 0}; });
  const FeatureMatrix g = extract_features(flipped);
  CHECK(g.at(3 * 6 + 2, 6) == -4.0);
  CHECK(g.at(3 * 6 + 2, 8) == -std::numbers::pi / 2.0);
}

TEST_CASE("magnitude is consistent with the gradients on arbitrary patches") {
  SplitMix64 rng(22);
  const PixelPatch p = make_patch(9, 7, [&](int, int) {
    return Rgb{static_cast<uint8_t>(rng.next_below(256)), static_cast<uint8_t>(rng.next_below(256)),
               static_cast<uint8_t>(rng.next_below(256))};
  });
  const FeatureMatrix f = extract_features(p);
  for (int r = 0; r < f.count; ++r) {
    const double gx = f.at(r, 5), gy = f.at(r, 6);
    CHECK(std::abs(f.at(r, 7) - std::sqrt(gx * gx + gy * gy)) <= 1e-12);
    CHECK(f.at(r, 2) >= 0.0);
    CHECK(f.at(r, 2) < 1.0);
  }
}

TEST_CASE("covariance of the toy two-row input") {
  // rows (1,2) and (3,4): mu = (2,3), dev = -+(1,1) -> C = [[2,2],[2,2]]
  const SymMatrix c = covariance_of_rows({1, 2, 3, 4}, 2, 2);
  CHECK(c.at(0, 0) == 2.0);
  CHECK(c.at(0, 1) == 2.0);
  CHECK(c.at(1, 1) == 2.0);
}

TEST_CASE("covariance rejects a single sample") {
  CHECK_THROWS_AS(covariance_of_rows({1, 2}, 1, 2), DegeneratePatch);
}

TEST_CASE("constant features give the bare regularization floor") {
  const PixelPatch p = make_patch(6, 6, [](int, int) { return Rgb{50, 50, 50}; });
  FeatureMatrix f = extract_features(p);
  // wipe x,y so every feature row is constant -> C = 0 -> eps = 1e-10
  for (int r = 0; r < f.count; ++r) {
    f.data[static_cast<size_t>(r) * kFeatureDim + 0] = 0.0;
    f.data[static_cast<size_t>(r) * kFeatureDim + 1] = 0.0;
  }
  const CovarianceDescriptor d = compute_covariance(f, 7);
  CHECK(d.patch_id == 7);
  for (int i = 0; i < 9; ++i) {
    CHECK(d.matrix.at(i, i) == 1e-10);
    for (int j = 0; j < i; ++j) CHECK(d.matrix.at(i, j) == 0.0);
  }
}

TEST_CASE("descriptors survive the SPD check for arbitrary patches") {
  SplitMix64 rng(23);
  for (int rep = 0; rep < 20; ++rep) {
    const PixelPatch p = make_patch(8, 10, [&](int, int) {
      return Rgb{static_cast<uint8_t>(rng.next_below(256)),
                 static_cast<uint8_t>(rng.next_below(256)),
                 static_cast<uint8_t>(rng.next_below(256))};
    });
    CHECK_NOTHROW(compute_covariance(extract_features(p)));
  }
}

TEST_CASE("covariance is invariant under row permutations") {
  SplitMix64 rng(24);
  const int n = 40, d = 5;
  std::vector<double> rows(n * d);
  for (double& v : rows) v = test::uniform(rng, -2.0, 2.0);

  const SymMatrix base = covariance_of_rows(rows, n, d);

  std::vector<int> perm(n);
  for (int i = 0; i < n; ++i) perm[i] = i;
  for (int i = n - 1; i > 0; --i)
    std::swap(perm[i], perm[static_cast<size_t>(rng.next_below(i + 1))]);
  std::vector<double> shuffled(n * d);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < d; ++j) shuffled[static_cast<size_t>(i) * d + j] = rows[static_cast<size_t>(perm[i]) * d + j];

  const SymMatrix permuted = covariance_of_rows(shuffled, n, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j <= i; ++j) CHECK(std::abs(base.at(i, j) - permuted.at(i, j)) <= 1e-12);
}

TEST_CASE("distance of a descriptor to itself is zero") {
  SplitMix64 rng(25);
  for (int rep = 0; rep < 20; ++rep) {
    const SpdMatrix c = test::random_spd(9, rng);
    CHECK(forstner_distance(c, c) <= 1e-9);
  }
}

TEST_CASE("identity vs e^2 identity: all nine eigenvalues contribute ln^2 = 4") {
  const double rho = forstner_distance(scaled_identity(9, 1.0),
                                       scaled_identity(9, std::exp(2.0)));
  CHECK(rho == doctest::Approx(6.0).epsilon(1e-12));
}

TEST_CASE("diag(1,4) vs identity gives ln 4") {
  const double rho = forstner_distance(SpdMatrix(SymMatrix::diagonal({1.0, 4.0})),
                                       SpdMatrix(SymMatrix::diagonal({1.0, 1.0})));
  CHECK(rho == doctest::Approx(std::log(4.0)).epsilon(1e-12));
  CHECK(rho == doctest::Approx(1.386294).epsilon(1e-6));
}

TEST_CASE("metric axioms on random SPD matrices") {
  SplitMix64 rng(26);
  for (int rep = 0; rep < 100; ++rep) {
    const SpdMatrix a = test::random_spd(9, rng);
    const SpdMatrix b = test::random_spd(9, rng);
    const SpdMatrix c = test::random_spd(9, rng);
    const double ab = forstner_distance(a, b);
    const double ba = forstner_distance(b, a);
    const double ac = forstner_distance(a, c);
    const double bc = forstner_distance(b, c);
    CHECK(ab >= 0.0);
    CHECK(std::abs(ab - ba) <= 1e-9);
    CHECK(ab > 1e-6);  // random pairs are distinct
    CHECK(ac <= ab + bc + 1e-7);
  }
}

TEST_CASE("scaling law rho(C, sC) = 3 |ln s| for 9x9") {
  SplitMix64 rng(27);
  for (double s : {0.1, 0.5, 2.0, 10.0}) {
    for (int rep = 0; rep < 20; ++rep) {
      const SpdMatrix c = test::random_spd(9, rng);
      SymMatrix sc(9);
      for (int i = 0; i < 9; ++i)
        for (int j = 0; j <= i; ++j) sc.set(i, j, s * c.at(i, j));
      const double rho = forstner_distance(c, SpdMatrix(sc));
      CHECK(std::abs(rho - 3.0 * std::abs(std::log(s))) <= 1e-8);
    }
  }
}

TEST_CASE("congruence transforms do not change the distance") {
  SplitMix64 rng(28);
  for (int rep = 0; rep < 20; ++rep) {
    const SpdMatrix a = test::random_spd(9, rng);
    const SpdMatrix b = test::random_spd(9, rng);
    Matrix m(9, 9);
    for (int i = 0; i < 9; ++i)
      for (int j = 0; j < 9; ++j)
        m.at(i, j) = test::uniform(rng, -1.0, 1.0) + (i == j ? 2.0 : 0.0);
    const double base = forstner_distance(a, b);
    const double moved =
        forstner_distance(SpdMatrix(congruence(m, a.sym())), SpdMatrix(congruence(m, b.sym())));
    CHECK(std::abs(base - moved) <= 1e-7);
  }
}

TEST_CASE("dimension mismatch is rejected") {
  CHECK_THROWS_AS(forstner_distance(scaled_identity(9, 1.0), scaled_identity(8, 1.0)),
                  DimensionMismatch);
}

TEST_CASE("batch descriptor extraction: parallel matches serial bitwise") {
  SplitMix64 rng(29);
  std::vector<PixelPatch> patches;
  for (int k = 0; k < 24; ++k)
    patches.push_back(make_patch(8 + static_cast<int>(k % 3), 9, [&](int, int) {
      return Rgb{static_cast<uint8_t>(rng.next_below(256)),
                 static_cast<uint8_t>(rng.next_below(256)),
                 static_cast<uint8_t>(rng.next_below(256))};
    }));
  const auto serial = compute_descriptors(patches, ExecMode::serial);
  const auto parallel = compute_descriptors(patches, ExecMode::parallel);
  REQUIRE(serial.size() == parallel.size());
  for (size_t i = 0; i < serial.size(); ++i) {
    CHECK(serial[i].matrix == parallel[i].matrix);
    CHECK(serial[i].patch_id == static_cast<int>(i));
  }
}

}  // TEST_SUITE
