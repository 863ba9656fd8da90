#pragma once

#include <unistd.h>

#include <cmath>
#include <filesystem>
#include <string>
#include <vector>

#include "gtg/graph.hpp"
#include "gtg/game.hpp"
#include "gtg/linalg.hpp"
#include "gtg/rng.hpp"

namespace test {

inline double uniform(gtg::SplitMix64& rng, double lo, double hi) {
  return lo + (hi - lo) * rng.next_double();
}

// Well-conditioned random SPD: M^T M / dim + 0.2 I with M_ij ~ U[-1,1].
// Eigenvalues land in roughly [0.2, 3], far from the tolerance cliffs.
inline gtg::SpdMatrix random_spd(int dim, gtg::SplitMix64& rng) {
  gtg::Matrix m(dim, dim);
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < dim; ++j) m.at(i, j) = uniform(rng, -1.0, 1.0);
  gtg::SymMatrix s(dim);
  for (int i = 0; i < dim; ++i) {
    for (int j = 0; j <= i; ++j) {
      double v = 0.0;
      for (int k = 0; k < dim; ++k) v += m.at(k, i) * m.at(k, j);
      s.set(i, j, v / dim + (i == j ? 0.2 : 0.0));
    }
  }
  return gtg::SpdMatrix(s);
}

inline gtg::SymMatrix random_sym(int dim, gtg::SplitMix64& rng) {
  gtg::SymMatrix s(dim);
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j <= i; ++j) s.set(i, j, uniform(rng, -1.0, 1.0));
  return s;
}

// Dense symmetric affinity with positive off-diagonal weights (connected).
inline gtg::AffinityMatrix random_affinity(int n, gtg::SplitMix64& rng) {
  gtg::AffinityMatrix w;
  w.n = n;
  w.entries.assign(static_cast<size_t>(n) * n, 0.0);
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      const double d = uniform(rng, 0.0, 3.0);
      const double v = std::exp(-0.5 * d * d);
      w.entries[static_cast<size_t>(i) * n + j] = v;
      w.entries[static_cast<size_t>(j) * n + i] = v;
    }
  return w;
}

// At least one labeled player per class; roughly `frac` of players labeled.
inline gtg::LabelAssignment random_assignment(int n, int c, double frac, gtg::SplitMix64& rng) {
  gtg::LabelAssignment a;
  a.n = n;
  a.c = c;
  a.labels.assign(n, gtg::LabelAssignment::kUnlabeled);
  for (int h = 0; h < c; ++h) a.labels[h % n] = h;  // anchors
  for (int i = c; i < n; ++i)
    if (rng.next_double() < frac) a.labels[i] = static_cast<int>(rng.next_below(c));
  return a;
}

struct TempDir {
  std::filesystem::path path;

  explicit TempDir(const std::string& tag) {
    path = std::filesystem::temp_directory_path() /
           ("gtg_test_" + tag + "_" + std::to_string(::getpid()));
    std::filesystem::remove_all(path);
    std::filesystem::create_directories(path);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path, ec);
  }
  std::string str() const { return path.string(); }
  std::string operator/(const std::string& name) const { return (path / name).string(); }
};

}  // namespace test
