#pragma once

#include <optional>
#include <string>
#include <vector>

#include "gtg/descriptor.hpp"
#include "gtg/parallel.hpp"

namespace gtg {

// Dense square matrix with zero diagonal and exact symmetry (the upper
// triangle is computed once and mirrored).
struct DistanceMatrix {
  int n = 0;
  std::vector<double> entries;  // row-major n*n

  double at(int i, int j) const { return entries[static_cast<size_t>(i) * n + j]; }
};

struct AffinityMatrix {
  int n = 0;
  std::vector<double> entries;  // values in [0,1], zero diagonal, symmetric

  double at(int i, int j) const { return entries[static_cast<size_t>(i) * n + j]; }
};

struct NormalizedAffinity {
  int n = 0;
  std::vector<double> entries;
  std::vector<int> isolated;  // rows with zero degree, ascending; those rows are all-zero

  double at(int i, int j) const { return entries[static_cast<size_t>(i) * n + j]; }
  const double* row(int i) const { return entries.data() + static_cast<size_t>(i) * n; }
};

// Full pairwise Forstner distance matrix. Each unordered pair is evaluated
// once, in a content-canonical argument order, so the result is invariant
// under reordering of the descriptor sequence (up to the same permutation).
DistanceMatrix pairwise_distances(const std::vector<CovarianceDescriptor>& descriptors,
                                  ExecMode mode = ExecMode::parallel);

// Heat kernel w_ij = exp(-rho_ij^2 / (2 sigma^2)), zero diagonal. sigma =
// nullopt selects the median of the strictly positive off-diagonal distances
// (1.0 when there are none). Throws InvalidSigma when sigma <= 0.
AffinityMatrix affinity_from_distances(const DistanceMatrix& dist,
                                       std::optional<double> sigma = std::nullopt);

// The bandwidth the AUTO rule would pick for this distance matrix.
double auto_sigma(const DistanceMatrix& dist);

// Symmetric normalization w_ij / sqrt(d_i d_j) with d_i the row sums of w.
// Zero-degree rows are zeroed and reported in `isolated` instead of failing.
// Row sums accumulate in ascending value order, which keeps the output exactly
// permutation-equivariant.
NormalizedAffinity normalize(const AffinityMatrix& w);

// Debug export, one row per line, comma separated, full matrix.
void write_matrix_csv(const std::vector<double>& entries, int n, const std::string& path);

}  // namespace gtg
