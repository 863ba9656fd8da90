#include "gtg/graph.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <fstream>

namespace gtg {

namespace {

// Canonical argument order for one unordered pair: lexicographic on the packed
// triangles, falling back to index order on identical content. This makes the
// stored rho depend only on the pair itself, not on where the two descriptors
// sit in the input sequence.
double pair_distance(const CovarianceDescriptor& a, const CovarianceDescriptor& b) {
  const std::vector<double>& pa = a.matrix.sym().packed();
  const std::vector<double>& pb = b.matrix.sym().packed();
  if (std::lexicographical_compare(pb.begin(), pb.end(), pa.begin(), pa.end()))
    return forstner_distance(b, a);
  return forstner_distance(a, b);
}

}  // namespace

DistanceMatrix pairwise_distances(const std::vector<CovarianceDescriptor>& descriptors,
                                  ExecMode mode) {
  const int n = static_cast<int>(descriptors.size());
  if (n < 2) throw InvalidParams("pairwise_distances: need at least 2 descriptors");

  DistanceMatrix d;
  d.n = n;
  d.entries.assign(static_cast<size_t>(n) * n, 0.0);

  // flattened upper triangle, one task per pair
  const long pairs = static_cast<long>(n) * (n - 1) / 2;
  std::vector<std::pair<int, int>> pair_of(pairs);
  {
    long p = 0;
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j) pair_of[p++] = {i, j};
  }
  std::exception_ptr failure;

  auto fill = [&](long p) {
    const auto [i, j] = pair_of[p];
    const double rho = pair_distance(descriptors[i], descriptors[j]);
    d.entries[static_cast<size_t>(i) * n + j] = rho;
    d.entries[static_cast<size_t>(j) * n + i] = rho;
  };

  if (mode == ExecMode::parallel) {
#pragma omp parallel for schedule(dynamic, 64)
    for (long p = 0; p < pairs; ++p) {
      try {
        fill(p);
      } catch (...) {
#pragma omp critical
        if (!failure) failure = std::current_exception();
      }
    }
  } else {
    for (long p = 0; p < pairs; ++p) fill(p);
  }
  if (failure) std::rethrow_exception(failure);
  return d;
}

double auto_sigma(const DistanceMatrix& dist) {
  std::vector<double> positive;
  positive.reserve(static_cast<size_t>(dist.n) * (dist.n - 1) / 2);
  for (int i = 0; i < dist.n; ++i)
    for (int j = i + 1; j < dist.n; ++j)
      if (dist.at(i, j) > 0.0) positive.push_back(dist.at(i, j));
  if (positive.empty()) return 1.0;
  std::sort(positive.begin(), positive.end());
  const size_t m = positive.size();
  return (m % 2 == 1) ? positive[m / 2] : 0.5 * (positive[m / 2 - 1] + positive[m / 2]);
}

AffinityMatrix affinity_from_distances(const DistanceMatrix& dist, std::optional<double> sigma) {
  if (sigma && *sigma <= 0.0)
    throw InvalidSigma("affinity bandwidth must be > 0, got " + std::to_string(*sigma));
  const double s = sigma ? *sigma : auto_sigma(dist);
  const double inv = 1.0 / (2.0 * s * s);

  AffinityMatrix w;
  w.n = dist.n;
  w.entries.assign(static_cast<size_t>(dist.n) * dist.n, 0.0);
  for (int i = 0; i < dist.n; ++i) {
    for (int j = i + 1; j < dist.n; ++j) {
      const double rho = dist.at(i, j);
      const double v = std::exp(-rho * rho * inv);
      w.entries[static_cast<size_t>(i) * w.n + j] = v;
      w.entries[static_cast<size_t>(j) * w.n + i] = v;
    }
  }
  return w;
}

NormalizedAffinity normalize(const AffinityMatrix& w) {
  const int n = w.n;
  NormalizedAffinity out;
  out.n = n;
  out.entries.assign(static_cast<size_t>(n) * n, 0.0);

  // degrees: sum each row in ascending value order so the result does not
  // depend on how the players happen to be indexed
  std::vector<double> degree(n, 0.0);
  std::vector<double> row(n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) row[j] = w.at(i, j);
    std::sort(row.begin(), row.end());
    double s = 0.0;
    for (double v : row) s += v;
    degree[i] = s;
    if (s == 0.0) out.isolated.push_back(i);
  }

  // w / sqrt(d_i * d_j): the product is commutative, so the entry is bitwise
  // independent of which index comes first
  for (int i = 0; i < n; ++i) {
    if (degree[i] == 0.0) continue;
    for (int j = i + 1; j < n; ++j) {
      if (degree[j] == 0.0) continue;
      const double v = w.at(i, j) / std::sqrt(degree[i] * degree[j]);
      out.entries[static_cast<size_t>(i) * n + j] = v;
      out.entries[static_cast<size_t>(j) * n + i] = v;
    }
  }
  return out;
}

void write_matrix_csv(const std::vector<double>& entries, int n, const std::string& path) {
  std::ofstream f(path);
  if (!f) throw IoError("cannot open " + path + " for writing");
  f.precision(17);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (j) f << ',';
      f << entries[static_cast<size_t>(i) * n + j];
    }
    f << '\n';
  }
  if (!f) throw IoError("write failed for " + path);
}

}  // namespace gtg
