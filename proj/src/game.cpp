#include "gtg/game.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

namespace gtg {

int LabelAssignment::count_labeled() const {
  int k = 0;
  for (int l : labels) k += (l != kUnlabeled);
  return k;
}

void LabelAssignment::validate() const {
  if (n < 1 || c < 2) throw InvalidParams("assignment needs n >= 1 players and c >= 2 classes");
  if (static_cast<int>(labels.size()) != n)
    throw InvalidParams("assignment label vector has wrong length");
  bool any = false;
  for (int l : labels) {
    if (l == kUnlabeled) continue;
    if (l < 0 || l >= c) throw InvalidParams("label out of range: " + std::to_string(l));
    any = true;
  }
  if (!any) throw InvalidParams("assignment has no labeled player");
}

void LabelAssignment::require_class_coverage() const {
  validate();
  std::vector<int> seen(c, 0);
  for (int l : labels)
    if (l != kUnlabeled) seen[l] = 1;
  for (int h = 0; h < c; ++h)
    if (!seen[h])
      throw MissingClass("class " + std::to_string(h + 1) + " has no labeled player");
}

void GameConfig::validate() const {
  if (!(tol > 0.0) || tol >= 1.0) throw InvalidParams("tol must be in (0,1)");
  if (max_iters < 1) throw InvalidParams("max_iters must be >= 1");
}

StrategyProfile init_profile(const LabelAssignment& assignment) {
  assignment.validate();
  StrategyProfile p;
  p.n = assignment.n;
  p.c = assignment.c;
  p.x.assign(static_cast<size_t>(p.n) * p.c, 0.0);
  p.labeled.assign(p.n, 0);
  const double bary = 1.0 / p.c;
  for (int i = 0; i < p.n; ++i) {
    if (assignment.is_labeled(i)) {
      p.at(i, assignment.labels[i]) = 1.0;
      p.labeled[i] = 1;
    } else {
      for (int h = 0; h < p.c; ++h) p.at(i, h) = bary;
    }
  }
  return p;
}

double payoff_pure(const NormalizedAffinity& w, const StrategyProfile& x, int i, int h) {
  const double* wi = w.row(i);
  double s = 0.0;
  for (int j = 0; j < x.n; ++j) s += wi[j] * x.at(j, h);
  return s;
}

double payoff_mixed(const NormalizedAffinity& w, const StrategyProfile& x, int i) {
  double s = 0.0;
  for (int h = 0; h < x.c; ++h) s += x.at(i, h) * payoff_pure(w, x, i, h);
  return s;
}

double total_payoff(const NormalizedAffinity& w, const StrategyProfile& x) {
  double f = 0.0;
  for (int i = 0; i < x.n; ++i) {
    const double* wi = w.row(i);
    for (int j = 0; j < x.n; ++j) {
      if (wi[j] == 0.0) continue;
      double dot = 0.0;
      for (int h = 0; h < x.c; ++h) dot += x.at(i, h) * x.at(j, h);
      f += wi[j] * dot;
    }
  }
  return f;
}

namespace {

// Next profile for one row: the shared serial/parallel kernel. Payoffs sum
// left-to-right over j, so the result is the same no matter how rows are
// scheduled onto threads.
void step_row(const NormalizedAffinity& w, const StrategyProfile& x, int i, double* out) {
  const int c = x.c;
  const double* xi = x.row(i);
  if (x.labeled[i]) {
    std::copy(xi, xi + c, out);
    return;
  }

  double pure[64];  // c is small (classes), but guard anyway
  std::vector<double> pure_heap;
  double* u = pure;
  if (c > 64) {
    pure_heap.resize(c);
    u = pure_heap.data();
  }

  const double* wi = w.row(i);
  for (int h = 0; h < c; ++h) u[h] = 0.0;
  for (int j = 0; j < x.n; ++j) {
    const double wij = wi[j];
    if (wij == 0.0) continue;
    const double* xj = x.row(j);
    for (int h = 0; h < c; ++h) u[h] += wij * xj[h];
  }

  double mixed = 0.0;
  for (int h = 0; h < c; ++h) mixed += xi[h] * u[h];

  if (mixed <= 0.0) {  // isolated or zero-support row: frozen
    std::copy(xi, xi + c, out);
    return;
  }

  double sum = 0.0;
  for (int h = 0; h < c; ++h) {
    out[h] = xi[h] * (u[h] / mixed);
    sum += out[h];
  }
  for (int h = 0; h < c; ++h) out[h] /= sum;  // re-pin the row to the simplex
}

}  // namespace

StrategyProfile replicator_step(const NormalizedAffinity& w, const StrategyProfile& x,
                                ExecMode mode) {
  StrategyProfile next = x;  // copies labeled flags and shapes
  if (mode == ExecMode::parallel) {
#pragma omp parallel for schedule(static)
    for (int i = 0; i < x.n; ++i) step_row(w, x, i, next.x.data() + static_cast<size_t>(i) * x.c);
  } else {
    for (int i = 0; i < x.n; ++i) step_row(w, x, i, next.x.data() + static_cast<size_t>(i) * x.c);
  }
  return next;
}

EquilibriumResult run_dynamics(const NormalizedAffinity& w, const LabelAssignment& assignment,
                               const GameConfig& config, std::vector<IterationTrace>* trace) {
  config.validate();
  if (w.n != assignment.n)
    throw DimensionMismatch("affinity has " + std::to_string(w.n) + " players, assignment has " +
                            std::to_string(assignment.n));

  StrategyProfile x = init_profile(assignment);
  EquilibriumResult result;
  result.iterations = 0;
  result.converged = false;

  for (int iter = 1; iter <= config.max_iters; ++iter) {
    StrategyProfile next = replicator_step(w, x, config.mode);
    double max_change = 0.0;
    for (size_t k = 0; k < x.x.size(); ++k)
      max_change = std::max(max_change, std::abs(next.x[k] - x.x[k]));
    x = std::move(next);
    result.iterations = iter;
    if (trace) trace->push_back({iter, total_payoff(w, x), max_change});
    if (max_change < config.tol) {
      result.converged = true;
      break;
    }
  }

  Labeling lab = extract_labels(x);
  result.profile = std::move(x);
  result.labels = std::move(lab.labels);
  result.confidence = std::move(lab.confidence);
  return result;
}

Labeling extract_labels(const StrategyProfile& x) {
  Labeling out;
  out.labels.resize(x.n);
  out.confidence.resize(x.n);
  for (int i = 0; i < x.n; ++i) {
    int best = 0;
    double best_v = x.at(i, 0);
    for (int h = 1; h < x.c; ++h) {
      if (x.at(i, h) > best_v) {  // strict: ties keep the lowest class index
        best_v = x.at(i, h);
        best = h;
      }
    }
    out.labels[i] = best;
    out.confidence[i] = best_v;
  }
  return out;
}

bool verify_nash(const NormalizedAffinity& w, const StrategyProfile& x, double eps) {
  for (int i = 0; i < x.n; ++i) {
    if (x.labeled[i]) continue;
    const double mixed = payoff_mixed(w, x, i);
    for (int h = 0; h < x.c; ++h)
      if (payoff_pure(w, x, i, h) > mixed + eps) return false;
  }
  return true;
}

std::vector<std::vector<int>> enumerate_pure_nash(const NormalizedAffinity& w,
                                                  const LabelAssignment& assignment) {
  assignment.validate();
  if (w.n != assignment.n) throw DimensionMismatch("affinity/assignment player count mismatch");

  std::vector<int> unlabeled;
  for (int i = 0; i < assignment.n; ++i)
    if (!assignment.is_labeled(i)) unlabeled.push_back(i);

  const int u = static_cast<int>(unlabeled.size());
  const int c = assignment.c;
  if (u > 8 || c > 3)
    throw InstanceTooLarge("pure-Nash enumeration bounded to 8 unlabeled players and 3 classes (" +
                           std::to_string(u) + " unlabeled, " + std::to_string(c) + " classes)");

  std::vector<std::vector<int>> equilibria;
  std::vector<int> labels = assignment.labels;

  long total = 1;
  for (int k = 0; k < u; ++k) total *= c;

  for (long code = 0; code < total; ++code) {
    // decode in base c; first unlabeled player varies slowest for lexicographic output
    long rem = code;
    for (int k = u - 1; k >= 0; --k) {
      labels[unlabeled[k]] = static_cast<int>(rem % c);
      rem /= c;
    }

    bool nash = true;
    for (int k = 0; k < u && nash; ++k) {
      const int i = unlabeled[k];
      const double* wi = w.row(i);
      double score[3] = {0.0, 0.0, 0.0};
      for (int j = 0; j < assignment.n; ++j)
        if (wi[j] != 0.0) score[labels[j]] += wi[j];
      const double own = score[labels[i]];
      for (int h = 0; h < c; ++h)
        if (score[h] > own) nash = false;
    }
    if (nash) equilibria.push_back(labels);
  }
  return equilibria;
}

void write_trace_csv(const std::vector<IterationTrace>& trace, const std::string& path) {
  std::ofstream f(path);
  if (!f) throw IoError("cannot open " + path + " for writing");
  f.precision(17);
  f << "iteration,total_payoff,max_change\n";
  for (const IterationTrace& t : trace)
    f << t.iteration << ',' << t.total_payoff << ',' << t.max_change << '\n';
  if (!f) throw IoError("write failed for " + path);
}

}  // namespace gtg
