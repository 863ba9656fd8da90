#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "gtg/graph.hpp"
#include "gtg/parallel.hpp"

namespace gtg {

// Partial labeling of the n players over c classes. labels[i] is the class
// index in [0,c) for labeled players, kUnlabeled otherwise. Valid assignments
// have every class represented among the labeled players.
struct LabelAssignment {
  static constexpr int kUnlabeled = -1;

  int n = 0;
  int c = 0;
  std::vector<int> labels;  // size n

  bool is_labeled(int i) const { return labels[i] != kUnlabeled; }
  int count_labeled() const;
  // shape and range checks plus at least one labeled player overall
  void validate() const;
  // the stronger tracking-side requirement: every class has a labeled player
  void require_class_coverage() const;  // throws MissingClass
};

// Row-stochastic n x c matrix; each row is a point on the class simplex.
// Labeled rows are exact pure-strategy vertices and never change.
struct StrategyProfile {
  int n = 0;
  int c = 0;
  std::vector<double> x;        // row-major n*c
  std::vector<uint8_t> labeled;  // size n

  double at(int i, int h) const { return x[static_cast<size_t>(i) * c + h]; }
  double& at(int i, int h) { return x[static_cast<size_t>(i) * c + h]; }
  const double* row(int i) const { return x.data() + static_cast<size_t>(i) * c; }
};

struct GameConfig {
  double tol = 1e-6;      // L-inf stopping threshold on the profile change
  int max_iters = 10000;
  ExecMode mode = ExecMode::parallel;

  void validate() const;
};

struct IterationTrace {
  int iteration;
  double total_payoff;  // F(x) after the step
  double max_change;
};

struct Labeling {
  std::vector<int> labels;       // argmax class per player, lowest index wins ties
  std::vector<double> confidence;  // the max probability itself
};

struct EquilibriumResult {
  StrategyProfile profile;
  int iterations = 0;
  bool converged = false;
  std::vector<int> labels;
  std::vector<double> confidence;
};

// Labeled rows at their pure vertex, unlabeled rows at the barycenter.
StrategyProfile init_profile(const LabelAssignment& assignment);

// u_i(e^h) = sum_j w_ij x_jh  (the polymatrix payoff with A_ij = w_ij * I_c)
double payoff_pure(const NormalizedAffinity& w, const StrategyProfile& x, int i, int h);

// u_i(x) = sum_h x_ih u_i(e^h)
double payoff_mixed(const NormalizedAffinity& w, const StrategyProfile& x, int i);

// F(x) = sum_i sum_j w_ij (x_i . x_j); non-decreasing along the dynamics
double total_payoff(const NormalizedAffinity& w, const StrategyProfile& x);

// One synchronous multiplicative-replicator step: unlabeled rows update to
// x_ih u_i(e^h) / u_i(x) and renormalize; rows with zero mixed payoff and all
// labeled rows are copied unchanged. The parallel path splits across rows
// only, so it matches the serial result bitwise.
StrategyProfile replicator_step(const NormalizedAffinity& w, const StrategyProfile& x,
                                ExecMode mode = ExecMode::serial);

// Iterate replicator_step from init_profile until the largest entry change
// falls below config.tol, or max_iters is reached.
EquilibriumResult run_dynamics(const NormalizedAffinity& w, const LabelAssignment& assignment,
                               const GameConfig& config = {},
                               std::vector<IterationTrace>* trace = nullptr);

Labeling extract_labels(const StrategyProfile& x);

// eps-Nash test over the unlabeled players: no pure deviation improves the
// mixed payoff by more than eps.
bool verify_nash(const NormalizedAffinity& w, const StrategyProfile& x, double eps);

// Exhaustive pure-strategy Nash enumeration over the unlabeled players, used
// as a desk-scale oracle. Bounded to <= 8 unlabeled players and c <= 3
// (throws InstanceTooLarge beyond that). Each result is a full label vector;
// ties count as equilibria. Output is in lexicographic order.
std::vector<std::vector<int>> enumerate_pure_nash(const NormalizedAffinity& w,
                                                  const LabelAssignment& assignment);

// Convergence diagnostics export: iteration, F(x), max row change per line.
void write_trace_csv(const std::vector<IterationTrace>& trace, const std::string& path);

}  // namespace gtg
