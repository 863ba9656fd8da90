// Kernel benchmark: serial reference vs OpenMP path for the three hot loops
// (descriptor extraction, pairwise distance fill, replicator iteration).
// The two paths must agree bitwise; this tool checks that while timing them.

#include <chrono>
#include <cstdio>
#include <string>
#include <vector>

#include "gtg/game.hpp"
#include "gtg/graph.hpp"
#include "gtg/parallel.hpp"
#include "gtg/rng.hpp"
#include "gtg/synth.hpp"

using gtg::ExecMode;

namespace {

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

template <typename F>
double timed(F&& f) {
  const auto t0 = std::chrono::steady_clock::now();
  f();
  return seconds_since(t0);
}

void report(const char* name, double serial_s, double parallel_s, bool identical) {
  std::printf("%-22s serial %8.3f s   openmp %8.3f s   speedup %5.2fx   %s\n", name, serial_s,
              parallel_s, serial_s / parallel_s, identical ? "outputs identical" : "OUTPUTS DIFFER");
}

}  // namespace

int main(int argc, char** argv) {
  int patches = 400;
  int players = 600;
  int classes = 4;
  int steps = 200;
  for (int i = 1; i < argc - 1; ++i) {
    const std::string a = argv[i];
    if (a == "--patches") patches = std::stoi(argv[i + 1]);
    if (a == "--players") players = std::stoi(argv[i + 1]);
    if (a == "--classes") classes = std::stoi(argv[i + 1]);
    if (a == "--steps") steps = std::stoi(argv[i + 1]);
  }

  std::printf("threads available: %d\n", gtg::max_threads());

  // workload: a noisy synthetic scenario supplies realistic patches
  gtg::SynthParams sp;
  sp.num_targets = 4;
  sp.hue_separation = 0.25;
  sp.num_frames = (patches + sp.num_targets - 1) / sp.num_targets;
  sp.pixel_noise = 0.05;
  sp.illumination_drift = 0.1;
  sp.seed = 99;
  const gtg::Scenario scenario = gtg::generate_scenario(sp);
  std::vector<gtg::PixelPatch> patch_set(scenario.patches.begin(),
                                         scenario.patches.begin() +
                                             std::min<size_t>(patches, scenario.patches.size()));
  std::printf("workload: %zu patches %dx%d, %d players, %d classes, %d steps\n\n",
              patch_set.size(), sp.patch_w, sp.patch_h, players, classes, steps);

  // descriptor extraction
  std::vector<gtg::CovarianceDescriptor> ds, dp;
  const double t_desc_s = timed([&] { ds = gtg::compute_descriptors(patch_set, ExecMode::serial); });
  const double t_desc_p =
      timed([&] { dp = gtg::compute_descriptors(patch_set, ExecMode::parallel); });
  bool same = ds.size() == dp.size();
  for (size_t i = 0; same && i < ds.size(); ++i) same = ds[i].matrix == dp[i].matrix;
  report("descriptors", t_desc_s, t_desc_p, same);

  // pairwise distances
  gtg::DistanceMatrix dist_s, dist_p;
  const double t_dist_s = timed([&] { dist_s = gtg::pairwise_distances(ds, ExecMode::serial); });
  const double t_dist_p = timed([&] { dist_p = gtg::pairwise_distances(ds, ExecMode::parallel); });
  report("pairwise distances", t_dist_s, t_dist_p, dist_s.entries == dist_p.entries);

  // replicator iterations on a random dense game
  gtg::SplitMix64 rng(7);
  gtg::AffinityMatrix w;
  w.n = players;
  w.entries.assign(static_cast<size_t>(players) * players, 0.0);
  for (int i = 0; i < players; ++i)
    for (int j = i + 1; j < players; ++j) {
      const double v = rng.next_double();
      w.entries[static_cast<size_t>(i) * players + j] = v;
      w.entries[static_cast<size_t>(j) * players + i] = v;
    }
  const gtg::NormalizedAffinity nw = gtg::normalize(w);

  gtg::LabelAssignment assignment;
  assignment.n = players;
  assignment.c = classes;
  assignment.labels.assign(players, gtg::LabelAssignment::kUnlabeled);
  for (int h = 0; h < classes; ++h) assignment.labels[h] = h;  // one anchor per class

  const gtg::StrategyProfile x0 = gtg::init_profile(assignment);
  gtg::StrategyProfile xs = x0, xp = x0;
  const double t_rep_s = timed([&] {
    for (int s = 0; s < steps; ++s) xs = gtg::replicator_step(nw, xs, ExecMode::serial);
  });
  const double t_rep_p = timed([&] {
    for (int s = 0; s < steps; ++s) xp = gtg::replicator_step(nw, xp, ExecMode::parallel);
  });
  report("replicator steps", t_rep_s, t_rep_p, xs.x == xp.x);

  return same && dist_s.entries == dist_p.entries && xs.x == xp.x ? 0 : 1;
}
