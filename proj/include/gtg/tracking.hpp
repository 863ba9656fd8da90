#pragma once

#include <nlohmann/json.hpp>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "gtg/descriptor.hpp"
#include "gtg/game.hpp"
#include "gtg/ppm.hpp"
#include "gtg/rng.hpp"

namespace gtg {

struct BBox {
  int x = 0, y = 0, w = 0, h = 0;

  bool operator==(const BBox&) const = default;
};

struct Detection {
  int frame_id = 0;
  BBox bbox;
  std::optional<int> truth_id;  // target identity in {1..C} when known
};

// A pre-recorded sequence: frames, detections (sorted by frame then bbox.x)
// and the patch pixels cropped out of the frames, one per detection.
struct Scenario {
  std::vector<int> frame_ids;       // ascending
  std::vector<Image> frames;        // parallel to frame_ids
  std::vector<Detection> detections;
  std::vector<PixelPatch> patches;  // parallel to detections
  int num_targets = 0;              // C

  int frame_index(int frame_id) const;  // -1 when absent
};

PixelPatch crop(const Image& frame, const BBox& box);

// Sorts detections by (frame_id, bbox.x), validates them against the frames
// and fills in the cropped patches. Both the loader and the synthesizer go
// through this.
void finalize_scenario(Scenario& s);

// Frames are frame_<id:06d>.ppm files in frames_dir; annotations are JSON
// lines {"frame":int,"x":int,"y":int,"w":int,"h":int,"id":int|null}.
// num_targets is inferred as the largest id present.
Scenario load_scenario(const std::string& frames_dir, const std::string& annotations_path);

// Writes the same two formats load_scenario reads.
void write_scenario(const Scenario& s, const std::string& dir);

// Draws k distinct frames (uniformly, without replacement, SplitMix64(seed)
// partial Fisher-Yates over the ascending list of frames that contain
// detections) and labels every detection inside them with its truth id.
LabelAssignment select_labeled_frames(const Scenario& s, int k, uint64_t seed);

struct PipelineParams {
  std::optional<double> sigma;  // nullopt = AUTO (median heuristic)
  GameConfig game;
  ExecMode mode = ExecMode::parallel;  // descriptor/distance kernels
};

struct TrackingResult {
  std::vector<int> predicted_ids;  // 1-based, aligned with scenario detections
  std::vector<double> confidence;
  int iterations = 0;
  bool converged = false;
  double sigma_used = 0.0;
};

// Descriptor graph computed once; the label game can then be replayed on it
// with many different assignments.
struct PreparedGraph {
  NormalizedAffinity w;
  double sigma_used = 0.0;
};

PreparedGraph build_graph(const Scenario& s, std::optional<double> sigma,
                          ExecMode mode = ExecMode::parallel);
TrackingResult run_on_graph(const PreparedGraph& g, const Scenario& s,
                            const LabelAssignment& assignment, const GameConfig& config,
                            std::vector<IterationTrace>* trace = nullptr);

// patches -> descriptors -> distances -> affinity -> normalize -> dynamics.
TrackingResult run_pipeline(const Scenario& s, const LabelAssignment& assignment,
                            const PipelineParams& params);

// Binary view of the problem: truth id `target` becomes 1, everything else 2.
Scenario recast_single_target(const Scenario& s, int target);

struct TargetMetrics {
  int target_id = 0;  // 1-based
  long tp = 0, fp = 0, fn = 0;
  double precision = 0.0, recall = 0.0, f_measure = 0.0;
  bool precision_defined = true;  // false when tp+fp == 0
  bool recall_defined = true;     // false when tp+fn == 0
};

struct MetricsReport {
  std::vector<TargetMetrics> per_target;  // one entry per target id 1..C
  double mean_precision = 0.0, mean_recall = 0.0, mean_f = 0.0;  // unweighted over targets
};

MetricsReport evaluate(const TrackingResult& result, const Scenario& s);

// Sample mean and standard deviation (n-1 denominator, 0 for a single value).
std::pair<double, double> mean_std(const std::vector<double>& v);

struct ExperimentStats {
  int runs = 0;
  int redraws = 0;            // labeled-frame draws rejected for a missing class
  int non_converged_runs = 0;
  double mean_precision = 0.0, std_precision = 0.0;
  double mean_recall = 0.0, std_recall = 0.0;
  double mean_f = 0.0, std_f = 0.0;
  std::vector<double> run_precision, run_recall, run_f;
};

// Repeats select -> solve -> evaluate. Run r draws with seed base_seed + r;
// a draw that misses a class is retried with the next seed (shifting later
// runs by one), so the whole experiment stays deterministic.
ExperimentStats repeat_experiment(const Scenario& s, int k, int runs, uint64_t base_seed,
                                  const PipelineParams& params);

// JSON artifacts. config_echo is embedded verbatim for provenance.
nlohmann::json result_to_json(const Scenario& s, const TrackingResult& r,
                              const nlohmann::json& config_echo);
// Validates that the stored detections match the scenario (count, frame, bbox).
TrackingResult result_from_json(const nlohmann::json& j, const Scenario& s);
nlohmann::json metrics_to_json(const MetricsReport& m, const nlohmann::json& config_echo);

}  // namespace gtg
