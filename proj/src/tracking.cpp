#include "gtg/tracking.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <filesystem>
#include <fstream>
#include <map>
#include <regex>

namespace fs = std::filesystem;
using nlohmann::json;

namespace gtg {

int Scenario::frame_index(int frame_id) const {
  auto it = std::lower_bound(frame_ids.begin(), frame_ids.end(), frame_id);
  if (it == frame_ids.end() || *it != frame_id) return -1;
  return static_cast<int>(it - frame_ids.begin());
}

PixelPatch crop(const Image& frame, const BBox& box) {
  PixelPatch p;
  p.width = box.w;
  p.height = box.h;
  p.rgb.resize(static_cast<size_t>(box.w) * box.h * 3);
  for (int y = 0; y < box.h; ++y) {
    const uint8_t* src = frame.px(box.x, box.y + y);
    std::copy(src, src + static_cast<size_t>(box.w) * 3, p.rgb.begin() + static_cast<size_t>(y) * box.w * 3);
  }
  return p;
}

void finalize_scenario(Scenario& s) {
  std::stable_sort(s.detections.begin(), s.detections.end(),
                   [](const Detection& a, const Detection& b) {
                     if (a.frame_id != b.frame_id) return a.frame_id < b.frame_id;
                     return a.bbox.x < b.bbox.x;
                   });
  s.patches.clear();
  s.patches.reserve(s.detections.size());
  for (const Detection& d : s.detections) {
    const int fi = s.frame_index(d.frame_id);
    if (fi < 0)
      throw MalformedAnnotation("detection references unknown frame " + std::to_string(d.frame_id));
    const Image& frame = s.frames[fi];
    const BBox& b = d.bbox;
    if (b.w < 4 || b.h < 4)
      throw MalformedAnnotation("bounding box " + std::to_string(b.w) + "x" + std::to_string(b.h) +
                                " is below the 4x4 minimum");
    if (b.x < 0 || b.y < 0 || b.x + b.w > frame.width || b.y + b.h > frame.height)
      throw BBoxOutOfFrame("bbox (" + std::to_string(b.x) + "," + std::to_string(b.y) + "," +
                           std::to_string(b.w) + "," + std::to_string(b.h) + ") exceeds frame " +
                           std::to_string(d.frame_id) + " (" + std::to_string(frame.width) + "x" +
                           std::to_string(frame.height) + ")");
    if (d.truth_id && *d.truth_id < 1)
      throw MalformedAnnotation("target id must be >= 1, got " + std::to_string(*d.truth_id));
    s.patches.push_back(crop(frame, b));
  }
  int c = 0;
  for (const Detection& d : s.detections)
    if (d.truth_id) c = std::max(c, *d.truth_id);
  s.num_targets = c;
}

Scenario load_scenario(const std::string& frames_dir, const std::string& annotations_path) {
  Scenario s;

  const std::regex frame_re(R"(frame_(\d{6})\.ppm)");
  std::map<int, fs::path> frame_files;
  std::error_code ec;
  for (const auto& entry : fs::directory_iterator(frames_dir, ec)) {
    std::smatch m;
    const std::string name = entry.path().filename().string();
    if (std::regex_match(name, m, frame_re)) frame_files[std::stoi(m[1].str())] = entry.path();
  }
  if (ec) throw IoError("cannot read frame directory " + frames_dir + ": " + ec.message());
  if (frame_files.empty()) throw UnreadableImage("no frame_<id>.ppm files in " + frames_dir);
  for (const auto& [id, path] : frame_files) {
    s.frame_ids.push_back(id);
    s.frames.push_back(read_ppm(path.string()));
  }

  std::ifstream ann(annotations_path);
  if (!ann) throw IoError("cannot open annotations " + annotations_path);
  std::string line;
  int line_no = 0;
  while (std::getline(ann, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    json rec;
    try {
      rec = json::parse(line);
    } catch (const json::exception& e) {
      throw MalformedAnnotation("line " + std::to_string(line_no) + ": " + e.what());
    }
    auto want_int = [&](const char* key) {
      if (!rec.contains(key) || !rec[key].is_number_integer())
        throw MalformedAnnotation("line " + std::to_string(line_no) + ": missing integer field '" +
                                  key + "'");
      return rec[key].get<int>();
    };
    Detection d;
    d.frame_id = want_int("frame");
    d.bbox = {want_int("x"), want_int("y"), want_int("w"), want_int("h")};
    if (!rec.contains("id"))
      throw MalformedAnnotation("line " + std::to_string(line_no) + ": missing field 'id'");
    if (!rec["id"].is_null()) {
      if (!rec["id"].is_number_integer())
        throw MalformedAnnotation("line " + std::to_string(line_no) + ": 'id' must be int or null");
      d.truth_id = rec["id"].get<int>();
    }
    s.detections.push_back(d);
  }

  try {
    finalize_scenario(s);
  } catch (MalformedAnnotation& e) {
    throw MalformedAnnotation(std::string(e.what()) + " (" + annotations_path + ")");
  }
  return s;
}

void write_scenario(const Scenario& s, const std::string& dir) {
  fs::create_directories(dir);
  char name[32];
  for (size_t i = 0; i < s.frames.size(); ++i) {
    std::snprintf(name, sizeof(name), "frame_%06d.ppm", s.frame_ids[i]);
    write_ppm(s.frames[i], (fs::path(dir) / name).string());
  }
  std::ofstream ann(fs::path(dir) / "annotations.jsonl");
  if (!ann) throw IoError("cannot write annotations in " + dir);
  for (const Detection& d : s.detections) {
    json rec{{"frame", d.frame_id}, {"x", d.bbox.x},     {"y", d.bbox.y},
             {"w", d.bbox.w},       {"h", d.bbox.h},     {"id", nullptr}};
    if (d.truth_id) rec["id"] = *d.truth_id;
    ann << rec.dump() << '\n';
  }
  if (!ann) throw IoError("annotation write failed in " + dir);
}

LabelAssignment select_labeled_frames(const Scenario& s, int k, uint64_t seed) {
  // frames that actually contain detections are the selectable pool
  std::vector<int> pool;
  for (int id : s.frame_ids) {
    const bool has = std::any_of(s.detections.begin(), s.detections.end(),
                                 [&](const Detection& d) { return d.frame_id == id; });
    if (has) pool.push_back(id);
  }
  if (k < 1 || k > static_cast<int>(pool.size()))
    throw KTooLarge("k = " + std::to_string(k) + " but only " + std::to_string(pool.size()) +
                    " frames contain detections");

  SplitMix64 rng(seed);
  for (int i = 0; i < k; ++i) {
    const auto j = i + static_cast<size_t>(rng.next_below(pool.size() - i));
    std::swap(pool[i], pool[static_cast<size_t>(j)]);
  }
  std::vector<int> chosen(pool.begin(), pool.begin() + k);
  std::sort(chosen.begin(), chosen.end());

  LabelAssignment a;
  a.n = static_cast<int>(s.detections.size());
  a.c = s.num_targets;
  a.labels.assign(a.n, LabelAssignment::kUnlabeled);
  for (int i = 0; i < a.n; ++i) {
    const Detection& d = s.detections[i];
    if (!std::binary_search(chosen.begin(), chosen.end(), d.frame_id)) continue;
    if (!d.truth_id)
      throw MissingGroundTruth("detection " + std::to_string(i) + " in selected frame " +
                               std::to_string(d.frame_id) + " has no truth id");
    a.labels[i] = *d.truth_id - 1;
  }
  a.require_class_coverage();  // MissingClass when a target never shows up in the chosen frames
  return a;
}

PreparedGraph build_graph(const Scenario& s, std::optional<double> sigma, ExecMode mode) {
  const std::vector<CovarianceDescriptor> descriptors = compute_descriptors(s.patches, mode);
  const DistanceMatrix dist = pairwise_distances(descriptors, mode);
  const double sigma_used = sigma ? *sigma : auto_sigma(dist);
  const AffinityMatrix w = affinity_from_distances(dist, sigma_used);
  return PreparedGraph{normalize(w), sigma_used};
}

TrackingResult run_on_graph(const PreparedGraph& g, const Scenario& s,
                            const LabelAssignment& assignment, const GameConfig& config,
                            std::vector<IterationTrace>* trace) {
  if (assignment.n != static_cast<int>(s.detections.size()))
    throw DimensionMismatch("assignment covers " + std::to_string(assignment.n) +
                            " players but the scenario has " +
                            std::to_string(s.detections.size()) + " detections");
  const EquilibriumResult eq = run_dynamics(g.w, assignment, config, trace);
  TrackingResult r;
  r.predicted_ids.resize(eq.labels.size());
  for (size_t i = 0; i < eq.labels.size(); ++i) r.predicted_ids[i] = eq.labels[i] + 1;
  r.confidence = eq.confidence;
  r.iterations = eq.iterations;
  r.converged = eq.converged;
  r.sigma_used = g.sigma_used;
  return r;
}

TrackingResult run_pipeline(const Scenario& s, const LabelAssignment& assignment,
                            const PipelineParams& params) {
  const PreparedGraph g = build_graph(s, params.sigma, params.mode);
  return run_on_graph(g, s, assignment, params.game);
}

Scenario recast_single_target(const Scenario& s, int target) {
  if (target < 1 || target > s.num_targets)
    throw UnknownTarget("target " + std::to_string(target) + " outside {1.." +
                        std::to_string(s.num_targets) + "}");
  const bool present = std::any_of(s.detections.begin(), s.detections.end(),
                                   [&](const Detection& d) { return d.truth_id == target; });
  if (!present) throw UnknownTarget("target " + std::to_string(target) + " has no detections");

  Scenario out = s;
  for (Detection& d : out.detections)
    if (d.truth_id) d.truth_id = (*d.truth_id == target) ? 1 : 2;
  out.num_targets = 2;
  return out;
}

MetricsReport evaluate(const TrackingResult& result, const Scenario& s) {
  const int n = static_cast<int>(s.detections.size());
  if (static_cast<int>(result.predicted_ids.size()) != n)
    throw InvalidParams("result covers " + std::to_string(result.predicted_ids.size()) +
                        " detections, scenario has " + std::to_string(n));
  for (const Detection& d : s.detections)
    if (!d.truth_id) throw MissingGroundTruth("evaluate needs truth ids on every detection");

  const int c = s.num_targets;
  MetricsReport m;
  m.per_target.resize(c);
  for (int t = 0; t < c; ++t) m.per_target[t].target_id = t + 1;

  for (int i = 0; i < n; ++i) {
    const int truth = *s.detections[i].truth_id;
    const int pred = result.predicted_ids[i];
    if (pred < 1 || pred > c)
      throw InvalidParams("predicted id " + std::to_string(pred) + " outside {1.." +
                          std::to_string(c) + "}");
    if (pred == truth) {
      m.per_target[truth - 1].tp += 1;
    } else {
      m.per_target[truth - 1].fn += 1;  // the true target went missing here
      m.per_target[pred - 1].fp += 1;   // and someone else was claimed
    }
  }

  double sp = 0.0, sr = 0.0, sf = 0.0;
  for (TargetMetrics& t : m.per_target) {
    if (t.tp + t.fp > 0) {
      t.precision = static_cast<double>(t.tp) / static_cast<double>(t.tp + t.fp);
    } else {
      t.precision = 0.0;
      t.precision_defined = false;
    }
    if (t.tp + t.fn > 0) {
      t.recall = static_cast<double>(t.tp) / static_cast<double>(t.tp + t.fn);
    } else {
      t.recall = 0.0;
      t.recall_defined = false;
    }
    t.f_measure = (t.precision + t.recall > 0.0)
                      ? 2.0 * t.precision * t.recall / (t.precision + t.recall)
                      : 0.0;
    sp += t.precision;
    sr += t.recall;
    sf += t.f_measure;
  }
  m.mean_precision = sp / c;
  m.mean_recall = sr / c;
  m.mean_f = sf / c;
  return m;
}

std::pair<double, double> mean_std(const std::vector<double>& v) {
  const size_t n = v.size();
  double mean = 0.0;
  for (double x : v) mean += x;
  mean /= static_cast<double>(n);
  if (n < 2) return {mean, 0.0};
  double ss = 0.0;
  for (double x : v) ss += (x - mean) * (x - mean);
  return {mean, std::sqrt(ss / static_cast<double>(n - 1))};
}

ExperimentStats repeat_experiment(const Scenario& s, int k, int runs, uint64_t base_seed,
                                  const PipelineParams& params) {
  if (runs < 1) throw InvalidParams("runs must be >= 1");
  const PreparedGraph g = build_graph(s, params.sigma, params.mode);

  ExperimentStats stats;
  stats.runs = runs;

  // phase 1: fix the assignment of every run; failed draws burn a seed
  std::vector<LabelAssignment> assignments;
  assignments.reserve(runs);
  uint64_t cursor = base_seed;
  const int max_consecutive_failures = 1000;
  for (int r = 0; r < runs; ++r) {
    int failures = 0;
    for (;;) {
      try {
        assignments.push_back(select_labeled_frames(s, k, cursor++));
        break;
      } catch (const MissingClass&) {
        ++stats.redraws;
        if (++failures >= max_consecutive_failures)
          throw MissingClass("labeled-frame draw failed " + std::to_string(failures) +
                             " times in a row; some target may be absent from the data");
      }
    }
  }

  // phase 2: independent runs, results keyed by run index
  stats.run_precision.resize(runs);
  stats.run_recall.resize(runs);
  stats.run_f.resize(runs);
  std::vector<uint8_t> converged(runs, 0);
  std::exception_ptr failure;
#pragma omp parallel for schedule(dynamic) if (params.mode == ExecMode::parallel)
  for (int r = 0; r < runs; ++r) {
    try {
      const TrackingResult res = run_on_graph(g, s, assignments[r], params.game);
      const MetricsReport m = evaluate(res, s);
      stats.run_precision[r] = m.mean_precision;
      stats.run_recall[r] = m.mean_recall;
      stats.run_f[r] = m.mean_f;
      converged[r] = res.converged ? 1 : 0;
    } catch (...) {
#pragma omp critical
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);
  for (int r = 0; r < runs; ++r) stats.non_converged_runs += (converged[r] == 0);

  std::tie(stats.mean_precision, stats.std_precision) = mean_std(stats.run_precision);
  std::tie(stats.mean_recall, stats.std_recall) = mean_std(stats.run_recall);
  std::tie(stats.mean_f, stats.std_f) = mean_std(stats.run_f);
  return stats;
}

json result_to_json(const Scenario& s, const TrackingResult& r, const json& config_echo) {
  json dets = json::array();
  for (size_t i = 0; i < s.detections.size(); ++i) {
    const Detection& d = s.detections[i];
    dets.push_back({{"frame", d.frame_id},
                    {"x", d.bbox.x},
                    {"y", d.bbox.y},
                    {"w", d.bbox.w},
                    {"h", d.bbox.h},
                    {"predicted_id", r.predicted_ids[i]},
                    {"confidence", r.confidence[i]}});
  }
  return json{{"config", config_echo},
              {"num_targets", s.num_targets},
              {"solver",
               {{"iterations", r.iterations}, {"converged", r.converged}, {"sigma", r.sigma_used}}},
              {"detections", dets}};
}

TrackingResult result_from_json(const json& j, const Scenario& s) {
  if (!j.contains("detections") || !j["detections"].is_array())
    throw InvalidParams("result file has no detection list");
  const json& dets = j["detections"];
  if (dets.size() != s.detections.size())
    throw InvalidParams("result lists " + std::to_string(dets.size()) +
                        " detections, scenario has " + std::to_string(s.detections.size()));
  TrackingResult r;
  r.predicted_ids.reserve(dets.size());
  r.confidence.reserve(dets.size());
  for (size_t i = 0; i < dets.size(); ++i) {
    const json& rec = dets[i];
    const Detection& d = s.detections[i];
    if (rec.value("frame", -1) != d.frame_id || rec.value("x", -1) != d.bbox.x ||
        rec.value("y", -1) != d.bbox.y || rec.value("w", -1) != d.bbox.w ||
        rec.value("h", -1) != d.bbox.h)
      throw InvalidParams("result detection " + std::to_string(i) +
                          " does not match the scenario");
    r.predicted_ids.push_back(rec.at("predicted_id").get<int>());
    r.confidence.push_back(rec.value("confidence", 0.0));
  }
  if (j.contains("solver")) {
    r.iterations = j["solver"].value("iterations", 0);
    r.converged = j["solver"].value("converged", false);
    r.sigma_used = j["solver"].value("sigma", 0.0);
  }
  return r;
}

json metrics_to_json(const MetricsReport& m, const json& config_echo) {
  json per = json::array();
  for (const TargetMetrics& t : m.per_target) {
    per.push_back({{"id", t.target_id},
                   {"tp", t.tp},
                   {"fp", t.fp},
                   {"fn", t.fn},
                   {"precision", t.precision},
                   {"recall", t.recall},
                   {"f_measure", t.f_measure},
                   {"precision_defined", t.precision_defined},
                   {"recall_defined", t.recall_defined}});
  }
  return json{{"config", config_echo},
              {"per_target", per},
              {"mean",
               {{"precision", m.mean_precision},
                {"recall", m.mean_recall},
                {"f_measure", m.mean_f}}}};
}

}  // namespace gtg
