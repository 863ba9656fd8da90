// gtg: batch front end for the covariance-graph label-association pipeline.
// Subcommands: synth (make a scenario), track (solve one), eval (score a
// result file), sweep (labeled-frame count study).

#include <CLI11.hpp>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <nlohmann/json.hpp>
#include <optional>
#include <string>

#include "gtg/synth.hpp"
#include "gtg/tracking.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr int kOk = 0;
constexpr int kConfigError = 2;
constexpr int kNotConverged = 3;
constexpr int kIoError = 4;

json load_config_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw gtg::IoError("cannot open config file " + path);
  try {
    return json::parse(f);
  } catch (const json::exception& e) {
    throw gtg::InvalidParams("config file " + path + ": " + e.what());
  }
}

// pull a default out of the config file; flags given on the command line
// override these afterwards because CLI11 only writes parsed options
template <typename T>
void seed_default(const json& cfg, const char* key, T& var) {
  if (!cfg.contains(key)) return;
  try {
    var = cfg.at(key).get<T>();
  } catch (const json::exception& e) {
    throw gtg::InvalidParams(std::string("config key '") + key + "': " + e.what());
  }
}

std::optional<double> parse_sigma(const std::string& text) {
  if (text == "auto" || text == "AUTO") return std::nullopt;
  try {
    size_t used = 0;
    const double v = std::stod(text, &used);
    if (used != text.size()) throw std::invalid_argument(text);
    return v;
  } catch (const std::exception&) {
    throw gtg::InvalidParams("--sigma must be 'auto' or a positive number, got '" + text + "'");
  }
}

void write_text(const std::string& path, const std::string& text) {
  if (const fs::path dir = fs::path(path).parent_path(); !dir.empty())
    fs::create_directories(dir);
  std::ofstream f(path, std::ios::binary);
  if (!f) throw gtg::IoError("cannot open " + path + " for writing");
  f << text;
  if (!f) throw gtg::IoError("write failed for " + path);
}

json read_json_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw gtg::IoError("cannot open " + path);
  try {
    return json::parse(f);
  } catch (const json::exception& e) {
    throw gtg::InvalidParams(path + ": " + e.what());
  }
}

struct TrackOptions {
  std::string in, out;
  int labeled_frames = 5;
  uint64_t seed = 1;
  std::string sigma = "auto";
  double tol = 1e-6;
  int max_iters = 10000;
  int target = 0;  // 0 = keep all classes
  bool strict = false;
  bool serial = false;
  std::string dump_affinity, trace_path;
};

json track_config_echo(const TrackOptions& o) {
  json cfg{{"command", "track"},     {"in", o.in},
           {"out", o.out},           {"labeled_frames", o.labeled_frames},
           {"seed", o.seed},         {"sigma", o.sigma},
           {"tol", o.tol},           {"max_iters", o.max_iters},
           {"strict", o.strict},     {"serial", o.serial}};
  cfg["target"] = o.target > 0 ? json(o.target) : json(nullptr);
  return cfg;
}

gtg::PipelineParams pipeline_params(const std::string& sigma, double tol, int max_iters,
                                    bool serial) {
  gtg::PipelineParams p;
  p.sigma = parse_sigma(sigma);
  if (p.sigma && *p.sigma <= 0.0) throw gtg::InvalidSigma("sigma must be > 0");
  p.game.tol = tol;
  p.game.max_iters = max_iters;
  p.game.mode = serial ? gtg::ExecMode::serial : gtg::ExecMode::parallel;
  p.mode = p.game.mode;
  return p;
}

gtg::Scenario load_and_recast(const std::string& dir, int target) {
  gtg::Scenario s = gtg::load_scenario(dir, (fs::path(dir) / "annotations.jsonl").string());
  if (target > 0) s = gtg::recast_single_target(s, target);
  return s;
}

int cmd_track(const TrackOptions& o) {
  if (o.in.empty() || o.out.empty())
    throw gtg::InvalidParams("track needs --in and --out (flags or config keys)");
  const gtg::Scenario scenario = load_and_recast(o.in, o.target);
  const gtg::PipelineParams params =
      pipeline_params(o.sigma, o.tol, o.max_iters, o.serial);
  const gtg::LabelAssignment assignment =
      gtg::select_labeled_frames(scenario, o.labeled_frames, o.seed);

  const gtg::PreparedGraph graph = gtg::build_graph(scenario, params.sigma, params.mode);
  if (!o.dump_affinity.empty())
    gtg::write_matrix_csv(graph.w.entries, graph.w.n, o.dump_affinity);

  std::vector<gtg::IterationTrace> trace;
  const gtg::TrackingResult result = gtg::run_on_graph(
      graph, scenario, assignment, params.game, o.trace_path.empty() ? nullptr : &trace);
  if (!o.trace_path.empty()) gtg::write_trace_csv(trace, o.trace_path);

  write_text(o.out, gtg::result_to_json(scenario, result, track_config_echo(o)).dump(2) + "\n");

  std::cerr << "track: " << scenario.detections.size() << " detections, "
            << assignment.count_labeled() << " labeled, sigma=" << result.sigma_used
            << ", iterations=" << result.iterations
            << (result.converged ? "" : " (not converged)") << "\n";
  if (o.strict && !result.converged) return kNotConverged;
  return kOk;
}

struct EvalOptions {
  std::string in, result, out;
  int target = 0;
};

int cmd_eval(const EvalOptions& o) {
  if (o.in.empty() || o.result.empty() || o.out.empty())
    throw gtg::InvalidParams("eval needs --in, --result and --out");
  const gtg::Scenario scenario = load_and_recast(o.in, o.target);
  const gtg::TrackingResult result = gtg::result_from_json(read_json_file(o.result), scenario);
  const gtg::MetricsReport report = gtg::evaluate(result, scenario);

  json cfg{{"command", "eval"}, {"in", o.in}, {"result", o.result}, {"out", o.out}};
  cfg["target"] = o.target > 0 ? json(o.target) : json(nullptr);
  write_text(o.out, gtg::metrics_to_json(report, cfg).dump(2) + "\n");

  std::cerr << "eval: mean F = " << report.mean_f << "\n";
  return kOk;
}

struct SweepOptions {
  std::string in, out;
  std::vector<int> ks = {1, 3, 5};
  int runs = 20;
  uint64_t seed = 1;
  std::string sigma = "auto";
  double tol = 1e-6;
  int max_iters = 10000;
  int target = 0;
  bool strict = false;
  bool serial = false;
};

int cmd_sweep(const SweepOptions& o) {
  if (o.in.empty() || o.out.empty()) throw gtg::InvalidParams("sweep needs --in and --out");
  if (o.ks.empty()) throw gtg::InvalidParams("sweep needs at least one k");
  const gtg::Scenario scenario = load_and_recast(o.in, o.target);
  const gtg::PipelineParams params = pipeline_params(o.sigma, o.tol, o.max_iters, o.serial);

  std::vector<int> ks = o.ks;
  std::sort(ks.begin(), ks.end());
  ks.erase(std::unique(ks.begin(), ks.end()), ks.end());

  json cfg{{"command", "sweep"}, {"in", o.in},         {"out", o.out},
           {"labeled_frames", ks}, {"runs", o.runs},   {"seed", o.seed},
           {"sigma", o.sigma},   {"tol", o.tol},       {"max_iters", o.max_iters},
           {"strict", o.strict}, {"serial", o.serial}};
  cfg["target"] = o.target > 0 ? json(o.target) : json(nullptr);

  std::string csv = "# config: " + cfg.dump() + "\n";
  csv += "k,mean_precision,std_precision,mean_recall,std_recall,mean_f,std_f\n";
  int non_converged = 0;
  for (int k : ks) {
    const gtg::ExperimentStats st = gtg::repeat_experiment(scenario, k, o.runs, o.seed, params);
    non_converged += st.non_converged_runs;
    csv += std::to_string(k);
    for (double v : {st.mean_precision, st.std_precision, st.mean_recall, st.std_recall,
                     st.mean_f, st.std_f})
      csv += "," + json(v).dump();
    csv += "\n";
    std::cerr << "sweep: k=" << k << " mean F=" << st.mean_f << " (std " << st.std_f << ", "
              << st.redraws << " redraws)\n";
  }
  write_text(o.out, csv);
  if (o.strict && non_converged > 0) return kNotConverged;
  return kOk;
}

struct SynthOptions {
  int targets = 3;
  int frames = 30;
  uint64_t seed = 1;
  std::string out;
  int patch_w = 16;
  int patch_h = 32;
  double hue_separation = 0.0;  // 0 = 1/targets
  double noise = 0.0;
  double drift = 0.0;
  double occlusion = 0.0;
};

int cmd_synth(const SynthOptions& o) {
  if (o.out.empty()) throw gtg::InvalidParams("synth needs --out");
  gtg::SynthParams p;
  p.num_targets = o.targets;
  p.num_frames = o.frames;
  p.seed = o.seed;
  p.patch_w = o.patch_w;
  p.patch_h = o.patch_h;
  p.hue_separation = o.hue_separation > 0.0 ? o.hue_separation : 1.0 / std::max(1, o.targets);
  p.pixel_noise = o.noise;
  p.illumination_drift = o.drift;
  p.occlusion_rate = o.occlusion;

  const gtg::Scenario s = gtg::generate_scenario(p);
  gtg::write_scenario(s, o.out);

  const json cfg{{"command", "synth"},
                 {"targets", o.targets},
                 {"frames", o.frames},
                 {"seed", o.seed},
                 {"out", o.out},
                 {"patch_w", o.patch_w},
                 {"patch_h", o.patch_h},
                 {"hue_separation", p.hue_separation},
                 {"noise", o.noise},
                 {"drift", o.drift},
                 {"occlusion", o.occlusion},
                 {"detections", s.detections.size()}};
  write_text((fs::path(o.out) / "params.json").string(), cfg.dump(2) + "\n");

  std::cerr << "synth: wrote " << s.frames.size() << " frames, " << s.detections.size()
            << " detections to " << o.out << "\n";
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  // --config is resolved before CLI11 runs so that explicit flags override it
  json file_cfg = json::object();
  try {
    for (int i = 1; i < argc - 1; ++i)
      if (std::string(argv[i]) == "--config") file_cfg = load_config_file(argv[i + 1]);
  } catch (const gtg::IoError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kIoError;
  } catch (const gtg::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kConfigError;
  }

  CLI::App app{"graph-transduction label association over covariance descriptors"};
  app.require_subcommand(1);
  std::string config_path;
  app.add_option("--config", config_path, "JSON config file; flags override its values");

  TrackOptions t;
  EvalOptions e;
  SweepOptions w;
  SynthOptions sy;

  try {
    seed_default(file_cfg, "in", t.in);
    seed_default(file_cfg, "out", t.out);
    seed_default(file_cfg, "labeled_frames", t.labeled_frames);
    seed_default(file_cfg, "seed", t.seed);
    seed_default(file_cfg, "sigma", t.sigma);
    seed_default(file_cfg, "tol", t.tol);
    seed_default(file_cfg, "max_iters", t.max_iters);
    seed_default(file_cfg, "target", t.target);
    seed_default(file_cfg, "strict", t.strict);
    seed_default(file_cfg, "serial", t.serial);

    seed_default(file_cfg, "in", e.in);
    seed_default(file_cfg, "result", e.result);
    seed_default(file_cfg, "out", e.out);
    seed_default(file_cfg, "target", e.target);

    seed_default(file_cfg, "in", w.in);
    seed_default(file_cfg, "out", w.out);
    if (file_cfg.contains("labeled_frames") && file_cfg["labeled_frames"].is_array())
      w.ks = file_cfg["labeled_frames"].get<std::vector<int>>();
    seed_default(file_cfg, "runs", w.runs);
    seed_default(file_cfg, "seed", w.seed);
    seed_default(file_cfg, "sigma", w.sigma);
    seed_default(file_cfg, "tol", w.tol);
    seed_default(file_cfg, "max_iters", w.max_iters);
    seed_default(file_cfg, "target", w.target);
    seed_default(file_cfg, "strict", w.strict);
    seed_default(file_cfg, "serial", w.serial);

    seed_default(file_cfg, "targets", sy.targets);
    seed_default(file_cfg, "frames", sy.frames);
    seed_default(file_cfg, "seed", sy.seed);
    seed_default(file_cfg, "out", sy.out);
    seed_default(file_cfg, "patch_w", sy.patch_w);
    seed_default(file_cfg, "patch_h", sy.patch_h);
    seed_default(file_cfg, "hue_separation", sy.hue_separation);
    seed_default(file_cfg, "noise", sy.noise);
    seed_default(file_cfg, "drift", sy.drift);
    seed_default(file_cfg, "occlusion", sy.occlusion);
  } catch (const gtg::Error& err) {
    std::cerr << "error: " << err.what() << "\n";
    return kConfigError;
  }

  auto* track = app.add_subcommand("track", "run the label-association pipeline on a scenario");
  track->add_option("--config", config_path, "JSON config file; flags override its values");
  track->add_option("--in", t.in, "scenario directory (frames + annotations.jsonl)");
  track->add_option("--out", t.out, "result JSON path");
  track->add_option("--labeled-frames", t.labeled_frames, "number of labeled frames to draw");
  track->add_option("--seed", t.seed, "labeled-frame draw seed");
  track->add_option("--sigma", t.sigma, "affinity bandwidth, 'auto' for the median rule");
  track->add_option("--tol", t.tol, "replicator stopping tolerance");
  track->add_option("--max-iters", t.max_iters, "replicator iteration cap");
  track->add_option("--target", t.target, "recast to target-vs-rest before solving");
  track->add_flag("--strict", t.strict, "exit 3 when the dynamics do not converge");
  track->add_flag("--serial", t.serial, "disable the OpenMP kernels");
  track->add_option("--dump-affinity", t.dump_affinity, "write the normalized affinity as CSV");
  track->add_option("--trace", t.trace_path, "write per-iteration convergence CSV");

  auto* eval = app.add_subcommand("eval", "score a result file against ground truth");
  eval->add_option("--config", config_path, "JSON config file; flags override its values");
  eval->add_option("--in", e.in, "scenario directory");
  eval->add_option("--result", e.result, "result JSON produced by track");
  eval->add_option("--out", e.out, "metrics JSON path");
  eval->add_option("--target", e.target, "apply the same target-vs-rest recast used in track");

  auto* sweep = app.add_subcommand("sweep", "repeat track/eval over several labeled-frame counts");
  sweep->add_option("--config", config_path, "JSON config file; flags override its values");
  sweep->add_option("--in", w.in, "scenario directory");
  sweep->add_option("--out", w.out, "CSV output path");
  sweep->add_option("--labeled-frames", w.ks, "comma-separated list of k values")
      ->delimiter(',');
  sweep->add_option("--runs", w.runs, "repetitions per k");
  sweep->add_option("--seed", w.seed, "base seed; run r draws with seed+r");
  sweep->add_option("--sigma", w.sigma, "affinity bandwidth, 'auto' for the median rule");
  sweep->add_option("--tol", w.tol, "replicator stopping tolerance");
  sweep->add_option("--max-iters", w.max_iters, "replicator iteration cap");
  sweep->add_option("--target", w.target, "recast to target-vs-rest");
  sweep->add_flag("--strict", w.strict, "exit 3 when any run does not converge");
  sweep->add_flag("--serial", w.serial, "disable the OpenMP kernels");

  auto* synth = app.add_subcommand("synth", "generate a deterministic synthetic scenario");
  synth->add_option("--config", config_path, "JSON config file; flags override its values");
  synth->add_option("--targets", sy.targets, "number of targets (>= 2)");
  synth->add_option("--frames", sy.frames, "number of frames");
  synth->add_option("--seed", sy.seed, "generator seed");
  synth->add_option("--out", sy.out, "output directory");
  synth->add_option("--patch-w", sy.patch_w, "patch width (>= 8)");
  synth->add_option("--patch-h", sy.patch_h, "patch height (>= 8)");
  synth->add_option("--hue-separation", sy.hue_separation,
                    "hue gap between targets, default 1/targets");
  synth->add_option("--noise", sy.noise, "additive pixel noise amplitude in [0,1]");
  synth->add_option("--drift", sy.drift, "per-frame brightness drift in [0,1]");
  synth->add_option("--occlusion", sy.occlusion, "per (frame,target) occlusion rate in [0,1)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& help) {
    return app.exit(help);
  } catch (const CLI::ParseError& pe) {
    app.exit(pe);
    return kConfigError;
  }

  try {
    if (track->parsed()) return cmd_track(t);
    if (eval->parsed()) return cmd_eval(e);
    if (sweep->parsed()) return cmd_sweep(w);
    if (synth->parsed()) return cmd_synth(sy);
  } catch (const gtg::IoError& err) {
    std::cerr << "error: " << err.what() << "\n";
    return kIoError;
  } catch (const gtg::UnreadableImage& err) {
    std::cerr << "error: " << err.what() << "\n";
    return kIoError;
  } catch (const gtg::Error& err) {
    std::cerr << "error: " << err.what() << "\n";
    return kConfigError;
  } catch (const std::exception& err) {
    std::cerr << "error: " << err.what() << "\n";
    return kConfigError;
  }
  return kOk;
}
