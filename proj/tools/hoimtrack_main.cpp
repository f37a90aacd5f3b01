// Command-line entry point: synth, track, evaluate, gradcheck, ablate.
//
// Exit codes: 0 success, 1 input error, 2 acceptance-check failure.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "gradcheck.hpp"
#include "hoimtrack/errors.hpp"
#include "hoimtrack/metrics.hpp"
#include "hoimtrack/mot_io.hpp"
#include "hoimtrack/pipeline.hpp"
#include "hoimtrack/run_config.hpp"
#include "hoimtrack/synth.hpp"
#include "hoimtrack/tracker.hpp"

namespace fs = std::filesystem;
using namespace hoimtrack;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInput = 1;
constexpr int kExitCheckFailed = 2;
constexpr double kGradcheckTolerance = 1e-4;

void print_warnings(const Diagnostics& diagnostics) {
  for (const auto& w : diagnostics.warnings) std::cerr << "warning: " << w << '\n';
}

RunConfig config_or(const std::string& path, RunConfig fallback) {
  return path.empty() ? fallback : load_run_config(path);
}

std::string pick(const std::string& flag, const std::string& from_config, const char* name) {
  const std::string value = flag.empty() ? from_config : flag;
  if (value.empty()) throw InputError(std::string("missing required path --") + name);
  return value;
}

void write_text(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw InputError("cannot open " + path.string() + " for writing");
  out << text;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Hierarchical instance-matching tracker toolkit"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_path;

  auto* synth = app.add_subcommand("synth", "Generate a synthetic scenario in MOT format");
  std::optional<std::uint64_t> synth_seed;
  synth->add_option("--config", config_path, "Run configuration JSON (default: benchmark)");
  synth->add_option("--out", out_path, "Output directory")->required();
  synth->add_option("--seed", synth_seed, "Override scenario.seed");

  auto* track = app.add_subcommand("track", "Track detections and write MOT results");
  std::string det_path, emb_path;
  bool no_fusion = false;
  track->add_option("--det", det_path, "Detection file (MOT format)");
  track->add_option("--emb", emb_path, "Embedding sidecar CSV");
  track->add_option("--config", config_path, "Run configuration JSON");
  track->add_option("--out", out_path, "Result file (MOT format)");
  track->add_flag("--no-motion-fusion", no_fusion, "Disable motion proposal fusion");

  auto* evaluate_cmd = app.add_subcommand("evaluate", "Compute MOTA/IDF1/IDSw/FP/FN");
  std::string gt_path, res_path;
  double match_iou = kDefaultMatchIou;
  int n_init = TrackerConfig{}.n_init;
  evaluate_cmd->add_option("--gt", gt_path, "Ground-truth file")->required();
  evaluate_cmd->add_option("--res", res_path, "Tracker result file")->required();
  evaluate_cmd->add_option("--out", out_path, "Report JSON path")->required();
  evaluate_cmd->add_option("--iou", match_iou, "Match IoU threshold")->check(CLI::Range(0.0, 1.0));
  evaluate_cmd->add_option("--n-init", n_init, "Tracker confirmation length, for the warm-up note")
      ->check(CLI::PositiveNumber);

  auto* gradcheck = app.add_subcommand("gradcheck", "Check analytic loss gradients numerically");
  std::size_t trials = 100;
  std::uint64_t grad_seed = 0;
  gradcheck->add_option("--trials", trials, "Number of random instances")->check(CLI::PositiveNumber);
  gradcheck->add_option("--seed", grad_seed, "Random seed");

  auto* ablate = app.add_subcommand("ablate", "OIM vs hierarchical loss, with and without fusion");
  ablate->add_option("--config", config_path, "Run configuration JSON (default: benchmark)");
  ablate->add_option("--out", out_path, "Report directory")->required();

  auto* config_cmd = app.add_subcommand("config", "Print a complete run configuration");
  bool benchmark = false;
  config_cmd->add_flag("--benchmark", benchmark, "Print the ablation benchmark instead of defaults");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitInput;
  }

  try {
    if (*synth) {
      RunConfig config = config_or(config_path, default_benchmark_config());
      if (synth_seed) config.scenario.seed = *synth_seed;
      const Scenario scenario = generate(config.scenario);
      export_scenario(scenario, config, out_path);
      std::cout << "wrote " << scenario.gt.frame_count() << " frames, "
                << scenario.gt.box_count() << " ground-truth boxes to " << out_path << '\n';
      return kExitOk;
    }

    if (*track) {
      RunConfig config = config_or(config_path, RunConfig{});
      if (no_fusion) config.tracker.motion_fusion = false;
      Diagnostics diagnostics;
      auto frames = parse_detections(pick(det_path, config.paths.det, "det"), &diagnostics);
      const std::string emb = emb_path.empty() ? config.paths.emb : emb_path;
      if (!emb.empty()) attach_embeddings(frames, parse_embeddings(emb, &diagnostics));
      print_warnings(diagnostics);
      const Sequence result = run_tracker(frames, config.tracker);
      const fs::path out = pick(out_path, config.paths.res, "out");
      if (out.has_parent_path()) fs::create_directories(out.parent_path());
      write_mot(result, out);
      std::cout << "tracked " << frames.size() << " frames, " << result.box_count()
                << " output boxes -> " << out.string() << '\n';
      return kExitOk;
    }

    if (*evaluate_cmd) {
      Diagnostics diagnostics;
      SequenceRecord record{parse_mot(gt_path, &diagnostics), parse_mot(res_path, &diagnostics)};
      print_warnings(diagnostics);
      const ClearMotResult mot = clear_mot(record, match_iou);
      const MetricsReport report = evaluate(record, match_iou);
      write_text(out_path, to_json(report));
      const std::size_t warmup = warmup_false_negatives(record, mot, n_init);
      std::printf("MOTA %.4f  IDF1 %.4f  IDSw %zu  FP %zu  FN %zu  GT %zu\n", report.mota,
                  report.idf1, report.idsw, report.fp, report.fn, report.num_gt);
      std::printf("warm-up FN (first %d frame(s) of each identity): %zu; MOTA excluding warm-up %.4f\n",
                  n_init - 1, warmup, mota_excluding_warmup(mot, warmup));
      std::printf("MOTP %.4f  frag %zu  MT %zu  ML %zu\n", mot.motp, mot.fragmentations,
                  mot.mostly_tracked, mot.mostly_lost);
      return kExitOk;
    }

    if (*gradcheck) {
      const auto summary = tools::run_gradcheck(trials, grad_seed);
      std::printf("trials %zu  max relative error %.3e (trial %zu)\n", summary.trials,
                  summary.max_relative_error, summary.worst_trial);
      return summary.max_relative_error < kGradcheckTolerance ? kExitOk : kExitCheckFailed;
    }

    if (*ablate) {
      const RunConfig config = config_or(config_path, default_benchmark_config());
      const AblationReport report = run_ablation(config);
      write_ablation_report(report, out_path);
      std::ifstream table(fs::path(out_path) / "ablation.md");
      std::cout << table.rdbuf();
      return report.all_passed() ? kExitOk : kExitCheckFailed;
    }

    if (*config_cmd) {
      std::cout << to_json(benchmark ? default_benchmark_config() : RunConfig{});
      return kExitOk;
    }
  } catch (const NumericalError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInput;
  } catch (const InputError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInput;
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInput;
  }
  return kExitInput;
}
