#include "hoimtrack/pipeline.hpp"

#include <cstdio>
#include <fstream>

#include <nlohmann/json.hpp>

#include "hoimtrack/errors.hpp"
#include "hoimtrack/mot_io.hpp"
#include "text_format.hpp"

namespace hoimtrack {
namespace {

std::ofstream open_output(const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw InputError("cannot open " + path.string() + " for writing");
  return out;
}

std::string fixed(double value, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", digits, value);
  return buf;
}

AblationRow tracking_row(const std::string& name, double accuracy, const Scenario& scenario,
                         const std::vector<std::vector<Detection>>& frames,
                         const TrackerConfig& tracker, double match_iou) {
  SequenceRecord record{scenario.gt, run_tracker(frames, tracker)};
  const MetricsReport m = evaluate(record, match_iou);
  return {name, accuracy, m.mota, m.idf1, static_cast<double>(m.idsw),
          static_cast<double>(m.fp), static_cast<double>(m.fn)};
}

}  // namespace

void export_scenario(const Scenario& scenario, const RunConfig& config,
                     const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  write_mot(scenario.gt, dir / "gt.txt");
  write_detections(scenario.detections, dir / "det.txt");
  EmbeddingTable table = embeddings_of(scenario.detections);
  if (table.dim == 0) table.dim = scenario.config.feature_dim;
  write_embeddings(table, dir / "emb.csv");

  RunConfig effective = config;
  effective.scenario = scenario.config;
  auto out = open_output(dir / "scenario.json");
  out << to_json(effective);
}

Sequence run_tracker(const std::vector<std::vector<Detection>>& frames,
                     const TrackerConfig& config) {
  Tracker tracker(config);
  Sequence out;
  out.frames.resize(frames.size());
  for (std::size_t f = 0; f < frames.size(); ++f) {
    for (const TrackOutput& t : tracker.step(static_cast<int>(f) + 1, frames[f])) {
      out.frames[f].push_back({t.track_id, t.box, t.confidence});
    }
  }
  return out;
}

std::vector<std::vector<Detection>> embed_detections(
    const std::vector<std::vector<Detection>>& frames, const LinearEmbedder& model) {
  auto out = frames;
  for (auto& frame : out) {
    for (auto& d : frame) {
      if (d.embedding) d.embedding = model.embed(*d.embedding);
    }
  }
  return out;
}

bool AblationReport::all_passed() const {
  for (const auto& c : checks) {
    if (!c.passed) return false;
  }
  return true;
}

AblationReport run_ablation(const RunConfig& config) {
  AblationReport report;
  const double match_iou = config.ablation.match_iou;

  for (const std::uint64_t seed : config.ablation.seeds) {
    ScenarioConfig scenario_config = config.scenario;
    scenario_config.seed = seed;
    const Scenario scenario = generate(scenario_config);

    TrainConfig train = config.train;
    train.seed = seed;
    MemoryConfig memory_config{scenario_config.n_identities, config.embedder.n_background,
                               config.embedder.embedding_dim, train.momentum, train.temperature};
    const LinearEmbedder init =
        LinearEmbedder::random(config.embedder.embedding_dim, scenario_config.feature_dim, seed);

    ProjectionMemory baseline_memory(memory_config);
    const TrainResult baseline =
        train_oim_baseline(init, scenario.train, baseline_memory, train, scenario.test);
    ProjectionMemory ihoim_memory(memory_config);
    const TrainResult ihoim = hoimtrack::train(init, scenario.train, ihoim_memory, train, scenario.test);

    const double baseline_acc = identity_accuracy(baseline.model, baseline_memory, scenario.test);
    const double ihoim_acc = identity_accuracy(ihoim.model, ihoim_memory, scenario.test);

    TrackerConfig without_fusion = config.tracker;
    without_fusion.motion_fusion = false;
    TrackerConfig with_fusion = config.tracker;
    with_fusion.motion_fusion = true;

    const auto baseline_frames = embed_detections(scenario.detections, baseline.model);
    const auto ihoim_frames = embed_detections(scenario.detections, ihoim.model);

    AblationSeedResult seed_result;
    seed_result.seed = seed;
    seed_result.rows.push_back(tracking_row("OIM-MM", baseline_acc, scenario, baseline_frames,
                                            without_fusion, match_iou));
    seed_result.rows.push_back(tracking_row("iHOIM-MM", ihoim_acc, scenario, ihoim_frames,
                                            without_fusion, match_iou));
    seed_result.rows.push_back(tracking_row("iHOIM+MM", ihoim_acc, scenario, ihoim_frames,
                                            with_fusion, match_iou));
    seed_result.ihoim_history = ihoim.history;
    seed_result.baseline_history = baseline.history;
    report.per_seed.push_back(std::move(seed_result));
  }

  const double n = static_cast<double>(report.per_seed.size());
  report.mean_rows = report.per_seed.front().rows;
  for (auto& row : report.mean_rows) row = {row.name, 0, 0, 0, 0, 0, 0};
  for (const auto& s : report.per_seed) {
    for (std::size_t i = 0; i < s.rows.size(); ++i) {
      auto& m = report.mean_rows[i];
      m.accuracy += s.rows[i].accuracy / n;
      m.mota += s.rows[i].mota / n;
      m.idf1 += s.rows[i].idf1 / n;
      m.idsw += s.rows[i].idsw / n;
      m.fp += s.rows[i].fp / n;
      m.fn += s.rows[i].fn / n;
    }
  }

  const AblationRow& oim = report.mean_rows[0];
  const AblationRow& no_mm = report.mean_rows[1];
  const AblationRow& mm = report.mean_rows[2];
  const double drop = config.ablation.max_fusion_mota_drop;
  report.checks = {
      {"ihoim_accuracy_above_baseline", no_mm.accuracy > oim.accuracy,
       format_double(no_mm.accuracy) + " > " + format_double(oim.accuracy)},
      {"ihoim_mota_not_below_baseline", no_mm.mota >= oim.mota,
       format_double(no_mm.mota) + " >= " + format_double(oim.mota)},
      {"fusion_reduces_idsw", mm.idsw < no_mm.idsw,
       format_double(mm.idsw) + " < " + format_double(no_mm.idsw)},
      {"fusion_mota_drop_bounded", mm.mota >= no_mm.mota - drop,
       format_double(mm.mota) + " >= " + format_double(no_mm.mota) + " - " + format_double(drop)},
      {"fusion_idf1_not_below", mm.idf1 >= no_mm.idf1,
       format_double(mm.idf1) + " >= " + format_double(no_mm.idf1)},
  };
  return report;
}

void write_ablation_report(const AblationReport& report, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);

  {
    auto md = open_output(dir / "ablation.md");
    md << "| Method | ID acc (%) | MOTA (%) | IDF1 (%) | IDSw | FP | FN |\n";
    md << "|---|---|---|---|---|---|---|\n";
    for (const auto& r : report.mean_rows) {
      md << "| " << r.name << " | " << fixed(100 * r.accuracy, 2) << " | " << fixed(100 * r.mota, 2)
         << " | " << fixed(100 * r.idf1, 2) << " | " << fixed(r.idsw, 1) << " | "
         << fixed(r.fp, 1) << " | " << fixed(r.fn, 1) << " |\n";
    }
    md << "\nMeans over " << report.per_seed.size() << " seed(s).\n\n";
    for (const auto& c : report.checks) {
      md << "- " << (c.passed ? "PASS" : "FAIL") << " " << c.name << ": " << c.detail << "\n";
    }
  }
  {
    auto csv = open_output(dir / "ablation.csv");
    csv << "seed,method,accuracy,mota,idf1,idsw,fp,fn\n";
    for (const auto& s : report.per_seed) {
      for (const auto& r : s.rows) {
        csv << s.seed << ',' << r.name << ',' << format_double(r.accuracy) << ','
            << format_double(r.mota) << ',' << format_double(r.idf1) << ',' << r.idsw << ','
            << r.fp << ',' << r.fn << '\n';
      }
    }
  }
  {
    nlohmann::ordered_json j;
    j["rows"] = nlohmann::ordered_json::array();
    for (const auto& r : report.mean_rows) {
      j["rows"].push_back({{"method", r.name}, {"accuracy", r.accuracy}, {"mota", r.mota},
                           {"idf1", r.idf1}, {"idsw", r.idsw}, {"fp", r.fp}, {"fn", r.fn}});
    }
    j["checks"] = nlohmann::ordered_json::array();
    for (const auto& c : report.checks) {
      j["checks"].push_back({{"name", c.name}, {"passed", c.passed}, {"detail", c.detail}});
    }
    auto out = open_output(dir / "ablation.json");
    out << j.dump(2) << '\n';
  }
  for (const auto& s : report.per_seed) {
    write_history_csv(dir / ("history_seed" + std::to_string(s.seed) + "_ihoim.csv"),
                      s.ihoim_history);
    write_history_csv(dir / ("history_seed" + std::to_string(s.seed) + "_oim.csv"),
                      s.baseline_history);
  }
}

}  // namespace hoimtrack
