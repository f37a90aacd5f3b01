#include "hoimtrack/pipeline.hpp"

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "hoimtrack/mot_io.hpp"

namespace hoimtrack {
namespace {

namespace fs = std::filesystem;

std::string read_text(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

ScenarioConfig two_objects() {
  ScenarioConfig cfg;
  cfg.n_identities = 2;
  cfg.n_frames = 30;
  cfg.feature_dim = 16;
  cfg.orthogonal_prototypes = true;
  cfg.seed = 5;
  return cfg;
}

TEST(Pipeline, NoiselessTwoObjectsThroughFiles) {
  const fs::path dir = fs::temp_directory_path() / "hoimtrack_pipeline_e2e";
  fs::remove_all(dir);
  RunConfig config;
  const Scenario scenario = generate(two_objects());
  export_scenario(scenario, config, dir);
  for (const char* name : {"gt.txt", "det.txt", "emb.csv", "scenario.json"}) {
    EXPECT_TRUE(fs::exists(dir / name)) << name;
  }
  EXPECT_EQ(load_run_config(dir / "scenario.json").scenario.n_frames, 30u);

  auto frames = parse_detections(dir / "det.txt");
  attach_embeddings(frames, parse_embeddings(dir / "emb.csv"));
  const Sequence result = run_tracker(frames, config.tracker);
  write_mot(result, dir / "res.txt");

  const SequenceRecord record{parse_mot(dir / "gt.txt"), parse_mot(dir / "res.txt")};
  const ClearMotResult mot = clear_mot(record);
  EXPECT_EQ(mot.idsw, 0u);
  EXPECT_EQ(mot.fp, 0u);
  const std::size_t warmup = warmup_false_negatives(record, mot, config.tracker.n_init);
  EXPECT_EQ(warmup, 4u);
  EXPECT_EQ(mot.fn, warmup);
  EXPECT_EQ(mota_excluding_warmup(mot, warmup), 1.0);
  fs::remove_all(dir);
}

TEST(Pipeline, ExportIsByteStable) {
  const fs::path a = fs::temp_directory_path() / "hoimtrack_pipeline_a";
  const fs::path b = fs::temp_directory_path() / "hoimtrack_pipeline_b";
  fs::remove_all(a);
  fs::remove_all(b);
  ScenarioConfig cfg = two_objects();
  cfg.box_jitter = 1.5;
  cfg.embedding_noise = 0.2;
  cfg.false_positive_rate = 0.4;
  export_scenario(generate(cfg), RunConfig{}, a);
  export_scenario(generate(cfg), RunConfig{}, b);
  for (const char* name : {"gt.txt", "det.txt", "emb.csv", "scenario.json"}) {
    EXPECT_EQ(read_text(a / name), read_text(b / name)) << name;
  }
  fs::remove_all(a);
  fs::remove_all(b);
}

TEST(Pipeline, EmbedDetectionsMapsEveryEmbedding) {
  const Scenario s = generate(two_objects());
  const LinearEmbedder model = LinearEmbedder::random(4, 16, 1);
  const auto out = embed_detections(s.detections, model);
  for (std::size_t f = 0; f < out.size(); ++f) {
    for (std::size_t i = 0; i < out[f].size(); ++i) {
      EXPECT_EQ(*out[f][i].embedding, model.embed(*s.detections[f][i].embedding));
      EXPECT_EQ(out[f][i].box, s.detections[f][i].box);
    }
  }
}

TEST(Pipeline, SmallAblationReport) {
  RunConfig config;
  config.scenario.n_identities = 4;
  config.scenario.n_frames = 40;
  config.scenario.feature_dim = 16;
  config.scenario.embedding_noise = 0.2;
  config.embedder.embedding_dim = 8;
  config.embedder.n_background = 20;
  config.train.epochs = 2;
  config.ablation.seeds = {1, 2};
  const AblationReport report = run_ablation(config);
  ASSERT_EQ(report.per_seed.size(), 2u);
  ASSERT_EQ(report.mean_rows.size(), 3u);
  EXPECT_EQ(report.mean_rows[0].name, "OIM-MM");
  EXPECT_EQ(report.mean_rows[1].name, "iHOIM-MM");
  EXPECT_EQ(report.mean_rows[2].name, "iHOIM+MM");
  EXPECT_EQ(report.checks.size(), 5u);
  // Both iHOIM rows share one embedder.
  EXPECT_EQ(report.mean_rows[1].accuracy, report.mean_rows[2].accuracy);
  for (std::size_t i = 0; i < 3; ++i) {
    EXPECT_NEAR(report.mean_rows[i].mota,
                (report.per_seed[0].rows[i].mota + report.per_seed[1].rows[i].mota) / 2, 1e-12);
  }

  const fs::path dir = fs::temp_directory_path() / "hoimtrack_pipeline_ablation";
  fs::remove_all(dir);
  write_ablation_report(report, dir);
  for (const char* name : {"ablation.md", "ablation.csv", "ablation.json", "history_seed1_ihoim.csv",
                           "history_seed2_oim.csv"}) {
    EXPECT_TRUE(fs::exists(dir / name)) << name;
  }
  const AblationReport again = run_ablation(config);
  const fs::path dir2 = fs::temp_directory_path() / "hoimtrack_pipeline_ablation2";
  fs::remove_all(dir2);
  write_ablation_report(again, dir2);
  EXPECT_EQ(read_text(dir / "ablation.json"), read_text(dir2 / "ablation.json"));
  EXPECT_EQ(read_text(dir / "ablation.csv"), read_text(dir2 / "ablation.csv"));
  fs::remove_all(dir);
  fs::remove_all(dir2);
}

}  // namespace
}  // namespace hoimtrack
