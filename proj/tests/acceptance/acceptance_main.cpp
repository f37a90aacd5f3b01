// Acceptance suite. Prints one PASS/FAIL line per criterion; with
// --criterion N only that one runs. Exit status is nonzero when any
// selected criterion fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include <sys/wait.h>

#include <CLI11.hpp>

#include "hoimtrack/assignment.hpp"
#include "hoimtrack/loss.hpp"
#include "hoimtrack/memory.hpp"
#include "hoimtrack/metrics.hpp"
#include "hoimtrack/motion.hpp"
#include "hoimtrack/pipeline.hpp"
#include "hoimtrack/random.hpp"
#include "hoimtrack/run_config.hpp"
#include "hoimtrack/synth.hpp"
#include "oracles.hpp"

namespace fs = std::filesystem;
using namespace hoimtrack;

namespace {

struct Outcome {
  bool passed = false;
  std::string detail;
};

class Stopwatch {
 public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

Outcome gradient_correctness() {
  const Stopwatch clock;
  RandomStream rng(2024, 1);
  double worst = 0.0;
  const int instances = 1000;
  for (int i = 0; i < instances; ++i) {
    worst = std::max(worst, testing::gradient_relative_error(testing::random_gradient_instance(rng)));
  }
  const double t = clock.seconds();
  return {worst < 1e-4 && t < 10.0,
          num(instances) + " instances, max relative error " + num(worst) + ", " + num(t) + " s"};
}

Outcome probability_laws() {
  RandomStream rng(2024, 2);
  double worst_sum = 0.0;
  double worst_levels = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const auto size = static_cast<Eigen::Index>(2 + rng.index(60));
    Eigen::VectorXd s(size);
    for (Eigen::Index j = 0; j < size; ++j) {
      s(j) = rng.bernoulli(0.2) ? (rng.bernoulli(0.5) ? 50.0 : -50.0) : rng.uniform(-1, 1);
    }
    const double tau = i % 2 == 0 ? 1.0 / 30.0 : 1.0;
    const Eigen::VectorXd p = class_probabilities(s, tau);
    const std::size_t n = 1 + rng.index(static_cast<std::size_t>(size) - 1);
    worst_sum = std::max(worst_sum, std::abs(p.sum() - 1.0));
    worst_levels = std::max(
        worst_levels, std::abs(person_probability(p, n) + background_probability(p, n) - 1.0));
  }
  return {worst_sum <= 1e-9 && worst_levels <= 1e-9,
          "max |sum p - 1| " + num(worst_sum) + ", max |p(person) + p(background) - 1| " +
              num(worst_levels)};
}

Outcome closed_form_losses() {
  ProjectionMemory m(MemoryConfig{1, 1, 2, 0.5, 1.0});
  m.update_labeled(0, Eigen::Vector2d(1, 0));
  m.push_background(Eigen::Vector2d(0, 1));
  const LossBreakdown b = ihoim_loss(m, Eigen::Vector2d(1, 0), SampleLabel::person(0));
  const double p = std::exp(1.0) / (std::exp(1.0) + 1.0);
  const double err = std::max({std::abs(b.person_prob - p), std::abs(b.detection_loss + std::log(p)),
                               std::abs(*b.oim_loss), std::abs(b.lambda - 2 * p * p),
                               std::abs(b.total + std::log(p))});
  // The hand values are quoted to five decimals.
  const bool quoted = std::abs(b.person_prob - 0.73106) < 5e-6 &&
                      std::abs(b.detection_loss - 0.31326) < 5e-6 &&
                      std::abs(b.lambda - 1.06889) < 5e-6 && std::abs(b.total - 0.31326) < 5e-6;
  const double half = std::abs(detection_loss(0.5, true) - std::log(2.0));
  return {err < 1e-6 && quoted && half < 1e-12,
          "p " + num(b.person_prob) + ", L_det " + num(b.detection_loss) + ", lambda " +
              num(b.lambda) + ", total " + num(b.total) + "; |L_det(0.5) - ln 2| " + num(half)};
}

Outcome memory_semantics() {
  RandomStream rng(2024, 4);
  std::size_t mismatches = 0;
  double worst_norm = 0.0;
  const int scripts = 200;
  for (int script = 0; script < scripts; ++script) {
    const std::size_t n = 1 + rng.index(8), b = 1 + rng.index(8), d = 2 + rng.index(63);
    ProjectionMemory m(MemoryConfig{n, b, d, 0.5, 1.0 / 30.0});
    testing::ReferenceMemory ref(n, b, d, 0.5);
    for (int op = 0; op < 100; ++op) {
      const Eigen::VectorXd x = rng.unit_vector(d);
      const std::vector<double> xs(x.data(), x.data() + x.size());
      if (rng.bernoulli(0.6)) {
        const std::size_t k = rng.index(n);
        m.update_labeled(k, x);
        ref.update_labeled(k, xs);
      } else {
        m.push_background(x);
        ref.push_background(xs);
      }
    }
    for (std::size_t r = 0; r < n; ++r) {
      const auto row = static_cast<Eigen::Index>(r);
      for (std::size_t c = 0; c < d; ++c) {
        if (m.lut()(row, static_cast<Eigen::Index>(c)) != ref.lut()[r][c]) ++mismatches;
      }
      const double norm = m.lut().row(row).norm();
      if (norm != 0.0) worst_norm = std::max(worst_norm, std::abs(norm - 1.0));
    }
    for (std::size_t r = 0; r < b; ++r) {
      for (std::size_t c = 0; c < d; ++c) {
        if (m.queue()(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) != ref.queue()[r][c]) {
          ++mismatches;
        }
      }
    }
    if (m.queue_head() != ref.head()) ++mismatches;
  }
  return {mismatches == 0 && worst_norm < 1e-6,
          num(scripts) + " scripts, " + num(static_cast<double>(mismatches)) +
              " mismatched entries, max |norm - 1| " + num(worst_norm)};
}

Outcome assignment_oracle() {
  RandomStream rng(2024, 5);
  int cost_mismatch = 0;
  for (int trial = 0; trial < 500; ++trial) {
    const auto rows = static_cast<Eigen::Index>(1 + rng.index(7));
    const auto cols = static_cast<Eigen::Index>(1 + rng.index(7));
    Eigen::MatrixXd cost(rows, cols);
    const bool integer = trial % 2 == 0;
    for (Eigen::Index i = 0; i < cost.size(); ++i) {
      cost(i) = integer ? static_cast<double>(rng.index(5)) : rng.uniform(0, 100);
    }
    if (hungarian(cost).total_cost != testing::brute_force_assignment(cost).cost) ++cost_mismatch;
  }
  return {cost_mismatch == 0, "500 matrices up to 7x7, " + num(cost_mismatch) + " cost mismatches"};
}

Outcome kalman_sanity() {
  const KalmanFilter noiseless(MotionNoise{1.0 / 20, 1.0 / 160, 0.0, 1e-12});
  auto truth = [](int t) { return BoxXYAH{100 + 3.0 * t, 50 - 1.5 * t, 0.5, 80 + 0.5 * t}; };
  KalmanState s = noiseless.initiate(truth(0));
  double error = 0.0;
  for (int t = 1; t <= 20; ++t) {
    s = noiseless.predict(s);
    error = std::hypot(s.mean(0) - truth(t).center_x, s.mean(1) - truth(t).center_y);
    s = noiseless.update(s, truth(t));
  }

  KalmanState prior;
  prior.mean << 0, 5, 0.5, 40, 0, 0, 0, 0;
  prior.covariance = StateCovariance::Identity();
  const KalmanState post =
      KalmanFilter{}.update(prior, {1, 5, 0.5, 40}, MeasurementCovariance::Identity());
  const double hand = std::max(std::abs(post.mean(0) - 0.5), std::abs(post.covariance(0, 0) - 0.5));
  return {error < 1e-6 && hand < 1e-9,
          "predicted position error at frame 20 " + num(error) + ", 1-D posterior error " + num(hand)};
}

Outcome metrics_oracles() {
  auto column = [](int k) { return BoxTLWH{100.0 * k, 50, 40, 80}; };
  Sequence gt;
  for (int f = 0; f < 2; ++f) {
    FrameBoxes boxes;
    for (int k = 1; k <= 5; ++k) boxes.push_back({k, column(k)});
    gt.frames.push_back(boxes);
  }
  Sequence pred;
  FrameBoxes first;
  for (int k = 1; k <= 5; ++k) first.push_back({10 + k, column(k)});
  pred.frames = {first, {{11, column(1)}, {12, column(2)}, {99, column(3)}, {50, {900, 900, 40, 80}}}};
  const ClearMotResult hand = clear_mot({gt, pred});
  const bool hand_ok = hand.fp == 1 && hand.fn == 2 && hand.idsw == 1 && hand.mota == 1.0 - 4.0 / 10.0;

  const MetricsReport perfect = evaluate({gt, gt});
  const bool perfect_ok = perfect.mota == 1.0 && perfect.idf1 == 1.0;

  RandomStream rng(2024, 7);
  int idf1_mismatch = 0;
  int checked = 0;
  for (int trial = 0; trial < 200; ++trial) {
    const int ids = 1 + static_cast<int>(rng.index(6));
    SequenceRecord rec;
    std::vector<int> label(static_cast<std::size_t>(ids));
    for (int& l : label) l = 1 + static_cast<int>(rng.index(6));
    for (int f = 0; f < 10; ++f) {
      FrameBoxes g;
      FrameBoxes p;
      std::vector<bool> used(7, false);
      for (int k = 0; k < ids; ++k) {
        const BoxTLWH box{60.0 * k + 2.0 * f, 10, 40, 80};
        g.push_back({k + 1, box});
        if (rng.bernoulli(0.15)) label[static_cast<std::size_t>(k)] = 1 + static_cast<int>(rng.index(6));
        const int id = label[static_cast<std::size_t>(k)];
        if (rng.bernoulli(0.15) || used[static_cast<std::size_t>(id)]) continue;
        used[static_cast<std::size_t>(id)] = true;
        p.push_back({id, {box.left + rng.normal(0, 8), box.top, 40, 80}});
      }
      rec.gt.frames.push_back(g);
      rec.predictions.frames.push_back(p);
    }
    ++checked;
    if (std::abs(idf1(rec) - testing::brute_force_idf1(rec, 0.5)) > 1e-12) ++idf1_mismatch;
  }
  return {hand_ok && perfect_ok && idf1_mismatch == 0,
          "hand FP " + num(static_cast<double>(hand.fp)) + " FN " + num(static_cast<double>(hand.fn)) +
              " IDSw " + num(static_cast<double>(hand.idsw)) + " MOTA " + num(hand.mota) +
              "; perfect MOTA " + num(perfect.mota) + " IDF1 " + num(perfect.idf1) + "; IDF1 oracle " +
              num(idf1_mismatch) + "/" + num(checked) + " mismatches"};
}

Outcome end_to_end() {
  const Stopwatch clock;
  ScenarioConfig cfg;
  cfg.n_identities = 2;
  cfg.n_frames = 100;
  cfg.feature_dim = 16;
  cfg.orthogonal_prototypes = true;
  cfg.seed = 1;
  const Scenario s = generate(cfg);
  const TrackerConfig tracker;
  const SequenceRecord record{s.gt, run_tracker(s.detections, tracker)};
  const ClearMotResult mot = clear_mot(record);
  const std::size_t warmup = warmup_false_negatives(record, mot, tracker.n_init);
  const double mota = mota_excluding_warmup(mot, warmup);
  const double t = clock.seconds();
  return {mot.idsw == 0 && mota == 1.0 && t < 5.0,
          "IDSw " + num(static_cast<double>(mot.idsw)) + ", MOTA " + num(mot.mota) + " (" +
              num(static_cast<double>(warmup)) + " warm-up FN), MOTA excluding warm-up " + num(mota) +
              ", " + num(t) + " s"};
}

Outcome ablation_direction() {
  const Stopwatch clock;
  const AblationReport report = run_ablation(default_benchmark_config());
  const double t = clock.seconds();
  const AblationRow& oim = report.mean_rows[0];
  const AblationRow& no_mm = report.mean_rows[1];
  const AblationRow& mm = report.mean_rows[2];
  const bool a = no_mm.accuracy > oim.accuracy;
  const bool b = no_mm.mota >= oim.mota;
  const bool c = mm.idsw < no_mm.idsw && mm.mota >= no_mm.mota - 0.005;
  auto mark = [](bool ok) { return ok ? "ok" : "violated"; };
  return {a && b && c && t < 300.0,
          std::string("(a) accuracy iHOIM ") + num(no_mm.accuracy) + " vs OIM " + num(oim.accuracy) +
              " " + mark(a) + "; (b) MOTA iHOIM " + num(no_mm.mota) + " vs OIM " + num(oim.mota) + " " +
              mark(b) + "; (c) fusion IDSw " + num(mm.idsw) + " vs " + num(no_mm.idsw) + ", MOTA " +
              num(mm.mota) + " vs " + num(no_mm.mota) + " " + mark(c) + "; " +
              num(static_cast<double>(report.per_seed.size())) + " seeds, " + num(t) + " s"};
}

std::string read_bytes(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

int run(const std::string& command) { return std::system((command + " > /dev/null 2>&1").c_str()); }

Outcome cli_determinism(const std::string& cli) {
  if (cli.empty()) return {false, "no --cli path given"};
  const fs::path root = fs::temp_directory_path() / "hoimtrack_acceptance_determinism";
  fs::remove_all(root);
  fs::create_directories(root);

  RunConfig config = default_benchmark_config();
  config.scenario.n_frames = 120;
  config.train.epochs = 3;
  config.ablation.seeds = {1, 2};
  {
    std::ofstream(root / "config.json") << to_json(config);
  }
  const std::string cfg = (root / "config.json").string();

  std::vector<std::string> failures;
  for (const char* run_name : {"a", "b"}) {
    const fs::path dir = root / run_name;
    const std::string d = dir.string();
    const std::vector<std::string> commands = {
        cli + " synth --config " + cfg + " --out " + d + "/scenario",
        cli + " track --det " + d + "/scenario/det.txt --emb " + d + "/scenario/emb.csv --config " + cfg +
            " --out " + d + "/res.txt",
        cli + " track --det " + d + "/scenario/det.txt --emb " + d + "/scenario/emb.csv --config " + cfg +
            " --out " + d + "/res_nomm.txt --no-motion-fusion",
        cli + " evaluate --gt " + d + "/scenario/gt.txt --res " + d + "/res.txt --out " + d + "/report.json",
        cli + " ablate --config " + cfg + " --out " + d + "/ablation",
    };
    for (const std::string& command : commands) {
      const int status = run(command);
      // ablate reports violated directions through exit status 2; its files
      // are still complete.
      const bool ablate = command.find(" ablate ") != std::string::npos;
      if (status != 0 && !(ablate && WIFEXITED(status) && WEXITSTATUS(status) == 2)) {
        failures.push_back("command failed: " + command);
      }
    }
  }

  std::size_t compared = 0;
  for (const auto& entry : fs::recursive_directory_iterator(root / "a")) {
    if (!entry.is_regular_file()) continue;
    const fs::path rel = fs::relative(entry.path(), root / "a");
    ++compared;
    if (!fs::exists(root / "b" / rel) || read_bytes(entry.path()) != read_bytes(root / "b" / rel)) {
      failures.push_back("differs: " + rel.string());
    }
  }
  fs::remove_all(root);
  if (compared == 0) failures.push_back("no output files produced");
  std::string detail = num(static_cast<double>(compared)) + " output files compared";
  for (const auto& f : failures) detail += "; " + f;
  return {failures.empty(), detail};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"hoimtrack acceptance suite"};
  int only = 0;
  std::string cli;
  app.add_option("--criterion", only, "Run only this criterion (1-10)")->check(CLI::Range(1, 10));
  app.add_option("--cli", cli, "Path to the hoimtrack executable");
  CLI11_PARSE(app, argc, argv);

  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"gradient correctness", gradient_correctness},
      {"probability laws", probability_laws},
      {"closed-form loss values", closed_form_losses},
      {"memory semantics", memory_semantics},
      {"assignment oracle", assignment_oracle},
      {"Kalman sanity", kalman_sanity},
      {"metrics oracles", metrics_oracles},
      {"end-to-end pipeline", end_to_end},
      {"directional ablation", ablation_direction},
      {"CLI determinism", [&] { return cli_determinism(cli); }},
  };

  bool all = true;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const int number = static_cast<int>(i) + 1;
    if (only != 0 && only != number) continue;
    Outcome outcome;
    try {
      outcome = criteria[i].second();
    } catch (const std::exception& e) {
      outcome = {false, std::string("exception: ") + e.what()};
    }
    all = all && outcome.passed;
    std::printf("criterion %2d %s  %s: %s\n", number, outcome.passed ? "PASS" : "FAIL",
                criteria[i].first.c_str(), outcome.detail.c_str());
    std::fflush(stdout);
  }
  return all ? 0 : 1;
}
