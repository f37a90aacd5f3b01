#include "hoimtrack/run_config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "hoimtrack/errors.hpp"

namespace hoimtrack {
namespace {

using nlohmann::json;
using nlohmann::ordered_json;

// Reads keys of one JSON object into fields, rejecting keys nobody claimed.
class Section {
 public:
  Section(const json& j, std::string name) : j_(j), name_(std::move(name)) {
    if (!j_.is_object()) throw InputError("config: '" + name_ + "' must be an object");
  }

  template <typename T>
  void read(const char* key, T& field) {
    known_.insert(key);
    const auto it = j_.find(key);
    if (it == j_.end()) return;
    try {
      field = it->get<T>();
    } catch (const json::exception& e) {
      throw InputError("config: " + name_ + "." + key + ": " + e.what());
    }
  }

  const json* child(const char* key) {
    known_.insert(key);
    const auto it = j_.find(key);
    return it == j_.end() ? nullptr : &*it;
  }

  void finish() const {
    for (const auto& [key, _] : j_.items()) {
      if (!known_.count(key)) throw InputError("config: unknown key '" + name_ + "." + key + "'");
    }
  }

 private:
  const json& j_;
  std::string name_;
  std::set<std::string> known_;
};

void read_scenario(const json& j, ScenarioConfig& c) {
  Section s(j, "scenario");
  s.read("n_identities", c.n_identities);
  s.read("n_frames", c.n_frames);
  s.read("arena_width", c.arena_width);
  s.read("arena_height", c.arena_height);
  s.read("feature_dim", c.feature_dim);
  s.read("min_speed", c.min_speed);
  s.read("max_speed", c.max_speed);
  s.read("acceleration_noise", c.acceleration_noise);
  s.read("min_height", c.min_height);
  s.read("max_height", c.max_height);
  s.read("min_aspect", c.min_aspect);
  s.read("max_aspect", c.max_aspect);
  s.read("miss_rate", c.miss_rate);
  s.read("false_positive_rate", c.false_positive_rate);
  s.read("box_jitter", c.box_jitter);
  s.read("embedding_noise", c.embedding_noise);
  s.read("confidence_spread", c.confidence_spread);
  s.read("false_positive_min_confidence", c.false_positive_min_confidence);
  s.read("false_positive_max_confidence", c.false_positive_max_confidence);
  if (const json* occ = s.child("occlusions")) {
    if (!occ->is_array()) throw InputError("config: scenario.occlusions must be an array");
    c.occlusions.clear();
    for (const auto& item : *occ) {
      OcclusionWindow w;
      Section o(item, "scenario.occlusions[]");
      o.read("identity", w.identity);
      o.read("start_frame", w.start_frame);
      o.read("end_frame", w.end_frame);
      o.finish();
      c.occlusions.push_back(w);
    }
  }
  s.read("random_occlusions_per_identity", c.random_occlusions_per_identity);
  s.read("occlusion_min_length", c.occlusion_min_length);
  s.read("occlusion_max_length", c.occlusion_max_length);
  s.read("min_prototype_angle_deg", c.min_prototype_angle_deg);
  s.read("orthogonal_prototypes", c.orthogonal_prototypes);
  s.read("train_samples_per_identity", c.train_samples_per_identity);
  s.read("test_samples_per_identity", c.test_samples_per_identity);
  s.read("train_background_samples", c.train_background_samples);
  s.read("test_background_samples", c.test_background_samples);
  s.read("unlabeled_fraction", c.unlabeled_fraction);
  s.read("sample_noise", c.sample_noise);
  s.read("background_hardness", c.background_hardness);
  s.read("person_misalignment", c.person_misalignment);
  s.read("seed", c.seed);
  s.finish();
}

void read_tracker(const json& j, TrackerConfig& c) {
  Section s(j, "tracker");
  s.read("max_cosine_distance", c.max_cosine_distance);
  s.read("gating_threshold", c.gating_threshold);
  s.read("n_init", c.n_init);
  s.read("max_age", c.max_age);
  s.read("fusion_iou_threshold", c.fusion_iou_threshold);
  s.read("motion_confidence_decay", c.motion_confidence_decay);
  s.read("gallery_smoothing", c.gallery_smoothing);
  s.read("max_iou_distance", c.max_iou_distance);
  s.read("confidence_threshold", c.confidence_threshold);
  s.read("motion_fusion", c.motion_fusion);
  s.finish();
}

void read_train(const json& j, TrainConfig& c) {
  Section s(j, "train");
  s.read("learning_rate", c.learning_rate);
  s.read("epochs", c.epochs);
  s.read("batch_size", c.batch_size);
  s.read("momentum", c.momentum);
  s.read("temperature", c.temperature);
  s.read("seed", c.seed);
  s.finish();
}

void read_embedder(const json& j, EmbedderConfig& c) {
  Section s(j, "embedder");
  s.read("embedding_dim", c.embedding_dim);
  s.read("n_background", c.n_background);
  s.finish();
}

void read_ablation(const json& j, AblationConfig& c) {
  Section s(j, "ablation");
  s.read("seeds", c.seeds);
  s.read("match_iou", c.match_iou);
  s.read("max_fusion_mota_drop", c.max_fusion_mota_drop);
  s.finish();
}

void read_paths(const json& j, PathConfig& c) {
  Section s(j, "paths");
  s.read("gt", c.gt);
  s.read("det", c.det);
  s.read("emb", c.emb);
  s.read("res", c.res);
  s.read("out", c.out);
  s.finish();
}

void check(const RunConfig& c) {
  validate(c.scenario);
  validate(c.tracker);
  if (!(c.train.learning_rate >= 0.0)) throw InputError("config: train.learning_rate must be >= 0");
  if (c.train.epochs < 1) throw InputError("config: train.epochs must be >= 1");
  if (c.train.batch_size < 1) throw InputError("config: train.batch_size must be >= 1");
  if (!(c.train.momentum >= 0.0 && c.train.momentum <= 1.0)) {
    throw InputError("config: train.momentum must lie in [0, 1]");
  }
  if (!(c.train.temperature > 0.0)) throw InputError("config: train.temperature must be > 0");
  if (c.embedder.embedding_dim < 1 || c.embedder.n_background < 1) {
    throw InputError("config: embedder sizes must be positive");
  }
  if (c.ablation.seeds.empty()) throw InputError("config: ablation.seeds must not be empty");
  if (!(c.ablation.match_iou > 0.0 && c.ablation.match_iou < 1.0)) {
    throw InputError("config: ablation.match_iou must lie in (0, 1)");
  }
}

}  // namespace

RunConfig default_benchmark_config() {
  RunConfig c;
  ScenarioConfig& s = c.scenario;
  s.n_identities = 20;
  s.n_frames = 400;
  s.feature_dim = 64;
  s.acceleration_noise = 0.05;
  s.miss_rate = 0.05;
  s.false_positive_rate = 0.3;
  s.box_jitter = 2.0;
  s.embedding_noise = 0.15;
  s.confidence_spread = 0.4;
  s.random_occlusions_per_identity = 3;
  s.occlusion_min_length = 3;
  s.occlusion_max_length = 10;
  s.unlabeled_fraction = 0.1;
  return c;
}

RunConfig parse_run_config(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::exception& e) {
    throw InputError(std::string("config: ") + e.what());
  }
  RunConfig c;
  Section root(j, "config");
  if (const json* v = root.child("scenario")) read_scenario(*v, c.scenario);
  if (const json* v = root.child("tracker")) read_tracker(*v, c.tracker);
  if (const json* v = root.child("train")) read_train(*v, c.train);
  if (const json* v = root.child("embedder")) read_embedder(*v, c.embedder);
  if (const json* v = root.child("ablation")) read_ablation(*v, c.ablation);
  if (const json* v = root.child("paths")) read_paths(*v, c.paths);
  root.finish();
  check(c);
  return c;
}

RunConfig load_run_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open config " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_run_config(buffer.str());
}

std::string to_json(const RunConfig& c) {
  ordered_json j;
  const ScenarioConfig& s = c.scenario;
  auto& js = j["scenario"];
  js["n_identities"] = s.n_identities;
  js["n_frames"] = s.n_frames;
  js["arena_width"] = s.arena_width;
  js["arena_height"] = s.arena_height;
  js["feature_dim"] = s.feature_dim;
  js["min_speed"] = s.min_speed;
  js["max_speed"] = s.max_speed;
  js["acceleration_noise"] = s.acceleration_noise;
  js["min_height"] = s.min_height;
  js["max_height"] = s.max_height;
  js["min_aspect"] = s.min_aspect;
  js["max_aspect"] = s.max_aspect;
  js["miss_rate"] = s.miss_rate;
  js["false_positive_rate"] = s.false_positive_rate;
  js["box_jitter"] = s.box_jitter;
  js["embedding_noise"] = s.embedding_noise;
  js["confidence_spread"] = s.confidence_spread;
  js["false_positive_min_confidence"] = s.false_positive_min_confidence;
  js["false_positive_max_confidence"] = s.false_positive_max_confidence;
  js["occlusions"] = ordered_json::array();
  for (const auto& w : s.occlusions) {
    js["occlusions"].push_back(
        {{"identity", w.identity}, {"start_frame", w.start_frame}, {"end_frame", w.end_frame}});
  }
  js["random_occlusions_per_identity"] = s.random_occlusions_per_identity;
  js["occlusion_min_length"] = s.occlusion_min_length;
  js["occlusion_max_length"] = s.occlusion_max_length;
  js["min_prototype_angle_deg"] = s.min_prototype_angle_deg;
  js["orthogonal_prototypes"] = s.orthogonal_prototypes;
  js["train_samples_per_identity"] = s.train_samples_per_identity;
  js["test_samples_per_identity"] = s.test_samples_per_identity;
  js["train_background_samples"] = s.train_background_samples;
  js["test_background_samples"] = s.test_background_samples;
  js["unlabeled_fraction"] = s.unlabeled_fraction;
  js["sample_noise"] = s.sample_noise;
  js["background_hardness"] = s.background_hardness;
  js["person_misalignment"] = s.person_misalignment;
  js["seed"] = s.seed;

  const TrackerConfig& t = c.tracker;
  auto& jt = j["tracker"];
  jt["max_cosine_distance"] = t.max_cosine_distance;
  jt["gating_threshold"] = t.gating_threshold;
  jt["n_init"] = t.n_init;
  jt["max_age"] = t.max_age;
  jt["fusion_iou_threshold"] = t.fusion_iou_threshold;
  jt["motion_confidence_decay"] = t.motion_confidence_decay;
  jt["gallery_smoothing"] = t.gallery_smoothing;
  jt["max_iou_distance"] = t.max_iou_distance;
  jt["confidence_threshold"] = t.confidence_threshold;
  jt["motion_fusion"] = t.motion_fusion;

  auto& jr = j["train"];
  jr["learning_rate"] = c.train.learning_rate;
  jr["epochs"] = c.train.epochs;
  jr["batch_size"] = c.train.batch_size;
  jr["momentum"] = c.train.momentum;
  jr["temperature"] = c.train.temperature;
  jr["seed"] = c.train.seed;

  j["embedder"] = {{"embedding_dim", c.embedder.embedding_dim},
                   {"n_background", c.embedder.n_background}};
  j["ablation"] = {{"seeds", c.ablation.seeds},
                   {"match_iou", c.ablation.match_iou},
                   {"max_fusion_mota_drop", c.ablation.max_fusion_mota_drop}};
  j["paths"] = {{"gt", c.paths.gt}, {"det", c.paths.det}, {"emb", c.paths.emb},
                {"res", c.paths.res}, {"out", c.paths.out}};
  return j.dump(2) + "\n";
}

}  // namespace hoimtrack
