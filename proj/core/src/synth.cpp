#include "hoimtrack/synth.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "hoimtrack/errors.hpp"
#include "hoimtrack/random.hpp"

namespace hoimtrack {
namespace {

constexpr int kMaxPrototypeAttempts = 1000;

bool in_unit_interval(double v) { return v >= 0.0 && v < 1.0; }

Eigen::MatrixXd draw_prototypes(const ScenarioConfig& config) {
  RandomStream rng = make_stream(config.seed, Stream::kPrototypes);
  const auto n = static_cast<Eigen::Index>(config.n_identities);
  const auto f = static_cast<Eigen::Index>(config.feature_dim);
  Eigen::MatrixXd protos(n, f);

  if (config.orthogonal_prototypes) {
    for (Eigen::Index i = 0; i < n; ++i) {
      Eigen::VectorXd v;
      double norm = 0.0;
      do {
        v = rng.unit_vector(config.feature_dim);
        for (Eigen::Index j = 0; j < i; ++j) v -= protos.row(j).dot(v) * protos.row(j).transpose();
        norm = v.norm();
      } while (norm < 1e-6);
      protos.row(i) = (v / norm).transpose();
    }
    return protos;
  }

  for (int attempt = 0; attempt < kMaxPrototypeAttempts; ++attempt) {
    for (Eigen::Index i = 0; i < n; ++i) protos.row(i) = rng.unit_vector(config.feature_dim).transpose();
    if (n < 2 || prototype_separation(protos) >= config.min_prototype_angle_deg) return protos;
  }
  throw InputError("could not sample prototypes separated by " +
                   std::to_string(config.min_prototype_angle_deg) + " degrees");
}

Eigen::VectorXd noisy_feature(RandomStream& rng, const Eigen::VectorXd& prototype, double noise) {
  if (noise <= 0.0) return prototype;
  Eigen::VectorXd v = prototype;
  for (Eigen::Index i = 0; i < v.size(); ++i) v(i) += noise * rng.normal();
  const double norm = v.norm();
  return norm > 0.0 ? Eigen::VectorXd(v / norm) : prototype;
}

struct Agent {
  double cx, cy, vx, vy, width, height;
};

}  // namespace

void validate(const ScenarioConfig& c) {
  if (c.n_identities < 1) throw InputError("scenario: n_identities must be at least 1");
  if (c.n_frames < 1) throw InputError("scenario: n_frames must be at least 1");
  if (c.feature_dim < 1) throw InputError("scenario: feature_dim must be at least 1");
  if (!(c.arena_width > 0.0 && c.arena_height > 0.0)) throw InputError("scenario: empty arena");
  if (!(c.min_height > 0.0 && c.max_height >= c.min_height)) {
    throw InputError("scenario: bad height range");
  }
  if (!(c.min_aspect > 0.0 && c.max_aspect >= c.min_aspect)) {
    throw InputError("scenario: bad aspect range");
  }
  if (c.max_height >= c.arena_height || c.max_height * c.max_aspect >= c.arena_width) {
    throw InputError("scenario: boxes do not fit in the arena");
  }
  if (!(c.min_speed >= 0.0 && c.max_speed >= c.min_speed)) throw InputError("scenario: bad speed range");
  if (!in_unit_interval(c.miss_rate) && c.miss_rate != 1.0) {
    throw InputError("scenario: miss_rate must lie in [0, 1]");
  }
  if (!in_unit_interval(c.false_positive_rate)) {
    throw InputError("scenario: false_positive_rate must lie in [0, 1)");
  }
  if (c.box_jitter < 0.0 || c.embedding_noise < 0.0 || c.acceleration_noise < 0.0) {
    throw InputError("scenario: noise levels must be non-negative");
  }
  if (!in_unit_interval(c.confidence_spread)) {
    throw InputError("scenario: confidence_spread must lie in [0, 1)");
  }
  if (!(c.false_positive_min_confidence >= 0.0 &&
        c.false_positive_max_confidence >= c.false_positive_min_confidence &&
        c.false_positive_max_confidence <= 1.0)) {
    throw InputError("scenario: bad false-positive confidence range");
  }
  if (!(c.unlabeled_fraction >= 0.0 && c.unlabeled_fraction <= 1.0)) {
    throw InputError("scenario: unlabeled_fraction must lie in [0, 1]");
  }
  if (!(c.background_hardness >= 0.0 && c.background_hardness < 1.0)) {
    throw InputError("scenario: background_hardness must lie in [0, 1)");
  }
  if (!(c.person_misalignment >= 0.0 && c.person_misalignment < 1.0)) {
    throw InputError("scenario: person_misalignment must lie in [0, 1)");
  }
  if (c.occlusion_min_length < 1 || c.occlusion_max_length < c.occlusion_min_length) {
    throw InputError("scenario: bad occlusion length range");
  }
  if (c.random_occlusions_per_identity > 0 &&
      static_cast<std::size_t>(c.occlusion_max_length) + 1 > c.n_frames) {
    throw InputError("scenario: occlusions longer than the sequence");
  }
  if (c.orthogonal_prototypes && c.n_identities > c.feature_dim) {
    throw InputError("scenario: orthogonal prototypes need feature_dim >= n_identities");
  }
  for (const auto& w : c.occlusions) {
    if (w.identity >= c.n_identities) throw InputError("scenario: occlusion names unknown identity");
    if (w.start_frame < 1 || w.end_frame < w.start_frame ||
        static_cast<std::size_t>(w.end_frame) > c.n_frames) {
      throw InputError("scenario: occlusion window outside the frame range");
    }
  }
}

Scenario generate(const ScenarioConfig& config) {
  validate(config);
  Scenario s;
  s.config = config;
  s.prototypes = draw_prototypes(config);

  // Occlusion windows: scripted first, then sampled ones per identity.
  s.occlusions = config.occlusions;
  if (config.random_occlusions_per_identity > 0) {
    RandomStream rng = make_stream(config.seed, Stream::kOcclusions);
    const int frames = static_cast<int>(config.n_frames);
    for (std::size_t id = 0; id < config.n_identities; ++id) {
      for (std::size_t k = 0; k < config.random_occlusions_per_identity; ++k) {
        const int length = config.occlusion_min_length +
                           static_cast<int>(rng.index(static_cast<std::size_t>(
                               config.occlusion_max_length - config.occlusion_min_length + 1)));
        // Start after a short warm-up so each identity is tracked first.
        const int earliest = std::min(10, frames - length);
        const int latest = frames - length + 1;
        const int start = earliest + static_cast<int>(rng.index(
                                         static_cast<std::size_t>(std::max(1, latest - earliest + 1))));
        s.occlusions.push_back({id, start, std::min(frames, start + length - 1)});
      }
    }
  }

  // Trajectories.
  RandomStream motion_rng = make_stream(config.seed, Stream::kTrajectories);
  std::vector<Agent> agents;
  agents.reserve(config.n_identities);
  for (std::size_t id = 0; id < config.n_identities; ++id) {
    Agent a{};
    a.height = motion_rng.uniform(config.min_height, config.max_height);
    a.width = a.height * motion_rng.uniform(config.min_aspect, config.max_aspect);
    a.cx = motion_rng.uniform(a.width / 2, config.arena_width - a.width / 2);
    a.cy = motion_rng.uniform(a.height / 2, config.arena_height - a.height / 2);
    const double speed = motion_rng.uniform(config.min_speed, config.max_speed);
    const double angle = motion_rng.uniform(0.0, 2.0 * std::numbers::pi);
    a.vx = speed * std::cos(angle);
    a.vy = speed * std::sin(angle);
    agents.push_back(a);
  }

  RandomStream det_rng = make_stream(config.seed, Stream::kDetections);
  RandomStream fp_rng = make_stream(config.seed, Stream::kFalsePositives);
  s.gt.frames.resize(config.n_frames);
  s.detections.resize(config.n_frames);
  s.detection_sources.resize(config.n_frames);

  for (std::size_t f = 0; f < config.n_frames; ++f) {
    const int frame = static_cast<int>(f) + 1;
    if (f > 0) {
      for (Agent& a : agents) {
        if (config.acceleration_noise > 0.0) {
          a.vx += config.acceleration_noise * motion_rng.normal();
          a.vy += config.acceleration_noise * motion_rng.normal();
        }
        a.cx += a.vx;
        a.cy += a.vy;
        const double hw = a.width / 2, hh = a.height / 2;
        if (a.cx < hw) { a.cx = 2 * hw - a.cx; a.vx = -a.vx; }
        if (a.cx > config.arena_width - hw) { a.cx = 2 * (config.arena_width - hw) - a.cx; a.vx = -a.vx; }
        if (a.cy < hh) { a.cy = 2 * hh - a.cy; a.vy = -a.vy; }
        if (a.cy > config.arena_height - hh) { a.cy = 2 * (config.arena_height - hh) - a.cy; a.vy = -a.vy; }
        a.cx = std::clamp(a.cx, hw, config.arena_width - hw);
        a.cy = std::clamp(a.cy, hh, config.arena_height - hh);
      }
    }

    for (std::size_t id = 0; id < config.n_identities; ++id) {
      const Agent& a = agents[id];
      const BoxTLWH box{a.cx - a.width / 2, a.cy - a.height / 2, a.width, a.height};
      s.gt.frames[f].push_back({static_cast<int>(id) + 1, box, 1.0});

      const bool occluded = std::any_of(s.occlusions.begin(), s.occlusions.end(), [&](const auto& w) {
        return w.identity == id && frame >= w.start_frame && frame <= w.end_frame;
      });
      if (occluded) continue;
      if (config.miss_rate > 0.0 && det_rng.bernoulli(config.miss_rate)) continue;

      Detection det;
      det.box = box;
      if (config.box_jitter > 0.0) {
        det.box.left += config.box_jitter * det_rng.normal();
        det.box.top += config.box_jitter * det_rng.normal();
        det.box.width = std::max(1.0, det.box.width + config.box_jitter * det_rng.normal());
        det.box.height = std::max(1.0, det.box.height + config.box_jitter * det_rng.normal());
      }
      det.confidence = config.confidence_spread > 0.0
                           ? 1.0 - det_rng.uniform(0.0, config.confidence_spread)
                           : 1.0;
      det.embedding = noisy_feature(det_rng, s.prototypes.row(static_cast<Eigen::Index>(id)).transpose(),
                                    config.embedding_noise);
      s.detections[f].push_back(std::move(det));
      s.detection_sources[f].push_back(static_cast<int>(id) + 1);
    }

    if (config.false_positive_rate > 0.0 && fp_rng.bernoulli(config.false_positive_rate)) {
      Detection det;
      det.box.height = fp_rng.uniform(config.min_height, config.max_height);
      det.box.width = det.box.height * fp_rng.uniform(config.min_aspect, config.max_aspect);
      det.box.left = fp_rng.uniform(0.0, config.arena_width - det.box.width);
      det.box.top = fp_rng.uniform(0.0, config.arena_height - det.box.height);
      det.confidence = fp_rng.uniform(config.false_positive_min_confidence,
                                      config.false_positive_max_confidence);
      det.embedding = fp_rng.unit_vector(config.feature_dim);
      s.detections[f].push_back(std::move(det));
      s.detection_sources[f].push_back(-1);
    }
  }

  // Feature samples for the embedder.
  RandomStream sample_rng = make_stream(config.seed, Stream::kTrainSamples);
  const double sample_noise = config.sample_noise >= 0.0 ? config.sample_noise : config.embedding_noise;
  auto fill = [&](std::vector<TrainSample>& out, std::size_t per_identity, std::size_t backgrounds) {
    for (std::size_t id = 0; id < config.n_identities; ++id) {
      for (std::size_t k = 0; k < per_identity; ++k) {
        TrainSample sample;
        sample.feature = noisy_feature(sample_rng, s.prototypes.row(static_cast<Eigen::Index>(id)).transpose(),
                                       sample_noise);
        if (config.person_misalignment > 0.0) {
          const double clutter = sample_rng.uniform(0.0, config.person_misalignment);
          sample.feature = (1.0 - clutter) * sample.feature +
                           clutter * sample_rng.unit_vector(config.feature_dim);
          sample.feature.normalize();
        }
        const bool unlabeled = config.unlabeled_fraction > 0.0 && sample_rng.bernoulli(config.unlabeled_fraction);
        sample.label = unlabeled ? SampleLabel::unlabeled_person() : SampleLabel::person(id);
        out.push_back(std::move(sample));
      }
    }
    for (std::size_t k = 0; k < backgrounds; ++k) {
      Eigen::VectorXd feature = sample_rng.unit_vector(config.feature_dim);
      if (config.background_hardness > 0.0) {
        const auto id = static_cast<Eigen::Index>(sample_rng.index(config.n_identities));
        feature = config.background_hardness * s.prototypes.row(id).transpose() +
                  (1.0 - config.background_hardness) * feature;
        feature.normalize();
      }
      out.push_back({std::move(feature), SampleLabel::background()});
    }
  };
  fill(s.train, config.train_samples_per_identity, config.train_background_samples);
  fill(s.test, config.test_samples_per_identity, config.test_background_samples);
  return s;
}

double prototype_separation(const Eigen::MatrixXd& prototypes) {
  if (prototypes.rows() < 2) throw InputError("prototype_separation: needs at least two identities");
  double min_angle = 180.0;
  for (Eigen::Index i = 0; i < prototypes.rows(); ++i) {
    for (Eigen::Index j = i + 1; j < prototypes.rows(); ++j) {
      const double c = std::clamp(prototypes.row(i).dot(prototypes.row(j)), -1.0, 1.0);
      min_angle = std::min(min_angle, std::acos(c) * 180.0 / std::numbers::pi);
    }
  }
  return min_angle;
}

double prototype_separation(const Scenario& scenario) {
  return prototype_separation(scenario.prototypes);
}

}  // namespace hoimtrack
