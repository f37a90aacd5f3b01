#include "hoimtrack/metrics.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <unordered_map>

#include <nlohmann/json.hpp>

#include "hoimtrack/assignment.hpp"
#include "hoimtrack/errors.hpp"

namespace hoimtrack {
namespace {

const FrameBoxes kEmptyFrame;

const FrameBoxes& frame_at(const Sequence& seq, std::size_t f) {
  return f < seq.frames.size() ? seq.frames[f] : kEmptyFrame;
}

void check_ids(const Sequence& seq, const char* side) {
  for (const auto& frame : seq.frames) {
    std::set<int> seen;
    for (const auto& obj : frame) {
      if (obj.id <= 0) throw InputError(std::string(side) + " ids must be positive");
      if (!seen.insert(obj.id).second) {
        throw InputError(std::string(side) + " id " + std::to_string(obj.id) +
                         " appears twice in one frame");
      }
    }
  }
}

}  // namespace

std::size_t Sequence::box_count() const {
  std::size_t n = 0;
  for (const auto& f : frames) n += f.size();
  return n;
}

ClearMotResult clear_mot(const SequenceRecord& record, double iou_threshold) {
  if (!(iou_threshold > 0.0 && iou_threshold < 1.0)) {
    throw InputError("clear_mot: iou_threshold must lie in (0, 1)");
  }
  check_ids(record.gt, "ground-truth");
  check_ids(record.predictions, "prediction");
  ClearMotResult result;
  result.num_gt = record.gt.box_count();
  if (result.num_gt == 0) throw InputError("clear_mot: MOTA is undefined without ground truth");

  const std::size_t frames = std::max(record.gt.frame_count(), record.predictions.frame_count());
  std::map<int, int> previous;      // gt id -> pred id matched in the previous frame
  std::map<int, int> last_matched;  // gt id -> pred id of its latest match
  std::map<int, bool> was_tracked;  // gt id -> matched in its latest appearance
  std::map<int, std::size_t> gt_frames, gt_matched_frames;
  double iou_sum = 0.0;

  for (std::size_t f = 0; f < frames; ++f) {
    const FrameBoxes& gts = frame_at(record.gt, f);
    const FrameBoxes& preds = frame_at(record.predictions, f);
    std::vector<bool> gt_used(gts.size(), false), pred_used(preds.size(), false);
    std::vector<std::pair<std::size_t, std::size_t>> pairs;

    std::unordered_map<int, std::size_t> pred_index;
    for (std::size_t p = 0; p < preds.size(); ++p) pred_index[preds[p].id] = p;

    for (std::size_t g = 0; g < gts.size(); ++g) {
      const auto prev = previous.find(gts[g].id);
      if (prev == previous.end()) continue;
      const auto p = pred_index.find(prev->second);
      if (p == pred_index.end() || pred_used[p->second]) continue;
      if (iou(gts[g].box, preds[p->second].box) >= iou_threshold) {
        gt_used[g] = true;
        pred_used[p->second] = true;
        pairs.emplace_back(g, p->second);
      }
    }

    std::vector<std::size_t> free_gt, free_pred;
    for (std::size_t g = 0; g < gts.size(); ++g) if (!gt_used[g]) free_gt.push_back(g);
    for (std::size_t p = 0; p < preds.size(); ++p) if (!pred_used[p]) free_pred.push_back(p);
    if (!free_gt.empty() && !free_pred.empty()) {
      Eigen::MatrixXd cost(static_cast<Eigen::Index>(free_gt.size()),
                           static_cast<Eigen::Index>(free_pred.size()));
      for (std::size_t i = 0; i < free_gt.size(); ++i) {
        for (std::size_t j = 0; j < free_pred.size(); ++j) {
          const double overlap = iou(gts[free_gt[i]].box, preds[free_pred[j]].box);
          cost(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
              overlap >= iou_threshold ? 1.0 - overlap : kInfeasibleCost;
        }
      }
      const Assignment a = hungarian(cost);
      for (std::size_t i = 0; i < free_gt.size(); ++i) {
        const auto& col = a.row_to_col[i];
        if (col && cost(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(*col)) < kInfeasibleCost) {
          pairs.emplace_back(free_gt[i], free_pred[*col]);
        }
      }
    }

    std::sort(pairs.begin(), pairs.end());
    std::map<int, int> current;
    std::vector<std::pair<int, int>> log;
    std::vector<bool> gt_matched(gts.size(), false);
    for (const auto& [g, p] : pairs) {
      const int gid = gts[g].id;
      const int pid = preds[p].id;
      gt_matched[g] = true;
      current[gid] = pid;
      log.emplace_back(gid, pid);
      iou_sum += iou(gts[g].box, preds[p].box);
      const auto last = last_matched.find(gid);
      if (last != last_matched.end() && last->second != pid) ++result.idsw;
      last_matched[gid] = pid;
    }
    for (std::size_t g = 0; g < gts.size(); ++g) {
      const int gid = gts[g].id;
      ++gt_frames[gid];
      if (gt_matched[g]) {
        ++gt_matched_frames[gid];
        const auto it = was_tracked.find(gid);
        if (it != was_tracked.end() && !it->second && last_matched.count(gid) &&
            gt_matched_frames[gid] > 1) {
          ++result.fragmentations;
        }
      }
      was_tracked[gid] = gt_matched[g];
    }

    result.matches += pairs.size();
    result.fp += preds.size() - pairs.size();
    result.fn += gts.size() - pairs.size();
    result.match_log.push_back(std::move(log));
    previous = std::move(current);
  }

  for (const auto& [gid, total] : gt_frames) {
    const double ratio = static_cast<double>(gt_matched_frames[gid]) / static_cast<double>(total);
    if (ratio >= 0.8) ++result.mostly_tracked;
    if (ratio <= 0.2) ++result.mostly_lost;
  }
  result.motp = result.matches == 0 ? 0.0 : iou_sum / static_cast<double>(result.matches);
  result.mota = 1.0 - static_cast<double>(result.fn + result.fp + result.idsw) /
                          static_cast<double>(result.num_gt);
  return result;
}

IdentityResult identity_metrics(const SequenceRecord& record, double iou_threshold) {
  if (!(iou_threshold > 0.0 && iou_threshold < 1.0)) {
    throw InputError("identity_metrics: iou_threshold must lie in (0, 1)");
  }
  check_ids(record.gt, "ground-truth");
  check_ids(record.predictions, "prediction");
  const std::size_t total_gt = record.gt.box_count();
  if (total_gt == 0) throw InputError("identity_metrics: no ground truth");
  const std::size_t total_pred = record.predictions.box_count();

  std::map<int, std::size_t> gt_ids, pred_ids;
  for (const auto& f : record.gt.frames) for (const auto& o : f) gt_ids.emplace(o.id, 0);
  for (const auto& f : record.predictions.frames) for (const auto& o : f) pred_ids.emplace(o.id, 0);
  std::size_t next = 0;
  for (auto& [id, idx] : gt_ids) idx = next++;
  next = 0;
  for (auto& [id, idx] : pred_ids) idx = next++;

  IdentityResult result;
  if (!pred_ids.empty()) {
    Eigen::MatrixXd overlap = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(gt_ids.size()),
                                                    static_cast<Eigen::Index>(pred_ids.size()));
    const std::size_t frames = std::max(record.gt.frame_count(), record.predictions.frame_count());
    for (std::size_t f = 0; f < frames; ++f) {
      for (const auto& g : frame_at(record.gt, f)) {
        for (const auto& p : frame_at(record.predictions, f)) {
          if (iou(g.box, p.box) >= iou_threshold) {
            overlap(static_cast<Eigen::Index>(gt_ids[g.id]),
                    static_cast<Eigen::Index>(pred_ids[p.id])) += 1.0;
          }
        }
      }
    }
    const Assignment a = hungarian(-overlap);
    double idtp = 0.0;
    for (std::size_t r = 0; r < a.row_to_col.size(); ++r) {
      if (a.row_to_col[r]) {
        idtp += overlap(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(*a.row_to_col[r]));
      }
    }
    result.idtp = static_cast<std::size_t>(idtp + 0.5);
  }
  result.idfn = total_gt - result.idtp;
  result.idfp = total_pred - result.idtp;
  const double tp = static_cast<double>(result.idtp);
  result.idf1 = 2.0 * tp / (2.0 * tp + static_cast<double>(result.idfp + result.idfn));
  result.idp = total_pred == 0 ? 0.0 : tp / static_cast<double>(total_pred);
  result.idr = tp / static_cast<double>(total_gt);
  return result;
}

MetricsReport evaluate(const SequenceRecord& record, double iou_threshold) {
  const ClearMotResult mot = clear_mot(record, iou_threshold);
  const IdentityResult id = identity_metrics(record, iou_threshold);
  return {mot.mota, id.idf1, mot.idsw, mot.fp, mot.fn, mot.num_gt};
}

std::size_t warmup_false_negatives(const SequenceRecord& record, const ClearMotResult& result,
                                   int n_init) {
  if (n_init <= 1) return 0;
  std::map<int, std::size_t> first_seen;
  std::size_t count = 0;
  for (std::size_t f = 0; f < record.gt.frames.size(); ++f) {
    for (const auto& g : record.gt.frames[f]) {
      const auto [it, inserted] = first_seen.emplace(g.id, f);
      if (f - it->second >= static_cast<std::size_t>(n_init - 1)) continue;
      const auto& log = f < result.match_log.size() ? result.match_log[f]
                                                    : std::vector<std::pair<int, int>>{};
      const bool matched = std::any_of(log.begin(), log.end(),
                                       [&](const auto& m) { return m.first == g.id; });
      if (!matched) ++count;
    }
  }
  return count;
}

double mota_excluding_warmup(const ClearMotResult& result, std::size_t warmup_fn) {
  const std::size_t num_gt = result.num_gt - warmup_fn;
  if (num_gt == 0) throw InputError("mota_excluding_warmup: no ground truth left");
  return 1.0 - static_cast<double>(result.fn - warmup_fn + result.fp + result.idsw) /
                   static_cast<double>(num_gt);
}

std::string to_json(const MetricsReport& report) {
  nlohmann::ordered_json j;
  j["mota"] = report.mota;
  j["idf1"] = report.idf1;
  j["idsw"] = report.idsw;
  j["fp"] = report.fp;
  j["fn"] = report.fn;
  j["num_gt"] = report.num_gt;
  return j.dump(2) + "\n";
}

MetricsReport report_from_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("metrics report: ") + e.what());
  }
  static const std::set<std::string> keys = {"mota", "idf1", "idsw", "fp", "fn", "num_gt"};
  if (!j.is_object()) throw InputError("metrics report must be a JSON object");
  for (const auto& [key, _] : j.items()) {
    if (!keys.count(key)) throw InputError("metrics report: unknown key '" + key + "'");
  }
  MetricsReport r;
  try {
    r.mota = j.at("mota").get<double>();
    r.idf1 = j.at("idf1").get<double>();
    r.idsw = j.at("idsw").get<std::size_t>();
    r.fp = j.at("fp").get<std::size_t>();
    r.fn = j.at("fn").get<std::size_t>();
    r.num_gt = j.at("num_gt").get<std::size_t>();
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("metrics report: ") + e.what());
  }
  return r;
}

}  // namespace hoimtrack
