#include <algorithm>
#include <tuple>

#include "kpeval/metrics.hpp"

namespace kpeval {

namespace {

struct RankedDetection {
  const FrameMatching* frame;
  const ScoredDetection* det;
};

bool ranks_before(const RankedDetection& a, const RankedDetection& b) {
  const bool sa = a.det->score.has_value(), sb = b.det->score.has_value();
  if (sa != sb) return sa;
  if (sa && *a.det->score != *b.det->score) return *a.det->score > *b.det->score;
  return std::tie(a.frame->sequence_id, a.frame->frame_id, a.det->rank) <
         std::tie(b.frame->sequence_id, b.frame->frame_id, b.det->rank);
}

constexpr int kRecallPoints = 101;

}  // namespace

ApArResult ap_ar(std::span<const FrameMatching> frames) {
  std::vector<RankedDetection> ranked;
  long long ground_truths = 0;
  for (const auto& f : frames) {
    ground_truths += f.ground_truths;
    for (const auto& d : f.detections) ranked.push_back({&f, &d});
  }
  std::stable_sort(ranked.begin(), ranked.end(), ranks_before);

  ApArResult result;
  double ap_sum = 0.0, ar_sum = 0.0;
  std::vector<double> precision(ranked.size()), recall(ranked.size());
  for (double t : kOksThresholds) {
    ThresholdPrecisionRecall pr{t, 0.0, 0.0};
    if (ground_truths > 0) {
      long long tp = 0, fp = 0;
      for (std::size_t i = 0; i < ranked.size(); ++i) {
        const auto& m = ranked[i].det->matched_oks;
        if (m && *m > t) ++tp;
        else ++fp;
        recall[i] = static_cast<double>(tp) / static_cast<double>(ground_truths);
        precision[i] = static_cast<double>(tp) / static_cast<double>(tp + fp);
      }
      // interpolated precision: best precision at any recall at least as high
      for (std::size_t i = ranked.size(); i-- > 1;) precision[i - 1] = std::max(precision[i - 1], precision[i]);

      double area = 0.0;
      std::size_t idx = 0;
      for (int j = 0; j < kRecallPoints; ++j) {
        const double level = j / 100.0;
        while (idx < ranked.size() && recall[idx] < level) ++idx;
        area += idx < ranked.size() ? precision[idx] : 0.0;
      }
      pr.precision = area / kRecallPoints;
      pr.recall = static_cast<double>(tp) / static_cast<double>(ground_truths);
    }
    ap_sum += pr.precision;
    ar_sum += pr.recall;
    result.per_threshold.push_back(pr);
  }
  result.ap = 100.0 * ap_sum / static_cast<double>(kOksThresholds.size());
  result.ar = 100.0 * ar_sum / static_cast<double>(kOksThresholds.size());
  return result;
}

}  // namespace kpeval
