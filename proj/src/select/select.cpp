#include "kpeval/select.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace kpeval {

std::string_view to_string(SelectionStrategy s) noexcept {
  switch (s) {
    case SelectionStrategy::FirstRank: return "first";
    case SelectionStrategy::HighestScore: return "score";
    case SelectionStrategy::OracleBest: return "oracle";
  }
  return "first";
}

std::optional<SelectionStrategy> selection_from_string(std::string_view text) noexcept {
  if (text == "first") return SelectionStrategy::FirstRank;
  if (text == "score") return SelectionStrategy::HighestScore;
  if (text == "oracle") return SelectionStrategy::OracleBest;
  return std::nullopt;
}

std::string_view to_string(EvalScope s) noexcept { return s == EvalScope::Infant ? "infant" : "all"; }

std::optional<EvalScope> scope_from_string(std::string_view text) noexcept {
  if (text == "infant") return EvalScope::Infant;
  if (text == "all") return EvalScope::All;
  return std::nullopt;
}

bool in_scope(const GroundTruthPose& gt, EvalScope scope) noexcept {
  return scope == EvalScope::All || gt.role == Role::Infant;
}

std::optional<double> mean_keypoint_distance(const CanonicalPose& det, const GroundTruthPose& gt) noexcept {
  double sum = 0.0;
  int n = 0;
  for (std::size_t i = 0; i < kNumKeypoints; ++i) {
    if (!det.keypoints[i].present || !gt.keypoints[i].present) continue;
    sum += distance(det.keypoints[i], gt.keypoints[i]);
    ++n;
  }
  if (n == 0) return std::nullopt;
  return sum / n;
}

std::optional<std::size_t> select_detection_index(const FrameRecord& frame, SelectionStrategy strategy,
                                                  const GroundTruthPose* gt) noexcept {
  const auto& dets = frame.detections;
  if (dets.empty()) return std::nullopt;

  std::size_t best = 0;
  for (std::size_t i = 1; i < dets.size(); ++i)
    if (dets[i].rank < dets[best].rank) best = i;
  const std::size_t first = best;

  if (strategy == SelectionStrategy::HighestScore) {
    std::optional<std::size_t> top;
    for (std::size_t i = 0; i < dets.size(); ++i) {
      if (!dets[i].score) continue;
      if (!top || *dets[i].score > *dets[*top].score ||
          (*dets[i].score == *dets[*top].score && dets[i].rank < dets[*top].rank))
        top = i;
    }
    return top.value_or(first);
  }

  if (strategy == SelectionStrategy::OracleBest && gt != nullptr) {
    double best_dist = std::numeric_limits<double>::infinity();
    std::optional<std::size_t> pick;
    for (std::size_t i = 0; i < dets.size(); ++i) {
      const auto d = mean_keypoint_distance(dets[i], *gt);
      if (!d) continue;
      if (!pick || *d < best_dist || (*d == best_dist && dets[i].rank < dets[*pick].rank)) {
        best_dist = *d;
        pick = i;
      }
    }
    return pick.value_or(first);
  }
  return first;
}

std::optional<CanonicalPose> select_detection(const FrameRecord& frame, SelectionStrategy strategy,
                                              const GroundTruthPose* gt) {
  const auto i = select_detection_index(frame, strategy, gt);
  if (!i) return std::nullopt;
  return frame.detections[*i];
}

RedundancyReport redundancy(std::span<const int> detections_per_frame, int expected_persons_per_frame) {
  RedundancyReport r;
  r.multi_person_caveat = expected_persons_per_frame > 1;
  for (int count : detections_per_frame) {
    r.provided += count;
    if (count > 0) {
      ++r.frames_with_detection;
      r.expected += expected_persons_per_frame;
    }
  }
  if (r.frames_with_detection > 0)
    r.redundant_percent = 100.0 * static_cast<double>(r.provided - r.expected) / r.frames_with_detection;
  return r;
}

RedundancyReport redundancy(const SequenceDataset& dataset, std::span<const int> detections_per_frame) {
  return redundancy(detections_per_frame, dataset.expected_persons);
}

}  // namespace kpeval
