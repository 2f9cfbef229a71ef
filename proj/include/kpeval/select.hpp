#pragma once

/// \file select.hpp
/// \brief Detection selection (first rank, highest score, best match),
/// redundant-detection accounting, ground-truth assignment for AP/AR, and
/// mixture-of-experts averaging.

#include <cstddef>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "kpeval/core.hpp"
#include "kpeval/metrics.hpp"
#include "kpeval/sigma.hpp"

namespace kpeval {

enum class SelectionStrategy { FirstRank, HighestScore, OracleBest };

std::string_view to_string(SelectionStrategy s) noexcept;
/// Accepts the CLI spellings first|score|oracle.
std::optional<SelectionStrategy> selection_from_string(std::string_view text) noexcept;

/// Which ground truths are evaluated.
enum class EvalScope { Infant, All };

std::string_view to_string(EvalScope s) noexcept;
std::optional<EvalScope> scope_from_string(std::string_view text) noexcept;

bool in_scope(const GroundTruthPose& gt, EvalScope scope) noexcept;

/// Mean Euclidean distance over keypoints present in both poses; nullopt
/// when they share none.
std::optional<double> mean_keypoint_distance(const CanonicalPose& det, const GroundTruthPose& gt) noexcept;

/// Index into frame.detections, or nullopt for an empty detection list.
/// HighestScore falls back to rank order when no detection has a score and
/// breaks ties by lower rank. OracleBest without a ground truth behaves as
/// FirstRank.
std::optional<std::size_t> select_detection_index(const FrameRecord& frame, SelectionStrategy strategy,
                                                  const GroundTruthPose* gt) noexcept;

std::optional<CanonicalPose> select_detection(const FrameRecord& frame, SelectionStrategy strategy,
                                              const GroundTruthPose* gt = nullptr);

struct RedundancyReport {
  long long expected = 0;
  long long provided = 0;
  int frames_with_detection = 0;
  std::optional<double> redundant_percent;
  /// Set when more than one person is expected per frame; the ratio then
  /// cannot tell a missed infant from a duplicated adult.
  bool multi_person_caveat = false;
};

RedundancyReport redundancy(std::span<const int> detections_per_frame, int expected_persons_per_frame);
RedundancyReport redundancy(const SequenceDataset& dataset, std::span<const int> detections_per_frame);

struct MatchedPair {
  std::size_t detection = 0;
  std::size_t ground_truth = 0;
  double oks = 0.0;
};

struct Assignment {
  std::vector<MatchedPair> pairs;
  std::vector<std::size_t> unmatched_detections;
  /// In-scope ground truths left without a detection.
  std::vector<std::size_t> unmatched_ground_truths;
  /// Number of ground truths taking part (in scope).
  int ground_truths = 0;
};

/// Greedy one-to-one matching: detections in descending score order
/// (unscored last, ties by rank) each take the free in-scope ground truth
/// with the highest OKS. Ground truths whose OKS is undefined (degenerate
/// box, nothing in common) cannot be taken. A detection whose OKS against
/// an out-of-scope ground truth beats its best free candidate stays
/// unmatched.
Assignment assign_to_ground_truths(const FrameRecord& frame, const SigmaTable& sigma,
                                   EvalScope scope = EvalScope::Infant);

/// Assignment flattened into the input of ap_ar().
FrameMatching to_frame_matching(const FrameRecord& frame, const Assignment& assignment,
                                std::string_view sequence_id = {});

/// Per-keypoint unweighted coordinate mean over the methods where the
/// keypoint is present. The result carries no score or confidences.
std::optional<CanonicalPose> mixture_average(std::span<const std::optional<CanonicalPose>> selected);

}  // namespace kpeval
