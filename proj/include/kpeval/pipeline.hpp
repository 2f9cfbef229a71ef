#pragma once

/// \file pipeline.hpp
/// \brief Per-frame evaluation of one method on one aligned sequence.

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "kpeval/core.hpp"
#include "kpeval/ingest.hpp"
#include "kpeval/metrics.hpp"
#include "kpeval/select.hpp"
#include "kpeval/sigma.hpp"

namespace kpeval {

struct EvalOptions {
  SelectionStrategy selection = SelectionStrategy::FirstRank;
  EvalScope scope = EvalScope::Infant;
  /// Overrides the dataset's own normalization mode when set.
  std::optional<NormalizationMode> normalization;
  SigmaTable sigma = SigmaTable::coco_default();
};

/// One evaluated ground truth and the detection selected for it.
struct TargetEvaluation {
  std::size_t ground_truth = 0;
  std::optional<std::size_t> selected;
  int missing_keypoints = 0;
  std::optional<double> oks;
  std::optional<double> score;
  /// Neck-MidHip errors as fractions of the normalizer.
  std::array<std::optional<double>, kNumKeypoints> nmh{};
};

struct FrameEvaluation {
  std::string frame_id;
  int detections = 0;
  int matched_pairs = 0;
  std::vector<TargetEvaluation> targets;
  FrameMatching matching;
};

struct SequenceEvaluation {
  std::string method_name;
  std::string sequence_id;
  int expected_persons = 1;
  int method_keypoint_count = static_cast<int>(kNumKeypoints);
  NormalizationMode normalization = NormalizationMode::PerSequenceMedian;
  std::optional<double> sequence_normalizer;
  std::vector<FrameEvaluation> frames;
  std::vector<Warning> warnings;
};

/// `dataset` must already carry the method's detections (see align()).
SequenceEvaluation evaluate_sequence(const SequenceDataset& dataset, const std::string& method_name,
                                     int method_keypoint_count, const EvalOptions& options);

}  // namespace kpeval
