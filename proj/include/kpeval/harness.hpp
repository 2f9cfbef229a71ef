#pragma once

/// \file harness.hpp
/// \brief Seeded synthetic sequences whose metric values are known in
/// closed form.
///
/// Randomness comes from std::mt19937_64 seeded with the given seed; a
/// uniform double is (x >> 11) * 2^-53 of the next 64-bit output.

#include <cstdint>
#include <optional>
#include <string>

#include "kpeval/core.hpp"
#include "kpeval/ingest.hpp"

namespace kpeval {

enum class JitterKind { None, Fixed, Random };
enum class ScoreModel { PerfectlyCorrelated, Anticorrelated, Constant, Noisy };

std::string_view to_string(JitterKind k) noexcept;
std::optional<JitterKind> jitter_from_string(std::string_view text) noexcept;
std::string_view to_string(ScoreModel m) noexcept;
/// perfect | anti | constant | noisy
std::optional<ScoreModel> score_model_from_string(std::string_view text) noexcept;

struct ErrorModel {
  JitterKind jitter = JitterKind::None;
  /// Offset length as a fraction of the torso length: exact for Fixed, an
  /// upper bound for Random.
  double jitter_fraction = 0.0;
  double drop_keypoint_prob = 0.0;
  double drop_detection_prob = 0.0;
  /// Drops exactly this many frames instead of drawing per frame.
  std::optional<int> drop_detection_count;
  double duplicate_detection_prob = 0.0;
  ScoreModel score_model = ScoreModel::PerfectlyCorrelated;

  /// Throws ConfigError on out-of-range values.
  void validate(int n_frames) const;
};

struct ExpectedMetrics {
  int frames = 0;
  int detected_frames = 0;
  int missing_detections = 0;
  long long missing_keypoints = 0;
  int duplicates = 0;
  std::optional<double> mean_oks;
  std::optional<double> nmh_percent;
  double missing_percent = 0.0;
  std::optional<double> redundant_percent;
  std::optional<double> ap;
  std::optional<double> ar;
  std::optional<double> spearman_rho;
};

struct GeneratedInstance {
  SequenceDataset ground_truth;
  DetectionFile detections;
  ExpectedMetrics expected;
};

/// Throws ConfigError for n_frames < 1 or an invalid model.
GeneratedInstance generate(std::uint64_t seed, int n_frames, const ErrorModel& model,
                           const std::string& sequence_id = "synthetic");

/// Sidecar written next to generated fixtures.
std::string render_expected_json(std::uint64_t seed, const ErrorModel& model, const ExpectedMetrics& expected);

}  // namespace kpeval
