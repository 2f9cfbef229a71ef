#pragma once

/// \file schema.hpp
/// \brief Declarative mapping from a method's native keypoint layout onto
/// the canonical skeleton.

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "kpeval/core.hpp"

namespace kpeval {

enum class ScorePolicy { NativeScore, MedianOfConfidences, DetectorBoxScore, NoScore };

std::string_view to_string(ScorePolicy policy) noexcept;
std::optional<ScorePolicy> score_policy_from_string(std::string_view text) noexcept;

struct CompositeEntry {
  KeypointId target;
  std::vector<int> sources;

  friend bool operator==(const CompositeEntry&, const CompositeEntry&) = default;
};

struct SchemaMap {
  std::string method_name;
  int native_count = 0;
  std::vector<std::pair<int, KeypointId>> entries;
  std::vector<CompositeEntry> composites;
  ScorePolicy score_policy = ScorePolicy::NativeScore;

  /// Throws SchemaMismatch / InvalidIndex when an invariant is violated.
  void validate() const;

  static SchemaMap identity(std::string method_name, ScorePolicy policy = ScorePolicy::NativeScore);

  friend bool operator==(const SchemaMap&, const SchemaMap&) = default;
};

/// Layouts shipped with the toolkit: coco17, openpose18, openpose25,
/// mediapipe33, deeplabcut14.
std::optional<SchemaMap> builtin_schema(std::string_view name);

/// Text format, one directive per line, `#` starts a comment:
///
///     method = OpenPose
///     native_count = 18
///     score_policy = median_confidence
///     map 0 = nose
///     composite mid_hip = 8 11     (averaged sources)
SchemaMap parse_schema_map(std::string_view text, std::string_view source_name = "<schema>");

/// `builtin:<name>` or a bare builtin name selects a shipped layout;
/// anything else is read as a schema file.
SchemaMap load_schema_map(const std::string& spec);

/// A detection as it appears in a method's output before mapping.
struct RawDetection {
  std::vector<Keypoint2D> keypoints;
  std::optional<double> score;
  std::optional<double> box_score;
  std::optional<int> rank;
  Role role = Role::Unknown;
  /// Overrides the native missing count derived from `keypoints`.
  std::optional<int> native_missing;
};

/// Throws SchemaMismatch when the native length differs from the schema.
CanonicalPose map_to_canonical(const RawDetection& raw, const SchemaMap& schema);

/// Convenience overload for bare keypoint lists.
CanonicalPose map_to_canonical(std::span<const Keypoint2D> native, const SchemaMap& schema);

}  // namespace kpeval
