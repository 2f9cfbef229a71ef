#pragma once

/// \file core.hpp
/// \brief Canonical 17-point skeleton and the pose/frame/sequence types
/// every other module works on.

#include <array>
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace kpeval {

/// Canonical keypoints in COCO order. Neck and MidHip are virtual: they are
/// only ever derived from shoulders and hips, never ingested.
enum class KeypointId : std::uint8_t {
  Nose = 0,
  LEye,
  REye,
  LEar,
  REar,
  LShoulder,
  RShoulder,
  LElbow,
  RElbow,
  LWrist,
  RWrist,
  LHip,
  RHip,
  LKnee,
  RKnee,
  LAnkle,
  RAnkle,
  Neck,
  MidHip,
};

inline constexpr std::size_t kNumKeypoints = 17;

inline constexpr std::size_t index_of(KeypointId id) noexcept { return static_cast<std::size_t>(id); }
inline constexpr KeypointId keypoint_at(std::size_t i) noexcept { return static_cast<KeypointId>(i); }
inline constexpr bool is_virtual(KeypointId id) noexcept { return index_of(id) >= kNumKeypoints; }

/// snake_case name used in every file format ("left_shoulder", "neck", ...).
std::string_view keypoint_name(KeypointId id) noexcept;

/// Accepts the snake_case names as well as the short CamelCase forms
/// ("LShoulder"), case-insensitively.
std::optional<KeypointId> keypoint_from_name(std::string_view name) noexcept;

struct Keypoint2D {
  double x = 0.0;
  double y = 0.0;
  std::optional<double> confidence;
  bool present = false;

  static Keypoint2D at(double x, double y, std::optional<double> confidence = std::nullopt) {
    return Keypoint2D{x, y, confidence, true};
  }
  static Keypoint2D absent() { return Keypoint2D{}; }

  friend bool operator==(const Keypoint2D& a, const Keypoint2D& b) {
    if (a.present != b.present) return false;
    if (!a.present) return true;
    return a.x == b.x && a.y == b.y && a.confidence == b.confidence;
  }
};

/// Euclidean distance; both keypoints must be present.
double distance(const Keypoint2D& a, const Keypoint2D& b) noexcept;

using KeypointArray = std::array<Keypoint2D, kNumKeypoints>;

int present_count(const KeypointArray& keypoints) noexcept;

enum class Role { Infant, Adult, Unknown };

std::string_view to_string(Role role) noexcept;
std::optional<Role> role_from_string(std::string_view text) noexcept;

/// One detection emitted by a method, expressed on the canonical skeleton.
struct CanonicalPose {
  KeypointArray keypoints{};
  /// Effective whole-detection score after the schema's score policy.
  std::optional<double> score;
  /// Score of the person box from the method's detector, when supplied.
  std::optional<double> box_score;
  int rank = 0;
  Role role = Role::Unknown;
  /// Missing keypoints counted on the method's native layout. Unset means
  /// the canonical layout is the native one.
  std::optional<int> native_missing;

  const Keypoint2D& operator[](KeypointId id) const { return keypoints[index_of(id)]; }
  Keypoint2D& operator[](KeypointId id) { return keypoints[index_of(id)]; }

  friend bool operator==(const CanonicalPose&, const CanonicalPose&) = default;
};

struct GroundTruthPose {
  KeypointArray keypoints{};
  Role role = Role::Infant;

  int annotated_count() const noexcept { return present_count(keypoints); }

  const Keypoint2D& operator[](KeypointId id) const { return keypoints[index_of(id)]; }
  Keypoint2D& operator[](KeypointId id) { return keypoints[index_of(id)]; }

  friend bool operator==(const GroundTruthPose&, const GroundTruthPose&) = default;
};

struct FrameRecord {
  std::string frame_id;
  std::optional<int> width;
  std::optional<int> height;
  std::vector<GroundTruthPose> ground_truths;
  /// Sorted by rank.
  std::vector<CanonicalPose> detections;

  friend bool operator==(const FrameRecord&, const FrameRecord&) = default;
};

enum class NormalizationMode { PerSequenceMedian, PerImage };

std::string_view to_string(NormalizationMode mode) noexcept;
std::optional<NormalizationMode> normalization_from_string(std::string_view text) noexcept;

struct SequenceDataset {
  std::string sequence_id;
  std::vector<FrameRecord> frames;
  NormalizationMode normalization = NormalizationMode::PerSequenceMedian;
  int expected_persons = 1;
  std::map<std::string, std::string> metadata;

  friend bool operator==(const SequenceDataset&, const SequenceDataset&) = default;
};

struct VirtualPoints {
  Keypoint2D neck;
  Keypoint2D midhip;
};

/// Neck is the shoulder midpoint, MidHip the hip midpoint; each is absent
/// unless both of its operands are present.
VirtualPoints derive_virtual_points(const KeypointArray& keypoints) noexcept;
inline VirtualPoints derive_virtual_points(const CanonicalPose& pose) noexcept {
  return derive_virtual_points(pose.keypoints);
}
inline VirtualPoints derive_virtual_points(const GroundTruthPose& pose) noexcept {
  return derive_virtual_points(pose.keypoints);
}

}  // namespace kpeval
