#include "kpeval/core.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>

namespace kpeval {

namespace {

struct NameEntry {
  std::string_view snake;
  std::string_view camel;
};

constexpr std::array<NameEntry, kNumKeypoints + 2> kNames{{
    {"nose", "Nose"},
    {"left_eye", "LEye"},
    {"right_eye", "REye"},
    {"left_ear", "LEar"},
    {"right_ear", "REar"},
    {"left_shoulder", "LShoulder"},
    {"right_shoulder", "RShoulder"},
    {"left_elbow", "LElbow"},
    {"right_elbow", "RElbow"},
    {"left_wrist", "LWrist"},
    {"right_wrist", "RWrist"},
    {"left_hip", "LHip"},
    {"right_hip", "RHip"},
    {"left_knee", "LKnee"},
    {"right_knee", "RKnee"},
    {"left_ankle", "LAnkle"},
    {"right_ankle", "RAnkle"},
    {"neck", "Neck"},
    {"mid_hip", "MidHip"},
}};

bool iequals(std::string_view a, std::string_view b) {
  return a.size() == b.size() &&
         std::equal(a.begin(), a.end(), b.begin(), [](char l, char r) {
           return std::tolower(static_cast<unsigned char>(l)) == std::tolower(static_cast<unsigned char>(r));
         });
}

Keypoint2D midpoint(const Keypoint2D& a, const Keypoint2D& b) {
  if (!a.present || !b.present) return Keypoint2D::absent();
  return Keypoint2D::at((a.x + b.x) / 2.0, (a.y + b.y) / 2.0);
}

}  // namespace

std::string_view keypoint_name(KeypointId id) noexcept { return kNames[index_of(id)].snake; }

std::optional<KeypointId> keypoint_from_name(std::string_view name) noexcept {
  for (std::size_t i = 0; i < kNames.size(); ++i) {
    if (iequals(name, kNames[i].snake) || iequals(name, kNames[i].camel)) return keypoint_at(i);
  }
  return std::nullopt;
}

double distance(const Keypoint2D& a, const Keypoint2D& b) noexcept { return std::hypot(a.x - b.x, a.y - b.y); }

int present_count(const KeypointArray& keypoints) noexcept {
  return static_cast<int>(std::count_if(keypoints.begin(), keypoints.end(), [](const Keypoint2D& k) { return k.present; }));
}

std::string_view to_string(Role role) noexcept {
  switch (role) {
    case Role::Infant: return "infant";
    case Role::Adult: return "adult";
    case Role::Unknown: return "unknown";
  }
  return "unknown";
}

std::optional<Role> role_from_string(std::string_view text) noexcept {
  if (iequals(text, "infant")) return Role::Infant;
  if (iequals(text, "adult")) return Role::Adult;
  if (iequals(text, "unknown")) return Role::Unknown;
  return std::nullopt;
}

std::string_view to_string(NormalizationMode mode) noexcept {
  return mode == NormalizationMode::PerSequenceMedian ? "median" : "per_image";
}

std::optional<NormalizationMode> normalization_from_string(std::string_view text) noexcept {
  if (iequals(text, "median")) return NormalizationMode::PerSequenceMedian;
  if (iequals(text, "per_image") || iequals(text, "per-image")) return NormalizationMode::PerImage;
  return std::nullopt;
}

VirtualPoints derive_virtual_points(const KeypointArray& keypoints) noexcept {
  return VirtualPoints{
      midpoint(keypoints[index_of(KeypointId::LShoulder)], keypoints[index_of(KeypointId::RShoulder)]),
      midpoint(keypoints[index_of(KeypointId::LHip)], keypoints[index_of(KeypointId::RHip)]),
  };
}

}  // namespace kpeval
