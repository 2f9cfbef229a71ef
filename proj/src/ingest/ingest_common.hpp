#pragma once

#include <algorithm>
#include <string>
#include <vector>

#include "kpeval/errors.hpp"
#include "kpeval/schema.hpp"

namespace kpeval::detail {

/// Maps one frame's raw detections; absent ranks follow list order. The
/// result is sorted by rank, and ranks must be unique and contiguous from 0.
inline std::vector<CanonicalPose> map_frame_detections(std::vector<RawDetection>& raws, const SchemaMap& schema,
                                                       const std::string& locus) {
  std::vector<CanonicalPose> out;
  out.reserve(raws.size());
  for (std::size_t i = 0; i < raws.size(); ++i) {
    if (!raws[i].rank) raws[i].rank = static_cast<int>(i);
    try {
      out.push_back(map_to_canonical(raws[i], schema));
    } catch (const Error& e) {
      throw Error(e.code(), locus + "[" + std::to_string(i) + "]: " + e.what());
    }
  }
  std::stable_sort(out.begin(), out.end(), [](const CanonicalPose& a, const CanonicalPose& b) { return a.rank < b.rank; });
  for (std::size_t i = 0; i < out.size(); ++i) {
    if (out[i].rank != static_cast<int>(i))
      throw Error(ErrorCode::ParseError, locus + ": detection ranks must be unique and contiguous from 0");
  }
  return out;
}

/// The zero-confidence-at-origin sentinel used by many pose writers.
inline Keypoint2D native_keypoint(double x, double y, std::optional<double> confidence) {
  if (confidence && *confidence == 0.0 && x == 0.0 && y == 0.0) return Keypoint2D::absent();
  return Keypoint2D::at(x, y, confidence);
}

}  // namespace kpeval::detail
