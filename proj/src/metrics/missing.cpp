#include "kpeval/errors.hpp"
#include "kpeval/metrics.hpp"

namespace kpeval {

double MissingDataReport::detection_part() const {
  return 100.0 * static_cast<double>(missing_detections) / static_cast<double>(images);
}

double MissingDataReport::keypoint_part() const {
  return 100.0 * static_cast<double>(missing_keypoints) /
         (static_cast<double>(images) * static_cast<double>(method_keypoint_count));
}

MissingDataReport missing_data(int images, int method_keypoint_count, int missing_detections,
                               long long missing_keypoints) {
  if (images <= 0) throw Error(ErrorCode::InsufficientData, "missing data needs at least one image");
  if (method_keypoint_count <= 0) throw Error(ErrorCode::InvalidArgument, "method keypoint count must be positive");
  if (missing_detections < 0 || missing_detections > images || missing_keypoints < 0)
    throw Error(ErrorCode::InvalidArgument, "missing counts out of range");
  MissingDataReport r{images, method_keypoint_count, missing_detections, missing_keypoints, 0.0};
  const long long max_data = static_cast<long long>(images) * method_keypoint_count;
  const long long missing = static_cast<long long>(missing_detections) * method_keypoint_count + missing_keypoints;
  r.percent = 100.0 * static_cast<double>(missing) / static_cast<double>(max_data);
  return r;
}

int missing_keypoints(const CanonicalPose& pose) noexcept {
  return pose.native_missing.value_or(static_cast<int>(kNumKeypoints) - present_count(pose.keypoints));
}

MissingDataReport missing_data(std::span<const std::optional<CanonicalPose>> selected_per_frame,
                               int method_keypoint_count) {
  int mdet = 0;
  long long mkp = 0;
  for (const auto& sel : selected_per_frame) {
    if (!sel) ++mdet;
    else mkp += missing_keypoints(*sel);
  }
  return missing_data(static_cast<int>(selected_per_frame.size()), method_keypoint_count, mdet, mkp);
}

}  // namespace kpeval
