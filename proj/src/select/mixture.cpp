#include <algorithm>

#include "kpeval/select.hpp"

namespace kpeval {

namespace {

// Mean as offset from the smallest value, summed in sorted order: exact on
// identical inputs and independent of input order.
double stable_mean(std::vector<double>& v) {
  std::sort(v.begin(), v.end());
  double offset = 0.0;
  for (double x : v) offset += x - v.front();
  return v.front() + offset / static_cast<double>(v.size());
}

}  // namespace

std::optional<CanonicalPose> mixture_average(std::span<const std::optional<CanonicalPose>> selected) {
  CanonicalPose out;
  bool any = false;
  std::vector<double> xs, ys;
  for (std::size_t k = 0; k < kNumKeypoints; ++k) {
    xs.clear();
    ys.clear();
    for (const auto& pose : selected) {
      if (!pose || !pose->keypoints[k].present) continue;
      xs.push_back(pose->keypoints[k].x);
      ys.push_back(pose->keypoints[k].y);
    }
    if (xs.empty()) continue;
    out.keypoints[k] = Keypoint2D::at(stable_mean(xs), stable_mean(ys));
    any = true;
  }
  if (!any) return std::nullopt;
  return out;
}

}  // namespace kpeval
