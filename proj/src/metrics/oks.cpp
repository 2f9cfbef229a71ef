#include <algorithm>
#include <cmath>
#include <limits>

#include "kpeval/errors.hpp"
#include "kpeval/metrics.hpp"

namespace kpeval {

double keypoint_similarity(double d, double s, double c) {
  if (!(s > 0.0)) throw Error(ErrorCode::DegenerateScale, "object scale must be positive");
  if (!(c > 0.0)) throw Error(ErrorCode::InvalidArgument, "keypoint coefficient must be positive");
  if (!(d >= 0.0)) throw Error(ErrorCode::InvalidArgument, "distance must be non-negative");
  return std::exp(-(d * d) / (2.0 * s * s * c * c));
}

double bbox_scale(const GroundTruthPose& gt) {
  double min_x = std::numeric_limits<double>::infinity(), max_x = -min_x;
  double min_y = min_x, max_y = -min_x;
  int n = 0;
  for (const auto& k : gt.keypoints) {
    if (!k.present) continue;
    ++n;
    min_x = std::min(min_x, k.x);
    max_x = std::max(max_x, k.x);
    min_y = std::min(min_y, k.y);
    max_y = std::max(max_y, k.y);
  }
  if (n < 2) throw Error(ErrorCode::DegenerateScale, "ground truth needs at least two keypoints for a box");
  const double area = (max_x - min_x) * (max_y - min_y);
  if (!(area > 0.0)) throw Error(ErrorCode::DegenerateScale, "ground-truth box has zero extent");
  return std::sqrt(area);
}

OksBreakdown oks(const CanonicalPose& det, const GroundTruthPose& gt, const SigmaTable& sigma) {
  OksBreakdown out;
  out.scale = bbox_scale(gt);
  double sum = 0.0;
  for (std::size_t i = 0; i < kNumKeypoints; ++i) {
    const auto& d = det.keypoints[i];
    const auto& g = gt.keypoints[i];
    if (!d.present || !g.present) continue;
    const double ks = keypoint_similarity(distance(d, g), out.scale, sigma.kappa(keypoint_at(i)));
    out.ks[i] = ks;
    sum += ks;
    ++out.k_used;
  }
  if (out.k_used == 0) throw Error(ErrorCode::NoCommonKeypoints, "detection and ground truth share no keypoint");
  out.oks = sum / out.k_used;
  return out;
}

std::optional<double> try_oks(const CanonicalPose& det, const GroundTruthPose& gt, const SigmaTable& sigma) noexcept {
  try {
    return oks(det, gt, sigma).oks;
  } catch (const Error&) {
    return std::nullopt;
  }
}

}  // namespace kpeval
