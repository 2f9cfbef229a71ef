#pragma once

// Slow, direct re-derivations of the metric definitions used as references
// by the test suites. Nothing here includes or links the kpeval library.

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace oracle {

struct InstanceTooLarge : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Point {
  double x = 0.0;
  double y = 0.0;
  bool present = false;
};

using Pose = std::vector<Point>;  // 17 entries, COCO order

/// COCO sigmas in COCO order.
std::vector<double> coco_sigmas();

/// Eq. 1 term by term. nullopt when no keypoint is shared or the box is
/// degenerate.
std::optional<double> oks(const Pose& det, const Pose& gt, const std::vector<double>& sigmas);

struct Detection {
  std::optional<double> score;
  int rank = 0;
  Pose keypoints;
};

struct Frame {
  std::string sequence_id;
  std::string frame_id;
  std::vector<Pose> ground_truths;
  std::vector<Detection> detections;
};

struct ApAr {
  double ap = 0.0;
  double ar = 0.0;
};

/// At most 10 frames with at most 5 detections each.
ApAr ap_ar(const std::vector<Frame>& frames, const std::vector<double>& sigmas);

struct Correlation {
  double rho = 0.0;
  double p = 0.0;
};

/// Explicit O(n^2) mid-ranks then Pearson; n <= 50. p uses a numerically
/// integrated Student t tail.
Correlation spearman(const std::vector<double>& xs, const std::vector<double>& ys);

/// ICC(3,1) from the explicit two-way ANOVA table; n <= 50.
double icc(const std::vector<double>& a, const std::vector<double>& b);

}  // namespace oracle
