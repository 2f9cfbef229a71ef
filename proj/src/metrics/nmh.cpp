#include "kpeval/errors.hpp"
#include "kpeval/metrics.hpp"
#include "kpeval/stats.hpp"

namespace kpeval {

std::optional<double> nmh_length_image(const GroundTruthPose& target) {
  const auto v = derive_virtual_points(target);
  if (!v.neck.present || !v.midhip.present) return std::nullopt;
  return distance(v.neck, v.midhip);
}

double nmh_length_sequence(const SequenceDataset& dataset, Role role) {
  std::vector<double> lengths;
  for (const auto& frame : dataset.frames) {
    for (const auto& gt : frame.ground_truths) {
      if (role != Role::Unknown && gt.role != role) continue;
      if (const auto len = nmh_length_image(gt)) lengths.push_back(*len);
    }
  }
  const auto med = median(std::move(lengths));
  if (!med) throw Error(ErrorCode::NoNormalizer, "sequence '" + dataset.sequence_id + "' has no frame with both Neck and MidHip");
  return *med;
}

NmhError nmh_errors(const CanonicalPose& det, const GroundTruthPose& gt, double normalizer, NormalizerSource source) {
  if (!(normalizer > 0.0)) throw Error(ErrorCode::DegenerateScale, "Neck-MidHip normalizer must be positive");
  NmhError out;
  out.normalizer = normalizer;
  out.source = source;
  for (std::size_t i = 0; i < kNumKeypoints; ++i) {
    if (det.keypoints[i].present && gt.keypoints[i].present)
      out.error[i] = distance(det.keypoints[i], gt.keypoints[i]) / normalizer;
  }
  return out;
}

}  // namespace kpeval
