#include "kpeval/pipeline.hpp"

#include "kpeval/errors.hpp"

namespace kpeval {

SequenceEvaluation evaluate_sequence(const SequenceDataset& dataset, const std::string& method_name,
                                     int method_keypoint_count, const EvalOptions& options) {
  SequenceEvaluation out;
  out.method_name = method_name;
  out.sequence_id = dataset.sequence_id;
  out.expected_persons = dataset.expected_persons;
  out.method_keypoint_count = method_keypoint_count;
  out.normalization = options.normalization.value_or(dataset.normalization);

  auto warn = [&](std::string code, std::string message, const std::string& frame_id = {}) {
    out.warnings.push_back({std::move(code), method_name + ": " + std::move(message), dataset.sequence_id, frame_id});
  };

  if (out.normalization == NormalizationMode::PerSequenceMedian) {
    try {
      out.sequence_normalizer =
          nmh_length_sequence(dataset, options.scope == EvalScope::Infant ? Role::Infant : Role::Unknown);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::NoNormalizer) throw;
      warn("no_normalizer", "no Neck-MidHip length in the sequence; Neck-MidHip errors skipped");
    }
  }

  out.frames.reserve(dataset.frames.size());
  for (const auto& frame : dataset.frames) {
    FrameEvaluation fe;
    fe.frame_id = frame.frame_id;
    fe.detections = static_cast<int>(frame.detections.size());
    const auto assignment = assign_to_ground_truths(frame, options.sigma, options.scope);
    fe.matching = to_frame_matching(frame, assignment, dataset.sequence_id);
    fe.matched_pairs = static_cast<int>(assignment.pairs.size());

    for (std::size_t g = 0; g < frame.ground_truths.size(); ++g) {
      const auto& gt = frame.ground_truths[g];
      if (!in_scope(gt, options.scope)) continue;
      TargetEvaluation t;
      t.ground_truth = g;
      t.selected = select_detection_index(frame, options.selection, &gt);
      if (t.selected) {
        const auto& det = frame.detections[*t.selected];
        t.missing_keypoints = missing_keypoints(det);
        t.score = det.score;
        try {
          t.oks = oks(det, gt, options.sigma).oks;
        } catch (const Error& e) {
          if (e.code() == ErrorCode::DegenerateScale) warn("degenerate_scale", e.what(), frame.frame_id);
          else if (e.code() == ErrorCode::NoCommonKeypoints) warn("no_common_keypoints", e.what(), frame.frame_id);
          else throw;
        }
        std::optional<double> normalizer = out.sequence_normalizer;
        auto source = NormalizerSource::SequenceMedian;
        if (out.normalization == NormalizationMode::PerImage) {
          normalizer = nmh_length_image(gt);
          source = NormalizerSource::ThisImage;
          if (!normalizer) warn("no_normalizer", "ground truth without Neck or MidHip", frame.frame_id);
        }
        if (normalizer && *normalizer > 0.0) t.nmh = nmh_errors(det, gt, *normalizer, source).error;
        else if (normalizer) warn("degenerate_scale", "zero Neck-MidHip length", frame.frame_id);
      }
      fe.targets.push_back(t);
    }
    out.frames.push_back(std::move(fe));
  }
  return out;
}

}  // namespace kpeval
