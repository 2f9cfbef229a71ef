#include "kpeval/metrics.hpp"
#include "kpeval/stats.hpp"

namespace kpeval {

std::optional<double> detection_score(const CanonicalPose& det, ScorePolicy policy) {
  switch (policy) {
    case ScorePolicy::NativeScore: return det.score;
    case ScorePolicy::DetectorBoxScore: return det.box_score;
    case ScorePolicy::NoScore: return std::nullopt;
    case ScorePolicy::MedianOfConfidences: {
      std::vector<double> conf;
      for (const auto& k : det.keypoints)
        if (k.present && k.confidence) conf.push_back(*k.confidence);
      return median(std::move(conf));
    }
  }
  return std::nullopt;
}

}  // namespace kpeval
