#include <algorithm>
#include <numeric>

#include "kpeval/select.hpp"

namespace kpeval {

Assignment assign_to_ground_truths(const FrameRecord& frame, const SigmaTable& sigma, EvalScope scope) {
  Assignment out;
  std::vector<std::size_t> free_gts, excluded;
  for (std::size_t g = 0; g < frame.ground_truths.size(); ++g)
    (in_scope(frame.ground_truths[g], scope) ? free_gts : excluded).push_back(g);
  out.ground_truths = static_cast<int>(free_gts.size());

  std::vector<std::size_t> order(frame.detections.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    const auto& da = frame.detections[a];
    const auto& db = frame.detections[b];
    if (da.score.has_value() != db.score.has_value()) return da.score.has_value();
    if (da.score && *da.score != *db.score) return *da.score > *db.score;
    return da.rank < db.rank;
  });

  for (std::size_t d : order) {
    std::optional<std::size_t> best_slot;
    double best_oks = 0.0;
    for (std::size_t slot = 0; slot < free_gts.size(); ++slot) {
      const auto o = try_oks(frame.detections[d], frame.ground_truths[free_gts[slot]], sigma);
      if (!o) continue;
      if (!best_slot || *o > best_oks) {
        best_slot = slot;
        best_oks = *o;
      }
    }
    // a detection that fits an excluded person better is that person's
    bool elsewhere = false;
    for (std::size_t g : excluded) {
      const auto o = try_oks(frame.detections[d], frame.ground_truths[g], sigma);
      elsewhere = elsewhere || (o && (!best_slot || *o > best_oks));
    }
    if (!best_slot || elsewhere) {
      out.unmatched_detections.push_back(d);
      continue;
    }
    out.pairs.push_back({d, free_gts[*best_slot], best_oks});
    free_gts.erase(free_gts.begin() + static_cast<std::ptrdiff_t>(*best_slot));
  }
  out.unmatched_ground_truths = std::move(free_gts);
  std::sort(out.unmatched_detections.begin(), out.unmatched_detections.end());
  return out;
}

FrameMatching to_frame_matching(const FrameRecord& frame, const Assignment& assignment, std::string_view sequence_id) {
  FrameMatching m;
  m.sequence_id = std::string(sequence_id);
  m.frame_id = frame.frame_id;
  m.ground_truths = assignment.ground_truths;
  m.detections.reserve(frame.detections.size());
  for (const auto& det : frame.detections) m.detections.push_back({det.score, det.rank, std::nullopt});
  for (const auto& p : assignment.pairs) m.detections[p.detection].matched_oks = p.oks;
  return m;
}

}  // namespace kpeval
