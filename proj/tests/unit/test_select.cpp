#include <doctest.h>

#include <limits>

#include "builders.hpp"
#include "kpeval/select.hpp"

using namespace kpeval;

namespace {

FrameRecord frame_with(std::vector<CanonicalPose> dets, std::vector<GroundTruthPose> gts = {test::figure()}) {
  FrameRecord f;
  f.frame_id = "f0";
  f.ground_truths = std::move(gts);
  f.detections = std::move(dets);
  return f;
}

}  // namespace

TEST_CASE("a single detection is chosen by every strategy") {
  const auto f = frame_with({test::shifted(test::figure(), 3, 0, 0.5)});
  for (auto s : {SelectionStrategy::FirstRank, SelectionStrategy::HighestScore, SelectionStrategy::OracleBest})
    CHECK(select_detection_index(f, s, &f.ground_truths[0]) == 0u);
  CHECK_FALSE(select_detection_index(frame_with({}), SelectionStrategy::FirstRank, nullptr).has_value());
}

TEST_CASE("highest score wins regardless of rank") {
  const auto f = frame_with({test::shifted(test::figure(), 0, 0, 0.4, 0), test::shifted(test::figure(), 9, 0, 0.9, 1)});
  CHECK(select_detection_index(f, SelectionStrategy::HighestScore, nullptr) == 1u);
  CHECK(select_detection(f, SelectionStrategy::HighestScore)->score == 0.9);
}

TEST_CASE("oracle picks the closest detection, first rank picks rank 0") {
  const auto gt = test::figure();
  const auto f = frame_with({test::shifted(gt, 20, 0, std::nullopt, 0), test::shifted(gt, 2, 1, std::nullopt, 1)});
  // brute force the mean distances
  const double d0 = *mean_keypoint_distance(f.detections[0], gt);
  const double d1 = *mean_keypoint_distance(f.detections[1], gt);
  CHECK(d0 == doctest::Approx(20.0));
  CHECK(d1 < d0);
  CHECK(select_detection_index(f, SelectionStrategy::OracleBest, &gt) == 1u);
  CHECK(select_detection_index(f, SelectionStrategy::FirstRank, &gt) == 0u);
}

TEST_CASE("score ties and missing scores fall back to rank") {
  const auto gt = test::figure();
  CHECK(select_detection_index(frame_with({test::shifted(gt, 0, 0, 0.7, 0), test::shifted(gt, 1, 0, 0.7, 1)}),
                               SelectionStrategy::HighestScore, nullptr) == 0u);
  CHECK(select_detection_index(frame_with({test::shifted(gt, 0, 0, std::nullopt, 0), test::shifted(gt, 1, 0, std::nullopt, 1)}),
                               SelectionStrategy::HighestScore, nullptr) == 0u);
}

TEST_CASE("redundancy worked examples") {
  std::vector<int> counts(100, 1);
  for (int i = 0; i < 50; ++i) counts[static_cast<std::size_t>(i)] = 2;

  const auto plus = redundancy(counts, 1);
  CHECK(plus.provided == 150);
  CHECK(plus.expected == 100);
  CHECK(plus.redundant_percent == 50.0);
  CHECK_FALSE(plus.multi_person_caveat);

  const auto minus = redundancy(counts, 2);
  CHECK(minus.expected == 200);
  CHECK(minus.redundant_percent == -50.0);
  CHECK(minus.multi_person_caveat);

  const std::vector<int> exact(40, 1);
  CHECK(redundancy(exact, 1).redundant_percent == 0.0);

  const std::vector<int> none(5, 0);
  CHECK_FALSE(redundancy(none, 1).redundant_percent.has_value());
}

TEST_CASE("undetected frames do not count towards expected") {
  const std::vector<int> counts{1, 0, 0, 3};
  const auto r = redundancy(counts, 1);
  CHECK(r.frames_with_detection == 2);
  CHECK(r.expected == 2);
  CHECK(r.redundant_percent == 100.0);
}

TEST_CASE("assignment") {
  const auto sigma = SigmaTable::coco_default();
  const auto gt = test::figure();

  SUBCASE("one detection, one ground truth") {
    const auto a = assign_to_ground_truths(frame_with({test::shifted(gt, 1, 1, 0.5)}), sigma);
    REQUIRE(a.pairs.size() == 1);
    CHECK(a.pairs[0].detection == 0);
    CHECK(a.pairs[0].ground_truth == 0);
    CHECK(a.ground_truths == 1);
    CHECK(a.unmatched_detections.empty());
  }
  SUBCASE("two detections compete for one ground truth") {
    const auto f = frame_with({test::shifted(gt, 15, 0, 0.3, 0), test::shifted(gt, 1, 0, 0.8, 1)});
    const auto a = assign_to_ground_truths(f, sigma);
    REQUIRE(a.pairs.size() == 1);
    CHECK(a.pairs[0].detection == 1);
    CHECK(a.unmatched_detections == std::vector<std::size_t>{0});
    // brute force: the matched detection has the higher OKS
    CHECK(a.pairs[0].oks > *try_oks(f.detections[0], gt, sigma));
  }
  SUBCASE("adult-only detection in infant scope") {
    const auto adult = test::figure(600, 50, Role::Adult);
    const auto f = frame_with({test::shifted(adult, 1, 0, 0.9)}, {gt, adult});
    const auto a = assign_to_ground_truths(f, sigma, EvalScope::Infant);
    CHECK(a.pairs.empty());
    CHECK(a.unmatched_detections == std::vector<std::size_t>{0});
    CHECK(a.unmatched_ground_truths == std::vector<std::size_t>{0});
    CHECK(a.ground_truths == 1);

    const auto all = assign_to_ground_truths(f, sigma, EvalScope::All);
    REQUIRE(all.pairs.size() == 1);
    CHECK(all.pairs[0].ground_truth == 1);
  }
}

TEST_CASE("mixture of experts") {
  const auto gt = test::figure();
  SUBCASE("agreeing methods") {
    const std::vector<std::optional<CanonicalPose>> sel(3, test::as_detection(gt, 0.9));
    const auto m = mixture_average(sel);
    REQUIRE(m.has_value());
    CHECK(m->keypoints == gt.keypoints);
    CHECK_FALSE(m->score.has_value());
  }
  SUBCASE("keypoint present in two of three") {
    CanonicalPose a, b, c;
    a[KeypointId::Nose] = Keypoint2D::at(0, 0);
    b[KeypointId::Nose] = Keypoint2D::at(2, 2);
    c[KeypointId::LEye] = Keypoint2D::at(7, 7);
    const std::vector<std::optional<CanonicalPose>> sel{a, b, c};
    const auto m = mixture_average(sel);
    CHECK((*m)[KeypointId::Nose] == Keypoint2D::at(1, 1));
    CHECK((*m)[KeypointId::LEye] == Keypoint2D::at(7, 7));
  }
  SUBCASE("nothing present") {
    const std::vector<std::optional<CanonicalPose>> sel{CanonicalPose{}, std::nullopt};
    const auto m = mixture_average(sel);
    if (m) CHECK(present_count(m->keypoints) == 0);
  }
}
