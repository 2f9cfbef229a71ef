#include <doctest.h>

#include <cmath>
#include <numeric>

#include "builders.hpp"
#include "kpeval/errors.hpp"
#include "kpeval/metrics.hpp"

using namespace kpeval;

namespace {

constexpr double kInvE = 0.36787944117144233;    // e^-1
constexpr double kInvE4 = 0.018315638888734179;  // e^-4

GroundTruthPose box_gt(double w, double h) {
  GroundTruthPose gt;
  gt[KeypointId::Nose] = Keypoint2D::at(0, 0);
  gt[KeypointId::LAnkle] = Keypoint2D::at(w, h);
  return gt;
}

FrameMatching single(std::optional<double> score, std::optional<double> oks) {
  return FrameMatching{"s", "f0", 1, {ScoredDetection{score, 0, oks}}};
}

}  // namespace

TEST_CASE("keypoint similarity") {
  CHECK(keypoint_similarity(0.0, 50.0, 0.1) == 1.0);
  const double s = 80.0, c = 0.07;
  CHECK(keypoint_similarity(s * c * std::sqrt(2.0), s, c) == doctest::Approx(kInvE).epsilon(1e-14));
  CHECK(keypoint_similarity(2 * s * c * std::sqrt(2.0), s, c) == doctest::Approx(kInvE4).epsilon(1e-13));
  CHECK_THROWS_AS(keypoint_similarity(1.0, 0.0, 0.1), Error);
  CHECK_THROWS_AS(keypoint_similarity(-1.0, 1.0, 0.1), Error);
}

TEST_CASE("object scale") {
  CHECK(bbox_scale(box_gt(100, 100)) == 100.0);
  CHECK(bbox_scale(box_gt(25, 400)) == 100.0);
  GroundTruthPose one;
  one[KeypointId::Nose] = Keypoint2D::at(3, 3);
  try {
    bbox_scale(one);
    FAIL("expected DegenerateScale");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::DegenerateScale);
  }
}

TEST_CASE("OKS hand cases") {
  const auto sigma = SigmaTable::coco_default();
  const auto gt = test::figure();
  CHECK(oks(test::as_detection(gt), gt, sigma).oks == 1.0);

  const double s = bbox_scale(gt);
  auto det = test::as_detection(gt);
  for (std::size_t k = 0; k < kNumKeypoints; ++k) det.keypoints[k].x += s * sigma.kappa(keypoint_at(k)) * std::sqrt(2.0);
  const auto r = oks(det, gt, sigma);
  CHECK(r.k_used == 17);
  CHECK(r.oks == doctest::Approx(kInvE).epsilon(1e-13));

  CanonicalPose empty;
  try {
    oks(empty, gt, sigma);
    FAIL("expected NoCommonKeypoints");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::NoCommonKeypoints);
  }
  CHECK_FALSE(try_oks(empty, gt, sigma).has_value());
}

TEST_CASE("OKS ignores keypoints absent from the ground truth") {
  const auto sigma = SigmaTable::coco_default();
  auto gt = test::figure();
  auto det = test::as_detection(gt);
  gt[KeypointId::Nose] = Keypoint2D::absent();
  det[KeypointId::Nose].x += 500;
  const auto r = oks(det, gt, sigma);
  CHECK(r.k_used == 16);
  CHECK(r.oks == 1.0);
}

TEST_CASE("AP/AR for one detection at OKS 0.93") {
  const std::vector<FrameMatching> frames{single(0.8, 0.93)};
  const auto r = ap_ar(frames);
  CHECK(r.ap == 90.0);
  CHECK(r.ar == 90.0);
  REQUIRE(r.per_threshold.size() == 10);
  CHECK(r.per_threshold[8].recall == 1.0);
  CHECK(r.per_threshold[9].recall == 0.0);
}

TEST_CASE("AP/AR trivial cases") {
  CHECK(ap_ar(std::vector{single(0.5, 1.0)}).ap == 100.0);
  CHECK(ap_ar(std::vector{single(0.5, 1.0)}).ar == 100.0);
  const std::vector<FrameMatching> none{FrameMatching{"s", "f0", 1, {}}, FrameMatching{"s", "f1", 1, {}}};
  CHECK(ap_ar(none).ap == 0.0);
  CHECK(ap_ar(none).ar == 0.0);
}

TEST_CASE("OKS exactly at a threshold does not pass it") {
  const auto r = ap_ar(std::vector{single(0.5, 0.75)});
  CHECK(r.ar == 50.0);
}

TEST_CASE("a false positive ranked above the true positive costs precision") {
  const std::vector<FrameMatching> frames{
      FrameMatching{"s", "f0", 1, {ScoredDetection{0.9, 0, std::nullopt}, ScoredDetection{0.1, 1, 1.0}}}};
  const auto r = ap_ar(frames);
  CHECK(r.ar == 100.0);
  // precision 0.5 at every recall level
  CHECK(r.ap == doctest::Approx(50.0).epsilon(1e-12));
}

TEST_CASE("Neck-MidHip length") {
  GroundTruthPose gt;
  gt[KeypointId::LShoulder] = Keypoint2D::at(-10, 0);
  gt[KeypointId::RShoulder] = Keypoint2D::at(10, 0);
  gt[KeypointId::LHip] = Keypoint2D::at(-5, 100);
  gt[KeypointId::RHip] = Keypoint2D::at(5, 100);
  CHECK(nmh_length_image(gt) == 100.0);

  GroundTruthPose square;
  square[KeypointId::LShoulder] = Keypoint2D::at(0, 0);
  square[KeypointId::RShoulder] = Keypoint2D::at(6, 0);
  square[KeypointId::LHip] = Keypoint2D::at(0, 8);
  square[KeypointId::RHip] = Keypoint2D::at(6, 8);
  CHECK(nmh_length_image(square) == 8.0);

  gt[KeypointId::RHip] = Keypoint2D::absent();
  CHECK_FALSE(nmh_length_image(gt).has_value());
}

TEST_CASE("sequence normalizer is the median length") {
  auto with_lengths = [](std::vector<double> lengths) {
    SequenceDataset ds;
    for (std::size_t i = 0; i < lengths.size(); ++i) {
      GroundTruthPose gt;
      gt[KeypointId::LShoulder] = Keypoint2D::at(0, 0);
      gt[KeypointId::RShoulder] = Keypoint2D::at(0, 0);
      gt[KeypointId::LHip] = Keypoint2D::at(0, lengths[i]);
      gt[KeypointId::RHip] = Keypoint2D::at(0, lengths[i]);
      ds.frames.push_back(FrameRecord{"f" + std::to_string(i), {}, {}, {gt}, {}});
    }
    return ds;
  };
  CHECK(nmh_length_sequence(with_lengths({100})) == 100.0);
  CHECK(nmh_length_sequence(with_lengths({90, 100, 110})) == 100.0);
  CHECK(nmh_length_sequence(with_lengths({90, 100, 104, 110})) == 102.0);

  SequenceDataset none;
  none.frames.push_back(FrameRecord{"f0", {}, {}, {GroundTruthPose{}}, {}});
  try {
    nmh_length_sequence(none);
    FAIL("expected NoNormalizer");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::NoNormalizer);
  }
}

TEST_CASE("Neck-MidHip errors") {
  const auto gt = test::figure();
  const auto zero = nmh_errors(test::as_detection(gt), gt, 100.0);
  for (const auto& e : zero.error) CHECK(e == 0.0);

  auto det = test::as_detection(gt);
  det[KeypointId::LKnee].x += 8.0;
  det[KeypointId::Nose] = Keypoint2D::absent();
  const auto r = nmh_errors(det, gt, 100.0);
  CHECK(r.error[index_of(KeypointId::LKnee)] == 0.08);
  CHECK_FALSE(r.error[index_of(KeypointId::Nose)].has_value());
  CHECK(r.error[index_of(KeypointId::RKnee)] == 0.0);
  CHECK_THROWS_AS(nmh_errors(det, gt, 0.0), Error);
}

TEST_CASE("missing data") {
  const auto r = missing_data(100, 17, 2, 10);
  CHECK(r.percent == doctest::Approx(100.0 * 44.0 / 1700.0).epsilon(1e-15));
  CHECK(r.percent == doctest::Approx(2.588235294117647).epsilon(1e-15));
  CHECK(r.detection_part() + r.keypoint_part() == doctest::Approx(r.percent));
  CHECK(missing_data(100, 17, 0, 0).percent == 0.0);
  CHECK(missing_data(100, 17, 100, 0).percent == 100.0);
  CHECK_THROWS_AS(missing_data(0, 17, 0, 0), Error);
  CHECK_THROWS_AS(missing_data(10, 0, 0, 0), Error);

  auto partial = test::as_detection(test::figure());
  partial.native_missing = 3;
  const std::vector<std::optional<CanonicalPose>> sel{partial, std::nullopt, test::as_detection(test::figure())};
  const auto s = missing_data(sel, 17);
  CHECK(s.missing_detections == 1);
  CHECK(s.missing_keypoints == 3);
  CHECK(s.percent == doctest::Approx(100.0 * 20.0 / 51.0));
}

TEST_CASE("CPE") {
  CHECK(cpe(6.0, 0.3).cpe == doctest::Approx(0.937).epsilon(1e-12));
  CHECK(cpe(25.5, 54.3).cpe == doctest::Approx(0.245).epsilon(1e-12));
  CHECK(cpe(0.0, 0.0).cpe == 1.0);
  CHECK(cpe(99.6, 0.0).cpe == 0.5);
  CHECK(cpe(500.0, 500.0).cpe == 0.0);
  CHECK(cpe(10.0, 10.0, 1.0).cpe == doctest::Approx(0.9));
}

TEST_CASE("detection score policies") {
  CanonicalPose p;
  p[KeypointId::Nose] = Keypoint2D::at(0, 0, 0.2);
  p[KeypointId::LEye] = Keypoint2D::at(0, 0, 0.6);
  p[KeypointId::REye] = Keypoint2D::at(0, 0, 1.0);
  p.score = 0.33;
  p.box_score = 0.77;
  CHECK(detection_score(p, ScorePolicy::MedianOfConfidences) == 0.6);
  CHECK(detection_score(p, ScorePolicy::NativeScore) == 0.33);
  CHECK(detection_score(p, ScorePolicy::DetectorBoxScore) == 0.77);
  CHECK_FALSE(detection_score(p, ScorePolicy::NoScore).has_value());

  CanonicalPose two;
  two[KeypointId::Nose] = Keypoint2D::at(0, 0, 0.2);
  two[KeypointId::LEye] = Keypoint2D::at(0, 0, 0.8);
  CHECK(*detection_score(two, ScorePolicy::MedianOfConfidences) == doctest::Approx(0.5).epsilon(1e-15));
}

TEST_CASE("Spearman") {
  const std::vector<double> x{1, 2, 3, 4, 5, 6};
  const std::vector<double> up{2, 4, 8, 16, 32, 64};
  const std::vector<double> down{60, 50, 40, 30, 20, 10};
  CHECK(spearman(x, up).rho == 1.0);
  CHECK(spearman(x, up).p == 0.0);
  CHECK(spearman(x, down).rho == -1.0);
  CHECK(spearman(x, up).n == 6);

  const std::vector<double> ties{1, 1, 2, 2};
  const std::vector<double> t2{1, 2, 3, 4};
  CHECK(spearman(ties, t2).rho == doctest::Approx(2.0 / std::sqrt(5.0)).epsilon(1e-14));

  const std::vector<double> two{1, 2};
  CHECK_THROWS_AS(spearman(two, two), Error);
  const std::vector<double> flat{3, 3, 3, 3};
  try {
    spearman(flat, t2);
    FAIL("expected ZeroVariance");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::ZeroVariance);
  }
}

TEST_CASE("ICC") {
  const std::vector<double> a{1.0, 3.5, 2.0, 8.0, 5.5};
  std::vector<double> b = a;
  CHECK(icc(a, b) == 1.0);
  for (auto& v : b) v += 4.25;
  CHECK(icc(a, b) == doctest::Approx(1.0).epsilon(1e-15));

  // hand ANOVA: a = {1,2,3}, b = {2,2,4}
  const std::vector<double> p{1, 2, 3}, q{2, 2, 4};
  const double grand = 14.0 / 6.0;
  const double row_means[3] = {1.5, 2.0, 3.5};
  const double col_means[2] = {2.0, 8.0 / 3.0};
  double ss_rows = 0, ss_cols = 0, ss_total = 0;
  for (double m : row_means) ss_rows += 2 * (m - grand) * (m - grand);
  for (double m : col_means) ss_cols += 3 * (m - grand) * (m - grand);
  for (double v : {1.0, 2.0, 3.0, 2.0, 2.0, 4.0}) ss_total += (v - grand) * (v - grand);
  const double ms_rows = ss_rows / 2, ms_err = (ss_total - ss_rows - ss_cols) / 2;
  CHECK(icc(p, q) == doctest::Approx((ms_rows - ms_err) / (ms_rows + ms_err)).epsilon(1e-14));
}
