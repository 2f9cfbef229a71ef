#include <doctest.h>

#include "instances.hpp"
#include "kpeval/errors.hpp"

using namespace kpeval;

TEST_CASE("oracle trivial cases") {
  const auto gt = test::figure();
  const auto sig = oracle::coco_sigmas();
  CHECK(oracle::oks(test::to_oracle(gt.keypoints), test::to_oracle(gt.keypoints), sig) == 1.0);
  CHECK(sig == test::sigma_values(SigmaTable::coco_default()));

  const std::vector<double> xs{1, 2, 3, 4, 5};
  const std::vector<double> rev{5, 4, 3, 2, 1};
  CHECK(oracle::spearman(xs, rev).rho == -1.0);
  CHECK(oracle::icc(xs, xs) == 1.0);
}

TEST_CASE("oracle AP for one detection at OKS 0.93") {
  // every keypoint at the same kernel value gives that value as OKS
  const auto gt = test::figure();
  const auto sigma = SigmaTable::coco_default();
  const double s = bbox_scale(gt);
  auto det = test::as_detection(gt, 0.7);
  for (std::size_t k = 0; k < kNumKeypoints; ++k)
    det.keypoints[k].x += s * sigma.kappa(keypoint_at(k)) * std::sqrt(-2.0 * std::log(0.93));
  CHECK(oks(det, gt, sigma).oks == doctest::Approx(0.93).epsilon(1e-12));

  oracle::Frame f{"s", "f0", {test::to_oracle(gt.keypoints)}, {{0.7, 0, test::to_oracle(det.keypoints)}}};
  const auto o = oracle::ap_ar({f}, oracle::coco_sigmas());
  CHECK(o.ap == 90.0);
  CHECK(o.ar == 90.0);

  FrameRecord fr{"f0", {}, {}, {gt}, {det}};
  const auto m = test::main_path_ap_ar({fr}, sigma);
  CHECK(m.ap == 90.0);
  CHECK(m.ar == 90.0);
}

TEST_CASE("oracles refuse large instances") {
  std::vector<oracle::Frame> frames(11);
  CHECK_THROWS_AS(oracle::ap_ar(frames, oracle::coco_sigmas()), oracle::InstanceTooLarge);
  const std::vector<double> big(51, 1.0);
  CHECK_THROWS_AS(oracle::spearman(big, big), oracle::InstanceTooLarge);
  CHECK_THROWS_AS(oracle::icc(big, big), oracle::InstanceTooLarge);
}

TEST_CASE("OKS agrees with the oracle on random instances") {
  test::Rng rng(2024);
  for (int i = 0; i < 200; ++i) {
    const auto sigma = rng.chance(0.5) ? SigmaTable::coco_default() : test::random_sigma(rng);
    const auto gt = test::random_ground_truth(rng);
    const auto det = test::random_detection(gt, rng.uniform(0, 60), 0.2, rng);
    const auto mine = try_oks(det, gt, sigma);
    const auto ref = oracle::oks(test::to_oracle(det.keypoints), test::to_oracle(gt.keypoints), test::sigma_values(sigma));
    REQUIRE(mine.has_value() == ref.has_value());
    if (mine) CHECK(std::abs(*mine - *ref) <= 1e-12);
  }
}

TEST_CASE("OKS properties") {
  test::Rng rng(99);
  const auto sigma = SigmaTable::coco_default();
  for (int i = 0; i < 100; ++i) {
    const auto gt = test::random_ground_truth(rng);
    auto det = test::random_detection(gt, rng.uniform(0, 80), 0.0, rng);
    const double base = oks(det, gt, sigma).oks;
    CHECK(base >= 0.0);
    CHECK(base <= 1.0);

    // moving one keypoint further away never raises OKS
    const auto k = static_cast<std::size_t>(rng.integer(0, 16));
    if (gt.keypoints[k].present) {
      auto farther = det;
      farther.keypoints[k].x += (det.keypoints[k].x >= gt.keypoints[k].x ? 1.0 : -1.0) * rng.uniform(1, 20);
      CHECK(oks(farther, gt, sigma).oks <= base);
    }

    // translating both poses by the same offset leaves OKS unchanged
    const double tx = rng.uniform(-1000, 1000), ty = rng.uniform(-1000, 1000);
    auto gt2 = gt;
    auto det2 = det;
    for (auto& p : gt2.keypoints) p.x += tx, p.y += ty;
    for (auto& p : det2.keypoints) p.x += tx, p.y += ty;
    CHECK(std::abs(oks(det2, gt2, sigma).oks - base) <= 1e-12);
  }
}

TEST_CASE("AP/AR agrees with the oracle on random instances") {
  test::Rng rng(7);
  const auto sigma = SigmaTable::coco_default();
  for (int i = 0; i < 50; ++i) {
    const auto inst = test::random_matching_instance(rng);
    const auto mine = test::main_path_ap_ar(inst.frames, sigma);
    const auto ref = oracle::ap_ar(inst.oracle_frames, oracle::coco_sigmas());
    CHECK(mine.ap == ref.ap);
    CHECK(mine.ar == ref.ar);
  }
}

TEST_CASE("Spearman and ICC agree with the oracles") {
  test::Rng rng(5);
  for (int i = 0; i < 50; ++i) {
    const int n = rng.integer(3, 50);
    const auto [xs, ys] = test::random_pairs(rng, n, rng.chance(0.3));
    try {
      const auto mine = spearman(xs, ys);
      const auto ref = oracle::spearman(xs, ys);
      CHECK(std::abs(mine.rho - ref.rho) <= 1e-10);
      CHECK(std::abs(mine.p - ref.p) <= 1e-10);
      CHECK(std::abs(icc(xs, ys) - oracle::icc(xs, ys)) <= 1e-10);
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::ZeroVariance);
    }
  }
}
