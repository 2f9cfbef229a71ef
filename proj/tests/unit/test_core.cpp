#include <doctest.h>

#include "builders.hpp"
#include "kpeval/errors.hpp"
#include "kpeval/schema.hpp"
#include "kpeval/sigma.hpp"
#include "kpeval/stats.hpp"

using namespace kpeval;

TEST_CASE("neck is the shoulder midpoint") {
  KeypointArray kp{};
  kp[index_of(KeypointId::LShoulder)] = Keypoint2D::at(0, 0);
  kp[index_of(KeypointId::RShoulder)] = Keypoint2D::at(10, 0);
  const auto v = derive_virtual_points(kp);
  REQUIRE(v.neck.present);
  CHECK(v.neck.x == 5.0);
  CHECK(v.neck.y == 0.0);
  CHECK_FALSE(v.midhip.present);

  kp[index_of(KeypointId::RShoulder)] = Keypoint2D::absent();
  CHECK_FALSE(derive_virtual_points(kp).neck.present);
}

TEST_CASE("midhip is the hip midpoint") {
  KeypointArray kp{};
  kp[index_of(KeypointId::LHip)] = Keypoint2D::at(4, 100);
  kp[index_of(KeypointId::RHip)] = Keypoint2D::at(8, 104);
  const auto v = derive_virtual_points(kp);
  REQUIRE(v.midhip.present);
  CHECK(v.midhip.x == 6.0);
  CHECK(v.midhip.y == 102.0);
}

TEST_CASE("keypoint names") {
  CHECK(keypoint_name(KeypointId::LShoulder) == "left_shoulder");
  CHECK(keypoint_from_name("left_shoulder") == KeypointId::LShoulder);
  CHECK(keypoint_from_name("LShoulder") == KeypointId::LShoulder);
  CHECK(keypoint_from_name("midhip") == KeypointId::MidHip);
  CHECK_FALSE(keypoint_from_name("tail").has_value());
  for (std::size_t k = 0; k < kNumKeypoints; ++k)
    CHECK(keypoint_from_name(keypoint_name(keypoint_at(k))) == keypoint_at(k));
}

TEST_CASE("identity schema maps every keypoint onto itself") {
  const auto gt = test::figure();
  RawDetection raw;
  raw.keypoints.assign(gt.keypoints.begin(), gt.keypoints.end());
  const auto pose = map_to_canonical(raw, SchemaMap::identity("m"));
  CHECK(pose.keypoints == gt.keypoints);
  CHECK(pose.native_missing == 0);
}

TEST_CASE("14-point layout leaves nose and ears absent") {
  const auto schema = *builtin_schema("deeplabcut14");
  std::vector<Keypoint2D> native(14);
  for (int i = 0; i < 14; ++i) native[static_cast<std::size_t>(i)] = Keypoint2D::at(i, 2 * i, 0.9);
  const auto pose = map_to_canonical(native, schema);
  CHECK_FALSE(pose[KeypointId::Nose].present);
  CHECK_FALSE(pose[KeypointId::LEar].present);
  CHECK_FALSE(pose[KeypointId::REar].present);
  CHECK(pose[KeypointId::RAnkle].present);
  CHECK(pose[KeypointId::RAnkle].x == 0.0);
  CHECK(pose[KeypointId::LWrist].x == 11.0);
  CHECK(pose.native_missing == 0);
}

TEST_CASE("composite entry averages its sources") {
  const auto schema = parse_schema_map(
      "native_count = 3\n"
      "composite left_hip = 1 2\n"
      "map 0 = nose\n");
  const std::vector<Keypoint2D> native{Keypoint2D::at(5, 5), Keypoint2D::at(0, 0), Keypoint2D::at(2, 2)};
  const auto pose = map_to_canonical(native, schema);
  CHECK(pose[KeypointId::LHip] == Keypoint2D::at(1, 1));

  const std::vector<Keypoint2D> partial{Keypoint2D::at(5, 5), Keypoint2D::at(0, 0), Keypoint2D::absent()};
  CHECK_FALSE(map_to_canonical(partial, schema)[KeypointId::LHip].present);
}

TEST_CASE("schema validation") {
  SUBCASE("virtual target") {
    CHECK_THROWS_AS(parse_schema_map("native_count = 2\nmap 0 = neck\n"), Error);
  }
  SUBCASE("index out of range") {
    try {
      parse_schema_map("native_count = 2\nmap 2 = nose\n");
      FAIL("expected InvalidIndex");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::InvalidIndex);
    }
  }
  SUBCASE("keypoint mapped twice") {
    try {
      parse_schema_map("native_count = 2\nmap 0 = nose\nmap 1 = nose\n");
      FAIL("expected SchemaMismatch");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::SchemaMismatch);
    }
  }
  SUBCASE("length mismatch") {
    const std::vector<Keypoint2D> native(16);
    try {
      map_to_canonical(native, *builtin_schema("coco17"));
      FAIL("expected SchemaMismatch");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::SchemaMismatch);
    }
  }
}

TEST_CASE("shipped schema files equal the builtins") {
  auto op = load_schema_map((test::fixture_dir() / "schemas" / "openpose18.txt").string());
  auto builtin = *builtin_schema("openpose18");
  CHECK(op.entries == builtin.entries);
  CHECK(op.native_count == builtin.native_count);
  CHECK(op.score_policy == builtin.score_policy);

  auto dlc = load_schema_map((test::fixture_dir() / "schemas" / "deeplabcut14.txt").string());
  CHECK(dlc.entries == builtin_schema("deeplabcut14")->entries);
}

TEST_CASE("sigma table") {
  const auto coco = SigmaTable::coco_default();
  CHECK(coco.sigma(KeypointId::Nose) == 0.026);
  CHECK(coco.kappa(KeypointId::Nose) == 0.052);
  CHECK(coco.hash().size() == 16);

  const auto shipped = load_sigma_table((test::config_dir() / "coco_sigmas.txt").string());
  CHECK(shipped.values() == coco.values());
  CHECK(shipped.hash() == coco.hash());

  const auto custom = parse_sigma_table("nose = 0.1\n");
  CHECK(custom.sigma(KeypointId::Nose) == 0.1);
  CHECK(custom.sigma(KeypointId::LHip) == coco.sigma(KeypointId::LHip));
  CHECK(custom.hash() != coco.hash());
  CHECK_THROWS_AS(parse_sigma_table("nose = -1\n"), Error);
}

TEST_CASE("median and sample stddev") {
  CHECK(median({100}) == 100.0);
  CHECK(median({110, 90, 100}) == 100.0);
  CHECK(median({90, 100, 104, 110}) == 102.0);
  CHECK_FALSE(median({}).has_value());

  const std::vector<double> v{2, 4, 4, 4, 5, 5, 7, 9};
  CHECK(mean(v) == 5.0);
  CHECK(*sample_stddev(v) == doctest::Approx(std::sqrt(32.0 / 7.0)).epsilon(1e-15));
  const std::vector<double> one{1.0};
  CHECK_FALSE(sample_stddev(one).has_value());
}
