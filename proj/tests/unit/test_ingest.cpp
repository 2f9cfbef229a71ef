#include <doctest.h>

#include <filesystem>

#include "builders.hpp"
#include "kpeval/errors.hpp"
#include "kpeval/ingest.hpp"

using namespace kpeval;
namespace fs = std::filesystem;

namespace {

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("no kpeval::Error thrown");
  return ErrorCode::InvalidArgument;
}

std::string csv_header_17() {
  std::string h = "frame_id,role";
  for (std::size_t k = 0; k < kNumKeypoints; ++k) {
    const std::string n(keypoint_name(keypoint_at(k)));
    h += "," + n + "_x," + n + "_y";
  }
  return h;
}

}  // namespace

TEST_CASE("minimal canonical ground truth") {
  const auto ds = parse_ground_truth_canonical_json(R"({
    "sequence_id": "s",
    "frames": [{"frame_id": "a", "ground_truths": [{"keypoints": [[1,2],[3,4],null,null,null,null,null,null,null,
      null,null,null,null,null,null,null,null]}]}]
  })");
  REQUIRE(ds.frames.size() == 1);
  REQUIRE(ds.frames[0].ground_truths.size() == 1);
  CHECK(ds.frames[0].ground_truths[0].annotated_count() == 2);
  CHECK(ds.frames[0].ground_truths[0].role == Role::Infant);
  CHECK(ds.expected_persons == 1);
  CHECK(ds.normalization == NormalizationMode::PerSequenceMedian);
}

TEST_CASE("duplicate frame ids are rejected") {
  const std::string nulls = "[null,null,null,null,null,null,null,null,null,null,null,null,null,null,null,null,null]";
  const std::string doc = R"({"sequence_id":"s","frames":[{"frame_id":"a","ground_truths":[{"keypoints":)" + nulls +
                          R"(}]},{"frame_id":"a","ground_truths":[]}]})";
  CHECK(code_of([&] { parse_ground_truth_canonical_json(doc); }) == ErrorCode::DuplicateFrameId);

  const std::string csv = csv_header_17() + "\n" + "a,infant" + std::string(34, ',') + "\nb,infant" +
                          std::string(34, ',') + "\na,infant" + std::string(34, ',') + "\n";
  CHECK(code_of([&] { parse_ground_truth_wide_csv(csv, "s"); }) == ErrorCode::DuplicateFrameId);
}

TEST_CASE("parse errors carry a locus") {
  try {
    parse_ground_truth_canonical_json(R"({"sequence_id":"s","frames":[{"ground_truths":[]}]})", "gt.json");
    FAIL("expected ParseError");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::ParseError);
    CHECK(std::string(e.what()).find("gt.json") != std::string::npos);
    CHECK(std::string(e.what()).find("frame_id") != std::string::npos);
  }
}

TEST_CASE("14-column WideCsv leaves nose and ears absent") {
  std::string header = "frame_id";
  std::string row = "f0";
  int col = 0;
  for (std::size_t k = 0; k < kNumKeypoints; ++k) {
    const auto id = keypoint_at(k);
    if (id == KeypointId::Nose || id == KeypointId::LEar || id == KeypointId::REar) continue;
    const std::string n(keypoint_name(id));
    header += "," + n + "_x," + n + "_y";
    row += "," + std::to_string(10 * col) + "," + std::to_string(10 * col + 1);
    ++col;
  }
  CHECK(col == 14);
  const auto ds = parse_ground_truth_wide_csv(header + "\n" + row + "\n", "s");
  const auto& gt = ds.frames.at(0).ground_truths.at(0);
  CHECK_FALSE(gt[KeypointId::Nose].present);
  CHECK_FALSE(gt[KeypointId::LEar].present);
  CHECK_FALSE(gt[KeypointId::REar].present);
  CHECK(gt[KeypointId::LEye] == Keypoint2D::at(0, 1));
  CHECK(gt[KeypointId::REye] == Keypoint2D::at(10, 11));
  CHECK(gt[KeypointId::LShoulder] == Keypoint2D::at(20, 21));
  CHECK(gt[KeypointId::RAnkle] == Keypoint2D::at(130, 131));
  CHECK(gt.annotated_count() == 14);
}

TEST_CASE("detections keep file order as rank") {
  const std::string kp = "[[1,1,0.5],[2,2,0.5],[3,3,0.5],[4,4,0.5],[5,5,0.5],[6,6,0.5],[7,7,0.5],[8,8,0.5],"
                         "[9,9,0.5],[10,10,0.5],[11,11,0.5],[12,12,0.5],[13,13,0.5],[14,14,0.5],[15,15,0.5],"
                         "[16,16,0.5],[17,17,0.5]]";
  const auto det = parse_detections_canonical_json(R"({"method":"m","sequence_id":"s","frames":[
      {"frame_id":"a","detections":[{"score":0.2,"keypoints":)" + kp + R"(},{"score":0.9,"keypoints":)" + kp + R"(}]},
      {"frame_id":"b","detections":[]}]})",
                                                   SchemaMap::identity("m"));
  REQUIRE(det.frames.size() == 2);
  REQUIRE(det.frames[0].detections.size() == 2);
  CHECK(det.frames[0].detections[0].rank == 0);
  CHECK(det.frames[0].detections[1].rank == 1);
  CHECK(det.frames[0].detections[0].score == 0.2);
  CHECK(det.frames[1].detections.empty());
}

TEST_CASE("OpenPose-style 18-point records drop the neck") {
  std::string flat = "[";
  for (int i = 0; i < 18; ++i) flat += (i ? "," : "") + std::to_string(100 + i) + "," + std::to_string(200 + i) + ",0.8";
  flat += "]";
  const auto det = parse_detections_coco_json(R"([{"image_id":"f0","keypoints":)" + flat + "}]",
                                              *builtin_schema("openpose18"));
  const auto& pose = det.frames.at(0).detections.at(0);
  CHECK(pose[KeypointId::Nose] == Keypoint2D::at(100, 200, 0.8));
  CHECK(pose[KeypointId::RShoulder] == Keypoint2D::at(102, 202, 0.8));
  CHECK(pose[KeypointId::LEar] == Keypoint2D::at(117, 217, 0.8));
  // index 1 (neck) lands nowhere: every canonical x is a non-neck source
  for (const auto& k : pose.keypoints) CHECK(k.x != 101.0);
  CHECK(pose.native_missing == 0);

  CHECK(code_of([] {
          parse_detections_coco_json(R"([{"image_id":"f0","keypoints":[1,2,1]}])", *builtin_schema("openpose18"));
        }) == ErrorCode::SchemaMismatch);
}

TEST_CASE("align") {
  SequenceDataset ds;
  ds.sequence_id = "s";
  for (int f = 0; f < 10; ++f) ds.frames.push_back(FrameRecord{"f" + std::to_string(f), {}, {}, {test::figure()}, {}});

  DetectionFile det;
  det.sequence_id = "s";
  for (int f = 0; f < 10; ++f) {
    if (f == 2 || f == 5 || f == 7) continue;
    det.frames.push_back(DetectionFrame{"f" + std::to_string(f), {test::as_detection(test::figure(), 0.9)}});
  }

  SUBCASE("missing frames get empty lists") {
    const auto r = align(ds, det);
    CHECK(r.warnings.empty());
    int empty = 0;
    for (const auto& f : r.dataset.frames) empty += f.detections.empty();
    CHECK(empty == 3);
    CHECK(r.dataset.frames[0].detections.size() == 1);
  }
  SUBCASE("orphan frames warn") {
    det.frames.push_back(DetectionFrame{"zz", {test::as_detection(test::figure())}});
    const auto r = align(ds, det);
    REQUIRE(r.warnings.size() == 1);
    CHECK(r.warnings[0].code == "orphan_frame");
    CHECK(r.warnings[0].frame_id == "zz");
    CHECK(r.dataset.frames.size() == 10);
  }
  SUBCASE("sequence mismatch") {
    det.sequence_id = "other";
    CHECK(code_of([&] { align(ds, det); }) == ErrorCode::SequenceMismatch);
  }
}

TEST_CASE("canonical round trip over the fixtures") {
  for (const auto& rel : {"supine/seq01.json", "supine/seq02.json", "multi/family.json"}) {
    CAPTURE(rel);
    const auto ds = parse_ground_truth(test::fixture_dir() / rel, FormatKind::CanonicalJson);
    const auto text = emit_canonical_json(ds);
    CHECK(parse_ground_truth_canonical_json(text) == ds);
    CHECK(emit_canonical_json(parse_ground_truth_canonical_json(text)) == text);
  }
  const auto identity = SchemaMap::identity("alpha");
  const auto det = parse_detections(test::fixture_dir() / "methods/alpha/seq01.json", FormatKind::CanonicalJson, identity);
  const auto again = parse_detections_canonical_json(emit_canonical_json(det), identity);
  CHECK(again.sequence_id == det.sequence_id);
  REQUIRE(again.frames.size() == det.frames.size());
  for (std::size_t f = 0; f < det.frames.size(); ++f) CHECK(again.frames[f].detections == det.frames[f].detections);
}

TEST_CASE("format twins parse to the same frames") {
  for (const auto& [json_rel, stem] : {std::pair{"supine/seq01.json", "supine/twins/seq01"},
                                       std::pair{"supine/seq02.json", "supine/twins/seq02"},
                                       std::pair{"multi/family.json", "multi/twins/family"}}) {
    CAPTURE(json_rel);
    const auto canonical = parse_ground_truth(test::fixture_dir() / json_rel, FormatKind::CanonicalJson);
    const auto csv = parse_ground_truth(test::fixture_dir() / (std::string(stem) + ".csv"), FormatKind::WideCsv);
    const auto dir = parse_ground_truth(test::fixture_dir() / stem, FormatKind::PerFrameJsonDirectory);
    CHECK(csv.sequence_id == canonical.sequence_id);
    CHECK(dir.sequence_id == canonical.sequence_id);
    CHECK(csv.frames == canonical.frames);
    CHECK(dir.frames == canonical.frames);
  }
}

TEST_CASE("format names") {
  CHECK(format_from_string("canonical") == FormatKind::CanonicalJson);
  CHECK(format_from_string("coco") == FormatKind::CocoResultJson);
  CHECK(format_from_string("frame-dir") == FormatKind::PerFrameJsonDirectory);
  CHECK(format_from_string("csv") == FormatKind::WideCsv);
  CHECK_FALSE(format_from_string("xml").has_value());
  CHECK(code_of([] { parse_ground_truth("/nonexistent/x.json", FormatKind::CanonicalJson); }) == ErrorCode::IoError);
}
