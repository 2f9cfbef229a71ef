#include <cmath>
#include <map>

#include <json.hpp>

#include "ingest_common.hpp"
#include "kpeval/errors.hpp"
#include "kpeval/ingest.hpp"

namespace kpeval {

using json = nlohmann::json;

namespace {

[[noreturn]] void fail(std::string_view source, const std::string& locus, const std::string& what) {
  throw Error(ErrorCode::ParseError, std::string(source) + ": " + locus + ": " + what);
}

json parse_document(std::string_view text, std::string_view source) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::ParseError, std::string(source) + ": byte " + std::to_string(e.byte) + ": " + e.what());
  }
}

std::string image_id(const json& entry, std::string_view source, const std::string& locus) {
  const auto it = entry.find("image_id");
  if (it == entry.end()) fail(source, locus, "missing field 'image_id'");
  if (it->is_number_integer()) return std::to_string(it->get<long long>());
  if (it->is_string()) return it->get<std::string>();
  fail(source, locus + ".image_id", "expected integer or string");
}

std::vector<double> flat_keypoints(const json& entry, std::string_view source, const std::string& locus) {
  const auto it = entry.find("keypoints");
  if (it == entry.end() || !it->is_array()) fail(source, locus, "missing keypoints array");
  if (it->size() % 3 != 0) fail(source, locus + ".keypoints", "length must be a multiple of 3");
  std::vector<double> out;
  for (std::size_t i = 0; i < it->size(); ++i) {
    const auto& v = (*it)[i];
    if (!v.is_number()) fail(source, locus + ".keypoints[" + std::to_string(i) + "]", "expected a number");
    out.push_back(v.get<double>());
    if (!std::isfinite(out.back())) fail(source, locus + ".keypoints[" + std::to_string(i) + "]", "must be finite");
  }
  return out;
}

std::optional<double> opt_number(const json& entry, const char* key, std::string_view source, const std::string& locus) {
  const auto it = entry.find(key);
  if (it == entry.end() || it->is_null()) return std::nullopt;
  if (!it->is_number()) fail(source, locus + "." + key, "expected a number");
  return it->get<double>();
}

}  // namespace

SequenceDataset parse_ground_truth_coco_json(std::string_view text, std::string_view sequence_id,
                                             std::string_view source_name) {
  const json doc = parse_document(text, source_name);
  if (!doc.is_array()) fail(source_name, "$", "expected an array of annotations");
  SequenceDataset ds;
  ds.sequence_id = std::string(sequence_id);
  std::map<std::string, std::size_t> index;
  for (std::size_t i = 0; i < doc.size(); ++i) {
    const auto locus = "$[" + std::to_string(i) + "]";
    const auto id = image_id(doc[i], source_name, locus);
    const auto flat = flat_keypoints(doc[i], source_name, locus);
    if (flat.size() != 3 * kNumKeypoints) fail(source_name, locus + ".keypoints", "ground truth needs 51 values");
    GroundTruthPose gt;
    for (std::size_t k = 0; k < kNumKeypoints; ++k) {
      // COCO visibility flag: 0 means not annotated
      if (flat[3 * k + 2] > 0.0) gt.keypoints[k] = Keypoint2D::at(flat[3 * k], flat[3 * k + 1]);
    }
    if (const auto it = doc[i].find("role"); it != doc[i].end()) {
      const auto role = it->is_string() ? role_from_string(it->get<std::string>()) : std::nullopt;
      if (!role || *role == Role::Unknown) fail(source_name, locus + ".role", "role must be 'infant' or 'adult'");
      gt.role = *role;
    }
    auto [pos, inserted] = index.emplace(id, ds.frames.size());
    if (inserted) ds.frames.push_back(FrameRecord{id, std::nullopt, std::nullopt, {}, {}});
    ds.frames[pos->second].ground_truths.push_back(gt);
  }
  if (ds.frames.empty()) throw Error(ErrorCode::EmptyDataset, std::string(source_name) + ": no annotations");
  return ds;
}

DetectionFile parse_detections_coco_json(std::string_view text, const SchemaMap& schema, std::string_view source_name) {
  const json doc = parse_document(text, source_name);
  if (!doc.is_array()) fail(source_name, "$", "expected an array of results");
  DetectionFile out;
  out.method_name = schema.method_name;
  std::map<std::string, std::size_t> index;
  std::vector<std::vector<RawDetection>> raws;
  for (std::size_t i = 0; i < doc.size(); ++i) {
    const auto locus = "$[" + std::to_string(i) + "]";
    const auto id = image_id(doc[i], source_name, locus);
    const auto flat = flat_keypoints(doc[i], source_name, locus);
    if (flat.size() != 3 * static_cast<std::size_t>(schema.native_count))
      throw Error(ErrorCode::SchemaMismatch, std::string(source_name) + ": " + locus + ": expected " +
                                                 std::to_string(3 * schema.native_count) + " keypoint values");
    RawDetection raw;
    for (std::size_t k = 0; k * 3 < flat.size(); ++k)
      raw.keypoints.push_back(detail::native_keypoint(flat[3 * k], flat[3 * k + 1], flat[3 * k + 2]));
    raw.score = opt_number(doc[i], "score", source_name, locus);
    raw.box_score = opt_number(doc[i], "box_score", source_name, locus);
    auto [pos, inserted] = index.emplace(id, out.frames.size());
    if (inserted) {
      out.frames.push_back(DetectionFrame{id, {}});
      raws.emplace_back();
    }
    raws[pos->second].push_back(std::move(raw));
  }
  for (std::size_t f = 0; f < out.frames.size(); ++f)
    out.frames[f].detections =
        detail::map_frame_detections(raws[f], schema, std::string(source_name) + ": image " + out.frames[f].frame_id);
  return out;
}

}  // namespace kpeval
