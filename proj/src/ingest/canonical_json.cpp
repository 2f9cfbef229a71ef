#include <cmath>
#include <set>

#include <json.hpp>

#include "ingest_common.hpp"
#include "kpeval/errors.hpp"
#include "kpeval/ingest.hpp"

namespace kpeval {

using json = nlohmann::ordered_json;

namespace {

class Reader {
 public:
  explicit Reader(std::string_view source) : source_(source) {}

  [[noreturn]] void fail(const std::string& locus, const std::string& what) const {
    throw Error(ErrorCode::ParseError, std::string(source_) + ": " + locus + ": " + what);
  }

  json parse(std::string_view text) const {
    try {
      return json::parse(text);
    } catch (const json::parse_error& e) {
      throw Error(ErrorCode::ParseError, std::string(source_) + ": byte " + std::to_string(e.byte) + ": " + e.what());
    }
  }

  const json& member(const json& obj, const char* key, const std::string& locus) const {
    if (!obj.is_object()) fail(locus, "expected an object");
    const auto it = obj.find(key);
    if (it == obj.end()) fail(locus, std::string("missing field '") + key + "'");
    return *it;
  }

  double number(const json& v, const std::string& locus) const {
    if (!v.is_number()) fail(locus, "expected a number");
    return v.get<double>();
  }

  std::string string(const json& v, const std::string& locus) const {
    if (!v.is_string()) fail(locus, "expected a string");
    return v.get<std::string>();
  }

  long long integer(const json& v, const std::string& locus) const {
    if (!v.is_number_integer()) fail(locus, "expected an integer");
    return v.get<long long>();
  }

  std::optional<double> opt_number(const json& obj, const char* key, const std::string& locus) const {
    const auto it = obj.find(key);
    if (it == obj.end() || it->is_null()) return std::nullopt;
    return number(*it, locus + "." + key);
  }

  std::optional<int> opt_int(const json& obj, const char* key, const std::string& locus) const {
    const auto it = obj.find(key);
    if (it == obj.end() || it->is_null()) return std::nullopt;
    return static_cast<int>(integer(*it, locus + "." + key));
  }

  /// [x, y] or [x, y, c] or null.
  Keypoint2D keypoint(const json& v, const std::string& locus, bool with_confidence) const {
    if (v.is_null()) return Keypoint2D::absent();
    if (!v.is_array() || v.size() < 2 || v.size() > 3) fail(locus, "keypoint must be null, [x,y] or [x,y,conf]");
    const double x = number(v[0], locus + "[0]");
    const double y = number(v[1], locus + "[1]");
    std::optional<double> c;
    if (v.size() == 3 && !v[2].is_null()) c = number(v[2], locus + "[2]");
    if (c && (!std::isfinite(*c) || *c < 0.0)) fail(locus, "confidence must be finite and >= 0");
    if (!std::isfinite(x) || !std::isfinite(y)) fail(locus, "coordinates must be finite");
    if (c && *c == 0.0 && x == 0.0 && y == 0.0) return Keypoint2D::absent();
    return Keypoint2D::at(x, y, with_confidence ? c : std::nullopt);
  }

  std::vector<Keypoint2D> keypoints(const json& v, const std::string& locus, bool with_confidence) const {
    if (!v.is_array()) fail(locus, "keypoints must be an array");
    std::vector<Keypoint2D> out;
    out.reserve(v.size());
    for (std::size_t i = 0; i < v.size(); ++i)
      out.push_back(keypoint(v[i], locus + "[" + std::to_string(i) + "]", with_confidence));
    return out;
  }

  GroundTruthPose ground_truth(const json& g, const std::string& locus) const {
    GroundTruthPose gt;
    if (const auto it = g.find("role"); it != g.end()) {
      const auto role = role_from_string(string(*it, locus + ".role"));
      if (!role || *role == Role::Unknown) fail(locus + ".role", "role must be 'infant' or 'adult'");
      gt.role = *role;
    }
    const auto kps = keypoints(member(g, "keypoints", locus), locus + ".keypoints", false);
    if (kps.size() != kNumKeypoints) fail(locus + ".keypoints", "expected 17 entries");
    std::copy(kps.begin(), kps.end(), gt.keypoints.begin());
    return gt;
  }

  std::vector<CanonicalPose> detections(const json& list, const SchemaMap& schema, const std::string& locus) const {
    if (!list.is_array()) fail(locus, "detections must be an array");
    std::vector<RawDetection> raws;
    for (std::size_t i = 0; i < list.size(); ++i) {
      const auto l = locus + "[" + std::to_string(i) + "]";
      const auto& d = list[i];
      RawDetection raw;
      raw.keypoints = keypoints(member(d, "keypoints", l), l + ".keypoints", true);
      raw.score = opt_number(d, "score", l);
      raw.box_score = opt_number(d, "box_score", l);
      raw.rank = opt_int(d, "rank", l);
      raw.native_missing = opt_int(d, "native_missing", l);
      if (const auto it = d.find("role"); it != d.end()) {
        const auto role = role_from_string(string(*it, l + ".role"));
        if (!role) fail(l + ".role", "unknown role");
        raw.role = *role;
      }
      if (static_cast<int>(raw.keypoints.size()) != schema.native_count)
        throw Error(ErrorCode::SchemaMismatch, std::string(source_) + ": " + l + ": expected " +
                                                   std::to_string(schema.native_count) + " keypoints");
      raws.push_back(std::move(raw));
    }
    return detail::map_frame_detections(raws, schema, std::string(source_) + ": " + locus);
  }

 private:
  std::string_view source_;
};

json keypoint_json(const Keypoint2D& k, bool with_confidence) {
  if (!k.present) return nullptr;
  json a = json::array({k.x, k.y});
  if (with_confidence && k.confidence) a.push_back(*k.confidence);
  return a;
}

json detection_json(const CanonicalPose& p) {
  json d = json::object();
  d["rank"] = p.rank;
  if (p.score) d["score"] = *p.score;
  if (p.box_score) d["box_score"] = *p.box_score;
  if (p.role != Role::Unknown) d["role"] = std::string(to_string(p.role));
  if (p.native_missing && *p.native_missing != static_cast<int>(kNumKeypoints) - present_count(p.keypoints))
    d["native_missing"] = *p.native_missing;
  json kps = json::array();
  for (const auto& k : p.keypoints) kps.push_back(keypoint_json(k, true));
  d["keypoints"] = std::move(kps);
  return d;
}

json frame_json(const FrameRecord& f) {
  json j = json::object();
  j["frame_id"] = f.frame_id;
  if (f.width) j["width"] = *f.width;
  if (f.height) j["height"] = *f.height;
  json gts = json::array();
  for (const auto& gt : f.ground_truths) {
    json kps = json::array();
    for (const auto& k : gt.keypoints) kps.push_back(keypoint_json(k, false));
    gts.push_back(json{{"role", std::string(to_string(gt.role))}, {"keypoints", std::move(kps)}});
  }
  j["ground_truths"] = std::move(gts);
  json dets = json::array();
  for (const auto& d : f.detections) dets.push_back(detection_json(d));
  j["detections"] = std::move(dets);
  return j;
}

// Canonical documents keep keys in a fixed, readable order.
std::string dump_ordered(const json& top_keys_first, const std::vector<std::string>& order) {
  std::string out = "{\n";
  bool first = true;
  for (const auto& key : order) {
    const auto it = top_keys_first.find(key);
    if (it == top_keys_first.end()) continue;
    if (!first) out += ",\n";
    first = false;
    out += "  " + json(key).dump() + ": ";
    if (key == "frames") {
      out += "[\n";
      for (std::size_t i = 0; i < it->size(); ++i) {
        out += "    " + (*it)[i].dump();
        out += i + 1 < it->size() ? ",\n" : "\n";
      }
      out += "  ]";
    } else {
      out += it->dump();
    }
  }
  out += "\n}\n";
  return out;
}

}  // namespace

SequenceDataset parse_ground_truth_canonical_json(std::string_view text, std::string_view source_name) {
  const Reader r(source_name);
  const json doc = r.parse(text);
  if (!doc.is_object()) r.fail("$", "document must be an object");

  SequenceDataset ds;
  ds.sequence_id = r.string(r.member(doc, "sequence_id", "$"), "$.sequence_id");
  if (const auto it = doc.find("expected_persons"); it != doc.end()) {
    const auto n = r.integer(*it, "$.expected_persons");
    if (n < 1) r.fail("$.expected_persons", "must be a positive integer");
    ds.expected_persons = static_cast<int>(n);
  }
  if (const auto it = doc.find("normalization"); it != doc.end()) {
    const auto mode = normalization_from_string(r.string(*it, "$.normalization"));
    if (!mode) r.fail("$.normalization", "expected 'median' or 'per_image'");
    ds.normalization = *mode;
  }
  if (const auto it = doc.find("metadata"); it != doc.end() && !it->is_null()) {
    if (!it->is_object()) r.fail("$.metadata", "expected an object");
    for (const auto& [k, v] : it->items()) ds.metadata[k] = v.is_string() ? v.get<std::string>() : v.dump();
  }

  const auto& frames = r.member(doc, "frames", "$");
  if (!frames.is_array()) r.fail("$.frames", "expected an array");
  const auto identity = SchemaMap::identity("canonical");
  std::set<std::string> seen;
  for (std::size_t i = 0; i < frames.size(); ++i) {
    const auto locus = "$.frames[" + std::to_string(i) + "]";
    const auto& f = frames[i];
    FrameRecord rec;
    rec.frame_id = r.string(r.member(f, "frame_id", locus), locus + ".frame_id");
    if (!seen.insert(rec.frame_id).second)
      throw Error(ErrorCode::DuplicateFrameId, std::string(source_name) + ": " + locus + ": frame '" + rec.frame_id + "'");
    rec.width = r.opt_int(f, "width", locus);
    rec.height = r.opt_int(f, "height", locus);
    if (const auto it = f.find("ground_truths"); it != f.end()) {
      if (!it->is_array()) r.fail(locus + ".ground_truths", "expected an array");
      for (std::size_t g = 0; g < it->size(); ++g)
        rec.ground_truths.push_back(r.ground_truth((*it)[g], locus + ".ground_truths[" + std::to_string(g) + "]"));
    }
    if (const auto it = f.find("detections"); it != f.end())
      rec.detections = r.detections(*it, identity, locus + ".detections");
    ds.frames.push_back(std::move(rec));
  }
  if (ds.frames.empty()) throw Error(ErrorCode::EmptyDataset, std::string(source_name) + ": no frames");
  return ds;
}

DetectionFile parse_detections_canonical_json(std::string_view text, const SchemaMap& schema,
                                              std::string_view source_name) {
  const Reader r(source_name);
  const json doc = r.parse(text);
  if (!doc.is_object()) r.fail("$", "document must be an object");
  DetectionFile out;
  out.method_name = schema.method_name;
  if (const auto it = doc.find("method"); it != doc.end()) out.method_name = r.string(*it, "$.method");
  out.sequence_id = r.string(r.member(doc, "sequence_id", "$"), "$.sequence_id");
  const auto& frames = r.member(doc, "frames", "$");
  if (!frames.is_array()) r.fail("$.frames", "expected an array");
  std::set<std::string> seen;
  for (std::size_t i = 0; i < frames.size(); ++i) {
    const auto locus = "$.frames[" + std::to_string(i) + "]";
    DetectionFrame df;
    df.frame_id = r.string(r.member(frames[i], "frame_id", locus), locus + ".frame_id");
    if (!seen.insert(df.frame_id).second)
      throw Error(ErrorCode::DuplicateFrameId, std::string(source_name) + ": " + locus + ": frame '" + df.frame_id + "'");
    if (const auto it = frames[i].find("detections"); it != frames[i].end())
      df.detections = r.detections(*it, schema, locus + ".detections");
    out.frames.push_back(std::move(df));
  }
  return out;
}

std::string emit_canonical_json(const SequenceDataset& dataset) {
  json doc = json::object();
  doc["sequence_id"] = dataset.sequence_id;
  doc["expected_persons"] = dataset.expected_persons;
  doc["normalization"] = std::string(to_string(dataset.normalization));
  if (!dataset.metadata.empty()) doc["metadata"] = dataset.metadata;
  json frames = json::array();
  for (const auto& f : dataset.frames) frames.push_back(frame_json(f));
  doc["frames"] = std::move(frames);
  return dump_ordered(doc, {"sequence_id", "expected_persons", "normalization", "metadata", "frames"});
}

std::string emit_canonical_json(const DetectionFile& detections) {
  json doc = json::object();
  doc["method"] = detections.method_name;
  doc["sequence_id"] = detections.sequence_id;
  json frames = json::array();
  for (const auto& f : detections.frames) {
    json dets = json::array();
    for (const auto& d : f.detections) dets.push_back(detection_json(d));
    frames.push_back(json{{"frame_id", f.frame_id}, {"detections", std::move(dets)}});
  }
  doc["frames"] = std::move(frames);
  return dump_ordered(doc, {"method", "sequence_id", "frames"});
}

}  // namespace kpeval
