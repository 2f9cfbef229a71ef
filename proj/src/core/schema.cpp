#include "kpeval/schema.hpp"

#include <algorithm>
#include <set>

#include "kpeval/detail/text.hpp"
#include "kpeval/errors.hpp"
#include "kpeval/metrics.hpp"

namespace kpeval {

namespace {

using K = KeypointId;

SchemaMap make_schema(std::string name, int native_count, std::vector<std::pair<int, KeypointId>> entries,
                      ScorePolicy policy) {
  SchemaMap s;
  s.method_name = std::move(name);
  s.native_count = native_count;
  s.entries = std::move(entries);
  s.score_policy = policy;
  return s;
}

}  // namespace

std::string_view to_string(ScorePolicy policy) noexcept {
  switch (policy) {
    case ScorePolicy::NativeScore: return "native";
    case ScorePolicy::MedianOfConfidences: return "median_confidence";
    case ScorePolicy::DetectorBoxScore: return "detector_box";
    case ScorePolicy::NoScore: return "none";
  }
  return "none";
}

std::optional<ScorePolicy> score_policy_from_string(std::string_view text) noexcept {
  if (text == "native") return ScorePolicy::NativeScore;
  if (text == "median_confidence" || text == "median") return ScorePolicy::MedianOfConfidences;
  if (text == "detector_box" || text == "box") return ScorePolicy::DetectorBoxScore;
  if (text == "none") return ScorePolicy::NoScore;
  return std::nullopt;
}

void SchemaMap::validate() const {
  if (native_count <= 0) throw Error(ErrorCode::SchemaMismatch, method_name + ": native_count must be positive");
  std::set<KeypointId> seen;
  auto claim = [&](KeypointId id) {
    if (is_virtual(id))
      throw Error(ErrorCode::SchemaMismatch, method_name + ": virtual keypoint " + std::string(keypoint_name(id)) +
                                                 " cannot be a mapping target");
    if (!seen.insert(id).second)
      throw Error(ErrorCode::SchemaMismatch,
                  method_name + ": keypoint " + std::string(keypoint_name(id)) + " mapped more than once");
  };
  auto check_index = [&](int i) {
    if (i < 0 || i >= native_count)
      throw Error(ErrorCode::InvalidIndex, method_name + ": native index " + std::to_string(i) + " outside [0, " +
                                               std::to_string(native_count) + ")");
  };
  for (const auto& [native, id] : entries) {
    check_index(native);
    claim(id);
  }
  for (const auto& c : composites) {
    if (c.sources.empty()) throw Error(ErrorCode::SchemaMismatch, method_name + ": composite without sources");
    for (int i : c.sources) check_index(i);
    claim(c.target);
  }
}

SchemaMap SchemaMap::identity(std::string method_name, ScorePolicy policy) {
  std::vector<std::pair<int, KeypointId>> entries;
  for (std::size_t i = 0; i < kNumKeypoints; ++i) entries.emplace_back(static_cast<int>(i), keypoint_at(i));
  return make_schema(std::move(method_name), static_cast<int>(kNumKeypoints), std::move(entries), policy);
}

std::optional<SchemaMap> builtin_schema(std::string_view name) {
  if (name == "coco17") return SchemaMap::identity("coco17");
  if (name == "openpose18") {
    return make_schema("openpose18", 18,
                       {{0, K::Nose}, {2, K::RShoulder}, {3, K::RElbow}, {4, K::RWrist}, {5, K::LShoulder},
                        {6, K::LElbow}, {7, K::LWrist}, {8, K::RHip}, {9, K::RKnee}, {10, K::RAnkle},
                        {11, K::LHip}, {12, K::LKnee}, {13, K::LAnkle}, {14, K::REye}, {15, K::LEye},
                        {16, K::REar}, {17, K::LEar}},
                       ScorePolicy::MedianOfConfidences);
  }
  if (name == "openpose25") {
    return make_schema("openpose25", 25,
                       {{0, K::Nose}, {2, K::RShoulder}, {3, K::RElbow}, {4, K::RWrist}, {5, K::LShoulder},
                        {6, K::LElbow}, {7, K::LWrist}, {9, K::RHip}, {10, K::RKnee}, {11, K::RAnkle},
                        {12, K::LHip}, {13, K::LKnee}, {14, K::LAnkle}, {15, K::REye}, {16, K::LEye},
                        {17, K::REar}, {18, K::LEar}},
                       ScorePolicy::MedianOfConfidences);
  }
  if (name == "mediapipe33") {
    return make_schema("mediapipe33", 33,
                       {{0, K::Nose}, {2, K::LEye}, {5, K::REye}, {7, K::LEar}, {8, K::REar},
                        {11, K::LShoulder}, {12, K::RShoulder}, {13, K::LElbow}, {14, K::RElbow},
                        {15, K::LWrist}, {16, K::RWrist}, {23, K::LHip}, {24, K::RHip}, {25, K::LKnee},
                        {26, K::RKnee}, {27, K::LAnkle}, {28, K::RAnkle}},
                       ScorePolicy::NoScore);
  }
  if (name == "deeplabcut14") {
    // chin (12) and forehead (13) have no canonical counterpart
    return make_schema("deeplabcut14", 14,
                       {{0, K::RAnkle}, {1, K::RKnee}, {2, K::RHip}, {3, K::LHip}, {4, K::LKnee},
                        {5, K::LAnkle}, {6, K::RWrist}, {7, K::RElbow}, {8, K::RShoulder},
                        {9, K::LShoulder}, {10, K::LElbow}, {11, K::LWrist}},
                       ScorePolicy::MedianOfConfidences);
  }
  return std::nullopt;
}

SchemaMap parse_schema_map(std::string_view text, std::string_view source_name) {
  SchemaMap schema;
  bool have_count = false;
  int line_no = 0;
  auto fail = [&](const std::string& what) -> Error {
    return Error(ErrorCode::ParseError, std::string(source_name) + ":" + std::to_string(line_no) + ": " + what);
  };
  auto keypoint = [&](std::string_view name) {
    const auto id = keypoint_from_name(detail::trim(name));
    if (!id) throw fail("unknown keypoint '" + std::string(name) + "'");
    return *id;
  };
  auto integer = [&](std::string_view v) {
    const auto n = detail::parse_int(v);
    if (!n) throw fail("expected integer, got '" + std::string(v) + "'");
    return static_cast<int>(*n);
  };

  for (auto raw : detail::split(text, '\n')) {
    ++line_no;
    if (const auto hash = raw.find('#'); hash != std::string_view::npos) raw = raw.substr(0, hash);
    const auto line = detail::trim(raw);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) throw fail("expected '='");
    const auto lhs = detail::trim(line.substr(0, eq));
    const auto rhs = detail::trim(line.substr(eq + 1));
    const auto words = detail::split_ws(lhs);
    if (words.empty()) throw fail("missing key");

    if (words[0] == "method" && words.size() == 1) {
      schema.method_name = std::string(rhs);
    } else if (words[0] == "native_count" && words.size() == 1) {
      schema.native_count = integer(rhs);
      have_count = true;
    } else if (words[0] == "score_policy" && words.size() == 1) {
      const auto p = score_policy_from_string(rhs);
      if (!p) throw fail("unknown score policy '" + std::string(rhs) + "'");
      schema.score_policy = *p;
    } else if (words[0] == "map" && words.size() == 2) {
      schema.entries.emplace_back(integer(words[1]), keypoint(rhs));
    } else if (words[0] == "composite" && words.size() == 2) {
      CompositeEntry c{keypoint(words[1]), {}};
      for (auto tok : detail::split_ws(rhs)) c.sources.push_back(integer(tok));
      if (c.sources.empty()) throw fail("composite needs at least one source index");
      schema.composites.push_back(std::move(c));
    } else {
      throw fail("unknown directive '" + std::string(lhs) + "'");
    }
  }
  if (!have_count) throw Error(ErrorCode::ParseError, std::string(source_name) + ": missing native_count");
  schema.validate();
  return schema;
}

SchemaMap load_schema_map(const std::string& spec) {
  std::string_view name = spec;
  if (name.starts_with("builtin:")) {
    name.remove_prefix(8);
    if (auto s = builtin_schema(name)) return *s;
    throw Error(ErrorCode::ConfigError, "unknown builtin schema '" + std::string(name) + "'");
  }
  if (!std::filesystem::exists(spec)) {
    if (auto s = builtin_schema(name)) return *s;
    throw Error(ErrorCode::ConfigError, "schema file not found: " + spec);
  }
  return parse_schema_map(detail::read_file(spec), spec);
}

CanonicalPose map_to_canonical(const RawDetection& raw, const SchemaMap& schema) {
  if (static_cast<int>(raw.keypoints.size()) != schema.native_count)
    throw Error(ErrorCode::SchemaMismatch, schema.method_name + ": expected " + std::to_string(schema.native_count) +
                                               " native keypoints, got " + std::to_string(raw.keypoints.size()));
  CanonicalPose pose;
  auto native = [&](int i) -> const Keypoint2D& {
    if (i < 0 || i >= schema.native_count)
      throw Error(ErrorCode::InvalidIndex, schema.method_name + ": native index " + std::to_string(i));
    return raw.keypoints[static_cast<std::size_t>(i)];
  };
  for (const auto& [i, id] : schema.entries) pose[id] = native(i);
  for (const auto& c : schema.composites) {
    double sx = 0.0, sy = 0.0, sc = 0.0;
    bool all_present = true, all_conf = true;
    for (int i : c.sources) {
      const auto& k = native(i);
      all_present = all_present && k.present;
      if (!all_present) break;
      sx += k.x;
      sy += k.y;
      if (k.confidence) sc += *k.confidence;
      else all_conf = false;
    }
    if (!all_present) {
      pose[c.target] = Keypoint2D::absent();
      continue;
    }
    const auto n = static_cast<double>(c.sources.size());
    pose[c.target] = Keypoint2D::at(sx / n, sy / n, all_conf ? std::optional<double>(sc / n) : std::nullopt);
  }

  pose.box_score = raw.box_score;
  pose.rank = raw.rank.value_or(0);
  pose.role = raw.role;
  const int native_present = static_cast<int>(
      std::count_if(raw.keypoints.begin(), raw.keypoints.end(), [](const Keypoint2D& k) { return k.present; }));
  pose.native_missing = raw.native_missing.value_or(schema.native_count - native_present);
  pose.score = raw.score;
  pose.score = detection_score(pose, schema.score_policy);
  return pose;
}

CanonicalPose map_to_canonical(std::span<const Keypoint2D> native, const SchemaMap& schema) {
  RawDetection raw;
  raw.keypoints.assign(native.begin(), native.end());
  return map_to_canonical(raw, schema);
}

}  // namespace kpeval
