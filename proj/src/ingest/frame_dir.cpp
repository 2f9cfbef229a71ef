#include <algorithm>
#include <cmath>

#include <json.hpp>

#include "ingest_common.hpp"
#include "kpeval/detail/text.hpp"
#include "kpeval/errors.hpp"
#include "kpeval/ingest.hpp"

namespace kpeval {

using json = nlohmann::json;
namespace fs = std::filesystem;

namespace {

struct FrameFile {
  std::string frame_id;
  fs::path path;
};

std::vector<FrameFile> list_frames(const fs::path& dir) {
  if (!fs::is_directory(dir)) throw Error(ErrorCode::IoError, dir.string() + " is not a directory");
  std::vector<FrameFile> files;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (!entry.is_regular_file() || entry.path().extension() != ".json") continue;
    files.push_back({entry.path().stem().string(), entry.path()});
  }
  std::sort(files.begin(), files.end(), [](const FrameFile& a, const FrameFile& b) { return a.frame_id < b.frame_id; });
  return files;
}

[[noreturn]] void fail(const fs::path& file, const std::string& locus, const std::string& what) {
  throw Error(ErrorCode::ParseError, file.string() + ": " + locus + ": " + what);
}

json load(const fs::path& file) {
  try {
    return json::parse(detail::read_file(file));
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::ParseError, file.string() + ": byte " + std::to_string(e.byte) + ": " + e.what());
  }
}

const json& people_of(const json& doc, const fs::path& file) {
  if (!doc.is_object()) fail(file, "$", "expected an object");
  const auto it = doc.find("people");
  if (it == doc.end() || !it->is_array()) fail(file, "$", "missing 'people' array");
  return *it;
}

// A person is either a flat array or an object carrying one.
const json& flat_of(const json& person, const fs::path& file, const std::string& locus) {
  if (person.is_array()) return person;
  if (person.is_object()) {
    for (const char* key : {"pose_keypoints_2d", "keypoints"}) {
      const auto it = person.find(key);
      if (it != person.end() && it->is_array()) return *it;
    }
  }
  fail(file, locus, "expected a keypoint array or an object with 'pose_keypoints_2d'");
}

std::vector<Keypoint2D> triples(const json& flat, const fs::path& file, const std::string& locus) {
  if (flat.size() % 3 != 0) fail(file, locus, "keypoint array length must be a multiple of 3");
  std::vector<Keypoint2D> out;
  for (std::size_t i = 0; i < flat.size(); i += 3) {
    for (std::size_t j = i; j < i + 3; ++j)
      if (!flat[j].is_number() || !std::isfinite(flat[j].get<double>()))
        fail(file, locus + "[" + std::to_string(j) + "]", "expected a finite number");
    out.push_back(detail::native_keypoint(flat[i].get<double>(), flat[i + 1].get<double>(), flat[i + 2].get<double>()));
  }
  return out;
}

std::optional<double> opt_number(const json& person, const char* key, const fs::path& file, const std::string& locus) {
  if (!person.is_object()) return std::nullopt;
  const auto it = person.find(key);
  if (it == person.end() || it->is_null()) return std::nullopt;
  if (!it->is_number()) fail(file, locus + "." + key, "expected a number");
  return it->get<double>();
}

std::optional<Role> opt_role(const json& person, const fs::path& file, const std::string& locus) {
  if (!person.is_object()) return std::nullopt;
  const auto it = person.find("role");
  if (it == person.end()) return std::nullopt;
  const auto role = it->is_string() ? role_from_string(it->get<std::string>()) : std::nullopt;
  if (!role) fail(file, locus + ".role", "unknown role");
  return role;
}

}  // namespace

SequenceDataset parse_ground_truth_frame_directory(const fs::path& dir) {
  SequenceDataset ds;
  ds.sequence_id = dir.filename().empty() ? dir.parent_path().filename().string() : dir.filename().string();
  for (const auto& f : list_frames(dir)) {
    const json doc = load(f.path);
    FrameRecord rec{f.frame_id, std::nullopt, std::nullopt, {}, {}};
    if (const auto it = doc.find("width"); it != doc.end() && it->is_number_integer()) rec.width = it->get<int>();
    if (const auto it = doc.find("height"); it != doc.end() && it->is_number_integer()) rec.height = it->get<int>();
    const auto& people = people_of(doc, f.path);
    for (std::size_t p = 0; p < people.size(); ++p) {
      const auto locus = "$.people[" + std::to_string(p) + "]";
      const auto kps = triples(flat_of(people[p], f.path, locus), f.path, locus);
      if (kps.size() != kNumKeypoints) fail(f.path, locus, "ground truth needs 17 keypoints");
      GroundTruthPose gt;
      for (std::size_t k = 0; k < kNumKeypoints; ++k)
        gt.keypoints[k] = kps[k].present ? Keypoint2D::at(kps[k].x, kps[k].y) : Keypoint2D::absent();
      if (const auto role = opt_role(people[p], f.path, locus)) {
        if (*role == Role::Unknown) fail(f.path, locus + ".role", "role must be 'infant' or 'adult'");
        gt.role = *role;
      }
      rec.ground_truths.push_back(gt);
    }
    ds.frames.push_back(std::move(rec));
  }
  if (ds.frames.empty()) throw Error(ErrorCode::EmptyDataset, dir.string() + ": no frame files");
  return ds;
}

DetectionFile parse_detections_frame_directory(const fs::path& dir, const SchemaMap& schema) {
  DetectionFile out;
  out.method_name = schema.method_name;
  for (const auto& f : list_frames(dir)) {
    const json doc = load(f.path);
    const auto& people = people_of(doc, f.path);
    std::vector<RawDetection> raws;
    for (std::size_t p = 0; p < people.size(); ++p) {
      const auto locus = "$.people[" + std::to_string(p) + "]";
      RawDetection raw;
      raw.keypoints = triples(flat_of(people[p], f.path, locus), f.path, locus);
      if (static_cast<int>(raw.keypoints.size()) != schema.native_count)
        throw Error(ErrorCode::SchemaMismatch, f.path.string() + ": " + locus + ": expected " +
                                                   std::to_string(schema.native_count) + " keypoints");
      raw.score = opt_number(people[p], "score", f.path, locus);
      raw.box_score = opt_number(people[p], "box_score", f.path, locus);
      if (const auto role = opt_role(people[p], f.path, locus)) raw.role = *role;
      raws.push_back(std::move(raw));
    }
    out.frames.push_back(DetectionFrame{f.frame_id, detail::map_frame_detections(raws, schema, f.path.string())});
  }
  return out;
}

void write_frame_directory_ground_truth(const SequenceDataset& dataset, const fs::path& dir) {
  fs::create_directories(dir);
  for (const auto& f : dataset.frames) {
    json doc = json::object();
    if (f.width) doc["width"] = *f.width;
    if (f.height) doc["height"] = *f.height;
    json people = json::array();
    for (const auto& gt : f.ground_truths) {
      json flat = json::array();
      for (const auto& k : gt.keypoints) {
        if (k.present) {
          flat.push_back(k.x);
          flat.push_back(k.y);
          flat.push_back(1);
        } else {
          flat.push_back(0);
          flat.push_back(0);
          flat.push_back(0);
        }
      }
      people.push_back(json{{"role", std::string(to_string(gt.role))}, {"keypoints", std::move(flat)}});
    }
    doc["people"] = std::move(people);
    detail::write_file(dir / (f.frame_id + ".json"), doc.dump() + "\n");
  }
}

}  // namespace kpeval
