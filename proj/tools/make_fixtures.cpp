// Regenerates the files under fixtures/ from fixed seeds:
//
//     make_fixtures <repo>/fixtures
//
// supine/        two single-infant sequences (CanonicalJson ground truth)
// supine/twins/  the same ground truth as WideCsv and per-frame directories
// methods/       detections of three synthetic methods in three formats
// multi/         a parent-and-infant sequence with role labels

#include <cmath>
#include <filesystem>
#include <iostream>
#include <numbers>
#include <random>

#include <json.hpp>

#include "kpeval/detail/text.hpp"
#include "kpeval/harness.hpp"
#include "kpeval/ingest.hpp"
#include "kpeval/schema.hpp"

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;
using namespace kpeval;

namespace {

class Noise {
 public:
  explicit Noise(std::uint64_t seed) : engine_(seed) {}
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

 private:
  std::mt19937_64 engine_;
};

double torso(const GroundTruthPose& gt) {
  const auto v = derive_virtual_points(gt);
  return distance(v.neck, v.midhip);
}

// Ground truth moved by up to `fraction` of the torso per keypoint.
CanonicalPose perturb(const GroundTruthPose& gt, double fraction, Noise& rng) {
  CanonicalPose p;
  const double t = torso(gt);
  for (std::size_t k = 0; k < kNumKeypoints; ++k) {
    const double a = 2 * std::numbers::pi * rng.uniform();
    const double d = fraction * t * rng.uniform();
    const double conf = 0.3 + 0.7 * rng.uniform();
    if (!gt.keypoints[k].present) continue;
    p.keypoints[k] = Keypoint2D::at(gt.keypoints[k].x + d * std::cos(a), gt.keypoints[k].y + d * std::sin(a), conf);
  }
  return p;
}

json flat_openpose18(const CanonicalPose& p, const SchemaMap& schema) {
  std::vector<double> flat(3 * static_cast<std::size_t>(schema.native_count), 0.0);
  for (const auto& [native, id] : schema.entries) {
    const auto& k = p[id];
    if (!k.present) continue;
    const auto i = static_cast<std::size_t>(native);
    flat[3 * i] = k.x;
    flat[3 * i + 1] = k.y;
    flat[3 * i + 2] = k.confidence.value_or(1.0);
  }
  const auto& ls = p[KeypointId::LShoulder];
  const auto& rs = p[KeypointId::RShoulder];
  if (ls.present && rs.present) {
    flat[3] = (ls.x + rs.x) / 2;
    flat[4] = (ls.y + rs.y) / 2;
    flat[5] = (ls.confidence.value_or(1.0) + rs.confidence.value_or(1.0)) / 2;
  }
  return flat;
}

json flat_coco(const CanonicalPose& p) {
  json flat = json::array();
  for (const auto& k : p.keypoints) {
    flat.push_back(k.present ? k.x : 0.0);
    flat.push_back(k.present ? k.y : 0.0);
    flat.push_back(k.present ? k.confidence.value_or(1.0) : 0.0);
  }
  return flat;
}

SequenceDataset supine_sequence(std::uint64_t seed, int frames, const std::string& id, const std::string& infant,
                                DetectionFile& alpha) {
  ErrorModel m;
  m.jitter = JitterKind::Random;
  m.jitter_fraction = 0.15;
  m.drop_keypoint_prob = 0.04;
  m.drop_detection_count = 2;
  m.duplicate_detection_prob = 0.1;
  m.score_model = ScoreModel::Noisy;
  auto inst = generate(seed, frames, m, id);
  inst.ground_truth.metadata = {{"infant_id", infant}, {"position", "supine"}, {"difficulty", "easy"}};
  inst.detections.method_name = "alpha";
  // annotators skip occluded points: blank a few ground-truth wrists
  for (std::size_t f = 3; f < inst.ground_truth.frames.size(); f += 7)
    inst.ground_truth.frames[f].ground_truths[0][KeypointId::LWrist] = Keypoint2D::absent();
  alpha = inst.detections;
  return inst.ground_truth;
}

void write_json(const fs::path& path, const json& j) {
  fs::create_directories(path.parent_path());
  detail::write_file(path, j.dump() + "\n");
}

}  // namespace

int main(int argc, char** argv) {
  if (argc != 2) {
    std::cerr << "usage: make_fixtures <fixtures-dir>\n";
    return 2;
  }
  const fs::path root = argv[1];
  const auto op18 = *builtin_schema("openpose18");

  std::vector<SequenceDataset> sequences;
  std::vector<DetectionFile> alpha(2);
  sequences.push_back(supine_sequence(11, 40, "seq01", "I01", alpha[0]));
  sequences.push_back(supine_sequence(12, 30, "seq02", "I02", alpha[1]));
  sequences[1].normalization = NormalizationMode::PerImage;

  for (std::size_t s = 0; s < sequences.size(); ++s) {
    const auto& seq = sequences[s];
    fs::create_directories(root / "supine" / "twins");
    detail::write_file(root / "supine" / (seq.sequence_id + ".json"), emit_canonical_json(seq));
    detail::write_file(root / "supine" / "twins" / (seq.sequence_id + ".csv"), emit_wide_csv_ground_truth(seq));
    write_frame_directory_ground_truth(seq, root / "supine" / "twins" / seq.sequence_id);

    // alpha: CanonicalJson, native COCO layout
    fs::create_directories(root / "methods" / "alpha");
    detail::write_file(root / "methods" / "alpha" / (seq.sequence_id + ".json"), emit_canonical_json(alpha[s]));

    // beta: OpenPose-style 18-point frame directories, no score, and a
    // spurious first-ranked detection every fifth frame
    Noise beta_rng(100 + s);
    for (std::size_t f = 0; f < seq.frames.size(); ++f) {
      const auto& frame = seq.frames[f];
      json people = json::array();
      const auto det = perturb(frame.ground_truths[0], 0.06, beta_rng);
      if (f % 5 == 2) {
        GroundTruthPose shifted = frame.ground_truths[0];
        for (auto& k : shifted.keypoints)
          if (k.present) k.x += 2.5 * torso(frame.ground_truths[0]);
        people.push_back({{"pose_keypoints_2d", flat_openpose18(perturb(shifted, 0.06, beta_rng), op18)}});
      }
      if (f % 11 != 6) people.push_back({{"pose_keypoints_2d", flat_openpose18(det, op18)}});
      write_json(root / "methods" / "beta" / seq.sequence_id / (frame.frame_id + ".json"), {{"people", people}});
    }

    // gamma: COCO result list, scored, larger errors
    Noise gamma_rng(200 + s);
    json results = json::array();
    for (const auto& frame : seq.frames) {
      const auto det = perturb(frame.ground_truths[0], 0.22, gamma_rng);
      results.push_back(
          {{"image_id", frame.frame_id}, {"keypoints", flat_coco(det)}, {"score", 0.5 + 0.5 * gamma_rng.uniform()}});
    }
    write_json(root / "methods" / "gamma" / (seq.sequence_id + ".json"), results);
  }

  // parent holding the infant: two annotated people per frame
  {
    DetectionFile unused;
    auto family = supine_sequence(21, 8, "family", "I03", unused);
    family.expected_persons = 2;
    family.metadata["position"] = "lap";
    family.metadata["difficulty"] = "hard";
    Noise rng(300);
    DetectionFile det;
    det.method_name = "alpha";
    det.sequence_id = "family";
    for (std::size_t f = 0; f < family.frames.size(); ++f) {
      auto& frame = family.frames[f];
      GroundTruthPose adult = frame.ground_truths[0];
      adult.role = Role::Adult;
      for (auto& k : adult.keypoints) {
        if (!k.present) continue;
        k.x = 2 * k.x + 180;
        k.y = 1.6 * k.y - 40;
      }
      frame.ground_truths.push_back(adult);
      DetectionFrame df{frame.frame_id, {}};
      auto d_adult = perturb(adult, 0.05, rng);
      d_adult.score = 0.95;
      auto d_infant = perturb(frame.ground_truths[0], 0.1, rng);
      d_infant.score = 0.6 + 0.2 * rng.uniform();
      // the adult is usually found first; some frames miss the infant
      df.detections.push_back(d_adult);
      if (f % 4 != 3) df.detections.push_back(d_infant);
      for (std::size_t r = 0; r < df.detections.size(); ++r) df.detections[r].rank = static_cast<int>(r);
      det.frames.push_back(df);
    }
    fs::create_directories(root / "multi" / "twins");
    detail::write_file(root / "multi" / "family.json", emit_canonical_json(family));
    detail::write_file(root / "multi" / "twins" / "family.csv", emit_wide_csv_ground_truth(family));
    write_frame_directory_ground_truth(family, root / "multi" / "twins" / "family");
    detail::write_file(root / "multi" / "alpha_family.json", emit_canonical_json(det));
  }
  return 0;
}
