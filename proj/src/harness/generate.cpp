#include "kpeval/harness.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include <json.hpp>

#include "kpeval/errors.hpp"
#include "kpeval/sigma.hpp"

namespace kpeval {

namespace {

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  std::uint64_t below(std::uint64_t n) { return static_cast<std::uint64_t>(uniform() * static_cast<double>(n)); }

 private:
  std::mt19937_64 engine_;
};

// Template in units where the torso (Neck-MidHip) is 170 long. Coordinates
// are integers so that scaled, translated copies stay exact.
constexpr std::array<std::array<double, 2>, kNumKeypoints> kTemplate{{
    {200, 80}, {214, 68}, {186, 68}, {232, 78}, {168, 78}, {250, 150}, {150, 150}, {290, 220}, {110, 220},
    {300, 290}, {100, 290}, {235, 320}, {165, 320}, {270, 400}, {130, 400}, {280, 480}, {120, 480},
}};
constexpr double kTemplateTorso = 170.0;
constexpr double kTemplateBoxArea = (300.0 - 100.0) * (480.0 - 68.0);

std::string frame_name(int i, int n) {
  const auto width = std::max<std::size_t>(4, std::to_string(n).size());
  auto s = std::to_string(i);
  return "f" + std::string(width - s.size(), '0') + s;
}

}  // namespace

std::string_view to_string(JitterKind k) noexcept {
  switch (k) {
    case JitterKind::None: return "none";
    case JitterKind::Fixed: return "fixed";
    case JitterKind::Random: return "random";
  }
  return "none";
}

std::optional<JitterKind> jitter_from_string(std::string_view text) noexcept {
  if (text == "none") return JitterKind::None;
  if (text == "fixed") return JitterKind::Fixed;
  if (text == "random") return JitterKind::Random;
  return std::nullopt;
}

std::string_view to_string(ScoreModel m) noexcept {
  switch (m) {
    case ScoreModel::PerfectlyCorrelated: return "perfect";
    case ScoreModel::Anticorrelated: return "anti";
    case ScoreModel::Constant: return "constant";
    case ScoreModel::Noisy: return "noisy";
  }
  return "perfect";
}

std::optional<ScoreModel> score_model_from_string(std::string_view text) noexcept {
  if (text == "perfect") return ScoreModel::PerfectlyCorrelated;
  if (text == "anti") return ScoreModel::Anticorrelated;
  if (text == "constant") return ScoreModel::Constant;
  if (text == "noisy") return ScoreModel::Noisy;
  return std::nullopt;
}

void ErrorModel::validate(int n_frames) const {
  if (n_frames < 1) throw Error(ErrorCode::ConfigError, "need at least one frame");
  auto prob = [](double p, const char* name) {
    if (!(p >= 0.0 && p <= 1.0)) throw Error(ErrorCode::ConfigError, std::string(name) + " must lie in [0, 1]");
  };
  prob(drop_keypoint_prob, "drop-keypoint probability");
  prob(drop_detection_prob, "drop-detection probability");
  prob(duplicate_detection_prob, "duplicate probability");
  if (!(jitter_fraction >= 0.0) || !std::isfinite(jitter_fraction))
    throw Error(ErrorCode::ConfigError, "jitter fraction must be finite and non-negative");
  if (drop_detection_count && (*drop_detection_count < 0 || *drop_detection_count > n_frames))
    throw Error(ErrorCode::ConfigError, "drop-detection count outside [0, frames]");
}

GeneratedInstance generate(std::uint64_t seed, int n_frames, const ErrorModel& model, const std::string& sequence_id) {
  model.validate(n_frames);
  Rng rng(seed);
  const auto sigma = SigmaTable::coco_default();

  // per-sequence scale in steps of 1/64 keeps every coordinate exact
  const double scale = (48.0 + static_cast<double>(rng.below(33))) / 64.0;
  const double torso = kTemplateTorso * scale;
  const double box_area = kTemplateBoxArea * scale * scale;

  std::vector<bool> dropped(static_cast<std::size_t>(n_frames), false);
  if (model.drop_detection_count) {
    std::vector<int> idx(static_cast<std::size_t>(n_frames));
    for (int i = 0; i < n_frames; ++i) idx[static_cast<std::size_t>(i)] = i;
    for (int i = 0; i < *model.drop_detection_count; ++i) {
      const auto j = static_cast<std::size_t>(i) + rng.below(static_cast<std::uint64_t>(n_frames - i));
      std::swap(idx[static_cast<std::size_t>(i)], idx[j]);
      dropped[static_cast<std::size_t>(idx[static_cast<std::size_t>(i)])] = true;
    }
  }

  GeneratedInstance out;
  auto& gt = out.ground_truth;
  gt.sequence_id = sequence_id;
  gt.metadata["generator_seed"] = std::to_string(seed);
  out.detections.method_name = "synthetic";
  out.detections.sequence_id = sequence_id;
  auto& ex = out.expected;
  ex.frames = n_frames;

  std::vector<double> frame_oks, nmh_values;
  for (int f = 0; f < n_frames; ++f) {
    const double tx = 20.0 + static_cast<double>(rng.below(200));
    const double ty = 20.0 + static_cast<double>(rng.below(120));
    const bool drop_frame = rng.uniform() < model.drop_detection_prob;
    const std::string id = frame_name(f, n_frames);

    GroundTruthPose pose;
    for (std::size_t k = 0; k < kNumKeypoints; ++k)
      pose.keypoints[k] = Keypoint2D::at(kTemplate[k][0] * scale + tx, kTemplate[k][1] * scale + ty);
    gt.frames.push_back(FrameRecord{id, std::nullopt, std::nullopt, {pose}, {}});

    CanonicalPose det;
    double ks_sum = 0.0;
    int kept = 0;
    std::vector<double> errors;
    for (std::size_t k = 0; k < kNumKeypoints; ++k) {
      const double angle = 2.0 * std::numbers::pi * rng.uniform();
      const double u = rng.uniform();
      const bool drop_kp = rng.uniform() < model.drop_keypoint_prob;
      double frac = 0.0;
      if (model.jitter == JitterKind::Fixed) frac = model.jitter_fraction;
      else if (model.jitter == JitterKind::Random) frac = model.jitter_fraction * u;
      if (drop_kp) continue;
      const double d = frac * torso;
      det.keypoints[k] = Keypoint2D::at(pose.keypoints[k].x + d * std::cos(angle),
                                        pose.keypoints[k].y + d * std::sin(angle), 1.0);
      const double kappa = sigma.kappa(keypoint_at(k));
      ks_sum += std::exp(-(d * d) / (2.0 * box_area * kappa * kappa));
      errors.push_back(100.0 * frac);
      ++kept;
    }
    const bool duplicate = rng.uniform() < model.duplicate_detection_prob;
    const double noise = rng.uniform();

    DetectionFrame df{id, {}};
    const bool missing = (model.drop_detection_count ? dropped[static_cast<std::size_t>(f)] : drop_frame) || kept == 0;
    if (missing) {
      ++ex.missing_detections;
    } else {
      ++ex.detected_frames;
      ex.missing_keypoints += static_cast<long long>(kNumKeypoints) - kept;
      const double o = ks_sum / kept;
      frame_oks.push_back(o);
      nmh_values.insert(nmh_values.end(), errors.begin(), errors.end());
      switch (model.score_model) {
        case ScoreModel::PerfectlyCorrelated: det.score = o; break;
        case ScoreModel::Anticorrelated: det.score = 1.0 - o; break;
        case ScoreModel::Constant: det.score = 0.5; break;
        case ScoreModel::Noisy: det.score = std::clamp(o + 0.2 * (noise - 0.5), 0.0, 1.0); break;
      }
      det.rank = 0;
      df.detections.push_back(det);
      if (duplicate) {
        auto copy = det;
        copy.rank = 1;
        copy.score = *det.score * 0.5;
        df.detections.push_back(copy);
        ++ex.duplicates;
      }
    }
    out.detections.frames.push_back(std::move(df));
  }

  const long long max_data = static_cast<long long>(n_frames) * static_cast<long long>(kNumKeypoints);
  ex.missing_percent =
      100.0 * static_cast<double>(static_cast<long long>(ex.missing_detections) * static_cast<long long>(kNumKeypoints) +
                                  ex.missing_keypoints) /
      static_cast<double>(max_data);
  if (!frame_oks.empty()) {
    double s = 0.0;
    for (double o : frame_oks) s += o;
    ex.mean_oks = s / static_cast<double>(frame_oks.size());
  }
  if (!nmh_values.empty()) {
    double s = 0.0;
    for (double v : nmh_values) s += v;
    ex.nmh_percent = s / static_cast<double>(nmh_values.size());
  }
  if (ex.detected_frames > 0) ex.redundant_percent = 100.0 * ex.duplicates / ex.detected_frames;

  // AP/AR in closed form when every frame is detected once with the same OKS
  const bool uniform_oks = model.jitter != JitterKind::Random && model.drop_keypoint_prob == 0.0;
  if (uniform_oks && ex.missing_detections == 0 && ex.duplicates == 0 && !frame_oks.empty()) {
    const double o = frame_oks.front();
    int passed = 0;
    bool clear = true;
    for (double t : {0.50, 0.55, 0.60, 0.65, 0.70, 0.75, 0.80, 0.85, 0.90, 0.95}) {
      if (std::fabs(o - t) < 1e-9) clear = false;
      if (o > t) ++passed;
    }
    if (clear) {
      ex.ap = 100.0 * passed / 10.0;
      ex.ar = ex.ap;
    }
  }

  // rank correlation is exactly +-1 when scores are a monotone function of
  // well separated OKS values
  if ((model.score_model == ScoreModel::PerfectlyCorrelated || model.score_model == ScoreModel::Anticorrelated) &&
      frame_oks.size() >= 3) {
    auto sorted = frame_oks;
    std::sort(sorted.begin(), sorted.end());
    bool separated = true;
    for (std::size_t i = 1; i < sorted.size(); ++i)
      if (sorted[i] - sorted[i - 1] < 1e-9) separated = false;
    if (separated) ex.spearman_rho = model.score_model == ScoreModel::PerfectlyCorrelated ? 1.0 : -1.0;
  }
  return out;
}

std::string render_expected_json(std::uint64_t seed, const ErrorModel& model, const ExpectedMetrics& ex) {
  using json = nlohmann::ordered_json;
  auto opt = [](const std::optional<double>& v) { return v ? json(*v) : json(nullptr); };
  json j;
  j["seed"] = seed;
  j["model"] = {{"jitter", std::string(to_string(model.jitter))},
                {"jitter_fraction", model.jitter_fraction},
                {"drop_keypoint_prob", model.drop_keypoint_prob},
                {"drop_detection_prob", model.drop_detection_prob},
                {"drop_detection_count", model.drop_detection_count ? json(*model.drop_detection_count) : json(nullptr)},
                {"duplicate_detection_prob", model.duplicate_detection_prob},
                {"score_model", std::string(to_string(model.score_model))}};
  j["expected"] = {{"frames", ex.frames},
                   {"detected_frames", ex.detected_frames},
                   {"missing_detections", ex.missing_detections},
                   {"missing_keypoints", ex.missing_keypoints},
                   {"duplicates", ex.duplicates},
                   {"method_keypoint_count", kNumKeypoints},
                   {"mean_oks", opt(ex.mean_oks)},
                   {"nmh_percent", opt(ex.nmh_percent)},
                   {"missing_percent", ex.missing_percent},
                   {"redundant_percent", opt(ex.redundant_percent)},
                   {"ap", opt(ex.ap)},
                   {"ar", opt(ex.ar)},
                   {"spearman_rho", opt(ex.spearman_rho)}};
  return j.dump(2) + "\n";
}

}  // namespace kpeval
