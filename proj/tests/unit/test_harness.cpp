#include <doctest.h>

#include "builders.hpp"
#include "kpeval/errors.hpp"
#include "kpeval/harness.hpp"
#include "kpeval/pipeline.hpp"
#include "kpeval/report.hpp"

using namespace kpeval;

namespace {

MetricReport evaluate_instance(const GeneratedInstance& inst) {
  const auto aligned = align(inst.ground_truth, inst.detections);
  const std::vector evals{evaluate_sequence(aligned.dataset, "gen", 17, EvalOptions{})};
  return aggregate(evals, AggregateOptions{}).reports.at(0);
}

}  // namespace

TEST_CASE("zero-error model") {
  const auto inst = generate(3, 12, ErrorModel{});
  const auto& e = inst.expected;
  CHECK(e.mean_oks == 1.0);
  CHECK(e.nmh_percent == 0.0);
  CHECK(e.missing_percent == 0.0);
  CHECK(e.redundant_percent == 0.0);
  CHECK(e.ap == 100.0);
  CHECK(e.ar == 100.0);

  const auto r = evaluate_instance(inst);
  CHECK(r.mean_oks->mean == 1.0);
  CHECK(r.nmh_overall->mean == 0.0);
  CHECK(r.ap == 100.0);
  CHECK(r.cpe == 1.0);
}

TEST_CASE("fixed jitter of 8% of the torso") {
  ErrorModel m;
  m.jitter = JitterKind::Fixed;
  m.jitter_fraction = 0.08;
  const auto inst = generate(5, 20, m);
  CHECK(*inst.expected.nmh_percent == doctest::Approx(8.0).epsilon(1e-12));
  const auto r = evaluate_instance(inst);
  CHECK(std::abs(r.nmh_overall->mean - 8.0) <= 1e-9);
  CHECK(std::abs(r.mean_oks->mean - *inst.expected.mean_oks) <= 1e-9);
}

TEST_CASE("two dropped frames out of 100") {
  ErrorModel m;
  m.drop_detection_count = 2;
  const auto inst = generate(9, 100, m);
  CHECK(inst.expected.missing_detections == 2);
  CHECK(inst.expected.missing_percent == 2.0);
  const auto r = evaluate_instance(inst);
  CHECK(r.missing_percent == 2.0);
  CHECK(r.counts.missing_detections == 2);
}

TEST_CASE("generation is deterministic in the seed") {
  ErrorModel m;
  m.jitter = JitterKind::Random;
  m.jitter_fraction = 0.2;
  m.drop_keypoint_prob = 0.1;
  m.duplicate_detection_prob = 0.2;
  m.score_model = ScoreModel::Noisy;
  const auto a = generate(77, 30, m);
  const auto b = generate(77, 30, m);
  CHECK(a.ground_truth == b.ground_truth);
  CHECK(emit_canonical_json(a.detections) == emit_canonical_json(b.detections));
  CHECK(render_expected_json(77, m, a.expected) == render_expected_json(77, m, b.expected));
  CHECK(emit_canonical_json(generate(78, 30, m).detections) != emit_canonical_json(a.detections));
}

TEST_CASE("probabilistic models carry realized counts") {
  ErrorModel m;
  m.jitter = JitterKind::Fixed;
  m.jitter_fraction = 0.05;
  m.drop_keypoint_prob = 0.15;
  m.drop_detection_prob = 0.2;
  m.duplicate_detection_prob = 0.3;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    CAPTURE(seed);
    const auto inst = generate(seed, 25, m);
    const auto r = evaluate_instance(inst);
    CHECK(r.counts.missing_detections == inst.expected.missing_detections);
    CHECK(r.counts.missing_keypoints == inst.expected.missing_keypoints);
    CHECK(std::abs(*r.missing_percent - inst.expected.missing_percent) <= 1e-9);
    if (inst.expected.redundant_percent) CHECK(std::abs(*r.redundant_percent - *inst.expected.redundant_percent) <= 1e-9);
    if (inst.expected.nmh_percent) CHECK(std::abs(r.nmh_overall->mean - *inst.expected.nmh_percent) <= 1e-9);
  }
}

TEST_CASE("invalid models") {
  auto code = [](int frames, ErrorModel m) {
    try {
      generate(1, frames, m);
    } catch (const Error& e) {
      return e.code();
    }
    return ErrorCode::InvalidArgument;
  };
  CHECK(code(0, ErrorModel{}) == ErrorCode::ConfigError);
  ErrorModel p;
  p.drop_keypoint_prob = 1.5;
  CHECK(code(5, p) == ErrorCode::ConfigError);
  ErrorModel c;
  c.drop_detection_count = 6;
  CHECK(code(5, c) == ErrorCode::ConfigError);
}
