#include <algorithm>
#include <map>

#include "kpeval/errors.hpp"
#include "kpeval/metrics.hpp"
#include "kpeval/report.hpp"

namespace kpeval {

namespace {

using FramePtr = const FrameEvaluation*;

struct Group {
  std::vector<const SequenceEvaluation*> sequences;
};

std::vector<FramePtr> sorted_frames(const SequenceEvaluation& s) {
  std::vector<FramePtr> frames;
  frames.reserve(s.frames.size());
  for (const auto& f : s.frames) frames.push_back(&f);
  std::stable_sort(frames.begin(), frames.end(), [](FramePtr a, FramePtr b) { return a->frame_id < b->frame_id; });
  return frames;
}

std::optional<double> mean_of(const std::vector<double>& v) {
  if (v.empty()) return std::nullopt;
  return mean(v);
}

MetricReport reduce(const Group& group, const AggregateOptions& opt, std::vector<Warning>& warnings) {
  MetricReport r;
  const auto& first = *group.sequences.front();
  r.method_name = first.method_name;
  r.dataset_id = opt.dataset_id;
  r.input_mode = opt.input_mode;
  if (opt.grouping == Grouping::Sequence) r.sequence_id = first.sequence_id;
  r.selection = opt.selection;
  r.scope = opt.scope;

  std::vector<double> oks_values, nmh_all, score_xs, oks_ys;
  std::array<std::vector<double>, kNumKeypoints> nmh_kp;
  std::vector<FrameMatching> matchings;
  long long provided = 0, expected = 0;
  int frames_with_detection = 0, ground_truths = 0;
  int m_kp = first.method_keypoint_count;
  auto& c = r.counts;
  c.sequences = static_cast<int>(group.sequences.size());

  for (const auto* seq : group.sequences) {
    if (seq->method_keypoint_count != m_kp)
      throw Error(ErrorCode::InvalidArgument, seq->method_name + ": inconsistent native keypoint counts");
    r.multi_person_caveat = r.multi_person_caveat || seq->expected_persons > 1;
    for (FramePtr f : sorted_frames(*seq)) {
      ++c.frames;
      c.detections += f->detections;
      c.matched_pairs += f->matched_pairs;
      provided += f->detections;
      if (f->detections > 0) {
        ++frames_with_detection;
        expected += seq->expected_persons;
      }
      ground_truths += f->matching.ground_truths;
      matchings.push_back(f->matching);
      for (const auto& t : f->targets) {
        ++c.targets;
        if (!t.selected) {
          ++c.missing_detections;
          continue;
        }
        c.missing_keypoints += t.missing_keypoints;
        if (t.oks) oks_values.push_back(*t.oks);
        if (t.oks && t.score) {
          score_xs.push_back(*t.score);
          oks_ys.push_back(*t.oks);
        }
        for (std::size_t k = 0; k < kNumKeypoints; ++k) {
          if (!t.nmh[k]) continue;
          nmh_all.push_back(100.0 * *t.nmh[k]);
          nmh_kp[k].push_back(100.0 * *t.nmh[k]);
        }
      }
    }
  }

  auto warn = [&](std::string code, std::string message) {
    warnings.push_back({std::move(code), r.method_name + ": " + std::move(message), r.sequence_id, {}});
  };

  r.mean_oks = summarize(oks_values);
  r.nmh_overall = summarize(nmh_all);
  for (std::size_t k = 0; k < kNumKeypoints; ++k) r.nmh_per_keypoint[k] = summarize(nmh_kp[k]);

  if (ground_truths > 0) {
    const auto apar = ap_ar(matchings);
    r.ap = apar.ap;
    r.ar = apar.ar;
  }
  if (c.targets > 0) r.missing_percent = missing_data(c.targets, m_kp, c.missing_detections, c.missing_keypoints).percent;
  else warn("no_targets", "no ground truth in scope; missing data undefined");
  if (frames_with_detection > 0)
    r.redundant_percent = 100.0 * static_cast<double>(provided - expected) / frames_with_detection;
  if (r.nmh_overall && r.missing_percent) r.cpe = cpe(r.nmh_overall->mean, *r.missing_percent, opt.cpe_c).cpe;

  r.spearman_n = static_cast<int>(score_xs.size());
  try {
    const auto s = spearman(score_xs, oks_ys);
    r.spearman_rho = s.rho;
    r.spearman_p = s.p;
  } catch (const Error& e) {
    if (e.code() != ErrorCode::InsufficientData && e.code() != ErrorCode::ZeroVariance) throw;
    warn("spearman_undefined", e.what());
  }
  return r;
}

}  // namespace

AggregateResult aggregate(std::span<const SequenceEvaluation> evaluations, const AggregateOptions& options) {
  AggregateResult out;
  std::vector<std::string> methods;
  std::map<std::string, std::vector<const SequenceEvaluation*>> by_method;
  for (const auto& e : evaluations) {
    auto& list = by_method[e.method_name];
    if (list.empty()) methods.push_back(e.method_name);
    list.push_back(&e);
  }

  for (const auto& method : methods) {
    auto seqs = by_method[method];
    std::stable_sort(seqs.begin(), seqs.end(), [](const SequenceEvaluation* a, const SequenceEvaluation* b) {
      return a->sequence_id < b->sequence_id;
    });
    std::erase_if(seqs, [&](const SequenceEvaluation* s) {
      if (!s->frames.empty()) return false;
      out.warnings.push_back({"empty_group", method + ": sequence without frames", s->sequence_id, {}});
      return true;
    });
    if (seqs.empty()) {
      out.warnings.push_back({"empty_group", method + ": nothing to report", {}, {}});
      continue;
    }

    if (options.grouping == Grouping::Sequence) {
      for (const auto* s : seqs) out.reports.push_back(reduce(Group{{s}}, options, out.warnings));
      continue;
    }

    auto report = reduce(Group{seqs}, options, out.warnings);
    AggregateOptions per_seq = options;
    per_seq.grouping = Grouping::Sequence;
    std::vector<Warning> ignored;
    std::vector<double> oks, nmh, missing;
    for (const auto* s : seqs) {
      const auto r = reduce(Group{{s}}, per_seq, ignored);
      if (r.mean_oks) oks.push_back(r.mean_oks->mean);
      if (r.nmh_overall) nmh.push_back(r.nmh_overall->mean);
      if (r.missing_percent) missing.push_back(*r.missing_percent);
    }
    report.sequence_means = SequenceMeans{mean_of(oks), mean_of(nmh), mean_of(missing), static_cast<int>(seqs.size())};
    out.reports.push_back(std::move(report));
  }
  return out;
}

}  // namespace kpeval
