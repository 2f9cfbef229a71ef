#pragma once

/// \file metrics.hpp
/// \brief Keypoint similarity, OKS, COCO-style AP/AR, Neck-MidHip errors,
/// missing data, CPE, score/OKS rank correlation and inter-coder ICC.

#include <array>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "kpeval/core.hpp"
#include "kpeval/schema.hpp"
#include "kpeval/sigma.hpp"

namespace kpeval {

// ---------------------------------------------------------------- OKS

/// exp(-d^2 / (2 s^2 c^2)). Throws DegenerateScale when s <= 0 and
/// InvalidArgument for c <= 0 or d < 0.
double keypoint_similarity(double d, double s, double c);

/// sqrt of the area of the box spanned by the present ground-truth
/// keypoints. Throws DegenerateScale when either extent is zero.
double bbox_scale(const GroundTruthPose& gt);

struct OksBreakdown {
  std::array<std::optional<double>, kNumKeypoints> ks{};
  double oks = 0.0;
  int k_used = 0;
  double scale = 0.0;
};

/// Throws NoCommonKeypoints or DegenerateScale.
OksBreakdown oks(const CanonicalPose& det, const GroundTruthPose& gt, const SigmaTable& sigma);

/// Same as oks(...).oks, with the two failure cases mapped to nullopt.
std::optional<double> try_oks(const CanonicalPose& det, const GroundTruthPose& gt, const SigmaTable& sigma) noexcept;

// ---------------------------------------------------------------- AP / AR

inline constexpr std::array<double, 10> kOksThresholds{0.50, 0.55, 0.60, 0.65, 0.70,
                                                       0.75, 0.80, 0.85, 0.90, 0.95};

/// A detection after ground-truth assignment: the OKS of its matched
/// ground truth, or nullopt when it was left unmatched.
struct ScoredDetection {
  std::optional<double> score;
  int rank = 0;
  std::optional<double> matched_oks;
};

struct FrameMatching {
  std::string sequence_id;
  std::string frame_id;
  int ground_truths = 0;
  std::vector<ScoredDetection> detections;
};

struct ThresholdPrecisionRecall {
  double threshold = 0.0;
  double precision = 0.0;  ///< 101-point interpolated area under the PR curve
  double recall = 0.0;
};

struct ApArResult {
  double ap = 0.0;
  double ar = 0.0;
  std::vector<ThresholdPrecisionRecall> per_threshold;
};

/// Detections are ranked globally by score (unscored last, then by
/// sequence, frame id and rank); a matched pair with OKS > t is a true
/// positive at threshold t.
ApArResult ap_ar(std::span<const FrameMatching> frames);

// ---------------------------------------------------------------- Neck-MidHip

enum class NormalizerSource { SequenceMedian, ThisImage };

std::optional<double> nmh_length_image(const GroundTruthPose& target);

/// Median of the per-image lengths over every ground truth of `role`
/// (Unknown = every ground truth). Throws NoNormalizer when none is defined.
double nmh_length_sequence(const SequenceDataset& dataset, Role role = Role::Infant);

struct NmhError {
  std::array<std::optional<double>, kNumKeypoints> error{};
  double normalizer = 0.0;
  NormalizerSource source = NormalizerSource::SequenceMedian;
};

/// Errors as fractions of the normalizer. Throws DegenerateScale when the
/// normalizer is not positive.
NmhError nmh_errors(const CanonicalPose& det, const GroundTruthPose& gt, double normalizer,
                    NormalizerSource source = NormalizerSource::SequenceMedian);

// ---------------------------------------------------------------- missing data

struct MissingDataReport {
  int images = 0;
  int method_keypoint_count = 0;
  int missing_detections = 0;
  long long missing_keypoints = 0;
  double percent = 0.0;

  double detection_part() const;  ///< share of percent due to missing detections
  double keypoint_part() const;
};

/// percent = 100 (mdet * m_kp + mkp) / (N * m_kp). Throws InsufficientData
/// for N = 0 and InvalidArgument for m_kp <= 0.
MissingDataReport missing_data(int images, int method_keypoint_count, int missing_detections,
                               long long missing_keypoints);

/// Counts from the per-frame selection: nullopt is a missing detection,
/// otherwise the selected pose's native missing keypoints are added.
MissingDataReport missing_data(std::span<const std::optional<CanonicalPose>> selected_per_frame,
                               int method_keypoint_count);

/// Native missing count of a pose, falling back to the canonical layout.
int missing_keypoints(const CanonicalPose& pose) noexcept;

// ---------------------------------------------------------------- CPE

inline constexpr double kDefaultCpeCoefficient = 0.5;

struct CpeResult {
  double cpe = 0.0;
  double f_nmh = 0.0;
  double f_missing = 0.0;
  double c = kDefaultCpeCoefficient;
};

/// f(x) = 1 - min(1, x / (100 c)); cpe is the mean of f over the two
/// percentages.
CpeResult cpe(double nmh_mean_percent, double missing_percent, double c = kDefaultCpeCoefficient);

// ---------------------------------------------------------------- scores & correlations

std::optional<double> detection_score(const CanonicalPose& det, ScorePolicy policy);

struct SpearmanResult {
  double rho = 0.0;
  double p = 1.0;
  int n = 0;
};

/// Mid-ranks on ties, Pearson on ranks, two-sided p from Student's t with
/// n - 2 degrees of freedom. Throws InsufficientData (n < 3, or length
/// mismatch) and ZeroVariance.
SpearmanResult spearman(std::span<const double> xs, std::span<const double> ys);

/// ICC(3,1): two-way mixed, single measure, consistency, for two coders
/// rating the same targets. Throws InsufficientData and ZeroVariance.
double icc(std::span<const double> coder_a, std::span<const double> coder_b);

}  // namespace kpeval
