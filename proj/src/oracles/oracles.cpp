#include "oracles.hpp"

#include <algorithm>
#include <cmath>
#include <tuple>

namespace oracle {

std::vector<double> coco_sigmas() {
  return {0.026, 0.025, 0.025, 0.035, 0.035, 0.079, 0.079, 0.072, 0.072,
          0.062, 0.062, 0.107, 0.107, 0.087, 0.087, 0.089, 0.089};
}

std::optional<double> oks(const Pose& det, const Pose& gt, const std::vector<double>& sigmas) {
  double x0 = 0, x1 = 0, y0 = 0, y1 = 0;
  bool any = false;
  int annotated = 0;
  for (const auto& p : gt) {
    if (!p.present) continue;
    ++annotated;
    if (!any) {
      x0 = x1 = p.x;
      y0 = y1 = p.y;
      any = true;
    }
    x0 = std::min(x0, p.x);
    x1 = std::max(x1, p.x);
    y0 = std::min(y0, p.y);
    y1 = std::max(y1, p.y);
  }
  const double area = (x1 - x0) * (y1 - y0);
  if (annotated < 2 || area <= 0) return std::nullopt;

  double total = 0;
  int used = 0;
  for (std::size_t k = 0; k < gt.size(); ++k) {
    if (!gt[k].present || !det[k].present) continue;
    const double dx = det[k].x - gt[k].x;
    const double dy = det[k].y - gt[k].y;
    const double kappa = 2 * sigmas[k];
    total += std::exp(-(dx * dx + dy * dy) / (2 * area * kappa * kappa));
    used++;
  }
  if (used == 0) return std::nullopt;
  return total / used;
}

ApAr ap_ar(const std::vector<Frame>& frames, const std::vector<double>& sigmas) {
  if (frames.size() > 10) throw InstanceTooLarge("more than 10 frames");
  for (const auto& f : frames)
    if (f.detections.size() > 5) throw InstanceTooLarge("more than 5 detections in a frame");

  // matched OKS per (frame, detection), from the score-ordered greedy match
  struct Entry {
    std::size_t frame, det;
    std::optional<double> oks;
  };
  std::vector<Entry> entries;
  int positives = 0;
  for (std::size_t f = 0; f < frames.size(); ++f) {
    const auto& fr = frames[f];
    positives += static_cast<int>(fr.ground_truths.size());
    std::vector<std::size_t> order;
    for (std::size_t d = 0; d < fr.detections.size(); ++d) order.push_back(d);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      const auto& da = fr.detections[a];
      const auto& db = fr.detections[b];
      const double sa = da.score ? *da.score : -INFINITY;
      const double sb = db.score ? *db.score : -INFINITY;
      if (da.score.has_value() != db.score.has_value()) return da.score.has_value();
      if (sa != sb) return sa > sb;
      return da.rank < db.rank;
    });
    std::vector<bool> taken(fr.ground_truths.size(), false);
    for (std::size_t d : order) {
      int best = -1;
      double best_oks = -1;
      for (std::size_t g = 0; g < fr.ground_truths.size(); ++g) {
        if (taken[g]) continue;
        const auto o = oks(fr.detections[d].keypoints, fr.ground_truths[g], sigmas);
        if (o && *o > best_oks) {
          best_oks = *o;
          best = static_cast<int>(g);
        }
      }
      Entry e{f, d, std::nullopt};
      if (best >= 0) {
        taken[static_cast<std::size_t>(best)] = true;
        e.oks = best_oks;
      }
      entries.push_back(e);
    }
  }
  if (positives == 0) return {};

  // global ranking over the whole instance
  std::sort(entries.begin(), entries.end(), [&](const Entry& a, const Entry& b) {
    const auto& da = frames[a.frame].detections[a.det];
    const auto& db = frames[b.frame].detections[b.det];
    if (da.score.has_value() != db.score.has_value()) return da.score.has_value();
    if (da.score && *da.score != *db.score) return *da.score > *db.score;
    return std::tie(frames[a.frame].sequence_id, frames[a.frame].frame_id, da.rank) <
           std::tie(frames[b.frame].sequence_id, frames[b.frame].frame_id, db.rank);
  });

  double ap_total = 0, ar_total = 0;
  for (int ti = 0; ti < 10; ++ti) {
    const double thresholds[] = {0.50, 0.55, 0.60, 0.65, 0.70, 0.75, 0.80, 0.85, 0.90, 0.95};
    const double thr = thresholds[ti];
    std::vector<int> tp_at, seen_at;
    int tp = 0;
    for (std::size_t i = 0; i < entries.size(); ++i) {
      if (entries[i].oks && *entries[i].oks > thr) tp++;
      tp_at.push_back(tp);
      seen_at.push_back(static_cast<int>(i) + 1);
    }
    // sample the interpolated PR curve at recall 0, 0.01, ..., 1
    double area = 0;
    for (int j = 0; j <= 100; ++j) {
      double best = 0;
      for (std::size_t i = 0; i < entries.size(); ++i) {
        // recall_i >= j / 100, compared without rounding
        if (100LL * tp_at[i] < static_cast<long long>(j) * positives) continue;
        best = std::max(best, static_cast<double>(tp_at[i]) / static_cast<double>(seen_at[i]));
      }
      area += best;
    }
    ap_total += area / 101;
    ar_total += static_cast<double>(tp) / static_cast<double>(positives);
  }
  return {100 * ap_total / 10, 100 * ar_total / 10};
}

namespace {

std::vector<double> ranks_quadratic(const std::vector<double>& v) {
  std::vector<double> r(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    int below = 0, equal = 0;
    for (std::size_t j = 0; j < v.size(); ++j) {
      if (v[j] < v[i]) below++;
      else if (v[j] == v[i]) equal++;
    }
    r[i] = below + (equal + 1) / 2.0;
  }
  return r;
}

double pearson(const std::vector<double>& a, const std::vector<double>& b) {
  const double n = static_cast<double>(a.size());
  double sa = 0, sb = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    sa += a[i];
    sb += b[i];
  }
  const double ma = sa / n, mb = sb / n;
  double cov = 0, va = 0, vb = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    cov += (a[i] - ma) * (b[i] - mb);
    va += (a[i] - ma) * (a[i] - ma);
    vb += (b[i] - mb) * (b[i] - mb);
  }
  return cov / std::sqrt(va * vb);
}

// Two-sided tail of Student's t by composite Simpson integration of the
// density on [0, |t|].
double t_two_sided(double t, double dof) {
  const double c = std::exp(std::lgamma((dof + 1) / 2) - std::lgamma(dof / 2)) / std::sqrt(dof * M_PI);
  auto pdf = [&](double x) { return c * std::pow(1 + x * x / dof, -(dof + 1) / 2); };
  const int steps = 20000;
  const double h = std::fabs(t) / steps;
  double s = pdf(0) + pdf(std::fabs(t));
  for (int i = 1; i < steps; ++i) s += (i % 2 ? 4 : 2) * pdf(i * h);
  const double central = s * h / 3;
  return std::max(0.0, 1 - 2 * central);
}

}  // namespace

Correlation spearman(const std::vector<double>& xs, const std::vector<double>& ys) {
  if (xs.size() > 50) throw InstanceTooLarge("more than 50 pairs");
  Correlation c;
  c.rho = pearson(ranks_quadratic(xs), ranks_quadratic(ys));
  const double n = static_cast<double>(xs.size());
  if (std::fabs(c.rho) >= 1) {
    c.p = 0;
  } else {
    c.p = t_two_sided(c.rho * std::sqrt((n - 2) / (1 - c.rho * c.rho)), n - 2);
  }
  return c;
}

double icc(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.size() > 50) throw InstanceTooLarge("more than 50 targets");
  const std::size_t n = a.size();
  const double k = 2;
  double grand = 0;
  for (std::size_t i = 0; i < n; ++i) grand += a[i] + b[i];
  grand /= (k * n);

  double ss_rows = 0, ss_total = 0;
  double col_a = 0, col_b = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double row_mean = (a[i] + b[i]) / k;
    ss_rows += k * (row_mean - grand) * (row_mean - grand);
    ss_total += (a[i] - grand) * (a[i] - grand) + (b[i] - grand) * (b[i] - grand);
    col_a += a[i];
    col_b += b[i];
  }
  col_a /= n;
  col_b /= n;
  const double ss_cols = n * ((col_a - grand) * (col_a - grand) + (col_b - grand) * (col_b - grand));
  const double ss_err = ss_total - ss_rows - ss_cols;
  const double ms_rows = ss_rows / (n - 1);
  const double ms_err = ss_err / ((n - 1) * (k - 1));
  return (ms_rows - ms_err) / (ms_rows + (k - 1) * ms_err);
}

}  // namespace oracle
