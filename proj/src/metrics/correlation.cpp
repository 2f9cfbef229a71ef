#include <algorithm>
#include <cmath>
#include <numeric>

#include <boost/math/distributions/students_t.hpp>

#include "kpeval/errors.hpp"
#include "kpeval/metrics.hpp"

namespace kpeval {

namespace {

// Ranks starting at 1; tied values share the mean of the ranks they span.
std::vector<double> mid_ranks(std::span<const double> values) {
  std::vector<std::size_t> order(values.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
  std::vector<double> ranks(values.size());
  std::size_t i = 0;
  while (i < order.size()) {
    std::size_t j = i;
    while (j + 1 < order.size() && values[order[j + 1]] == values[order[i]]) ++j;
    const double r = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
    for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = r;
    i = j + 1;
  }
  return ranks;
}

double centered_sum_squares(std::span<const double> v, double m) {
  double ss = 0.0;
  for (double x : v) ss += (x - m) * (x - m);
  return ss;
}

double sample_variance(std::span<const double> v) {
  const double m = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
  return centered_sum_squares(v, m) / static_cast<double>(v.size() - 1);
}

}  // namespace

SpearmanResult spearman(std::span<const double> xs, std::span<const double> ys) {
  if (xs.size() != ys.size()) throw Error(ErrorCode::InsufficientData, "spearman inputs differ in length");
  const auto n = xs.size();
  if (n < 3) throw Error(ErrorCode::InsufficientData, "spearman needs at least 3 pairs");

  const auto rx = mid_ranks(xs);
  const auto ry = mid_ranks(ys);
  const double mx = std::accumulate(rx.begin(), rx.end(), 0.0) / static_cast<double>(n);
  const double my = std::accumulate(ry.begin(), ry.end(), 0.0) / static_cast<double>(n);
  double sxy = 0.0;
  for (std::size_t i = 0; i < n; ++i) sxy += (rx[i] - mx) * (ry[i] - my);
  const double sxx = centered_sum_squares(rx, mx);
  const double syy = centered_sum_squares(ry, my);
  if (sxx == 0.0 || syy == 0.0) throw Error(ErrorCode::ZeroVariance, "spearman undefined for constant input");

  SpearmanResult r;
  r.n = static_cast<int>(n);
  r.rho = std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
  const double dof = static_cast<double>(n) - 2.0;
  const double denom = 1.0 - r.rho * r.rho;
  if (denom <= 0.0) {
    r.p = 0.0;
  } else {
    const double t = r.rho * std::sqrt(dof / denom);
    const boost::math::students_t dist(dof);
    r.p = std::min(1.0, 2.0 * boost::math::cdf(boost::math::complement(dist, std::fabs(t))));
  }
  return r;
}

double icc(std::span<const double> coder_a, std::span<const double> coder_b) {
  if (coder_a.size() != coder_b.size()) throw Error(ErrorCode::InsufficientData, "coders rated different target counts");
  const auto n = coder_a.size();
  if (n < 3) throw Error(ErrorCode::InsufficientData, "ICC needs at least 3 paired targets");

  // With two coders the row mean square equals var(a + b) / 2 and the
  // residual mean square equals var(a - b) / 2.
  std::vector<double> sums(n), diffs(n);
  for (std::size_t i = 0; i < n; ++i) {
    sums[i] = coder_a[i] + coder_b[i];
    diffs[i] = coder_a[i] - coder_b[i];
  }
  const double ms_rows = sample_variance(sums) / 2.0;
  const double ms_error = sample_variance(diffs) / 2.0;
  if (ms_rows + ms_error == 0.0) throw Error(ErrorCode::ZeroVariance, "ICC undefined when every rating is equal");
  return (ms_rows - ms_error) / (ms_rows + ms_error);
}

}  // namespace kpeval
