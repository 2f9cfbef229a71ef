#include "kpeval/stats.hpp"

#include <algorithm>
#include <cmath>

namespace kpeval {

std::optional<double> median(std::vector<double> values) {
  if (values.empty()) return std::nullopt;
  std::sort(values.begin(), values.end());
  const auto n = values.size();
  if (n % 2 == 1) return values[n / 2];
  return (values[n / 2 - 1] + values[n / 2]) / 2.0;
}

double mean(std::span<const double> values) {
  double sum = 0.0;
  for (double v : values) sum += v;
  return values.empty() ? 0.0 : sum / static_cast<double>(values.size());
}

std::optional<double> sample_stddev(std::span<const double> values) {
  if (values.size() < 2) return std::nullopt;
  const double m = mean(values);
  double ss = 0.0;
  for (double v : values) ss += (v - m) * (v - m);
  return std::sqrt(ss / static_cast<double>(values.size() - 1));
}

std::optional<MeanStd> summarize(std::span<const double> values) {
  if (values.empty()) return std::nullopt;
  return MeanStd{mean(values), sample_stddev(values), static_cast<int>(values.size())};
}

}  // namespace kpeval
