#pragma once

#include <optional>
#include <span>
#include <vector>

namespace kpeval {

/// Median; an even count yields the mean of the two central values.
/// Empty input gives nullopt.
std::optional<double> median(std::vector<double> values);

double mean(std::span<const double> values);

/// Sample standard deviation (n - 1). Needs at least two values.
std::optional<double> sample_stddev(std::span<const double> values);

struct MeanStd {
  double mean = 0.0;
  std::optional<double> stddev;
  int n = 0;

  friend bool operator==(const MeanStd&, const MeanStd&) = default;
};

std::optional<MeanStd> summarize(std::span<const double> values);

}  // namespace kpeval
