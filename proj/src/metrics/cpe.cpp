#include <algorithm>
#include <cmath>

#include "kpeval/errors.hpp"
#include "kpeval/metrics.hpp"

namespace kpeval {

namespace {

double rescale(double percent, double c) { return 1.0 - std::min(1.0, percent / (c * 100.0)); }

}  // namespace

CpeResult cpe(double nmh_mean_percent, double missing_percent, double c) {
  if (!(c > 0.0) || !std::isfinite(c)) throw Error(ErrorCode::InvalidArgument, "CPE coefficient must be positive");
  if (!(nmh_mean_percent >= 0.0) || !(missing_percent >= 0.0))
    throw Error(ErrorCode::InvalidArgument, "CPE inputs must be non-negative percentages");
  CpeResult r;
  r.c = c;
  r.f_nmh = rescale(nmh_mean_percent, c);
  r.f_missing = rescale(missing_percent, c);
  r.cpe = (r.f_nmh + r.f_missing) / 2.0;
  return r;
}

}  // namespace kpeval
