#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <string_view>

#include "kpeval/core.hpp"

namespace kpeval {

/// Per-keypoint falloff constants. Stores the COCO sigma; the coefficient
/// entering the similarity kernel is kappa = 2 * sigma.
class SigmaTable {
 public:
  /// The published COCO keypoint-evaluation sigmas.
  static SigmaTable coco_default();

  double sigma(KeypointId id) const { return sigma_[index_of(id)]; }
  double kappa(KeypointId id) const { return 2.0 * sigma_[index_of(id)]; }

  /// Throws InvalidArgument unless value is finite and > 0.
  void set_sigma(KeypointId id, double value);

  /// Stable 64-bit FNV-1a digest of the rendered table, as 16 hex digits.
  std::string hash() const;

  /// `keypoint_name = value` per line, canonical order.
  std::string render() const;

  const std::array<double, kNumKeypoints>& values() const noexcept { return sigma_; }

 private:
  std::array<double, kNumKeypoints> sigma_{};
};

/// Overrides the COCO defaults with the entries found in `text`.
SigmaTable parse_sigma_table(std::string_view text, std::string_view source_name = "<sigma>");
SigmaTable load_sigma_table(const std::string& path);

}  // namespace kpeval
