#pragma once

// Small constructors shared by the unit and acceptance suites.

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "kpeval/core.hpp"
#include "kpeval/detail/text.hpp"

namespace kpeval::test {

inline std::filesystem::path fixture_dir() { return KPEVAL_FIXTURE_DIR; }
inline std::filesystem::path config_dir() { return KPEVAL_CONFIG_DIR; }

inline std::string slurp(const std::filesystem::path& p) { return detail::read_file(p); }

// An upright 17-point figure, about 120 x 240 px, with its nose at (x0, y0).
inline GroundTruthPose figure(double x0 = 100.0, double y0 = 50.0, Role role = Role::Infant) {
  static const double xy[kNumKeypoints][2] = {
      {0, 0},    {6, -6},    {-6, -6},   {14, -2},   {-14, -2},  {30, 40},  {-30, 40},  {50, 80},  {-50, 80},
      {60, 120}, {-60, 120}, {20, 130},  {-20, 130}, {25, 180},  {-25, 180}, {28, 240}, {-28, 240}};
  GroundTruthPose gt;
  gt.role = role;
  for (std::size_t k = 0; k < kNumKeypoints; ++k) gt.keypoints[k] = Keypoint2D::at(x0 + xy[k][0], y0 + xy[k][1]);
  return gt;
}

inline CanonicalPose as_detection(const GroundTruthPose& gt, std::optional<double> score = std::nullopt, int rank = 0) {
  CanonicalPose p;
  p.keypoints = gt.keypoints;
  p.score = score;
  p.rank = rank;
  return p;
}

inline CanonicalPose shifted(const GroundTruthPose& gt, double dx, double dy, std::optional<double> score = std::nullopt,
                             int rank = 0) {
  auto p = as_detection(gt, score, rank);
  for (auto& k : p.keypoints)
    if (k.present) {
      k.x += dx;
      k.y += dy;
    }
  return p;
}

// Uniform doubles in [0, 1) from a seeded engine, as used by the random
// instance generators.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  int integer(int lo, int hi) { return lo + static_cast<int>(uniform() * (hi - lo + 1)); }
  bool chance(double p) { return uniform() < p; }

 private:
  std::mt19937_64 engine_;
};

}  // namespace kpeval::test
