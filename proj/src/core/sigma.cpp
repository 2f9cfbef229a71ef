#include "kpeval/sigma.hpp"

#include <cmath>
#include <cstdio>

#include "kpeval/detail/text.hpp"
#include "kpeval/errors.hpp"

namespace kpeval {

SigmaTable SigmaTable::coco_default() {
  SigmaTable t;
  t.sigma_ = {0.026, 0.025, 0.025, 0.035, 0.035, 0.079, 0.079, 0.072, 0.072,
              0.062, 0.062, 0.107, 0.107, 0.087, 0.087, 0.089, 0.089};
  return t;
}

void SigmaTable::set_sigma(KeypointId id, double value) {
  if (is_virtual(id)) throw Error(ErrorCode::InvalidArgument, "virtual keypoints have no sigma");
  if (!std::isfinite(value) || value <= 0.0)
    throw Error(ErrorCode::InvalidArgument, "sigma for " + std::string(keypoint_name(id)) + " must be > 0");
  sigma_[index_of(id)] = value;
}

std::string SigmaTable::render() const {
  std::string out;
  for (std::size_t i = 0; i < kNumKeypoints; ++i) {
    out += keypoint_name(keypoint_at(i));
    out += " = ";
    out += detail::format_double(sigma_[i]);
    out += '\n';
  }
  return out;
}

std::string SigmaTable::hash() const {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : render()) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

SigmaTable parse_sigma_table(std::string_view text, std::string_view source_name) {
  auto table = SigmaTable::coco_default();
  int line_no = 0;
  for (auto raw : detail::split(text, '\n')) {
    ++line_no;
    if (const auto hash = raw.find('#'); hash != std::string_view::npos) raw = raw.substr(0, hash);
    const auto line = detail::trim(raw);
    if (line.empty()) continue;
    const auto locus = std::string(source_name) + ":" + std::to_string(line_no);
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) throw Error(ErrorCode::ParseError, locus + ": expected 'keypoint = value'");
    const auto name = detail::trim(line.substr(0, eq));
    const auto id = keypoint_from_name(name);
    if (!id || is_virtual(*id)) throw Error(ErrorCode::ParseError, locus + ": unknown keypoint '" + std::string(name) + "'");
    const auto value = detail::parse_double(line.substr(eq + 1));
    if (!value) throw Error(ErrorCode::ParseError, locus + ": malformed number");
    if (!(*value > 0.0) || !std::isfinite(*value)) throw Error(ErrorCode::ParseError, locus + ": sigma must be > 0");
    table.set_sigma(*id, *value);
  }
  return table;
}

SigmaTable load_sigma_table(const std::string& path) { return parse_sigma_table(detail::read_file(path), path); }

}  // namespace kpeval
