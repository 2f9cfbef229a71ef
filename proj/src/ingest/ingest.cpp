#include "kpeval/ingest.hpp"

#include <set>

#include "kpeval/detail/text.hpp"
#include "kpeval/errors.hpp"

namespace kpeval {

namespace fs = std::filesystem;

std::string_view to_string(FormatKind kind) noexcept {
  switch (kind) {
    case FormatKind::CanonicalJson: return "canonical";
    case FormatKind::CocoResultJson: return "coco";
    case FormatKind::PerFrameJsonDirectory: return "frame-dir";
    case FormatKind::WideCsv: return "csv";
  }
  return "canonical";
}

std::optional<FormatKind> format_from_string(std::string_view text) noexcept {
  if (text == "canonical" || text == "json") return FormatKind::CanonicalJson;
  if (text == "coco") return FormatKind::CocoResultJson;
  if (text == "frame-dir" || text == "dir") return FormatKind::PerFrameJsonDirectory;
  if (text == "csv") return FormatKind::WideCsv;
  return std::nullopt;
}

const DetectionFrame* DetectionFile::find(std::string_view frame_id) const noexcept {
  for (const auto& f : frames)
    if (f.frame_id == frame_id) return &f;
  return nullptr;
}

namespace {

void require_exists(const fs::path& path) {
  if (!fs::exists(path)) throw Error(ErrorCode::IoError, "no such file: " + path.string());
}

std::string stem_of(const fs::path& path) {
  auto p = path;
  if (p.filename().empty()) p = p.parent_path();
  return p.stem().string();
}

}  // namespace

SequenceDataset parse_ground_truth(const fs::path& path, FormatKind format) {
  require_exists(path);
  switch (format) {
    case FormatKind::CanonicalJson: return parse_ground_truth_canonical_json(detail::read_file(path), path.string());
    case FormatKind::CocoResultJson:
      return parse_ground_truth_coco_json(detail::read_file(path), stem_of(path), path.string());
    case FormatKind::PerFrameJsonDirectory: return parse_ground_truth_frame_directory(path);
    case FormatKind::WideCsv: return parse_ground_truth_wide_csv(detail::read_file(path), stem_of(path), path.string());
  }
  throw Error(ErrorCode::InvalidArgument, "unknown format");
}

DetectionFile parse_detections(const fs::path& path, FormatKind format, const SchemaMap& schema) {
  require_exists(path);
  switch (format) {
    case FormatKind::CanonicalJson:
      return parse_detections_canonical_json(detail::read_file(path), schema, path.string());
    case FormatKind::CocoResultJson: return parse_detections_coco_json(detail::read_file(path), schema, path.string());
    case FormatKind::PerFrameJsonDirectory: return parse_detections_frame_directory(path, schema);
    case FormatKind::WideCsv: return parse_detections_wide_csv(detail::read_file(path), schema, path.string());
  }
  throw Error(ErrorCode::InvalidArgument, "unknown format");
}

AlignResult align(const SequenceDataset& dataset, const DetectionFile& det) {
  if (!det.sequence_id.empty() && det.sequence_id != dataset.sequence_id)
    throw Error(ErrorCode::SequenceMismatch,
                "detections for '" + det.sequence_id + "' cannot be aligned with '" + dataset.sequence_id + "'");
  AlignResult out{dataset, {}};
  std::set<std::string_view> known;
  for (auto& frame : out.dataset.frames) {
    known.insert(frame.frame_id);
    const auto* d = det.find(frame.frame_id);
    frame.detections = d ? d->detections : std::vector<CanonicalPose>{};
  }
  for (const auto& f : det.frames) {
    if (!known.contains(f.frame_id))
      out.warnings.push_back({"orphan_frame", "detections for a frame absent from the ground truth (" + det.method_name + ")",
                              dataset.sequence_id, f.frame_id});
  }
  return out;
}

}  // namespace kpeval
