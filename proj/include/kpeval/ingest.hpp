#pragma once

/// \file ingest.hpp
/// \brief Readers and writers for ground-truth and detection files.
///
/// CanonicalJson is the interchange format; every other format is read into
/// the same in-memory types.

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "kpeval/core.hpp"
#include "kpeval/schema.hpp"

namespace kpeval {

enum class FormatKind { CanonicalJson, CocoResultJson, PerFrameJsonDirectory, WideCsv };

std::string_view to_string(FormatKind kind) noexcept;
/// canonical | coco | frame-dir | csv
std::optional<FormatKind> format_from_string(std::string_view text) noexcept;

struct DetectionFrame {
  std::string frame_id;
  std::vector<CanonicalPose> detections;
};

struct DetectionFile {
  std::string method_name;
  /// Empty when the format carries no sequence id.
  std::string sequence_id;
  /// File order.
  std::vector<DetectionFrame> frames;

  const DetectionFrame* find(std::string_view frame_id) const noexcept;
};

struct Warning {
  std::string code;
  std::string message;
  std::string sequence_id;
  std::string frame_id;
};

/// Reads a ground-truth sequence. CanonicalJson documents may also embed
/// detections; they are kept on the frames. Formats without sequence
/// metadata take the file (or directory) stem as sequence id, one expected
/// person and median normalization.
///
/// Throws ParseError (with locus), DuplicateFrameId, EmptyDataset.
SequenceDataset parse_ground_truth(const std::filesystem::path& path, FormatKind format);

/// Reads one method's detections and maps them through `schema`. Ranks
/// follow file order when absent.
DetectionFile parse_detections(const std::filesystem::path& path, FormatKind format, const SchemaMap& schema);

/// In-memory variants used by the file readers (and tests).
SequenceDataset parse_ground_truth_canonical_json(std::string_view text, std::string_view source_name = "<json>");
DetectionFile parse_detections_canonical_json(std::string_view text, const SchemaMap& schema,
                                              std::string_view source_name = "<json>");
SequenceDataset parse_ground_truth_wide_csv(std::string_view text, std::string_view sequence_id,
                                            std::string_view source_name = "<csv>");
DetectionFile parse_detections_wide_csv(std::string_view text, const SchemaMap& schema,
                                        std::string_view source_name = "<csv>");
SequenceDataset parse_ground_truth_coco_json(std::string_view text, std::string_view sequence_id,
                                             std::string_view source_name = "<json>");
DetectionFile parse_detections_coco_json(std::string_view text, const SchemaMap& schema,
                                         std::string_view source_name = "<json>");
SequenceDataset parse_ground_truth_frame_directory(const std::filesystem::path& dir);
DetectionFile parse_detections_frame_directory(const std::filesystem::path& dir, const SchemaMap& schema);

struct AlignResult {
  SequenceDataset dataset;
  std::vector<Warning> warnings;
};

/// Replaces every frame's detections with those of `det`. Frames absent
/// from `det` get an empty list; frames of `det` unknown to the dataset are
/// reported as warnings and dropped. An empty det.sequence_id matches any
/// sequence; otherwise a mismatch throws SequenceMismatch.
AlignResult align(const SequenceDataset& dataset, const DetectionFile& det);

/// CanonicalJson rendering; parse_ground_truth_canonical_json(emit(x))
/// reproduces x.
std::string emit_canonical_json(const SequenceDataset& dataset);
std::string emit_canonical_json(const DetectionFile& detections);

/// Ground-truth-only WideCsv and per-frame directory writers, used for
/// format twins in fixtures.
std::string emit_wide_csv_ground_truth(const SequenceDataset& dataset);
void write_frame_directory_ground_truth(const SequenceDataset& dataset, const std::filesystem::path& dir);

}  // namespace kpeval
