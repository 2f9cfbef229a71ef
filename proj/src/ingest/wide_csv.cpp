#include <cmath>
#include <map>
#include <set>

#include "ingest_common.hpp"
#include "kpeval/detail/text.hpp"
#include "kpeval/errors.hpp"
#include "kpeval/ingest.hpp"

namespace kpeval {

namespace {

struct Layout {
  int frame_col = -1;
  int role_col = -1;
  int score_col = -1;
  int box_score_col = -1;
  int rank_col = -1;
  std::array<int, kNumKeypoints> x{}, y{}, conf{};
};

struct Row {
  int line = 0;
  std::vector<std::string> cells;
};

class Table {
 public:
  Table(std::string_view text, std::string_view source) : source_(source) {
    int line_no = 0;
    bool header_seen = false;
    for (auto raw : detail::split(text, '\n')) {
      ++line_no;
      if (!raw.empty() && raw.back() == '\r') raw.remove_suffix(1);
      if (line_no == 1 && raw.starts_with("\xEF\xBB\xBF")) raw.remove_prefix(3);
      if (detail::trim(raw).empty()) continue;
      auto cells = detail::split_csv_record(raw);
      if (!header_seen) {
        read_header(cells, line_no);
        header_seen = true;
        width_ = cells.size();
        continue;
      }
      if (cells.size() != width_) fail(line_no, "expected " + std::to_string(width_) + " cells, got " + std::to_string(cells.size()));
      rows_.push_back({line_no, std::move(cells)});
    }
    if (!header_seen) throw Error(ErrorCode::ParseError, std::string(source_) + ": missing header row");
  }

  [[noreturn]] void fail(int line, const std::string& what) const {
    throw Error(ErrorCode::ParseError, std::string(source_) + ":" + std::to_string(line) + ": " + what);
  }

  const Layout& layout() const { return layout_; }
  const std::vector<Row>& rows() const { return rows_; }

  std::optional<double> number(const Row& r, int col, const char* what) const {
    if (col < 0) return std::nullopt;
    const auto cell = detail::trim(r.cells[static_cast<std::size_t>(col)]);
    if (cell.empty()) return std::nullopt;
    const auto v = detail::parse_double(cell);
    if (!v || !std::isfinite(*v)) fail(r.line, std::string("malformed ") + what + " '" + std::string(cell) + "'");
    return v;
  }

  std::string text(const Row& r, int col) const {
    if (col < 0) return {};
    return std::string(detail::trim(r.cells[static_cast<std::size_t>(col)]));
  }

  /// Keypoint `k`; nullopt when every cell of the keypoint is empty.
  Keypoint2D keypoint(const Row& r, std::size_t k, bool with_confidence, bool& any_cell) const {
    const auto x = number(r, layout_.x[k], "coordinate");
    const auto y = number(r, layout_.y[k], "coordinate");
    const auto c = number(r, layout_.conf[k], "confidence");
    if (x || y || c) any_cell = true;
    if (!x && !y) return Keypoint2D::absent();
    if (!x || !y) fail(r.line, std::string(keypoint_name(keypoint_at(k))) + ": x and y must both be given");
    if (c && *c < 0.0) fail(r.line, "confidence must be >= 0");
    const auto kp = detail::native_keypoint(*x, *y, c);
    if (!with_confidence && kp.present) return Keypoint2D::at(kp.x, kp.y);
    return kp;
  }

 private:
  void read_header(const std::vector<std::string>& cells, int line_no) {
    layout_.x.fill(-1);
    layout_.y.fill(-1);
    layout_.conf.fill(-1);
    for (std::size_t i = 0; i < cells.size(); ++i) {
      const auto name = std::string(detail::trim(cells[i]));
      const int col = static_cast<int>(i);
      if (name == "frame_id") layout_.frame_col = col;
      else if (name == "role") layout_.role_col = col;
      else if (name == "score") layout_.score_col = col;
      else if (name == "box_score") layout_.box_score_col = col;
      else if (name == "rank") layout_.rank_col = col;
      else {
        const auto us = name.rfind('_');
        if (us == std::string::npos) fail(line_no, "unknown column '" + name + "'");
        const auto id = keypoint_from_name(std::string_view(name).substr(0, us));
        const auto suffix = std::string_view(name).substr(us + 1);
        if (!id || is_virtual(*id)) fail(line_no, "unknown keypoint column '" + name + "'");
        auto& slot = suffix == "x" ? layout_.x : suffix == "y" ? layout_.y : suffix == "conf" ? layout_.conf : layout_.x;
        if (suffix != "x" && suffix != "y" && suffix != "conf") fail(line_no, "unknown column suffix in '" + name + "'");
        if (slot[index_of(*id)] >= 0) fail(line_no, "duplicate column '" + name + "'");
        slot[index_of(*id)] = col;
      }
    }
    if (layout_.frame_col < 0) fail(line_no, "missing frame_id column");
    for (std::size_t k = 0; k < kNumKeypoints; ++k) {
      if ((layout_.x[k] < 0) != (layout_.y[k] < 0))
        fail(line_no, std::string(keypoint_name(keypoint_at(k))) + ": _x and _y columns must come in pairs");
    }
  }

  std::string_view source_;
  Layout layout_;
  std::vector<Row> rows_;
  std::size_t width_ = 0;
};

// Rows sharing a frame id must be consecutive.
template <typename OnRow>
void for_each_frame_row(const Table& t, std::string_view source, OnRow on_row) {
  std::set<std::string> closed;
  std::string current;
  bool have_current = false;
  for (const auto& row : t.rows()) {
    auto id = t.text(row, t.layout().frame_col);
    if (id.empty()) t.fail(row.line, "empty frame_id");
    const bool new_frame = !have_current || id != current;
    if (new_frame) {
      if (have_current) closed.insert(current);
      if (closed.count(id))
        throw Error(ErrorCode::DuplicateFrameId, std::string(source) + ":" + std::to_string(row.line) + ": frame '" + id + "'");
      current = id;
      have_current = true;
    }
    on_row(row, id, new_frame);
  }
}

}  // namespace

SequenceDataset parse_ground_truth_wide_csv(std::string_view text, std::string_view sequence_id,
                                            std::string_view source_name) {
  const Table t(text, source_name);
  SequenceDataset ds;
  ds.sequence_id = std::string(sequence_id);
  for_each_frame_row(t, source_name, [&](const Row& row, const std::string& id, bool new_frame) {
    if (new_frame) ds.frames.push_back(FrameRecord{id, std::nullopt, std::nullopt, {}, {}});
    GroundTruthPose gt;
    bool any = false;
    for (std::size_t k = 0; k < kNumKeypoints; ++k) gt.keypoints[k] = t.keypoint(row, k, false, any);
    if (const auto role_text = t.text(row, t.layout().role_col); !role_text.empty()) {
      const auto role = role_from_string(role_text);
      if (!role || *role == Role::Unknown) t.fail(row.line, "role must be 'infant' or 'adult'");
      gt.role = *role;
    }
    if (any) ds.frames.back().ground_truths.push_back(gt);
  });
  if (ds.frames.empty()) throw Error(ErrorCode::EmptyDataset, std::string(source_name) + ": no frames");
  return ds;
}

DetectionFile parse_detections_wide_csv(std::string_view text, const SchemaMap& schema, std::string_view source_name) {
  const Table t(text, source_name);
  if (schema.native_count != static_cast<int>(kNumKeypoints))
    throw Error(ErrorCode::SchemaMismatch, std::string(source_name) + ": CSV columns use the canonical 17-point layout");
  DetectionFile out;
  out.method_name = schema.method_name;
  std::vector<std::vector<RawDetection>> raws;
  std::vector<int> first_lines;
  for_each_frame_row(t, source_name, [&](const Row& row, const std::string& id, bool new_frame) {
    if (new_frame) {
      out.frames.push_back(DetectionFrame{id, {}});
      raws.emplace_back();
      first_lines.push_back(row.line);
    }
    RawDetection raw;
    raw.keypoints.resize(kNumKeypoints);
    bool any = false;
    for (std::size_t k = 0; k < kNumKeypoints; ++k) raw.keypoints[k] = t.keypoint(row, k, true, any);
    raw.score = t.number(row, t.layout().score_col, "score");
    raw.box_score = t.number(row, t.layout().box_score_col, "box_score");
    if (const auto rank = t.number(row, t.layout().rank_col, "rank")) {
      if (*rank < 0 || *rank != static_cast<double>(static_cast<int>(*rank))) t.fail(row.line, "rank must be a non-negative integer");
      raw.rank = static_cast<int>(*rank);
    }
    if (const auto role_text = t.text(row, t.layout().role_col); !role_text.empty()) {
      const auto role = role_from_string(role_text);
      if (!role) t.fail(row.line, "unknown role");
      raw.role = *role;
    }
    // a row without any keypoint cell only declares the frame
    if (any) raws.back().push_back(std::move(raw));
  });
  for (std::size_t f = 0; f < out.frames.size(); ++f)
    out.frames[f].detections =
        detail::map_frame_detections(raws[f], schema, std::string(source_name) + ":" + std::to_string(first_lines[f]));
  return out;
}

std::string emit_wide_csv_ground_truth(const SequenceDataset& dataset) {
  std::string out = "frame_id,role";
  for (std::size_t k = 0; k < kNumKeypoints; ++k) {
    const auto name = std::string(keypoint_name(keypoint_at(k)));
    out += "," + name + "_x," + name + "_y," + name + "_conf";
  }
  out += '\n';
  for (const auto& f : dataset.frames) {
    if (f.ground_truths.empty()) {
      out += f.frame_id + "," + std::string(kNumKeypoints * 3, ',') + '\n';
      continue;
    }
    for (const auto& gt : f.ground_truths) {
      out += f.frame_id + "," + std::string(to_string(gt.role));
      for (const auto& k : gt.keypoints) {
        if (k.present) out += "," + detail::format_double(k.x) + "," + detail::format_double(k.y) + ",1";
        else out += ",,,";
      }
      out += '\n';
    }
  }
  return out;
}

}  // namespace kpeval
