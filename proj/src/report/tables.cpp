#include <cmath>
#include <functional>

#include <json.hpp>

#include "kpeval/detail/text.hpp"
#include "kpeval/errors.hpp"
#include "kpeval/report.hpp"

namespace kpeval {

using json = nlohmann::ordered_json;

namespace {

constexpr int kOksDigits = 2;
constexpr int kPercentDigits = 1;
constexpr int kCpeDigits = 2;
constexpr int kRhoDigits = 2;
constexpr int kPDigits = 4;

std::string fixed(double v, int digits) {
  auto s = detail::format_fixed(v, digits);
  if (s.starts_with('-') && s.find_first_not_of("-0.") == std::string::npos) s.erase(0, 1);
  return s;
}

double rounded(double v, int digits) { return *detail::parse_double(fixed(v, digits)); }

// A CSV column knows how to render itself from a report and how to write a
// parsed cell back.
struct Column {
  std::string name;
  std::function<std::string(const MetricReport&)> get;
  std::function<void(MetricReport&, const std::string&)> set;
};

[[noreturn]] void bad_cell(const std::string& column, const std::string& cell) {
  throw Error(ErrorCode::ParseError, "column '" + column + "': cannot parse '" + cell + "'");
}

double number(const std::string& column, const std::string& cell) {
  const auto v = detail::parse_double(cell);
  if (!v) bad_cell(column, cell);
  return *v;
}

long long integer(const std::string& column, const std::string& cell) {
  const auto v = detail::parse_int(cell);
  if (!v) bad_cell(column, cell);
  return *v;
}

std::string opt_text(const std::optional<double>& v, int digits) { return v ? fixed(*v, digits) : std::string(); }

std::optional<double> opt_number(const std::string& column, const std::string& cell) {
  if (cell.empty()) return std::nullopt;
  return number(column, cell);
}

void add_text(std::vector<Column>& cols, std::string name, std::string MetricReport::*field) {
  cols.push_back({name, [field](const MetricReport& r) { return r.*field; },
                  [field](MetricReport& r, const std::string& c) { r.*field = c; }});
}

template <typename Get>
void add_int(std::vector<Column>& cols, std::string name, Get get) {
  cols.push_back({name, [get](const MetricReport& r) { return std::to_string(get(const_cast<MetricReport&>(r))); },
                  [get, name](MetricReport& r, const std::string& c) {
                    get(r) = static_cast<std::remove_reference_t<decltype(get(r))>>(integer(name, c));
                  }});
}

template <typename Get>
void add_opt(std::vector<Column>& cols, std::string name, int digits, Get get) {
  cols.push_back({name, [get, digits](const MetricReport& r) { return opt_text(get(const_cast<MetricReport&>(r)), digits); },
                  [get, name](MetricReport& r, const std::string& c) { get(r) = opt_number(name, c); }});
}

template <typename Get>
void add_mean_std(std::vector<Column>& cols, const std::string& name, int digits, Get get) {
  cols.push_back({name,
                  [get, digits](const MetricReport& r) {
                    const auto& m = get(const_cast<MetricReport&>(r));
                    return m ? fixed(m->mean, digits) : std::string();
                  },
                  [get, name](MetricReport& r, const std::string& c) {
                    if (c.empty()) return;
                    auto& m = get(r);
                    if (!m) m = MeanStd{};
                    m->mean = number(name, c);
                  }});
  cols.push_back({name + "_std",
                  [get, digits](const MetricReport& r) {
                    const auto& m = get(const_cast<MetricReport&>(r));
                    return m && m->stddev ? fixed(*m->stddev, digits) : std::string();
                  },
                  [get, name](MetricReport& r, const std::string& c) {
                    if (c.empty()) return;
                    auto& m = get(r);
                    if (!m) m = MeanStd{};
                    m->stddev = number(name + "_std", c);
                  }});
  cols.push_back({name + "_n",
                  [get](const MetricReport& r) {
                    const auto& m = get(const_cast<MetricReport&>(r));
                    return m ? std::to_string(m->n) : std::string("0");
                  },
                  [get, name](MetricReport& r, const std::string& c) {
                    const auto n = integer(name + "_n", c);
                    auto& m = get(r);
                    if (n == 0) m.reset();
                    else if (m) m->n = static_cast<int>(n);
                    else bad_cell(name + "_n", c);
                  }});
}

const std::vector<Column>& columns() {
  static const std::vector<Column> cols = [] {
    std::vector<Column> c;
    add_text(c, "method_name", &MetricReport::method_name);
    add_text(c, "dataset_id", &MetricReport::dataset_id);
    add_text(c, "input_mode", &MetricReport::input_mode);
    add_text(c, "sequence_id", &MetricReport::sequence_id);
    add_text(c, "selection", &MetricReport::selection);
    add_text(c, "scope", &MetricReport::scope);
    add_int(c, "sequences", [](MetricReport& r) -> int& { return r.counts.sequences; });
    add_int(c, "frames", [](MetricReport& r) -> int& { return r.counts.frames; });
    add_int(c, "targets", [](MetricReport& r) -> int& { return r.counts.targets; });
    add_int(c, "detections", [](MetricReport& r) -> int& { return r.counts.detections; });
    add_int(c, "matched_pairs", [](MetricReport& r) -> int& { return r.counts.matched_pairs; });
    add_mean_std(c, "mean_oks", kOksDigits, [](MetricReport& r) -> std::optional<MeanStd>& { return r.mean_oks; });
    add_opt(c, "ap", kPercentDigits, [](MetricReport& r) -> std::optional<double>& { return r.ap; });
    add_opt(c, "ar", kPercentDigits, [](MetricReport& r) -> std::optional<double>& { return r.ar; });
    add_mean_std(c, "nmh_overall", kPercentDigits,
                 [](MetricReport& r) -> std::optional<MeanStd>& { return r.nmh_overall; });
    for (std::size_t k = 0; k < kNumKeypoints; ++k) {
      add_mean_std(c, "nmh_" + std::string(keypoint_name(keypoint_at(k))), kPercentDigits,
                   [k](MetricReport& r) -> std::optional<MeanStd>& { return r.nmh_per_keypoint[k]; });
    }
    add_opt(c, "missing_percent", kPercentDigits,
            [](MetricReport& r) -> std::optional<double>& { return r.missing_percent; });
    add_int(c, "missing_detections", [](MetricReport& r) -> int& { return r.counts.missing_detections; });
    add_int(c, "missing_keypoints", [](MetricReport& r) -> long long& { return r.counts.missing_keypoints; });
    add_opt(c, "redundant_percent", kPercentDigits,
            [](MetricReport& r) -> std::optional<double>& { return r.redundant_percent; });
    c.push_back({"multi_person_caveat", [](const MetricReport& r) { return std::string(r.multi_person_caveat ? "1" : "0"); },
                 [](MetricReport& r, const std::string& cell) { r.multi_person_caveat = integer("multi_person_caveat", cell) != 0; }});
    add_opt(c, "cpe", kCpeDigits, [](MetricReport& r) -> std::optional<double>& { return r.cpe; });
    add_opt(c, "spearman_rho", kRhoDigits, [](MetricReport& r) -> std::optional<double>& { return r.spearman_rho; });
    add_opt(c, "spearman_p", kPDigits, [](MetricReport& r) -> std::optional<double>& { return r.spearman_p; });
    add_int(c, "spearman_n", [](MetricReport& r) -> int& { return r.spearman_n; });
    // labelled means of per-sequence values; empty on sequence rows
    auto seq_field = [&c](std::string name, int digits, std::optional<double> SequenceMeans::*field) {
      c.push_back({name,
                   [field, digits](const MetricReport& r) {
                     return r.sequence_means ? opt_text((*r.sequence_means).*field, digits) : std::string();
                   },
                   [field, name](MetricReport& r, const std::string& cell) {
                     if (cell.empty()) return;
                     if (!r.sequence_means) r.sequence_means = SequenceMeans{};
                     (*r.sequence_means).*field = number(name, cell);
                   }});
    };
    seq_field("sequence_mean_oks", kOksDigits, &SequenceMeans::mean_oks);
    seq_field("sequence_mean_nmh", kPercentDigits, &SequenceMeans::nmh_overall);
    seq_field("sequence_mean_missing", kPercentDigits, &SequenceMeans::missing_percent);
    c.push_back({"sequence_mean_n",
                 [](const MetricReport& r) { return r.sequence_means ? std::to_string(r.sequence_means->n) : std::string(); },
                 [](MetricReport& r, const std::string& cell) {
                   if (cell.empty()) return;
                   if (!r.sequence_means) r.sequence_means = SequenceMeans{};
                   r.sequence_means->n = static_cast<int>(integer("sequence_mean_n", cell));
                 }});
    return c;
  }();
  return cols;
}

const std::vector<std::string> kMetaColumns{"version", "sigma_hash", "cpe_c", "stddev"};

std::vector<std::string> meta_cells(const ReportMeta& meta) {
  return {meta.version, meta.sigma_hash, detail::format_double(meta.cpe_c), meta.stddev};
}

json mean_std_json(const std::optional<MeanStd>& m, int digits) {
  if (!m) return nullptr;
  json j;
  j["mean"] = rounded(m->mean, digits);
  j["std"] = m->stddev ? json(rounded(*m->stddev, digits)) : json(nullptr);
  j["n"] = m->n;
  return j;
}

json opt_json(const std::optional<double>& v, int digits) { return v ? json(rounded(*v, digits)) : json(nullptr); }

std::optional<double> opt_from(const json& j, const char* key) {
  const auto it = j.find(key);
  if (it == j.end() || it->is_null()) return std::nullopt;
  if (!it->is_number()) throw Error(ErrorCode::ParseError, std::string("field '") + key + "' must be a number");
  return it->get<double>();
}

std::optional<MeanStd> mean_std_from(const json& j) {
  if (j.is_null()) return std::nullopt;
  MeanStd m;
  m.mean = j.at("mean").get<double>();
  if (!j.at("std").is_null()) m.stddev = j.at("std").get<double>();
  m.n = j.at("n").get<int>();
  return m;
}

}  // namespace

std::string render_csv(std::span<const MetricReport> reports, const ReportMeta& meta) {
  std::string out;
  bool first = true;
  for (const auto& c : columns()) {
    if (!first) out += ',';
    out += c.name;
    first = false;
  }
  for (const auto& m : kMetaColumns) out += "," + m;
  out += '\n';
  const auto meta_row = meta_cells(meta);
  for (const auto& r : reports) {
    first = true;
    for (const auto& c : columns()) {
      if (!first) out += ',';
      out += detail::csv_field(c.get(r));
      first = false;
    }
    for (const auto& m : meta_row) out += "," + detail::csv_field(m);
    out += '\n';
  }
  return out;
}

std::string render_json(std::span<const MetricReport> reports, const ReportMeta& meta) {
  json doc;
  doc["version"] = meta.version;
  doc["sigma_hash"] = meta.sigma_hash;
  doc["cpe_c"] = meta.cpe_c;
  doc["stddev"] = meta.stddev;
  doc["reports"] = json::array();
  for (const auto& r : reports) {
    json j;
    j["method_name"] = r.method_name;
    j["dataset_id"] = r.dataset_id;
    j["input_mode"] = r.input_mode;
    j["sequence_id"] = r.sequence_id;
    j["selection"] = r.selection;
    j["scope"] = r.scope;
    j["mean_oks"] = mean_std_json(r.mean_oks, kOksDigits);
    j["ap"] = opt_json(r.ap, kPercentDigits);
    j["ar"] = opt_json(r.ar, kPercentDigits);
    j["nmh_overall"] = mean_std_json(r.nmh_overall, kPercentDigits);
    json per_kp = json::object();
    for (std::size_t k = 0; k < kNumKeypoints; ++k)
      per_kp[std::string(keypoint_name(keypoint_at(k)))] = mean_std_json(r.nmh_per_keypoint[k], kPercentDigits);
    j["nmh_per_keypoint"] = std::move(per_kp);
    j["missing_percent"] = opt_json(r.missing_percent, kPercentDigits);
    j["redundant_percent"] = opt_json(r.redundant_percent, kPercentDigits);
    j["multi_person_caveat"] = r.multi_person_caveat;
    j["cpe"] = opt_json(r.cpe, kCpeDigits);
    j["spearman"] = {{"rho", opt_json(r.spearman_rho, kRhoDigits)},
                     {"p", opt_json(r.spearman_p, kPDigits)},
                     {"n", r.spearman_n}};
    j["counts"] = {{"sequences", r.counts.sequences},
                   {"frames", r.counts.frames},
                   {"targets", r.counts.targets},
                   {"detections", r.counts.detections},
                   {"matched_pairs", r.counts.matched_pairs},
                   {"missing_detections", r.counts.missing_detections},
                   {"missing_keypoints", r.counts.missing_keypoints}};
    if (r.sequence_means) {
      j["sequence_means"] = {{"mean_oks", opt_json(r.sequence_means->mean_oks, kOksDigits)},
                             {"nmh_overall", opt_json(r.sequence_means->nmh_overall, kPercentDigits)},
                             {"missing_percent", opt_json(r.sequence_means->missing_percent, kPercentDigits)},
                             {"n", r.sequence_means->n}};
    } else {
      j["sequence_means"] = nullptr;
    }
    doc["reports"].push_back(std::move(j));
  }
  return doc.dump(2) + "\n";
}

void emit_tables(std::span<const MetricReport> reports, const ReportMeta& meta, TableFormat format,
                 const std::filesystem::path& path) {
  detail::write_file(path, format == TableFormat::Csv ? render_csv(reports, meta) : render_json(reports, meta));
}

ParsedReports parse_json_report(std::string_view text, std::string_view source_name) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::ParseError, std::string(source_name) + ": " + e.what());
  }
  ParsedReports out;
  try {
    out.meta.version = doc.at("version").get<std::string>();
    out.meta.sigma_hash = doc.at("sigma_hash").get<std::string>();
    out.meta.cpe_c = doc.at("cpe_c").get<double>();
    out.meta.stddev = doc.at("stddev").get<std::string>();
    for (const auto& j : doc.at("reports")) {
      MetricReport r;
      r.method_name = j.at("method_name").get<std::string>();
      r.dataset_id = j.at("dataset_id").get<std::string>();
      r.input_mode = j.at("input_mode").get<std::string>();
      r.sequence_id = j.at("sequence_id").get<std::string>();
      r.selection = j.at("selection").get<std::string>();
      r.scope = j.at("scope").get<std::string>();
      r.mean_oks = mean_std_from(j.at("mean_oks"));
      r.ap = opt_from(j, "ap");
      r.ar = opt_from(j, "ar");
      r.nmh_overall = mean_std_from(j.at("nmh_overall"));
      const auto& per_kp = j.at("nmh_per_keypoint");
      for (std::size_t k = 0; k < kNumKeypoints; ++k)
        r.nmh_per_keypoint[k] = mean_std_from(per_kp.at(std::string(keypoint_name(keypoint_at(k)))));
      r.missing_percent = opt_from(j, "missing_percent");
      r.redundant_percent = opt_from(j, "redundant_percent");
      r.multi_person_caveat = j.at("multi_person_caveat").get<bool>();
      r.cpe = opt_from(j, "cpe");
      r.spearman_rho = opt_from(j.at("spearman"), "rho");
      r.spearman_p = opt_from(j.at("spearman"), "p");
      r.spearman_n = j.at("spearman").at("n").get<int>();
      const auto& c = j.at("counts");
      r.counts.sequences = c.at("sequences").get<int>();
      r.counts.frames = c.at("frames").get<int>();
      r.counts.targets = c.at("targets").get<int>();
      r.counts.detections = c.at("detections").get<int>();
      r.counts.matched_pairs = c.at("matched_pairs").get<int>();
      r.counts.missing_detections = c.at("missing_detections").get<int>();
      r.counts.missing_keypoints = c.at("missing_keypoints").get<long long>();
      if (const auto& s = j.at("sequence_means"); !s.is_null()) {
        r.sequence_means = SequenceMeans{opt_from(s, "mean_oks"), opt_from(s, "nmh_overall"),
                                         opt_from(s, "missing_percent"), s.at("n").get<int>()};
      }
      out.reports.push_back(std::move(r));
    }
  } catch (const json::exception& e) {
    throw Error(ErrorCode::ParseError, std::string(source_name) + ": " + e.what());
  }
  return out;
}

ParsedReports parse_csv_report(std::string_view text, std::string_view source_name) {
  ParsedReports out;
  std::vector<std::string> header;
  int line_no = 0;
  bool meta_seen = false;
  for (auto line : detail::split(text, '\n')) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty()) continue;
    auto cells = detail::split_csv_record(line);
    if (header.empty()) {
      header = std::move(cells);
      const auto& cols = columns();
      if (header.size() != cols.size() + kMetaColumns.size())
        throw Error(ErrorCode::SchemaMismatch, std::string(source_name) + ": unexpected column count");
      for (std::size_t i = 0; i < cols.size(); ++i)
        if (header[i] != cols[i].name)
          throw Error(ErrorCode::SchemaMismatch, std::string(source_name) + ": unexpected column '" + header[i] + "'");
      continue;
    }
    if (cells.size() != header.size())
      throw Error(ErrorCode::ParseError, std::string(source_name) + ":" + std::to_string(line_no) + ": wrong cell count");
    MetricReport r;
    const auto& cols = columns();
    try {
      for (std::size_t i = 0; i < cols.size(); ++i) cols[i].set(r, cells[i]);
    } catch (const Error& e) {
      throw Error(e.code(), std::string(source_name) + ":" + std::to_string(line_no) + ": " + e.what());
    }
    const auto base = cols.size();
    ReportMeta meta{cells[base], cells[base + 1], number("cpe_c", cells[base + 2]), cells[base + 3]};
    if (meta_seen && !(meta == out.meta))
      throw Error(ErrorCode::SchemaMismatch, std::string(source_name) + ": rows disagree on report metadata");
    out.meta = meta;
    meta_seen = true;
    out.reports.push_back(std::move(r));
  }
  if (header.empty()) throw Error(ErrorCode::ParseError, std::string(source_name) + ": empty report");
  return out;
}

}  // namespace kpeval
