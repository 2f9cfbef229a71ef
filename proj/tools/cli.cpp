#include "kpeval/cli.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <map>
#include <ostream>
#include <set>
#include <thread>

#include <CLI11.hpp>

#include "kpeval/detail/text.hpp"
#include "kpeval/errors.hpp"
#include "kpeval/pipeline.hpp"
#include "kpeval/report.hpp"
#include "kpeval/sigma.hpp"
#include "kpeval/version.hpp"

namespace kpeval {

namespace fs = std::filesystem;

namespace {

Error config_error(const std::string& what) { return Error(ErrorCode::ConfigError, what); }

FormatKind parse_format(std::string_view text) {
  const auto f = format_from_string(text);
  if (!f) throw config_error("unknown format '" + std::string(text) + "' (canonical|coco|frame-dir|csv)");
  return *f;
}

SelectionStrategy parse_selection(std::string_view text) {
  const auto s = selection_from_string(text);
  if (!s) throw config_error("unknown selection '" + std::string(text) + "' (first|score|oracle)");
  return *s;
}

EvalScope parse_scope(std::string_view text) {
  const auto s = scope_from_string(text);
  if (!s) throw config_error("unknown scope '" + std::string(text) + "' (infant|all)");
  return *s;
}

NormalizationMode parse_norm(std::string_view text) {
  if (text == "per-image") return NormalizationMode::PerImage;
  const auto n = normalization_from_string(text);
  if (!n) throw config_error("unknown normalization '" + std::string(text) + "' (median|per-image)");
  return *n;
}

double parse_real(std::string_view key, std::string_view text) {
  const auto v = detail::parse_double(text);
  if (!v) throw config_error(std::string(key) + ": expected a number, got '" + std::string(text) + "'");
  return *v;
}

int parse_count(std::string_view key, std::string_view text) {
  const auto v = detail::parse_int(text);
  if (!v) throw config_error(std::string(key) + ": expected an integer, got '" + std::string(text) + "'");
  return static_cast<int>(*v);
}

fs::path resolve(const fs::path& base, std::string_view p) {
  fs::path path{std::string(p)};
  return path.is_absolute() || base.empty() ? path : base / path;
}

// ---------------------------------------------------------------- detection discovery

struct DetectionSource {
  fs::path path;
  DetectionFile file;
};

bool has_json_files(const fs::path& dir) {
  for (const auto& e : fs::directory_iterator(dir))
    if (e.is_regular_file() && e.path().extension() == ".json") return true;
  return false;
}

std::vector<fs::path> detection_paths(const MethodSpec& m) {
  if (!fs::is_directory(m.path)) return {m.path};
  std::vector<fs::path> out;
  if (m.format == FormatKind::PerFrameJsonDirectory) {
    if (has_json_files(m.path)) return {m.path};
    for (const auto& e : fs::directory_iterator(m.path))
      if (e.is_directory()) out.push_back(e.path());
  } else {
    const std::string ext = m.format == FormatKind::WideCsv ? ".csv" : ".json";
    for (const auto& e : fs::directory_iterator(m.path))
      if (e.is_regular_file() && e.path().extension() == ext) out.push_back(e.path());
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::string source_key(const DetectionSource& s) {
  if (!s.file.sequence_id.empty()) return s.file.sequence_id;
  auto p = s.path;
  if (p.filename().empty()) p = p.parent_path();
  return fs::is_directory(p) ? p.filename().string() : p.stem().string();
}

// Results land in slots indexed by task, so the output does not depend on
// scheduling.
template <typename Fn>
void run_parallel(std::size_t n_tasks, int jobs, Fn fn) {
  std::vector<std::exception_ptr> errors(n_tasks);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < n_tasks; i = next++) {
      try {
        fn(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const auto n_workers = static_cast<std::size_t>(std::max(1, jobs));
  if (n_workers == 1 || n_tasks <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < std::min(n_workers, n_tasks); ++w) pool.emplace_back(worker);
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

// ---------------------------------------------------------------- compare

std::optional<double> metric_value(const MetricReport& r, CompareMetric m) {
  switch (m) {
    case CompareMetric::Oks: return r.mean_oks ? std::optional(r.mean_oks->mean) : std::nullopt;
    case CompareMetric::Ap: return r.ap;
    case CompareMetric::Ar: return r.ar;
    case CompareMetric::Nmh: return r.nmh_overall ? std::optional(r.nmh_overall->mean) : std::nullopt;
    case CompareMetric::Missing: return r.missing_percent;
    case CompareMetric::Redundant: return r.redundant_percent;
    case CompareMetric::Cpe: return r.cpe;
    case CompareMetric::Rho: return r.spearman_rho;
  }
  return std::nullopt;
}

int metric_digits(CompareMetric m) {
  switch (m) {
    case CompareMetric::Oks:
    case CompareMetric::Cpe:
    case CompareMetric::Rho: return 2;
    default: return 1;
  }
}

// Larger is better unless noted; redundancy is best closest to zero.
double goodness(CompareMetric m, double v) {
  switch (m) {
    case CompareMetric::Nmh:
    case CompareMetric::Missing: return -v;
    case CompareMetric::Redundant: return -std::fabs(v);
    default: return v;
  }
}

}  // namespace

MethodSpec parse_method_spec(std::string_view text) {
  const auto eq = text.find('=');
  if (eq == std::string_view::npos || eq == 0) throw config_error("--det expects <name>=<path>:<format>:<schema>");
  MethodSpec m;
  m.name = std::string(detail::trim(text.substr(0, eq)));
  const auto parts = detail::split(text.substr(eq + 1), ':');
  // the first token naming a format separates the path from the schema
  for (std::size_t i = 1; i < parts.size(); ++i) {
    if (!format_from_string(parts[i])) continue;
    std::string path;
    for (std::size_t j = 0; j < i; ++j) path += (j ? ":" : "") + std::string(parts[j]);
    m.path = path;
    m.format = *format_from_string(parts[i]);
    std::string schema;
    for (std::size_t j = i + 1; j < parts.size(); ++j) schema += (j > i + 1 ? ":" : "") + std::string(parts[j]);
    if (!schema.empty()) m.schema = schema;
    return m;
  }
  if (parts.size() == 1 && !parts[0].empty()) {
    m.path = std::string(parts[0]);
    return m;
  }
  throw config_error("--det '" + std::string(text) + "': expected <name>=<path>:<format>:<schema>");
}

void RunConfig::validate() const {
  if (gt_paths.empty()) throw config_error("no ground truth given (--gt)");
  for (const auto& p : gt_paths)
    if (!fs::exists(p)) throw config_error("ground truth not found: " + p.string());
  if (methods.empty()) throw config_error("no detections given (--det)");
  std::set<std::string> names;
  for (const auto& m : methods) {
    if (m.name.empty()) throw config_error("method without a name");
    if (!names.insert(m.name).second) throw config_error("method name used twice: " + m.name);
    if (!fs::exists(m.path)) throw config_error("detections for " + m.name + " not found: " + m.path.string());
    const bool builtin = m.schema.starts_with("builtin:") || builtin_schema(m.schema).has_value();
    if (!builtin && !fs::exists(m.schema)) throw config_error("schema for " + m.name + " not found: " + m.schema);
  }
  if (sigma_path && !fs::exists(*sigma_path)) throw config_error("sigma table not found: " + sigma_path->string());
  if (reference_pose && !fs::exists(*reference_pose))
    throw config_error("reference pose not found: " + reference_pose->string());
  if (!(cpe_c > 0.0) || !std::isfinite(cpe_c)) throw config_error("cpe coefficient must be positive");
  if (jobs < 1) throw config_error("jobs must be at least 1");
}

void apply_emit_list(RunConfig& config, std::string_view list) {
  config.emit_tables = config.emit_circles = config.emit_per_sequence = false;
  for (auto item : detail::split(list, ',')) {
    item = detail::trim(item);
    if (item == "tables") config.emit_tables = true;
    else if (item == "circles") config.emit_circles = true;
    else if (item == "per-sequence") config.emit_per_sequence = true;
    else if (!item.empty()) throw config_error("unknown --emit item '" + std::string(item) + "'");
  }
}

RunConfig parse_run_config(std::string_view text, const fs::path& base_dir, std::string_view source_name) {
  RunConfig c;
  int line_no = 0;
  MethodSpec* method = nullptr;
  auto where = [&] { return std::string(source_name) + ":" + std::to_string(line_no) + ": "; };
  try {
    for (auto raw : detail::split(text, '\n')) {
      ++line_no;
      if (const auto hash = raw.find('#'); hash != std::string_view::npos) raw = raw.substr(0, hash);
      const auto line = detail::trim(raw);
      if (line.empty()) continue;
      if (line.front() == '[') {
        if (line.back() != ']') throw config_error("unterminated section header");
        const auto words = detail::split_ws(line.substr(1, line.size() - 2));
        if (words.size() < 2 || words[0] != "method") throw config_error("expected [method <name>]");
        std::string name;
        for (std::size_t i = 1; i < words.size(); ++i) name += (i > 1 ? " " : "") + std::string(words[i]);
        c.methods.push_back(MethodSpec{name, {}, FormatKind::CanonicalJson, "builtin:coco17"});
        method = &c.methods.back();
        continue;
      }
      const auto eq = line.find('=');
      if (eq == std::string_view::npos) throw config_error("expected 'key = value'");
      const auto key = detail::trim(line.substr(0, eq));
      const auto value = detail::trim(line.substr(eq + 1));
      if (method != nullptr) {
        if (key == "det" || key == "path") method->path = resolve(base_dir, value);
        else if (key == "format") method->format = parse_format(value);
        else if (key == "schema")
          method->schema = value.starts_with("builtin:") || builtin_schema(value) ? std::string(value)
                                                                                  : resolve(base_dir, value).string();
        else throw config_error("unknown method key '" + std::string(key) + "'");
        continue;
      }
      if (key == "gt") c.gt_paths.push_back(resolve(base_dir, value));
      else if (key == "gt_format") c.gt_format = parse_format(value);
      else if (key == "select") c.selection = parse_selection(value);
      else if (key == "scope") c.scope = parse_scope(value);
      else if (key == "norm") c.normalization = parse_norm(value);
      else if (key == "sigma") c.sigma_path = resolve(base_dir, value);
      else if (key == "cpe_c") c.cpe_c = parse_real(key, value);
      else if (key == "out") c.out_dir = resolve(base_dir, value);
      else if (key == "emit") apply_emit_list(c, value);
      else if (key == "jobs") c.jobs = parse_count(key, value);
      else if (key == "dataset_id") c.dataset_id = std::string(value);
      else if (key == "input_mode") c.input_mode = std::string(value);
      else if (key == "reference_pose") c.reference_pose = resolve(base_dir, value);
      else throw config_error("unknown key '" + std::string(key) + "'");
    }
  } catch (const Error& e) {
    if (e.code() != ErrorCode::ConfigError) throw;
    std::string msg = e.what();
    msg.erase(0, msg.find(": ") + 2);
    throw config_error(where() + msg);
  }
  return c;
}

EvaluateSummary cmd_evaluate(const RunConfig& config, Logger& log) {
  config.validate();
  EvaluateSummary summary;

  EvalOptions options;
  options.selection = config.selection;
  options.scope = config.scope;
  options.normalization = config.normalization;
  if (config.sigma_path) options.sigma = load_sigma_table(config.sigma_path->string());

  std::vector<SequenceDataset> datasets(config.gt_paths.size());
  run_parallel(datasets.size(), config.jobs,
               [&](std::size_t i) { datasets[i] = parse_ground_truth(config.gt_paths[i], config.gt_format); });
  std::map<std::string, std::size_t> by_id;
  for (std::size_t i = 0; i < datasets.size(); ++i) {
    if (!by_id.emplace(datasets[i].sequence_id, i).second)
      throw config_error("sequence id '" + datasets[i].sequence_id + "' appears in more than one ground-truth file");
  }

  struct Task {
    std::size_t method;
    std::size_t dataset;
    std::optional<DetectionFile> detections;
  };
  std::vector<Task> tasks;
  std::vector<int> native_counts;
  for (std::size_t mi = 0; mi < config.methods.size(); ++mi) {
    const auto& m = config.methods[mi];
    auto schema = load_schema_map(m.schema);
    schema.method_name = m.name;
    native_counts.push_back(schema.native_count);

    const auto paths = detection_paths(m);
    std::vector<DetectionSource> sources(paths.size());
    run_parallel(paths.size(), config.jobs,
                 [&](std::size_t i) { sources[i] = {paths[i], parse_detections(paths[i], m.format, schema)}; });

    std::map<std::size_t, std::size_t> assigned;  // dataset -> source
    for (std::size_t si = 0; si < sources.size(); ++si) {
      const auto key = source_key(sources[si]);
      auto it = by_id.find(key);
      if (it == by_id.end() && datasets.size() == 1 && sources.size() == 1 && sources[si].file.sequence_id.empty())
        it = by_id.begin();
      if (it == by_id.end()) {
        if (!sources[si].file.sequence_id.empty())
          throw Error(ErrorCode::SequenceMismatch, m.name + ": " + sources[si].path.string() + " is for unknown sequence '" +
                                                       key + "'");
        log.warning({"orphan_file", m.name + ": no ground truth for " + sources[si].path.string(), key, {}});
        ++summary.warnings;
        continue;
      }
      if (!assigned.emplace(it->second, si).second)
        throw config_error(m.name + ": two detection files for sequence '" + key + "'");
    }
    for (std::size_t di = 0; di < datasets.size(); ++di) {
      Task t{mi, di, std::nullopt};
      if (const auto a = assigned.find(di); a != assigned.end()) {
        t.detections = std::move(sources[a->second].file);
      } else {
        log.warning({"no_detections", m.name + ": no detection file; every frame counts as missed",
                     datasets[di].sequence_id, {}});
        ++summary.warnings;
      }
      tasks.push_back(std::move(t));
    }
  }

  std::vector<SequenceEvaluation> evaluations(tasks.size());
  std::vector<std::vector<Warning>> task_warnings(tasks.size());
  run_parallel(tasks.size(), config.jobs, [&](std::size_t i) {
    const auto& t = tasks[i];
    const auto& m = config.methods[t.method];
    DetectionFile det;
    det.method_name = m.name;
    if (t.detections) det = *t.detections;
    auto aligned = align(datasets[t.dataset], det);
    evaluations[i] = evaluate_sequence(aligned.dataset, m.name, native_counts[t.method], options);
    task_warnings[i] = std::move(aligned.warnings);
    task_warnings[i].insert(task_warnings[i].end(), evaluations[i].warnings.begin(), evaluations[i].warnings.end());
  });
  for (const auto& ws : task_warnings) {
    for (const auto& w : ws) {
      log.warning(w);
      ++summary.warnings;
    }
  }

  AggregateOptions agg;
  agg.dataset_id = config.dataset_id.empty() ? (datasets.size() == 1 ? datasets.front().sequence_id : "dataset")
                                             : config.dataset_id;
  agg.input_mode = config.input_mode;
  agg.selection = std::string(to_string(config.selection));
  agg.scope = std::string(to_string(config.scope));
  agg.cpe_c = config.cpe_c;
  const ReportMeta meta{kVersion, options.sigma.hash(), config.cpe_c, "sample"};

  fs::create_directories(config.out_dir);
  auto emit = [&](const AggregateResult& result, const std::string& stem) {
    for (const auto& w : result.warnings) {
      log.warning(w);
      ++summary.warnings;
    }
    summary.reports += static_cast<int>(result.reports.size());
    for (auto format : {TableFormat::Csv, TableFormat::Json}) {
      const auto path = config.out_dir / (stem + (format == TableFormat::Csv ? ".csv" : ".json"));
      emit_tables(result.reports, meta, format, path);
      summary.files.push_back(path);
    }
  };

  const auto dataset_result = aggregate(evaluations, agg);
  if (config.emit_tables) emit(dataset_result, "report");
  if (config.emit_per_sequence) {
    agg.grouping = Grouping::Sequence;
    emit(aggregate(evaluations, agg), "report_sequences");
  }
  if (config.emit_circles) {
    const auto reference = config.reference_pose ? load_reference_pose(*config.reference_pose) : default_reference_pose();
    const auto spec = circle_plot_from_reports(dataset_result.reports, reference, "Mean keypoint error, " + agg.dataset_id);
    const auto path = config.out_dir / "circles.svg";
    emit_circle_plot(spec, path);
    summary.files.push_back(path);
  }
  log.event(LogLevel::Info, "done", "evaluation finished",
            {{"reports", std::to_string(summary.reports)}, {"warnings", std::to_string(summary.warnings)}});
  return summary;
}

std::optional<CompareMetric> compare_metric_from_string(std::string_view text) noexcept {
  if (text == "oks") return CompareMetric::Oks;
  if (text == "ap") return CompareMetric::Ap;
  if (text == "ar") return CompareMetric::Ar;
  if (text == "nmh") return CompareMetric::Nmh;
  if (text == "missing") return CompareMetric::Missing;
  if (text == "redundant") return CompareMetric::Redundant;
  if (text == "cpe") return CompareMetric::Cpe;
  if (text == "rho") return CompareMetric::Rho;
  return std::nullopt;
}

std::string cmd_compare(const std::vector<fs::path>& paths, CompareMetric metric) {
  if (paths.size() < 2) throw config_error("compare needs at least two report files");
  std::vector<ParsedReports> parsed;
  for (const auto& p : paths) {
    const auto text = detail::read_file(p);
    parsed.push_back(p.extension() == ".csv" ? parse_csv_report(text, p.string()) : parse_json_report(text, p.string()));
    if (parsed.back().meta.version != parsed.front().meta.version)
      throw Error(ErrorCode::SchemaMismatch, p.string() + " was written by version " + parsed.back().meta.version +
                                                 ", " + paths.front().string() + " by " + parsed.front().meta.version);
  }

  using RowKey = std::tuple<std::string, std::string, std::string>;
  std::vector<RowKey> rows;
  std::vector<std::string> methods;
  std::map<std::pair<RowKey, std::string>, std::optional<double>> cells;
  for (const auto& file : parsed) {
    for (const auto& r : file.reports) {
      RowKey key{r.dataset_id, r.input_mode, r.sequence_id};
      if (std::find(rows.begin(), rows.end(), key) == rows.end()) rows.push_back(key);
      if (std::find(methods.begin(), methods.end(), r.method_name) == methods.end()) methods.push_back(r.method_name);
      cells.try_emplace({key, r.method_name}, metric_value(r, metric));
    }
  }

  std::string out = "dataset_id,input_mode,sequence_id";
  for (const auto& m : methods) out += "," + detail::csv_field(m);
  out += ",best\n";
  const int digits = metric_digits(metric);
  for (const auto& key : rows) {
    // compare at the rendered precision so that visible ties are ties
    std::optional<double> best;
    for (const auto& m : methods) {
      const auto it = cells.find({key, m});
      if (it == cells.end() || !it->second) continue;
      const double g = goodness(metric, *detail::parse_double(detail::format_fixed(*it->second, digits)));
      if (!best || g > *best) best = g;
    }
    out += detail::csv_field(std::get<0>(key)) + "," + detail::csv_field(std::get<1>(key)) + "," +
           detail::csv_field(std::get<2>(key));
    std::string winners;
    for (const auto& m : methods) {
      const auto it = cells.find({key, m});
      out += ",";
      if (it == cells.end() || !it->second) {
        out += "-";
        continue;
      }
      const auto text = detail::format_fixed(*it->second, digits);
      out += text;
      if (best && goodness(metric, *detail::parse_double(text)) == *best) {
        out += "*";
        winners += (winners.empty() ? "" : ";") + m;
      }
    }
    out += "," + detail::csv_field(winners) + "\n";
  }
  return out;
}

std::vector<fs::path> cmd_gen(std::uint64_t seed, int frames, const ErrorModel& model, const fs::path& out_dir,
                              const std::string& sequence_id) {
  const auto inst = generate(seed, frames, model, sequence_id);
  fs::create_directories(out_dir);
  const std::vector<fs::path> files{out_dir / "ground_truth.json", out_dir / "detections.json",
                                    out_dir / "expected.json"};
  detail::write_file(files[0], emit_canonical_json(inst.ground_truth));
  detail::write_file(files[1], emit_canonical_json(inst.detections));
  detail::write_file(files[2], render_expected_json(seed, model, inst.expected));
  return files;
}

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Pose-estimation evaluation toolkit", "kpeval"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);

  // evaluate
  auto* ev = app.add_subcommand("evaluate", "Evaluate methods against ground truth");
  std::string config_path, gt_format, select, scope, norm, sigma, out_dir, emit, dataset_id, input_mode, reference;
  std::vector<std::string> gts, dets;
  double cpe_c = 0.5;
  int jobs = 1;
  ev->add_option("--config", config_path, "Run configuration file");
  ev->add_option("--gt", gts, "Ground-truth file or directory (repeatable)");
  ev->add_option("--gt-format", gt_format, "canonical|coco|frame-dir|csv");
  ev->add_option("--det", dets, "<name>=<path>:<format>:<schema> (repeatable)");
  ev->add_option("--select", select, "first|score|oracle");
  ev->add_option("--scope", scope, "infant|all");
  ev->add_option("--norm", norm, "median|per-image");
  ev->add_option("--sigma", sigma, "Sigma table file");
  ev->add_option("--cpe-c", cpe_c, "CPE coefficient");
  ev->add_option("--out", out_dir, "Output directory");
  ev->add_option("--emit", emit, "tables,circles,per-sequence");
  ev->add_option("--jobs", jobs, "Worker threads");
  ev->add_option("--dataset-id", dataset_id, "Dataset label for the reports");
  ev->add_option("--input-mode", input_mode, "Input label, e.g. images or videos");
  ev->add_option("--reference-pose", reference, "Reference pose for the circle plot");

  // compare
  auto* cmp = app.add_subcommand("compare", "Merge report files into a method-by-dataset matrix");
  std::vector<std::string> report_files;
  std::string metric = "cpe", cmp_out;
  cmp->add_option("reports", report_files, "Report files (.json or .csv)")->required();
  cmp->add_option("--metric", metric, "oks|ap|ar|nmh|missing|redundant|cpe|rho");
  cmp->add_option("--out", cmp_out, "Write the matrix to this file");

  // gen
  auto* gen = app.add_subcommand("gen", "Write a synthetic fixture with known metric values");
  std::uint64_t seed = 0;
  int frames = 100;
  bool perfect = false;
  double jitter = 0.0, drop_kp = 0.0, drop_det = 0.0, dup = 0.0;
  std::string jitter_mode = "fixed", score_model = "perfect", gen_out = ".", sequence_id = "synthetic";
  int drop_det_count = -1;
  gen->add_option("--seed", seed, "PRNG seed");
  gen->add_option("--frames", frames, "Number of frames");
  gen->add_flag("--perfect", perfect, "Detections equal the ground truth");
  gen->add_option("--jitter", jitter, "Keypoint offset as a fraction of the torso length");
  gen->add_option("--jitter-mode", jitter_mode, "fixed|random");
  gen->add_option("--drop-keypoint", drop_kp, "Probability of dropping a keypoint");
  gen->add_option("--drop-detection", drop_det, "Probability of dropping a frame's detection");
  gen->add_option("--drop-detection-count", drop_det_count, "Drop exactly this many detections");
  gen->add_option("--duplicate", dup, "Probability of a duplicated detection");
  gen->add_option("--score-model", score_model, "perfect|anti|constant|noisy");
  gen->add_option("--sequence-id", sequence_id, "Sequence id of the fixture");
  gen->add_option("--out", gen_out, "Output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 2;
  }

  try {
    if (ev->parsed()) {
      RunConfig config;
      if (!config_path.empty()) {
        if (!fs::exists(config_path)) throw config_error("config file not found: " + config_path);
        config = parse_run_config(detail::read_file(config_path), fs::path(config_path).parent_path(), config_path);
      }
      if (ev->count("--gt")) config.gt_paths.assign(gts.begin(), gts.end());
      if (ev->count("--gt-format")) config.gt_format = parse_format(gt_format);
      if (ev->count("--det")) {
        config.methods.clear();
        for (const auto& d : dets) config.methods.push_back(parse_method_spec(d));
      }
      if (ev->count("--select")) config.selection = parse_selection(select);
      if (ev->count("--scope")) config.scope = parse_scope(scope);
      if (ev->count("--norm")) config.normalization = parse_norm(norm);
      if (ev->count("--sigma")) config.sigma_path = fs::path(sigma);
      if (ev->count("--cpe-c")) config.cpe_c = cpe_c;
      if (ev->count("--out")) config.out_dir = out_dir;
      if (ev->count("--emit")) apply_emit_list(config, emit);
      if (ev->count("--jobs")) config.jobs = jobs;
      if (ev->count("--dataset-id")) config.dataset_id = dataset_id;
      if (ev->count("--input-mode")) config.input_mode = input_mode;
      if (ev->count("--reference-pose")) config.reference_pose = fs::path(reference);
      config.validate();

      fs::create_directories(config.out_dir);
      Logger log(config.out_dir / "kpeval.log", log_level_from_env());
      const auto summary = cmd_evaluate(config, log);
      for (const auto& f : summary.files) out << f.string() << '\n';
      if (summary.warnings > 0) err << "kpeval: " << summary.warnings << " warning(s), see " << (config.out_dir / "kpeval.log").string() << '\n';
      return 0;
    }
    if (cmp->parsed()) {
      const auto m = compare_metric_from_string(metric);
      if (!m) throw config_error("unknown metric '" + metric + "'");
      const auto table = cmd_compare(std::vector<fs::path>(report_files.begin(), report_files.end()), *m);
      if (!cmp_out.empty()) detail::write_file(cmp_out, table);
      else out << table;
      return 0;
    }
    if (gen->parsed()) {
      ErrorModel model;
      if (!perfect) {
        const auto jm = jitter_from_string(jitter_mode);
        if (!jm || *jm == JitterKind::None) throw config_error("--jitter-mode must be fixed or random");
        model.jitter = jitter > 0.0 ? *jm : JitterKind::None;
        model.jitter_fraction = jitter;
        model.drop_keypoint_prob = drop_kp;
        model.drop_detection_prob = drop_det;
        if (drop_det_count >= 0) model.drop_detection_count = drop_det_count;
        model.duplicate_detection_prob = dup;
      }
      const auto sm = score_model_from_string(score_model);
      if (!sm) throw config_error("unknown score model '" + score_model + "'");
      model.score_model = *sm;
      for (const auto& f : cmd_gen(seed, frames, model, gen_out, sequence_id)) out << f.string() << '\n';
      return 0;
    }
  } catch (const Error& e) {
    err << "kpeval: " << e.what() << '\n';
    return e.code() == ErrorCode::ConfigError ? 2 : 1;
  } catch (const std::exception& e) {
    err << "kpeval: " << e.what() << '\n';
    return 1;
  }
  return 2;
}

}  // namespace kpeval
