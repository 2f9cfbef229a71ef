#include <doctest.h>

#include <atomic>
#include <filesystem>
#include <sstream>
#include <unistd.h>

#include "builders.hpp"
#include "kpeval/cli.hpp"
#include "kpeval/errors.hpp"
#include "kpeval/report.hpp"
#include "kpeval/version.hpp"

using namespace kpeval;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  static std::atomic<int> counter{0};
  auto dir = fs::temp_directory_path() / ("kpeval-test-" + std::to_string(::getpid()) + "-" + name + "-" +
                                          std::to_string(counter++));
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

struct Run {
  int status;
  std::string out;
  std::string err;
};

Run cli(std::vector<std::string> args) {
  args.insert(args.begin(), "kpeval");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int status = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  return {status, out.str(), err.str()};
}

MetricReport row(const std::string& method, const std::string& dataset, double cpe) {
  MetricReport r;
  r.method_name = method;
  r.dataset_id = dataset;
  r.input_mode = "images";
  r.cpe = cpe;
  return r;
}

void write_report(const fs::path& path, std::vector<MetricReport> reports, std::string version = kVersion) {
  detail::write_file(path, render_json(reports, ReportMeta{version, "h", 0.5, "sample"}));
}

}  // namespace

TEST_CASE("method spec") {
  const auto m = parse_method_spec("op=runs/op:frame-dir:builtin:openpose18");
  CHECK(m.name == "op");
  CHECK(m.path == "runs/op");
  CHECK(m.format == FormatKind::PerFrameJsonDirectory);
  CHECK(m.schema == "builtin:openpose18");

  const auto bare = parse_method_spec("a=dets.json");
  CHECK(bare.format == FormatKind::CanonicalJson);
  CHECK(bare.schema == "builtin:coco17");
  CHECK_THROWS_AS(parse_method_spec("no-equals-sign"), Error);
}

TEST_CASE("run config") {
  const auto cfg = parse_run_config(
      "gt = a.json\n"
      "gt = b.json\n"
      "select = score\n"
      "scope = all\n"
      "norm = per-image\n"
      "cpe_c = 0.25\n"
      "emit = tables,circles\n"
      "jobs = 3\n"
      "\n"
      "[method x]\n"
      "det = x/\n"
      "format = coco\n"
      "schema = builtin:coco17\n"
      "[method y]\n"
      "det = y.json\n",
      "/base");
  REQUIRE(cfg.gt_paths.size() == 2);
  CHECK(cfg.gt_paths[0] == fs::path("/base/a.json"));
  CHECK(cfg.selection == SelectionStrategy::HighestScore);
  CHECK(cfg.scope == EvalScope::All);
  CHECK(cfg.normalization == NormalizationMode::PerImage);
  CHECK(cfg.cpe_c == 0.25);
  CHECK(cfg.emit_circles);
  CHECK_FALSE(cfg.emit_per_sequence);
  CHECK(cfg.jobs == 3);
  REQUIRE(cfg.methods.size() == 2);
  CHECK(cfg.methods[0].name == "x");
  CHECK(cfg.methods[0].format == FormatKind::CocoResultJson);
  CHECK(cfg.methods[1].path == fs::path("/base/y.json"));

  CHECK_THROWS_AS(parse_run_config("select = best\n", "/"), Error);
  CHECK_THROWS_AS(parse_run_config("[method a]\ndet = a\n[method a]\ndet = b\n", "/").validate(), Error);
}

TEST_CASE("shipped run configuration validates") {
  const auto path = test::fixture_dir() / "run.conf";
  const auto cfg = parse_run_config(test::slurp(path), path.parent_path());
  CHECK_NOTHROW(cfg.validate());
  CHECK(cfg.methods.size() == 3);
  CHECK(cfg.gt_paths.size() == 2);
}

TEST_CASE("evaluate with perfect detections") {
  const auto dir = scratch("perfect");
  REQUIRE(cli({"gen", "--seed", "7", "--frames", "10", "--perfect", "--out", dir.string()}).status == 0);
  const auto r = cli({"evaluate", "--gt", (dir / "ground_truth.json").string(), "--det",
                      "p=" + (dir / "detections.json").string() + ":canonical:builtin:coco17", "--out",
                      (dir / "out").string()});
  CHECK(r.status == 0);
  const auto rep = parse_json_report(test::slurp(dir / "out" / "report.json")).reports.at(0);
  CHECK(rep.mean_oks->mean == 1.0);
  CHECK(rep.ap == 100.0);
  CHECK(rep.cpe == 1.0);
  fs::remove_all(dir);
}

TEST_CASE("evaluate with two dropped frames") {
  const auto dir = scratch("dropped");
  REQUIRE(cli({"gen", "--seed", "4", "--frames", "40", "--drop-detection-count", "2", "--out", dir.string()}).status == 0);
  REQUIRE(cli({"evaluate", "--gt", (dir / "ground_truth.json").string(), "--det",
               "p=" + (dir / "detections.json").string(), "--out", (dir / "out").string()})
              .status == 0);
  const auto rep = parse_csv_report(test::slurp(dir / "out" / "report.csv")).reports.at(0);
  CHECK(rep.missing_percent == 5.0);  // 2 * 17 / (40 * 17)
  CHECK(rep.counts.missing_detections == 2);
  fs::remove_all(dir);
}

TEST_CASE("exit codes") {
  CHECK(cli({"evaluate", "--gt", "/nonexistent/gt.json", "--det", "a=/nonexistent/d.json"}).status == 2);
  CHECK(cli({"gen", "--frames", "0", "--out", (fs::temp_directory_path() / "kpeval-never").string()}).status == 2);
  CHECK(cli({"frobnicate"}).status == 2);
  CHECK(cli({"compare", "--metric", "cpe", "only-one.json"}).status == 2);

  const auto dir = scratch("badjson");
  detail::write_file(dir / "gt.json", "{ not json");
  const auto r = cli({"evaluate", "--gt", (dir / "gt.json").string(), "--det", "a=" + (dir / "gt.json").string(),
                      "--out", (dir / "out").string()});
  CHECK(r.status == 1);
  CHECK(r.err.find("ParseError") != std::string::npos);
  fs::remove_all(dir);
}

TEST_CASE("gen is deterministic") {
  const auto a = scratch("gen-a");
  const auto b = scratch("gen-b");
  for (const auto& d : {a, b})
    REQUIRE(cli({"gen", "--seed", "7", "--frames", "10", "--jitter", "0.1", "--duplicate", "0.3", "--out", d.string()})
                .status == 0);
  for (const auto* name : {"ground_truth.json", "detections.json", "expected.json"})
    CHECK(test::slurp(a / name) == test::slurp(b / name));
  fs::remove_all(a);
  fs::remove_all(b);
}

TEST_CASE("compare") {
  const auto dir = scratch("compare");
  SUBCASE("two reports, one dataset") {
    write_report(dir / "a.json", {row("alpha", "supine", 0.91)});
    write_report(dir / "b.json", {row("beta", "supine", 0.87)});
    const auto table = cmd_compare({dir / "a.json", dir / "b.json"}, CompareMetric::Cpe);
    CHECK(table == "dataset_id,input_mode,sequence_id,alpha,beta,best\nsupine,images,,0.91*,0.87,alpha\n");
  }
  SUBCASE("disjoint datasets") {
    write_report(dir / "a.json", {row("alpha", "supine", 0.91)});
    write_report(dir / "b.json", {row("beta", "lap", 0.5)});
    const auto table = cmd_compare({dir / "a.json", dir / "b.json"}, CompareMetric::Cpe);
    CHECK(table.find("supine,images,,0.91*,-,alpha\n") != std::string::npos);
    CHECK(table.find("lap,images,,-,0.50*,beta\n") != std::string::npos);
  }
  SUBCASE("ties are all flagged") {
    write_report(dir / "a.json", {row("alpha", "supine", 0.9)});
    write_report(dir / "b.json", {row("beta", "supine", 0.9)});
    const auto table = cmd_compare({dir / "a.json", dir / "b.json"}, CompareMetric::Cpe);
    CHECK(table.find("0.90*,0.90*,alpha;beta") != std::string::npos);
  }
  SUBCASE("version mismatch") {
    write_report(dir / "a.json", {row("alpha", "supine", 0.9)});
    write_report(dir / "b.json", {row("beta", "supine", 0.9)}, "0.1.0");
    try {
      cmd_compare({dir / "a.json", dir / "b.json"}, CompareMetric::Cpe);
      FAIL("expected SchemaMismatch");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::SchemaMismatch);
    }
  }
  fs::remove_all(dir);
}
