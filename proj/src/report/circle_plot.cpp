#include <cmath>

#include "kpeval/detail/text.hpp"
#include "kpeval/errors.hpp"
#include "kpeval/report.hpp"

namespace kpeval {

namespace {

using K = KeypointId;

constexpr double kLegendWidth = 180.0;

constexpr std::pair<K, K> kBones[] = {
    {K::Nose, K::LEye},          {K::Nose, K::REye},          {K::LEye, K::LEar},      {K::REye, K::REar},
    {K::LShoulder, K::RShoulder}, {K::LShoulder, K::LElbow},   {K::LElbow, K::LWrist},  {K::RShoulder, K::RElbow},
    {K::RElbow, K::RWrist},      {K::LShoulder, K::LHip},     {K::RShoulder, K::RHip}, {K::LHip, K::RHip},
    {K::LHip, K::LKnee},         {K::LKnee, K::LAnkle},       {K::RHip, K::RKnee},     {K::RKnee, K::RAnkle},
};

std::string xml_escape(std::string_view s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

std::string num(double v) { return detail::format_double(v); }

}  // namespace

std::string_view palette_color(std::size_t i) noexcept {
  static constexpr std::string_view colors[] = {"#0072B2", "#D55E00", "#009E73", "#CC79A7",
                                                "#E69F00", "#56B4E9", "#000000", "#8C564B"};
  return colors[i % std::size(colors)];
}

double ReferencePose::torso_length() const {
  const auto& ls = keypoints[index_of(K::LShoulder)];
  const auto& rs = keypoints[index_of(K::RShoulder)];
  const auto& lh = keypoints[index_of(K::LHip)];
  const auto& rh = keypoints[index_of(K::RHip)];
  if (!ls || !rs || !lh || !rh) throw Error(ErrorCode::NoNormalizer, "reference pose needs both shoulders and hips");
  const double nx = (ls->x + rs->x) / 2.0, ny = (ls->y + rs->y) / 2.0;
  const double hx = (lh->x + rh->x) / 2.0, hy = (lh->y + rh->y) / 2.0;
  return std::hypot(nx - hx, ny - hy);
}

ReferencePose default_reference_pose() {
  ReferencePose p;
  p.width = 400.0;
  p.height = 520.0;
  auto set = [&](K id, double x, double y) { p.keypoints[index_of(id)] = FigurePoint{x, y}; };
  // supine, seen from above: the infant's left side is on the viewer's right
  set(K::Nose, 200, 80);
  set(K::LEye, 214, 68);
  set(K::REye, 186, 68);
  set(K::LEar, 232, 78);
  set(K::REar, 168, 78);
  set(K::LShoulder, 250, 150);
  set(K::RShoulder, 150, 150);
  set(K::LElbow, 290, 220);
  set(K::RElbow, 110, 220);
  set(K::LWrist, 300, 290);
  set(K::RWrist, 100, 290);
  set(K::LHip, 235, 320);
  set(K::RHip, 165, 320);
  set(K::LKnee, 270, 400);
  set(K::RKnee, 130, 400);
  set(K::LAnkle, 280, 480);
  set(K::RAnkle, 120, 480);
  return p;
}

ReferencePose parse_reference_pose(std::string_view text, std::string_view source_name) {
  ReferencePose p;
  int line_no = 0;
  auto fail = [&](const std::string& what) {
    return Error(ErrorCode::ParseError, std::string(source_name) + ":" + std::to_string(line_no) + ": " + what);
  };
  for (auto raw : detail::split(text, '\n')) {
    ++line_no;
    if (const auto hash = raw.find('#'); hash != std::string_view::npos) raw = raw.substr(0, hash);
    const auto line = detail::trim(raw);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) throw fail("expected '='");
    const auto key = detail::trim(line.substr(0, eq));
    const auto values = detail::split_ws(detail::trim(line.substr(eq + 1)));
    std::vector<double> nums;
    for (auto v : values) {
      const auto d = detail::parse_double(v);
      if (!d || !std::isfinite(*d)) throw fail("bad number '" + std::string(v) + "'");
      nums.push_back(*d);
    }
    if (key == "width" || key == "height") {
      if (nums.size() != 1 || nums[0] <= 0.0) throw fail(std::string(key) + " needs one positive value");
      (key == "width" ? p.width : p.height) = nums[0];
      continue;
    }
    const auto id = keypoint_from_name(key);
    if (!id || is_virtual(*id)) throw fail("unknown keypoint '" + std::string(key) + "'");
    if (nums.size() != 2) throw fail("expected 'x y'");
    p.keypoints[index_of(*id)] = FigurePoint{nums[0], nums[1]};
  }
  if (p.width <= 0.0 || p.height <= 0.0) throw Error(ErrorCode::ParseError, std::string(source_name) + ": missing width/height");
  return p;
}

ReferencePose load_reference_pose(const std::filesystem::path& path) {
  return parse_reference_pose(detail::read_file(path), path.string());
}

CirclePlotSpec circle_plot_from_reports(std::span<const MetricReport> reports, const ReferencePose& reference,
                                        std::string title) {
  CirclePlotSpec spec;
  spec.title = std::move(title);
  spec.reference = reference;
  for (const auto& r : reports) {
    if (!r.sequence_id.empty()) continue;
    CircleSeries s;
    s.method_name = r.method_name;
    for (std::size_t k = 0; k < kNumKeypoints; ++k)
      if (r.nmh_per_keypoint[k]) s.error[k] = r.nmh_per_keypoint[k]->mean / 100.0;
    spec.series.push_back(std::move(s));
  }
  return spec;
}

std::string render_circle_plot(const CirclePlotSpec& spec) {
  const auto& ref = spec.reference;
  const double torso = ref.torso_length();
  const double total_width = ref.width + kLegendWidth;
  std::string out;
  out += "<?xml version=\"1.0\" encoding=\"UTF-8\" standalone=\"no\"?>\n";
  out += "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" + num(total_width) + "\" height=\"" +
         num(ref.height) + "\" viewBox=\"0 0 " + num(total_width) + " " + num(ref.height) + "\">\n";
  out += "  <title>" + xml_escape(spec.title.empty() ? "Mean keypoint error" : spec.title) + "</title>\n";
  out += "  <desc>Circle radius = mean error as a fraction of the Neck-MidHip length x " + num(torso) +
         " figure units.</desc>\n";
  out += "  <rect x=\"0\" y=\"0\" width=\"" + num(total_width) + "\" height=\"" + num(ref.height) +
         "\" fill=\"#ffffff\"/>\n";

  out += "  <g id=\"skeleton\" stroke=\"#b0b0b0\" stroke-width=\"2\">\n";
  for (const auto& [a, b] : kBones) {
    const auto& pa = ref.keypoints[index_of(a)];
    const auto& pb = ref.keypoints[index_of(b)];
    if (!pa || !pb) continue;
    out += "    <line x1=\"" + num(pa->x) + "\" y1=\"" + num(pa->y) + "\" x2=\"" + num(pb->x) + "\" y2=\"" +
           num(pb->y) + "\"/>\n";
  }
  out += "  </g>\n";

  for (std::size_t m = 0; m < spec.series.size(); ++m) {
    const auto& s = spec.series[m];
    const std::string color = s.color.empty() ? std::string(palette_color(m)) : s.color;
    out += "  <g id=\"series-" + std::to_string(m) + "\" fill=\"none\" stroke=\"" + xml_escape(color) +
           "\" stroke-width=\"1.5\">\n";
    for (std::size_t k = 0; k < kNumKeypoints; ++k) {
      const auto& p = ref.keypoints[k];
      if (!p || !s.error[k]) continue;
      const double r = std::max(0.0, *s.error[k]) * torso;
      out += "    <circle cx=\"" + num(p->x) + "\" cy=\"" + num(p->y) + "\" r=\"" + num(r) + "\"><title>" +
             xml_escape(s.method_name) + " " + std::string(keypoint_name(keypoint_at(k))) + " " +
             num(*s.error[k]) + "</title></circle>\n";
    }
    out += "  </g>\n";
  }

  out += "  <g id=\"ground-truth\" fill=\"#404040\">\n";
  for (const auto& p : ref.keypoints)
    if (p) out += "    <circle cx=\"" + num(p->x) + "\" cy=\"" + num(p->y) + "\" r=\"2\"/>\n";
  out += "  </g>\n";

  out += "  <g id=\"legend\" font-family=\"sans-serif\" font-size=\"12\">\n";
  for (std::size_t m = 0; m < spec.series.size(); ++m) {
    const auto& s = spec.series[m];
    const std::string color = s.color.empty() ? std::string(palette_color(m)) : s.color;
    const double y = 24.0 + 20.0 * static_cast<double>(m);
    out += "    <rect x=\"" + num(ref.width + 12) + "\" y=\"" + num(y - 10) +
           "\" width=\"12\" height=\"12\" fill=\"" + xml_escape(color) + "\"/>\n";
    out += "    <text x=\"" + num(ref.width + 30) + "\" y=\"" + num(y) + "\">" + xml_escape(s.method_name) +
           "</text>\n";
  }
  out += "  </g>\n";
  out += "</svg>\n";
  return out;
}

void emit_circle_plot(const CirclePlotSpec& spec, const std::filesystem::path& path) {
  detail::write_file(path, render_circle_plot(spec));
}

}  // namespace kpeval
