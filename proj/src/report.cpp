#include "conewave/report.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "conewave/error.hpp"

namespace conewave {

namespace {

using nlohmann::json;

json number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return v;
}

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string short_fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.4g", v);
  return buf;
}

json config_json(const ExperimentConfig& c) {
  auto reals = [](const std::vector<double>& v) {
    json a = json::array();
    for (double x : v) a.push_back(number(x));
    return a;
  };
  json j;
  j["experiment"] = c.experiment;
  j["cone"] = c.cone;
  j["cone_dim"] = c.cone_dim;
  j["group"] = c.group;
  j["group_n"] = c.group_n;
  j["group_direction"] = reals(c.group_direction);
  j["grid_count"] = c.grid_count;
  j["grid_half_width"] = reals(c.grid_half_width);
  j["e_count"] = c.e_count;
  j["e_half_width"] = number(c.e_half_width);
  j["delta"] = number(c.delta);
  j["R"] = number(c.R);
  j["region"] = c.region;
  j["scale_lo"] = number(c.scale_lo);
  j["scale_hi"] = number(c.scale_hi);
  j["angle"] = number(c.angle);
  j["box_lo"] = reals(c.box_lo);
  j["box_hi"] = reals(c.box_hi);
  j["shell_c"] = number(c.shell_c);
  j["bump_mode"] = c.bump_mode;
  j["transport"] = c.transport;
  j["s"] = reals(c.s);
  j["p"] = number(c.p);
  j["q"] = number(c.q);
  j["trials"] = c.trials;
  j["seed"] = c.seed;
  j["terms"] = c.terms;
  j["bump_radius"] = number(c.bump_radius);
  j["weighted"] = c.weighted;
  j["weight_c"] = number(c.weight_c);
  j["k_max"] = c.k_max;
  j["blowup_j"] = c.blowup_j;
  j["multiplier"] = c.multiplier;
  j["tau"] = number(c.tau);
  j["t_samples"] = c.t_samples;
  j["p0"] = number(c.p0);
  j["single_term"] = c.single_term;
  j["single_j"] = c.single_j;
  j["single_offset"] = number(c.single_offset);
  j["deltas"] = reals(c.deltas);
  j["p1"] = number(c.p1);
  j["p2"] = number(c.p2);
  j["p3"] = number(c.p3);
  j["refine_counts"] = c.refine_counts;
  return j;
}

void write_file(const std::filesystem::path& path, const std::string& content) {
  std::error_code ec;
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path(), ec);
  if (ec) throw IoError("cannot create directory '" + path.parent_path().string() + "': " + ec.message());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  out << content;
  if (!out) throw IoError("write failed for '" + path.string() + "'");
}

}  // namespace

std::string report_json(const TrialReport& report, const ExperimentConfig* config) {
  json j;
  j["experiment"] = report.experiment;
  j["label"] = "empirical";
  if (config) j["config"] = config_json(*config);
  json rows = json::array();
  for (const TrialRow& r : report.rows) {
    json row{{"trial", r.trial}, {"seed", r.seed}, {"ratio", number(r.ratio)}, {"lhs", number(r.lhs)},
             {"rhs", number(r.rhs)}};
    for (const auto& [k, v] : r.extras) row[k] = number(v);
    rows.push_back(row);
  }
  j["rows"] = rows;
  j["summary_statistics"] = {{"max", number(report.max_ratio)},
                             {"min", number(report.min_ratio)},
                             {"median", number(report.median_ratio)},
                             {"count", report.rows.size()}};
  json summary = json::object();
  for (const auto& [k, v] : report.summary) summary[k] = number(v);
  j["summary"] = summary;
  json traj = json::array();
  for (const TrajectoryPoint& p : report.trajectory) traj.push_back({number(p.x), number(p.y)});
  j["trajectory"] = {{"sweep", report.sweep_label}, {"points", traj}};
  json checks = json::array();
  for (const Check& c : report.checks)
    checks.push_back({{"name", c.name}, {"passed", c.passed}, {"value", number(c.value)}, {"bound", number(c.bound)}});
  j["checks"] = checks;
  j["passed"] = report.passed();
  return j.dump(2) + "\n";
}

std::string report_csv(const TrialReport& report) {
  std::ostringstream os;
  os << "trial,seed,ratio,lhs,rhs";
  std::vector<std::string> extra_keys;
  if (!report.rows.empty())
    for (const auto& [k, v] : report.rows.front().extras) extra_keys.push_back(k);
  for (const auto& k : extra_keys) os << ',' << k;
  os << '\n';
  for (const TrialRow& r : report.rows) {
    os << r.trial << ',' << r.seed << ',' << fmt(r.ratio) << ',' << fmt(r.lhs) << ',' << fmt(r.rhs);
    for (std::size_t i = 0; i < extra_keys.size(); ++i)
      os << ',' << (i < r.extras.size() ? fmt(r.extras[i].second) : std::string());
    os << '\n';
  }
  return os.str();
}

std::string report_svg(const TrialReport& report) {
  const double width = 640, height = 420, margin = 60;
  std::vector<std::pair<double, double>> pts;
  for (const TrajectoryPoint& p : report.trajectory)
    if (p.x > 0.0 && p.y > 0.0 && std::isfinite(p.x) && std::isfinite(p.y))
      pts.emplace_back(std::log10(p.x), std::log10(p.y));
  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height << "\">\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  os << "<text x=\"" << width / 2 << "\" y=\"24\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"14\">"
     << report.experiment << " (empirical, log-log)</text>\n";
  if (!pts.empty()) {
    double x0 = pts[0].first, x1 = x0, y0 = pts[0].second, y1 = y0;
    for (const auto& [x, y] : pts) {
      x0 = std::min(x0, x);
      x1 = std::max(x1, x);
      y0 = std::min(y0, y);
      y1 = std::max(y1, y);
    }
    if (x1 - x0 < 1e-12) x1 = x0 + 1.0;
    if (y1 - y0 < 1e-12) {
      y0 -= 0.5;
      y1 += 0.5;
    }
    auto sx = [&](double x) { return margin + (x - x0) / (x1 - x0) * (width - 2 * margin); };
    auto sy = [&](double y) { return height - margin - (y - y0) / (y1 - y0) * (height - 2 * margin); };
    os << "<line x1=\"" << margin << "\" y1=\"" << height - margin << "\" x2=\"" << width - margin << "\" y2=\""
       << height - margin << "\" stroke=\"black\"/>\n";
    os << "<line x1=\"" << margin << "\" y1=\"" << margin << "\" x2=\"" << margin << "\" y2=\"" << height - margin
       << "\" stroke=\"black\"/>\n";
    os << "<polyline fill=\"none\" stroke=\"steelblue\" stroke-width=\"2\" points=\"";
    for (std::size_t i = 0; i < pts.size(); ++i)
      os << (i ? " " : "") << short_fmt(sx(pts[i].first)) << ',' << short_fmt(sy(pts[i].second));
    os << "\"/>\n";
    os << "<text x=\"" << margin << "\" y=\"" << height - margin + 20 << "\" font-family=\"sans-serif\" font-size=\"11\">"
       << short_fmt(std::pow(10.0, x0)) << "</text>\n";
    os << "<text x=\"" << width - margin << "\" y=\"" << height - margin + 20
       << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">" << short_fmt(std::pow(10.0, x1))
       << "</text>\n";
    os << "<text x=\"" << width / 2 << "\" y=\"" << height - 15
       << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\">" << report.sweep_label
       << "</text>\n";
    os << "<text x=\"" << margin - 5 << "\" y=\"" << height - margin
       << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">" << short_fmt(std::pow(10.0, y0))
       << "</text>\n";
    os << "<text x=\"" << margin - 5 << "\" y=\"" << margin + 4
       << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">" << short_fmt(std::pow(10.0, y1))
       << "</text>\n";
  }
  os << "</svg>\n";
  return os.str();
}

std::string emit_report(const TrialReport& report, ReportFormat format, const std::string& dir,
                        const ExperimentConfig* config) {
  const std::filesystem::path base(dir);
  std::filesystem::path path;
  std::string content;
  switch (format) {
    case ReportFormat::json:
      path = base / "result.json";
      content = report_json(report, config);
      break;
    case ReportFormat::csv:
      path = base / "trials.csv";
      content = report_csv(report);
      break;
    case ReportFormat::svg:
      path = base / "trajectory.svg";
      content = report_svg(report);
      break;
  }
  write_file(path, content);
  return path.string();
}

}  // namespace conewave
