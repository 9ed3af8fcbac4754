#include <algorithm>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <system_error>

#include "tradebench/harness.hpp"
#include "tradebench/svg.hpp"

namespace tradebench {

using nlohmann::json;

std::string format_g6(double value) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", value);
  return buf;
}

namespace {

std::string csv_field(std::string_view s) {
  if (s.find_first_of(",\"\n") == std::string_view::npos) return std::string(s);
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields(1);
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        fields.back() += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        fields.back() += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.emplace_back();
    } else {
      fields.back() += c;
    }
  }
  return fields;
}

double parse_double(const std::string& s) {
  std::size_t used = 0;
  const double v = std::stod(s, &used);
  if (used != s.size()) throw std::invalid_argument("bad number '" + s + "'");
  return v;
}

json quality_json(const QualityReport& q) {
  json per_class = json::array();
  for (const auto& c : q.per_class)
    per_class.push_back({{"label", c.label}, {"precision", c.precision}, {"recall", c.recall}, {"f1", c.f1}});
  return {{"per_class", per_class},         {"macro_precision", q.macro_precision}, {"macro_recall", q.macro_recall},
          {"macro_f1", q.macro_f1},         {"micro_f1", q.micro_f1},               {"accuracy", q.accuracy}};
}

}  // namespace

void write_runs_csv(std::ostream& out, const ExperimentResult& result) {
  const bool parallel = result.config.parallel;
  out << kRunsCsvHeader << (parallel ? ",timing_fidelity" : "") << '\n';
  for (const auto& r : result.runs) {
    out << to_string(r.algorithm) << ',' << csv_field(r.task) << ',' << format_g6(r.size_mb) << ','
        << r.eval_method.tag() << ',' << r.seed << ',' << format_g6(r.featurize_s) << ',' << format_g6(r.train_s)
        << ',' << format_g6(r.predict_s) << ',' << format_g6(r.quality.macro_precision) << ','
        << format_g6(r.quality.macro_recall) << ',' << format_g6(r.quality.macro_f1) << ','
        << format_g6(r.quality.micro_f1) << ',' << format_g6(r.quality.accuracy) << ',' << format_g6(r.performance);
    if (parallel) out << ",contended";
    out << '\n';
  }
}

std::vector<CsvRun> read_runs_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line.rfind(kRunsCsvHeader, 0) != 0)
    throw std::runtime_error("runs.csv: unexpected header");
  std::vector<CsvRun> rows;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto f = split_csv_line(line);
    if (f.size() < 14) throw std::runtime_error("runs.csv line " + std::to_string(line_no) + ": too few fields");
    try {
      CsvRun r;
      r.algorithm = f[0];
      r.task = f[1];
      r.size_mb = parse_double(f[2]);
      r.eval_method = f[3];
      r.seed = std::stoull(f[4]);
      r.featurize_s = parse_double(f[5]);
      r.train_s = parse_double(f[6]);
      r.predict_s = parse_double(f[7]);
      r.precision_macro = parse_double(f[8]);
      r.recall_macro = parse_double(f[9]);
      r.f1_macro = parse_double(f[10]);
      r.f1_micro = parse_double(f[11]);
      r.accuracy = parse_double(f[12]);
      r.performance = parse_double(f[13]);
      rows.push_back(std::move(r));
    } catch (const std::logic_error& e) {
      throw std::runtime_error("runs.csv line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return rows;
}

json to_json(const RunRecord& r) {
  return {{"algorithm", std::string(to_string(r.algorithm))},
          {"task", r.task},
          {"size_mb", r.size_mb},
          {"eval_method", r.eval_method.tag()},
          {"seed", r.seed},
          {"featurize_s", r.featurize_s},
          {"train_s", r.train_s},
          {"predict_s", r.predict_s},
          {"started_s", r.started_s},
          {"finished_s", r.finished_s},
          {"train_documents", r.train_documents},
          {"test_documents", r.test_documents},
          {"quality", quality_json(r.quality)},
          {"performance", r.performance}};
}

json to_json(const ExperimentResult& result) {
  json runs = json::array();
  for (const auto& r : result.runs) runs.push_back(to_json(r));
  json errors = json::array();
  for (const auto& e : result.errors)
    errors.push_back({{"algorithm", std::string(to_string(e.algorithm))},
                      {"size_mb", e.size_mb},
                      {"eval_method", e.eval_method.tag()},
                      {"error", e.message}});
  json frontiers = json::array();
  for (const auto& sf : result.frontiers) {
    const auto& f = sf.frontier;
    json points = json::array();
    json pareto = json::array();
    json hull = json::array();
    for (std::size_t i = 0; i < f.points.size(); ++i) {
      const auto& p = f.points[i];
      points.push_back({{"algorithm", p.algorithm},
                        {"quality", p.quality},
                        {"time_s", p.time_s},
                        {"performance", p.performance},
                        {"pareto", f.on_pareto(i)},
                        {"hull", f.on_hull(i)}});
    }
    for (std::size_t i : f.pareto) pareto.push_back(f.points[i].algorithm);
    for (std::size_t i : f.hull) hull.push_back(f.points[i].algorithm);
    frontiers.push_back({{"size_mb", sf.size_mb},
                         {"eval_method", sf.eval_method},
                         {"time_basis", std::string(to_string(result.config.time_basis))},
                         {"points", points},
                         {"pareto", pareto},
                         {"hull", hull}});
  }
  json curves = json::array();
  for (const auto& c : result.curves) {
    json pts = json::array();
    for (const auto& [size, perf] : c.points) pts.push_back({size, perf});
    curves.push_back({{"algorithm", std::string(to_string(c.algorithm))}, {"eval_method", c.eval_method}, {"points", pts}});
  }
  return {{"config", to_json(result.config)},
          {"machine", result.machine},
          {"timing_fidelity", result.config.parallel ? "parallel (contended)" : "sequential"},
          {"runs", runs},
          {"errors", errors},
          {"frontiers", frontiers},
          {"curves", curves}};
}

namespace {

std::vector<svg::Series> series_by_algorithm(const ExperimentResult& result, const std::string& method,
                                             double (*value)(const RunRecord&, TimeBasis), TimeBasis basis) {
  std::vector<svg::Series> out;
  for (const auto& h : result.config.algorithms) {
    svg::Series s{std::string(to_string(h.algorithm)), std::string(svg::color_of(h.algorithm)), {}};
    for (const auto& r : result.runs)
      if (r.algorithm == h.algorithm && r.eval_method.tag() == method) s.points.emplace_back(r.size_mb, value(r, basis));
    std::sort(s.points.begin(), s.points.end());
    out.push_back(std::move(s));
  }
  return out;
}

bool wide_range(const std::vector<double>& sizes) {
  return !sizes.empty() && sizes.front() > 0 && sizes.back() / sizes.front() >= 8.0;
}

}  // namespace

ReportFiles emit_reports(const ExperimentResult& result, const std::filesystem::path& dir) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) throw std::runtime_error("cannot create output directory " + dir.string());

  std::vector<std::pair<std::string, std::string>> files;  // name, content
  {
    std::ostringstream csv;
    write_runs_csv(csv, result);
    files.emplace_back("runs.csv", csv.str());
  }
  files.emplace_back("result.json", to_json(result).dump(2) + "\n");

  const auto methods = result.config.eval_methods();
  const std::string primary = methods.empty() ? std::string("holdout") : methods.front().tag();
  const TimeBasis basis = result.config.time_basis;
  const svg::AxisOptions size_axis{"training data size (MB)", wide_range(result.config.sizes_mb)};
  files.emplace_back("quality_vs_size.svg",
                     svg::line_chart("Quality vs. training data size (" + primary + ")", size_axis,
                                     {"macro F1", false},
                                     series_by_algorithm(result, primary,
                                                         [](const RunRecord& r, TimeBasis) { return r.quality.macro_f1; },
                                                         basis)));
  files.emplace_back("time_vs_size.svg",
                     svg::line_chart("Time vs. training data size (" + std::string(to_string(basis)) + ")", size_axis,
                                     {"time (s)", true},
                                     series_by_algorithm(result, primary,
                                                         [](const RunRecord& r, TimeBasis b) { return charged_time(r, b); },
                                                         basis)));
  files.emplace_back("performance_vs_size.svg",
                     svg::line_chart("Performance vs. training data size", size_axis, {"quality x MB / s", false},
                                     series_by_algorithm(result, primary,
                                                         [](const RunRecord& r, TimeBasis) { return r.performance; },
                                                         basis)));
  for (const auto& sf : result.frontiers)
    files.emplace_back("frontier_" + format_g6(sf.size_mb) + ".svg",
                       svg::frontier_chart("Quality vs. time at " + format_g6(sf.size_mb) + " MB", sf.frontier));

  // Stage everything under temporary names, then rename into place.
  std::vector<fs::path> staged;
  const auto discard = [&] {
    for (const auto& p : staged) fs::remove(p, ec);
  };
  for (const auto& [name, content] : files) {
    const fs::path tmp = dir / ("." + name + ".tmp");
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (out) out << content;
    out.close();
    if (!out) {
      fs::remove(tmp, ec);
      discard();
      throw std::runtime_error("cannot write " + (dir / name).string());
    }
    staged.push_back(tmp);
  }
  ReportFiles written;
  for (std::size_t i = 0; i < files.size(); ++i) {
    const fs::path target = dir / files[i].first;
    fs::rename(staged[i], target, ec);
    if (ec) {
      discard();
      throw std::runtime_error("cannot move report into place: " + target.string());
    }
    if (i == 0)
      written.runs_csv = target;
    else if (i == 1)
      written.result_json = target;
    else
      written.plots.push_back(target);
  }
  return written;
}

}  // namespace tradebench
