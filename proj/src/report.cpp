#include "dicp/report.hpp"

#include "dicp/csv.hpp"
#include "dicp/metrics.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>

namespace dicp {

namespace fs = std::filesystem;

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::ofstream open_out(const fs::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path.string());
  return out;
}

void finish(std::ofstream& out, const fs::path& path) {
  out.flush();
  if (!out) throw DataError("failed writing " + path.string());
}

double read_value(const std::string& text, std::size_t line) {
  double v = 0.0;
  const char* end = text.data() + text.size();
  const auto res = std::from_chars(text.data(), end, v);
  if (text.empty() || res.ec != std::errc() || res.ptr != end)
    throw DataError("bad number '" + text + "' on line " + std::to_string(line));
  return v;
}

struct Metric {
  RunningStats stats;
  void add(double x) {
    if (!std::isnan(x)) stats.add(x);
  }
  double mean() const { return stats.count() ? stats.mean() : kNaN; }
  double sd() const { return stats.count() ? stats.sd() : kNaN; }
};

std::string fixed(double v, int digits = 2) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", digits, v);
  return buf;
}

/// Linear-interpolation sample quantile of sorted values.
double sorted_quantile(const std::vector<double>& s, double p) {
  const double pos = p * static_cast<double>(s.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, s.size() - 1);
  return s[lo] + (pos - static_cast<double>(lo)) * (s[hi] - s[lo]);
}

struct Frame {
  double left, top, width, height, y_min, y_max;
  double y(double v) const {
    return top + height * (1.0 - (v - y_min) / (y_max - y_min));
  }
};

void draw_boxes(std::ostringstream& svg, const Frame& f,
                const std::vector<std::string>& methods,
                const std::vector<std::vector<double>>& values,
                const std::string& label) {
  svg << "<rect x=\"" << fixed(f.left) << "\" y=\"" << fixed(f.top)
      << "\" width=\"" << fixed(f.width) << "\" height=\"" << fixed(f.height)
      << "\" fill=\"none\" stroke=\"#444\"/>\n";
  svg << "<text x=\"" << fixed(f.left + f.width / 2) << "\" y=\"" << fixed(f.top - 8)
      << "\" text-anchor=\"middle\">" << label << "</text>\n";
  for (int k = 0; k <= 4; ++k) {
    const double v = f.y_min + (f.y_max - f.y_min) * k / 4.0;
    svg << "<text x=\"" << fixed(f.left - 4) << "\" y=\"" << fixed(f.y(v) + 4)
        << "\" text-anchor=\"end\" font-size=\"10\">" << fixed(v, 3) << "</text>\n";
  }
  const double slot = f.width / static_cast<double>(methods.size());
  for (std::size_t m = 0; m < methods.size(); ++m) {
    const double cx = f.left + slot * (static_cast<double>(m) + 0.5);
    const double half = slot * 0.3;
    svg << "<text x=\"" << fixed(cx) << "\" y=\"" << fixed(f.top + f.height + 14)
        << "\" text-anchor=\"middle\" font-size=\"10\">" << methods[m] << "</text>\n";
    std::vector<double> s;
    for (double v : values[m])
      if (std::isfinite(v)) s.push_back(v);
    if (s.empty()) continue;
    std::sort(s.begin(), s.end());
    const double q1 = sorted_quantile(s, 0.25), q2 = sorted_quantile(s, 0.5),
                 q3 = sorted_quantile(s, 0.75);
    svg << "<g class=\"box\" data-method=\"" << methods[m] << "\">\n";
    svg << "<line x1=\"" << fixed(cx) << "\" y1=\"" << fixed(f.y(s.front()))
        << "\" x2=\"" << fixed(cx) << "\" y2=\"" << fixed(f.y(q1))
        << "\" stroke=\"#000\"/>\n";
    svg << "<line x1=\"" << fixed(cx) << "\" y1=\"" << fixed(f.y(q3))
        << "\" x2=\"" << fixed(cx) << "\" y2=\"" << fixed(f.y(s.back()))
        << "\" stroke=\"#000\"/>\n";
    svg << "<rect x=\"" << fixed(cx - half) << "\" y=\"" << fixed(f.y(q3))
        << "\" width=\"" << fixed(2 * half) << "\" height=\""
        << fixed(std::max(f.y(q1) - f.y(q3), 0.5))
        << "\" fill=\"#9ecae1\" stroke=\"#000\"/>\n";
    svg << "<line x1=\"" << fixed(cx - half) << "\" y1=\"" << fixed(f.y(q2))
        << "\" x2=\"" << fixed(cx + half) << "\" y2=\"" << fixed(f.y(q2))
        << "\" stroke=\"#000\" stroke-width=\"2\"/>\n";
    svg << "</g>\n";
  }
}

}  // namespace

void write_results_csv(const fs::path& path, const std::vector<ResultRow>& rows) {
  auto out = open_out(path);
  out << kResultsHeader << '\n';
  for (const auto& r : rows)
    out << r.method << ',' << r.setting << ',' << format_double(r.epsilon) << ','
        << r.trial << ',' << format_double(r.coverage) << ','
        << format_double(r.avg_length) << ',' << format_double(r.inf_frac) << ','
        << format_double(r.tpr) << ',' << format_double(r.fdr) << '\n';
  finish(out, path);
}

std::vector<ResultRow> read_results_csv(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path.string());
  std::string line;
  if (!std::getline(in, line) || line != kResultsHeader)
    throw DataError(path.string() + " does not start with the results header");
  std::vector<ResultRow> rows;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto f = split_fields(line);
    if (f.size() != 9)
      throw DataError("ragged row " + std::to_string(line_no) + " in " + path.string());
    ResultRow r;
    r.method = f[0];
    r.setting = f[1];
    r.epsilon = read_value(f[2], line_no);
    r.trial = static_cast<Index>(read_value(f[3], line_no));
    r.coverage = read_value(f[4], line_no);
    r.avg_length = read_value(f[5], line_no);
    r.inf_frac = read_value(f[6], line_no);
    r.tpr = read_value(f[7], line_no);
    r.fdr = read_value(f[8], line_no);
    rows.push_back(std::move(r));
  }
  return rows;
}

void write_diagnostics_csv(const fs::path& path,
                           const std::vector<TrialDiagnostics>& rows) {
  auto out = open_out(path);
  out << "setting,epsilon,trial,sure_detection,jaccard_mean,empty_both,full_masks\n";
  for (const auto& r : rows)
    out << r.setting << ',' << format_double(r.epsilon) << ',' << r.trial << ','
        << format_double(r.sure_detection) << ',' << format_double(r.jaccard_mean)
        << ',' << r.empty_both << ',' << r.full_masks << '\n';
  finish(out, path);
}

std::vector<SummaryRow> summarize(const std::vector<ResultRow>& rows) {
  struct Group {
    SummaryRow head;
    Metric cov, len, inf, tpr, fdr;
  };
  std::vector<Group> groups;
  std::map<std::tuple<std::string, std::string, double>, std::size_t> index;
  for (const auto& r : rows) {
    const auto key = std::make_tuple(r.method, r.setting, r.epsilon);
    auto it = index.find(key);
    if (it == index.end()) {
      it = index.emplace(key, groups.size()).first;
      Group g;
      g.head.method = r.method;
      g.head.setting = r.setting;
      g.head.epsilon = r.epsilon;
      groups.push_back(std::move(g));
    }
    Group& g = groups[it->second];
    ++g.head.trials;
    g.cov.add(r.coverage);
    g.len.add(r.avg_length);
    g.inf.add(r.inf_frac);
    g.tpr.add(r.tpr);
    g.fdr.add(r.fdr);
  }
  std::vector<SummaryRow> out;
  for (auto& g : groups) {
    SummaryRow s = g.head;
    s.coverage_mean = g.cov.mean();
    s.coverage_sd = g.cov.sd();
    s.length_trials = static_cast<Index>(g.len.stats.count());
    s.length_mean = g.len.mean();
    s.length_sd = g.len.sd();
    s.inf_frac_mean = g.inf.mean();
    s.inf_frac_sd = g.inf.sd();
    s.tpr_mean = g.tpr.mean();
    s.tpr_sd = g.tpr.sd();
    s.fdr_mean = g.fdr.mean();
    s.fdr_sd = g.fdr.sd();
    out.push_back(std::move(s));
  }
  return out;
}

void write_summary_csv(const fs::path& path, const std::vector<SummaryRow>& rows) {
  auto out = open_out(path);
  out << "method,setting,epsilon,trials,coverage_mean,coverage_sd,length_trials,"
         "length_mean,length_sd,inf_frac_mean,inf_frac_sd,tpr_mean,tpr_sd,"
         "fdr_mean,fdr_sd\n";
  auto f = [](double v) { return format_double(v); };
  for (const auto& s : rows)
    out << s.method << ',' << s.setting << ',' << f(s.epsilon) << ',' << s.trials
        << ',' << f(s.coverage_mean) << ',' << f(s.coverage_sd) << ','
        << s.length_trials << ',' << f(s.length_mean) << ',' << f(s.length_sd)
        << ',' << f(s.inf_frac_mean) << ',' << f(s.inf_frac_sd) << ','
        << f(s.tpr_mean) << ',' << f(s.tpr_sd) << ',' << f(s.fdr_mean) << ','
        << f(s.fdr_sd) << '\n';
  finish(out, path);
}

std::string panel_file_name(const std::string& setting, double epsilon) {
  return "panel_" + setting + "_eps" + format_double(epsilon) + ".svg";
}

std::string render_panel_svg(const std::vector<ResultRow>& rows,
                             const std::string& title, double alpha) {
  std::vector<std::string> methods;
  std::vector<std::vector<double>> cov, len;
  for (const auto& r : rows) {
    auto it = std::find(methods.begin(), methods.end(), r.method);
    const auto m = static_cast<std::size_t>(it - methods.begin());
    if (it == methods.end()) {
      methods.push_back(r.method);
      cov.emplace_back();
      len.emplace_back();
    }
    cov[m].push_back(r.coverage);
    len[m].push_back(r.avg_length);
  }

  double len_max = 0.0;
  for (const auto& v : len)
    for (double x : v)
      if (std::isfinite(x)) len_max = std::max(len_max, x);
  if (len_max <= 0.0) len_max = 1.0;

  const double panel_w = 60.0 * static_cast<double>(std::max<std::size_t>(methods.size(), 3));
  const Frame cov_frame{60, 40, panel_w, 240, 0.0, 1.0};
  const Frame len_frame{cov_frame.left + panel_w + 80, 40, panel_w, 240, 0.0,
                        len_max * 1.05};
  const double width = len_frame.left + panel_w + 20;

  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << fixed(width)
      << "\" height=\"320\" font-family=\"sans-serif\" font-size=\"12\">\n";
  svg << "<title>" << title << "</title>\n";
  draw_boxes(svg, cov_frame, methods, cov, "coverage");
  const double target = 1.0 - alpha;
  svg << "<line class=\"reference\" data-y=\"" << format_double(target)
      << "\" x1=\"" << fixed(cov_frame.left) << "\" y1=\"" << fixed(cov_frame.y(target))
      << "\" x2=\"" << fixed(cov_frame.left + cov_frame.width) << "\" y2=\""
      << fixed(cov_frame.y(target)) << "\" stroke=\"#d62728\" stroke-dasharray=\"6,4\"/>\n";
  draw_boxes(svg, len_frame, methods, len, "length");
  svg << "</svg>\n";
  return svg.str();
}

std::vector<fs::path> emit_report(const ResultsTable& table, const fs::path& outdir) {
  if (table.rows.empty()) throw Error("cannot report an empty table");
  std::error_code ec;
  fs::create_directories(outdir, ec);
  if (ec || !fs::is_directory(outdir))
    throw DataError("cannot create output directory " + outdir.string());

  std::vector<fs::path> written;
  write_results_csv(outdir / "results.csv", table.rows);
  written.push_back(outdir / "results.csv");
  write_summary_csv(outdir / "summary.csv", summarize(table.rows));
  written.push_back(outdir / "summary.csv");
  if (!table.diagnostics.empty()) {
    write_diagnostics_csv(outdir / "diagnostics.csv", table.diagnostics);
    written.push_back(outdir / "diagnostics.csv");
  }

  std::vector<std::pair<std::string, double>> panels;
  for (const auto& r : table.rows) {
    const auto key = std::make_pair(r.setting, r.epsilon);
    if (std::find(panels.begin(), panels.end(), key) == panels.end())
      panels.push_back(key);
  }
  for (const auto& [setting, eps] : panels) {
    std::vector<ResultRow> subset;
    for (const auto& r : table.rows)
      if (r.setting == setting && r.epsilon == eps) subset.push_back(r);
    const fs::path path = outdir / panel_file_name(setting, eps);
    auto out = open_out(path);
    out << render_panel_svg(subset,
                            "setting " + setting + ", epsilon " + format_double(eps),
                            table.alpha);
    finish(out, path);
    written.push_back(path);
  }
  return written;
}

}  // namespace dicp
