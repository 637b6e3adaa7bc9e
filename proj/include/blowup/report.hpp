#pragma once

// Flat-file artifacts: CSV tables, two-column plot data and a static SVG
// line chart.  All numbers are written with 17 significant digits so that
// the files round-trip, and output is byte-identical for identical input.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "blowup/errors.hpp"

namespace blowup {

inline std::string fmt17(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

class CsvTable {
 public:
  explicit CsvTable(std::vector<std::string> header) : header_(std::move(header)) {}

  void add(const std::vector<double>& row) {
    if (row.size() != header_.size()) throw InvalidInput("csv: row width does not match the header");
    std::vector<std::string> r;
    for (double x : row) r.push_back(fmt17(x));
    rows_.push_back(std::move(r));
  }
  void add_text(std::vector<std::string> row) {
    if (row.size() != header_.size()) throw InvalidInput("csv: row width does not match the header");
    for (auto& c : row) c = quote(c);
    rows_.push_back(std::move(row));
  }

  std::string str() const {
    std::ostringstream o;
    for (std::size_t i = 0; i < header_.size(); ++i) o << (i ? "," : "") << quote(header_[i]);
    o << '\n';
    for (const auto& r : rows_) {
      for (std::size_t i = 0; i < r.size(); ++i) o << (i ? "," : "") << r[i];
      o << '\n';
    }
    return o.str();
  }
  std::size_t size() const { return rows_.size(); }

 private:
  static std::string quote(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string q = "\"";
    for (char c : s) {
      if (c == '"') q += '"';
      q += c;
    }
    return q + "\"";
  }
  std::vector<std::string> header_;
  std::vector<std::vector<std::string>> rows_;
};

inline void write_file(const std::filesystem::path& p, const std::string& content) {
  std::ofstream f(p, std::ios::binary | std::ios::trunc);
  if (!f) throw ConfigError("cannot write " + p.string());
  f << content;
  if (!f) throw ConfigError("write failed for " + p.string());
}

struct Series {
  std::string name;
  std::vector<double> x, y;
};

// "x y" lines with a '#' header.
inline std::string plot_data(const Series& s, const std::string& xname, const std::string& yname) {
  std::ostringstream o;
  o << "# " << xname << ' ' << yname << '\n';
  for (std::size_t i = 0; i < s.x.size(); ++i) o << fmt17(s.x[i]) << ' ' << fmt17(s.y[i]) << '\n';
  return o.str();
}

struct ChartOptions {
  std::string title;
  std::string xlabel = "d";
  std::string ylabel;
  bool log_x = true;
  std::vector<double> reference_lines;  // horizontal dashed guides
};

namespace detail {

inline std::string svg_escape(const std::string& s) {
  std::string o;
  for (char c : s) {
    switch (c) {
      case '<': o += "&lt;"; break;
      case '>': o += "&gt;"; break;
      case '&': o += "&amp;"; break;
      case '"': o += "&quot;"; break;
      default: o += c;
    }
  }
  return o;
}

inline std::string coord(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

inline std::string tick_label(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4g", v);
  return buf;
}

}  // namespace detail

// Self-contained SVG line chart; non-finite points (and x <= 0 on a log
// axis) are skipped.
inline std::string svg_line_chart(const std::vector<Series>& series, const ChartOptions& opt) {
  const double W = 720, H = 440, ml = 80, mr = 20, mt = 40, mb = 60;
  auto tx = [&](double x) { return opt.log_x ? std::log10(x) : x; };
  double x0 = INFINITY, x1 = -INFINITY, y0 = INFINITY, y1 = -INFINITY;
  auto usable = [&](double x, double y) { return std::isfinite(x) && std::isfinite(y) && (!opt.log_x || x > 0); };
  for (const auto& s : series)
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      if (!usable(s.x[i], s.y[i])) continue;
      x0 = std::min(x0, tx(s.x[i]));
      x1 = std::max(x1, tx(s.x[i]));
      y0 = std::min(y0, s.y[i]);
      y1 = std::max(y1, s.y[i]);
    }
  for (double r : opt.reference_lines) {
    y0 = std::min(y0, r);
    y1 = std::max(y1, r);
  }
  if (!(x0 <= x1)) x0 = 0, x1 = 1;
  if (!(y0 <= y1)) y0 = 0, y1 = 1;
  if (x1 - x0 < 1e-12) x0 -= 0.5, x1 += 0.5;
  if (y1 - y0 < 1e-12 * std::max(1.0, std::abs(y0))) {
    const double pad = 0.01 * std::max(1.0, std::abs(y0));
    y0 -= pad, y1 += pad;
  } else {
    const double pad = 0.05 * (y1 - y0);
    y0 -= pad, y1 += pad;
  }
  auto px = [&](double x) { return ml + (tx(x) - x0) / (x1 - x0) * (W - ml - mr); };
  auto py = [&](double y) { return H - mb - (y - y0) / (y1 - y0) * (H - mt - mb); };

  static const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e"};
  std::ostringstream o;
  o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H << "\" viewBox=\"0 0 " << W
    << ' ' << H << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  o << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  o << "<text x=\"" << W / 2 << "\" y=\"24\" text-anchor=\"middle\" font-size=\"15\">" << detail::svg_escape(opt.title)
    << "</text>\n";
  o << "<rect x=\"" << ml << "\" y=\"" << mt << "\" width=\"" << W - ml - mr << "\" height=\"" << H - mt - mb
    << "\" fill=\"none\" stroke=\"black\"/>\n";
  // Ticks: decades on a log axis, five divisions otherwise.
  if (opt.log_x) {
    for (int e = static_cast<int>(std::ceil(x0)); e <= static_cast<int>(std::floor(x1)); ++e) {
      const double X = ml + (e - x0) / (x1 - x0) * (W - ml - mr);
      o << "<line x1=\"" << detail::coord(X) << "\" y1=\"" << H - mb << "\" x2=\"" << detail::coord(X) << "\" y2=\""
        << H - mb + 5 << "\" stroke=\"black\"/>\n";
      o << "<text x=\"" << detail::coord(X) << "\" y=\"" << H - mb + 18 << "\" text-anchor=\"middle\">1e" << e
        << "</text>\n";
    }
  } else {
    for (int i = 0; i <= 5; ++i) {
      const double v = x0 + (x1 - x0) * i / 5;
      const double X = ml + (W - ml - mr) * i / 5;
      o << "<text x=\"" << detail::coord(X) << "\" y=\"" << H - mb + 18 << "\" text-anchor=\"middle\">"
        << detail::tick_label(v) << "</text>\n";
    }
  }
  for (int i = 0; i <= 5; ++i) {
    const double v = y0 + (y1 - y0) * i / 5;
    const double Y = py(v);
    o << "<line x1=\"" << ml - 5 << "\" y1=\"" << detail::coord(Y) << "\" x2=\"" << ml << "\" y2=\""
      << detail::coord(Y) << "\" stroke=\"black\"/>\n";
    o << "<text x=\"" << ml - 8 << "\" y=\"" << detail::coord(Y + 4) << "\" text-anchor=\"end\">"
      << detail::tick_label(v) << "</text>\n";
  }
  o << "<text x=\"" << (ml + W - mr) / 2 << "\" y=\"" << H - 16 << "\" text-anchor=\"middle\">"
    << detail::svg_escape(opt.xlabel) << "</text>\n";
  o << "<text x=\"18\" y=\"" << (mt + H - mb) / 2 << "\" text-anchor=\"middle\" transform=\"rotate(-90 18 "
    << (mt + H - mb) / 2 << ")\">" << detail::svg_escape(opt.ylabel) << "</text>\n";
  for (double r : opt.reference_lines)
    o << "<line x1=\"" << ml << "\" y1=\"" << detail::coord(py(r)) << "\" x2=\"" << W - mr << "\" y2=\""
      << detail::coord(py(r)) << "\" stroke=\"gray\" stroke-dasharray=\"5,4\"/>\n";
  for (std::size_t k = 0; k < series.size(); ++k) {
    const auto& s = series[k];
    std::string pts;
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      if (!usable(s.x[i], s.y[i])) continue;
      pts += detail::coord(px(s.x[i])) + "," + detail::coord(py(s.y[i])) + " ";
    }
    if (!pts.empty()) pts.pop_back();
    const char* col = colors[k % 5];
    o << "<polyline fill=\"none\" stroke=\"" << col << "\" stroke-width=\"1.5\" points=\"" << pts << "\"/>\n";
    o << "<text x=\"" << W - mr - 8 << "\" y=\"" << mt + 16 + 16 * k << "\" text-anchor=\"end\" fill=\"" << col
      << "\">" << detail::svg_escape(s.name) << "</text>\n";
  }
  o << "</svg>\n";
  return o.str();
}

}  // namespace blowup
