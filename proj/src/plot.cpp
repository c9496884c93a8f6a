#include "speedlearn/plot.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "speedlearn/error.hpp"
#include "speedlearn/formats.hpp"

namespace speedlearn::plot {

namespace {

constexpr double kWidth = 800, kHeight = 520;
constexpr double kLeft = 80, kRight = 170, kTop = 50, kBottom = 60;
constexpr std::array<const char*, 6> kColors = {"#1f77b4", "#d62728", "#2ca02c",
                                                "#ff7f0e", "#9467bd", "#8c564b"};

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

std::string num(double v) {
  std::ostringstream os;
  os.precision(6);
  os << v;
  return os.str();
}

double nice_step(double range, int target) {
  const double raw = range / target;
  const double mag = std::pow(10.0, std::floor(std::log10(raw)));
  const double norm = raw / mag;
  const double nice = norm < 1.5 ? 1.0 : norm < 3.0 ? 2.0 : norm < 7.0 ? 5.0 : 10.0;
  return nice * mag;
}

struct Range {
  double lo = 1e300, hi = -1e300;
  void add(double v) {
    if (!std::isfinite(v)) return;
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  void pad() {
    if (lo > hi) lo = 0, hi = 1;
    if (hi - lo < 1e-12) lo -= 0.5, hi += 0.5;
  }
};

}  // namespace

std::string render_svg(const Figure& fig) {
  Range xr, yr;
  for (const auto& s : fig.series) {
    for (double v : s.x) xr.add(v);
    for (double v : s.y) yr.add(v);
  }
  xr.pad();
  yr.pad();
  const double pw = kWidth - kLeft - kRight;
  const double ph = kHeight - kTop - kBottom;
  if (fig.equal_aspect) {
    const double scale = std::max((xr.hi - xr.lo) / pw, (yr.hi - yr.lo) / ph);
    const double xc = 0.5 * (xr.lo + xr.hi), yc = 0.5 * (yr.lo + yr.hi);
    xr.lo = xc - 0.5 * scale * pw, xr.hi = xc + 0.5 * scale * pw;
    yr.lo = yc - 0.5 * scale * ph, yr.hi = yc + 0.5 * scale * ph;
  }
  auto px = [&](double x) { return kLeft + (x - xr.lo) / (xr.hi - xr.lo) * pw; };
  auto py = [&](double y) { return kTop + ph - (y - yr.lo) / (yr.hi - yr.lo) * ph; };

  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\"" << kHeight
     << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  os << "<text x=\"" << kLeft + pw / 2 << "\" y=\"28\" text-anchor=\"middle\" font-size=\"15\">"
     << escape(fig.title) << "</text>\n";

  const double xs = nice_step(xr.hi - xr.lo, 8), ys = nice_step(yr.hi - yr.lo, 6);
  for (double v = std::ceil(xr.lo / xs) * xs; v <= xr.hi + 1e-9 * xs; v += xs) {
    os << "<line x1=\"" << px(v) << "\" y1=\"" << kTop << "\" x2=\"" << px(v) << "\" y2=\""
       << kTop + ph << "\" stroke=\"#e0e0e0\"/>\n";
    os << "<text x=\"" << px(v) << "\" y=\"" << kTop + ph + 18 << "\" text-anchor=\"middle\">"
       << num(std::abs(v) < 1e-12 * xs ? 0.0 : v) << "</text>\n";
  }
  for (double v = std::ceil(yr.lo / ys) * ys; v <= yr.hi + 1e-9 * ys; v += ys) {
    os << "<line x1=\"" << kLeft << "\" y1=\"" << py(v) << "\" x2=\"" << kLeft + pw << "\" y2=\""
       << py(v) << "\" stroke=\"#e0e0e0\"/>\n";
    os << "<text x=\"" << kLeft - 8 << "\" y=\"" << py(v) + 4 << "\" text-anchor=\"end\">"
       << num(std::abs(v) < 1e-12 * ys ? 0.0 : v) << "</text>\n";
  }
  os << "<rect x=\"" << kLeft << "\" y=\"" << kTop << "\" width=\"" << pw << "\" height=\"" << ph
     << "\" fill=\"none\" stroke=\"black\"/>\n";
  os << "<text x=\"" << kLeft + pw / 2 << "\" y=\"" << kHeight - 15
     << "\" text-anchor=\"middle\">" << escape(fig.x_label) << "</text>\n";
  os << "<text transform=\"translate(22," << kTop + ph / 2
     << ") rotate(-90)\" text-anchor=\"middle\">" << escape(fig.y_label) << "</text>\n";

  for (std::size_t i = 0; i < fig.series.size(); ++i) {
    const auto& s = fig.series[i];
    const char* color = kColors[i % kColors.size()];
    os << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.3\" points=\"";
    const std::size_t n = std::min(s.x.size(), s.y.size());
    for (std::size_t k = 0; k < n; ++k) {
      if (!std::isfinite(s.x[k]) || !std::isfinite(s.y[k])) continue;
      os << px(s.x[k]) << ',' << py(s.y[k]) << ' ';
    }
    os << "\"/>\n";
    const double ly = kTop + 14 + 20.0 * static_cast<double>(i);
    os << "<line x1=\"" << kLeft + pw + 12 << "\" y1=\"" << ly - 4 << "\" x2=\"" << kLeft + pw + 36
       << "\" y2=\"" << ly - 4 << "\" stroke=\"" << color << "\" stroke-width=\"2\"/>\n";
    os << "<text x=\"" << kLeft + pw + 42 << "\" y=\"" << ly << "\">" << escape(s.name)
       << "</text>\n";
  }
  os << "</svg>\n";
  return os.str();
}

std::string render_table(const Figure& fig) {
  std::string out;
  for (const auto& s : fig.series) {
    out += "# series: " + s.name + "\n";
    out += fig.x_label + "," + fig.y_label + "\n";
    const std::size_t n = std::min(s.x.size(), s.y.size());
    for (std::size_t k = 0; k < n; ++k) {
      out += io::format_double(s.x[k]) + "," + io::format_double(s.y[k]) + "\n";
    }
  }
  return out;
}

std::size_t Table::column(const std::string& name) const {
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (header[i].rfind(name, 0) == 0) return i;
  }
  throw Error(ErrorCode::kIoFailure, "column '" + name + "' not found");
}

Table read_table(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIoFailure, "cannot open " + path.string());
  Table t;
  std::string line;
  if (!std::getline(in, line)) throw Error(ErrorCode::kIoFailure, path.string() + " is empty");
  std::istringstream hs(line);
  std::string cell;
  while (std::getline(hs, cell, ',')) t.header.push_back(cell);
  t.columns.resize(t.header.size());
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::istringstream ls(line);
    std::size_t c = 0;
    while (std::getline(ls, cell, ',')) {
      double v = 0.0;
      auto [end, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
      if (c >= t.columns.size() || ec != std::errc() || end != cell.data() + cell.size()) {
        throw Error(ErrorCode::kIoFailure, path.string() + ":" + std::to_string(lineno) + ": bad cell");
      }
      t.columns[c++].push_back(v);
    }
    if (c != t.columns.size()) {
      throw Error(ErrorCode::kIoFailure, path.string() + ":" + std::to_string(lineno) + ": short row");
    }
  }
  if (t.rows() == 0) throw Error(ErrorCode::kIoFailure, path.string() + " has no data rows");
  return t;
}

}  // namespace speedlearn::plot
