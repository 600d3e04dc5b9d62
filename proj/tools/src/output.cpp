#include "beamstab_cli/output.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "beamstab/errors.hpp"
#include "beamstab_cli/config.hpp"

namespace beamstab::cli {

namespace fs = std::filesystem;

namespace {

void write_text(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw NumericError("cannot write output file '" + path.string() + "'");
  out << text;
}

std::string banner(const std::string& hash) {
  return std::string("beamstab ") + kToolVersion + " config_hash=" + hash;
}

}  // namespace

std::string fmt(double value) {
  std::ostringstream os;
  os << std::setprecision(17) << value;
  return os.str();
}

CsvWriter::CsvWriter(const fs::path& path, const std::string& config_hash, std::vector<std::string> header)
    : path_(path), columns_(header.size()) {
  text_ = "# " + banner(config_hash) + "\n";
  for (std::size_t i = 0; i < header.size(); ++i) text_ += (i ? "," : "") + header[i];
  text_ += "\n";
}

void CsvWriter::row(const std::vector<std::string>& cells) {
  if (cells.size() != columns_) throw NumericError("CSV row width mismatch in " + path_.string());
  for (std::size_t i = 0; i < cells.size(); ++i) text_ += (i ? "," : "") + cells[i];
  text_ += "\n";
}

void CsvWriter::close() { write_text(path_, text_); }

void write_json(const fs::path& path, nlohmann::json body, const std::string& config_hash) {
  body["tool_version"] = kToolVersion;
  body["config_hash"] = config_hash;
  write_text(path, body.dump(2) + "\n");
}

void write_svg(const fs::path& path, const std::string& config_hash, const std::string& title,
               const std::string& x_label, const std::string& y_label, const std::vector<SvgSeries>& series,
               bool log_x, bool log_y) {
  const double width = 640, height = 420, left = 70, right = 20, top = 40, bottom = 50;
  auto tx = [&](double v) { return log_x ? std::log10(v) : v; };
  auto ty = [&](double v) { return log_y ? std::log10(v) : v; };
  double x0 = 1e300, x1 = -1e300, y0 = 1e300, y1 = -1e300;
  for (const auto& s : series)
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      if ((log_x && !(s.x[i] > 0)) || (log_y && !(s.y[i] > 0))) continue;
      x0 = std::min(x0, tx(s.x[i]));
      x1 = std::max(x1, tx(s.x[i]));
      y0 = std::min(y0, ty(s.y[i]));
      y1 = std::max(y1, ty(s.y[i]));
    }
  if (!(x1 > x0)) x1 = x0 + 1.0;
  if (!(y1 > y0)) y1 = y0 + 1.0;
  auto px = [&](double v) { return left + (tx(v) - x0) / (x1 - x0) * (width - left - right); };
  auto py = [&](double v) { return height - bottom - (ty(v) - y0) / (y1 - y0) * (height - top - bottom); };

  static const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e"};
  std::ostringstream os;
  os << std::setprecision(6);
  os << "<!-- " << banner(config_hash) << " -->\n";
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height << "\">\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  os << "<text x=\"" << width / 2 << "\" y=\"22\" text-anchor=\"middle\" font-size=\"14\">" << title << "</text>\n";
  os << "<line x1=\"" << left << "\" y1=\"" << height - bottom << "\" x2=\"" << width - right << "\" y2=\""
     << height - bottom << "\" stroke=\"black\"/>\n";
  os << "<line x1=\"" << left << "\" y1=\"" << top << "\" x2=\"" << left << "\" y2=\"" << height - bottom
     << "\" stroke=\"black\"/>\n";
  os << "<text x=\"" << width / 2 << "\" y=\"" << height - 12 << "\" text-anchor=\"middle\" font-size=\"12\">"
     << x_label << (log_x ? " (log10)" : "") << "</text>\n";
  os << "<text x=\"16\" y=\"" << height / 2 << "\" transform=\"rotate(-90 16 " << height / 2
     << ")\" text-anchor=\"middle\" font-size=\"12\">" << y_label << (log_y ? " (log10)" : "") << "</text>\n";
  for (int t = 0; t <= 4; ++t) {
    double fx = x0 + (x1 - x0) * t / 4.0, fy = y0 + (y1 - y0) * t / 4.0;
    double sx = left + (width - left - right) * t / 4.0, sy = height - bottom - (height - top - bottom) * t / 4.0;
    os << "<text x=\"" << sx << "\" y=\"" << height - bottom + 16 << "\" text-anchor=\"middle\" font-size=\"10\">"
       << fx << "</text>\n";
    os << "<text x=\"" << left - 6 << "\" y=\"" << sy + 3 << "\" text-anchor=\"end\" font-size=\"10\">" << fy
       << "</text>\n";
  }
  for (std::size_t k = 0; k < series.size(); ++k) {
    const auto& s = series[k];
    os << "<polyline fill=\"none\" stroke=\"" << colors[k % 5] << "\" stroke-width=\"1.5\" points=\"";
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      if ((log_x && !(s.x[i] > 0)) || (log_y && !(s.y[i] > 0))) continue;
      os << px(s.x[i]) << ',' << py(s.y[i]) << ' ';
    }
    os << "\"/>\n";
    os << "<text x=\"" << width - right - 4 << "\" y=\"" << top + 14 * (k + 1) << "\" text-anchor=\"end\" fill=\""
       << colors[k % 5] << "\" font-size=\"11\">" << s.name << "</text>\n";
  }
  os << "</svg>\n";
  write_text(path, os.str());
}

}  // namespace beamstab::cli
