#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "json.hpp"

namespace beamstab::cli {

std::string fmt(double value);

class CsvWriter {
 public:
  CsvWriter(const std::filesystem::path& path, const std::string& config_hash, std::vector<std::string> header);
  void row(const std::vector<std::string>& cells);
  void close();

 private:
  std::filesystem::path path_;
  std::string text_;
  std::size_t columns_;
};

void write_json(const std::filesystem::path& path, nlohmann::json body, const std::string& config_hash);

struct SvgSeries {
  std::string name;
  std::vector<double> x;
  std::vector<double> y;
};

void write_svg(const std::filesystem::path& path, const std::string& config_hash, const std::string& title,
               const std::string& x_label, const std::string& y_label, const std::vector<SvgSeries>& series,
               bool log_x, bool log_y);

}  // namespace beamstab::cli
