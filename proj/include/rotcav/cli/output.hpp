#pragma once

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "rotcav/error.hpp"

namespace rotcav::cli {

/// 17 significant digits, round-trip exact.
inline std::string fmt(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

class CsvWriter {
 public:
  explicit CsvWriter(std::vector<std::string> header) : ncols_(header.size()) { line(header); }

  void row(const std::vector<std::string>& cells) {
    require(cells.size() == ncols_, Errc::InvalidArgument, "csv row has the wrong number of cells");
    line(cells);
  }

  const std::string& str() const { return text_; }

 private:
  void line(const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) text_ += ',';
      text_ += cells[i];
    }
    text_ += '\n';
  }

  std::size_t ncols_;
  std::string text_;
};

inline void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  require(static_cast<bool>(out), Errc::InvalidArgument, "cannot write " + path.string());
  out << text;
  require(static_cast<bool>(out), Errc::InvalidArgument, "failed writing " + path.string());
}

inline void write_json(const std::filesystem::path& path, const nlohmann::json& j) {
  write_file(path, j.dump(2) + "\n");
}

/// NaN and infinities become null.
inline nlohmann::json num(double x) { return std::isfinite(x) ? nlohmann::json(x) : nlohmann::json(nullptr); }

}  // namespace rotcav::cli
