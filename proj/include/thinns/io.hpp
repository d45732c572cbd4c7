/// @file io.hpp
/// @brief Deterministic CSV/JSON emission: 17-significant-digit formatting
///        (lossless double round trip), a config-hash comment line, and
///        atomic write-then-rename.
#pragma once

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "thinns/errors.hpp"

namespace thinns {

inline std::string format17(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return std::string(buf);
}

inline void write_text_atomic(const std::filesystem::path& path, const std::string& content) {
  namespace fs = std::filesystem;
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  const fs::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw ConfigError("cannot open output file " + tmp.string());
    out << content;
  }
  fs::rename(tmp, path);
}

/// Row-buffered CSV table; the rendered file starts with a comment line
/// carrying the config hash, then the header row.
class CsvTable {
 public:
  CsvTable(std::string hash, std::vector<std::string> columns)
      : hash_(std::move(hash)), columns_(std::move(columns)) {}

  void row(const std::vector<double>& values) {
    if (values.size() != columns_.size())
      throw ConfigError("CsvTable: row width does not match header");
    std::string line;
    for (std::size_t c = 0; c < values.size(); ++c) {
      if (c) line += ',';
      line += format17(values[c]);
    }
    rows_.push_back(std::move(line));
  }

  void row_raw(const std::vector<std::string>& cells) {
    if (cells.size() != columns_.size())
      throw ConfigError("CsvTable: row width does not match header");
    std::string line;
    for (std::size_t c = 0; c < cells.size(); ++c) {
      if (c) line += ',';
      line += cells[c];
    }
    rows_.push_back(std::move(line));
  }

  std::string render() const {
    std::string out = "# config_hash=" + hash_ + "\n";
    for (std::size_t c = 0; c < columns_.size(); ++c) {
      if (c) out += ',';
      out += columns_[c];
    }
    out += '\n';
    for (const std::string& r : rows_) {
      out += r;
      out += '\n';
    }
    return out;
  }

  void write(const std::filesystem::path& path) const { write_text_atomic(path, render()); }

 private:
  std::string hash_;
  std::vector<std::string> columns_;
  std::vector<std::string> rows_;
};

}  // namespace thinns
