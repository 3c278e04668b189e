#pragma once

#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

namespace extremal {

/// Shortest decimal that reads back to the same double.
std::string format_number(double x);

/// "0.1.0-<git describe>" baked in at configure time.
std::string tool_version();

/// Lower-case hex SHA-256 of a file's bytes.
std::string sha256_file(const std::filesystem::path& path);

/// Comma-separated file with a fixed header; numbers go through
/// format_number so the body is byte-stable.
class CsvWriter {
 public:
  CsvWriter(const std::filesystem::path& path, const std::vector<std::string>& columns);
  void row(const std::vector<double>& values);
  void close();
  const std::filesystem::path& path() const noexcept { return path_; }

 private:
  std::filesystem::path path_;
  std::size_t width_;
  std::ofstream out_;
};

}  // namespace extremal
