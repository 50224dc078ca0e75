#pragma once

#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <string>
#include <string_view>

namespace dscale {

// Shortest text that round-trips a double: 17 significant digits.
std::string format_double(double value);

// Minimal comma-separated writer; fields are written verbatim.
class CsvWriter {
 public:
  CsvWriter(const std::filesystem::path& path, std::initializer_list<std::string_view> header);
  explicit CsvWriter(const std::filesystem::path& path);

  CsvWriter& field(double value);
  CsvWriter& field(long long value);
  CsvWriter& field(unsigned long long value);
  CsvWriter& field(int value) { return field(static_cast<long long>(value)); }
  CsvWriter& field(std::size_t value) { return field(static_cast<unsigned long long>(value)); }
  CsvWriter& field(std::string_view text);
  void end_row();
  void header(std::initializer_list<std::string_view> names);

 private:
  std::ofstream out_;
  bool row_started_ = false;
};

}  // namespace dscale
