#include "dscale/csv.hpp"

#include <cstdio>

#include "dscale/error.hpp"

namespace dscale {

std::string format_double(double value) {
  char buffer[40];
  std::snprintf(buffer, sizeof buffer, "%.17g", value);
  return buffer;
}

CsvWriter::CsvWriter(const std::filesystem::path& path) : out_(path, std::ios::binary) {
  if (!out_) throw FormatError("cannot open " + path.string() + " for writing");
}

CsvWriter::CsvWriter(const std::filesystem::path& path,
                     std::initializer_list<std::string_view> names)
    : CsvWriter(path) {
  header(names);
}

void CsvWriter::header(std::initializer_list<std::string_view> names) {
  for (auto name : names) field(name);
  end_row();
}

CsvWriter& CsvWriter::field(std::string_view text) {
  if (row_started_) out_ << ',';
  out_ << text;
  row_started_ = true;
  return *this;
}

CsvWriter& CsvWriter::field(double value) { return field(std::string_view(format_double(value))); }

CsvWriter& CsvWriter::field(long long value) {
  return field(std::string_view(std::to_string(value)));
}

CsvWriter& CsvWriter::field(unsigned long long value) {
  return field(std::string_view(std::to_string(value)));
}

void CsvWriter::end_row() {
  out_ << '\n';
  row_started_ = false;
}

}  // namespace dscale
