#pragma once

#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <string>
#include <string_view>
#include <vector>

namespace quantfp {

/// Shortest round-trip representation; identical inputs give identical text.
std::string format_number(double value);

/// Minimal CSV writer. Cells are written as given; numbers go through format_number.
class CsvWriter {
 public:
  explicit CsvWriter(std::ostream& out) : out_(&out) {}

  void header(std::initializer_list<std::string_view> columns);
  void header(const std::vector<std::string>& columns);

  CsvWriter& cell(std::string_view text);
  CsvWriter& cell(double value);
  CsvWriter& cell(long long value);
  CsvWriter& cell(int value) { return cell(static_cast<long long>(value)); }
  CsvWriter& cell(std::size_t value) { return cell(static_cast<long long>(value)); }
  void end_row();

 private:
  std::ostream* out_;
  bool row_started_ = false;
};

/// Opens a file for writing, creating parent directories. Throws InputError on failure.
std::ofstream open_output(const std::filesystem::path& path);

}  // namespace quantfp
