#include "quantfp/csv.hpp"

#include <charconv>
#include <cmath>
#include <ostream>

#include "quantfp/errors.hpp"

namespace quantfp {

std::string format_number(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  if (value == 0.0) return "0";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, res.ptr);
}

void CsvWriter::header(std::initializer_list<std::string_view> columns) {
  for (auto c : columns) cell(c);
  end_row();
}

void CsvWriter::header(const std::vector<std::string>& columns) {
  for (const auto& c : columns) cell(std::string_view(c));
  end_row();
}

CsvWriter& CsvWriter::cell(std::string_view text) {
  if (row_started_) *out_ << ',';
  *out_ << text;
  row_started_ = true;
  return *this;
}

CsvWriter& CsvWriter::cell(double value) { return cell(std::string_view(format_number(value))); }

CsvWriter& CsvWriter::cell(long long value) {
  return cell(std::string_view(std::to_string(value)));
}

void CsvWriter::end_row() {
  *out_ << '\n';
  row_started_ = false;
}

std::ofstream open_output(const std::filesystem::path& path) {
  if (path.has_parent_path()) {
    std::error_code ec;
    std::filesystem::create_directories(path.parent_path(), ec);
    if (ec) throw InputError("cannot create directory " + path.parent_path().string());
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw InputError("cannot open " + path.string() + " for writing");
  return out;
}

}  // namespace quantfp
