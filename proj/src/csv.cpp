#include "curvspec/csv.hpp"

#include <fmt/format.h>

namespace curvspec {

std::string format_real(double value) { return fmt::format("{:.17g}", value); }

void CsvWriter::separator() {
  if (row_started_) out_ << ',';
  row_started_ = true;
}

void CsvWriter::header(std::initializer_list<std::string_view> names) {
  for (auto name : names) field(name);
  end_row();
}

CsvWriter& CsvWriter::field(double value) {
  separator();
  out_ << format_real(value);
  return *this;
}

CsvWriter& CsvWriter::field(std::int64_t value) {
  separator();
  out_ << value;
  return *this;
}

CsvWriter& CsvWriter::field(bool value) {
  separator();
  out_ << (value ? "true" : "false");
  return *this;
}

CsvWriter& CsvWriter::field(std::string_view value) {
  separator();
  if (value.find_first_of(",\"\r\n") == std::string_view::npos) {
    out_ << value;
    return *this;
  }
  out_ << '"';
  for (char c : value) {
    if (c == '"') out_ << '"';
    out_ << c;
  }
  out_ << '"';
  return *this;
}

void CsvWriter::end_row() {
  out_ << "\r\n";
  row_started_ = false;
}

} // namespace curvspec
