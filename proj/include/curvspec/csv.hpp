#pragma once

#include <cstdint>
#include <initializer_list>
#include <ostream>
#include <string>
#include <string_view>

namespace curvspec {

/// Round-trippable decimal form: 17 significant digits, '.' separator.
std::string format_real(double value);

/// RFC-4180 CSV rows with a fixed column order. Reals are written with
/// format_real so repeated runs produce identical bytes.
class CsvWriter {
public:
  explicit CsvWriter(std::ostream& out) : out_(out) {}

  void header(std::initializer_list<std::string_view> names);

  CsvWriter& field(double value);
  CsvWriter& field(std::int64_t value);
  CsvWriter& field(int value) { return field(static_cast<std::int64_t>(value)); }
  CsvWriter& field(std::size_t value) { return field(static_cast<std::int64_t>(value)); }
  CsvWriter& field(bool value);
  CsvWriter& field(std::string_view value);
  CsvWriter& field(const char* value) { return field(std::string_view(value)); }

  void end_row();

private:
  void separator();

  std::ostream& out_;
  bool row_started_ = false;
};

} // namespace curvspec
