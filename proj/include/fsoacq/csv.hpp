#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace fsoacq {

/// RFC 4180 CSV writer: CRLF row endings, quoting only when a cell needs it.
class CsvWriter {
 public:
  explicit CsvWriter(std::vector<std::string> header);

  /// Row width must match the header.
  void add_row(std::vector<std::string> cells);

  std::string str() const;
  void write_file(const std::string& path) const;
  std::size_t row_count() const { return rows_.size(); }

 private:
  std::vector<std::string> header_;
  std::vector<std::vector<std::string>> rows_;
};

/// Shortest decimal form that round-trips the exact double.
std::string csv_num(double v);
std::string csv_int(std::int64_t v);
std::string csv_uint(std::uint64_t v);

}  // namespace fsoacq
