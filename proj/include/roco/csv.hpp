#pragma once

// RFC-4180-style CSV reading and writing with round-trip float formatting.

#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace roco {

/// Shortest decimal that parses back to the same double.
std::string format_double(double x);
/// format_double, or an empty field when unset.
std::string format_optional(const std::optional<double>& x);

/// Quotes a field when it contains a comma, quote, CR or LF.
std::string csv_escape(std::string_view field);

class CsvWriter {
 public:
  explicit CsvWriter(std::ostream& out) : out_(out) {}
  void row(const std::vector<std::string>& fields);

 private:
  std::ostream& out_;
};

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  /// Index of a column; nullopt when absent.
  std::optional<std::size_t> column(std::string_view name) const;
};

/// Parses a whole document. The first record is the header; an empty input
/// gives an empty table. Throws ConfigError on malformed quoting or ragged rows.
CsvTable parse_csv(std::string_view text);
CsvTable read_csv_file(const std::string& path);

}  // namespace roco
