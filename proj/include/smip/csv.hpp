#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

namespace smip {

using CsvRow = std::vector<std::string>;

/// Parses delimited text. Double-quoted fields may contain the delimiter and
/// "" escapes. Surrounding spaces of unquoted fields are trimmed. Blank
/// lines are skipped.
std::vector<CsvRow> parse_csv(std::istream& in, char delim = ',');
std::vector<CsvRow> read_csv_file(const std::filesystem::path& path, char delim = ',');

/// Quotes a field only when it contains a comma, quote or newline.
std::string csv_field(const std::string& s);
std::string join_csv(const CsvRow& row);

/// Shortest round-trip form for finite values; "nan", "inf", "-inf"
/// otherwise.
std::string format_double(double v);

/// Writes to a sibling temporary file then renames it over `path`.
void write_file_atomic(const std::filesystem::path& path, const std::string& content);
std::string read_file(const std::filesystem::path& path);

} // namespace smip
