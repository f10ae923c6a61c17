#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <variant>
#include <vector>

namespace asp {

/// One report cell. monostate renders as an empty CSV field / JSON null.
using Cell = std::variant<std::monostate, std::int64_t, double, std::string>;

enum class TableFormat { csv, json };

TableFormat parse_table_format(const std::string& name);
const char* extension(TableFormat format);

/// Rectangular table of named columns.
struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;

  Table() = default;
  explicit Table(std::vector<std::string> cols) : columns(std::move(cols)) {}

  /// Appends a row; throws InvalidParameter when the arity does not match.
  void add_row(std::vector<Cell> row);
};

/// Shortest round-trip decimal representation of a double.
std::string format_double(double value);
std::string format_cell(const Cell& cell);

/// RFC 4180 quoting: fields containing the delimiter, a quote, CR or LF are quoted.
std::string quote_field(const std::string& field, char delimiter = ',');

void write_csv(const Table& table, std::ostream& out);
void write_json(const Table& table, std::ostream& out);

/// Writes `table` to `path` via a temporary sibling file and an atomic rename.
/// Throws IoError naming the path on failure.
void write_table(const Table& table, const std::filesystem::path& path, TableFormat format);

/// Atomically replaces `path` with `contents`.
void write_file_atomic(const std::filesystem::path& path, const std::string& contents);

/// Splits one delimited line into fields, honoring double-quoted fields.
std::vector<std::string> split_fields(const std::string& line, char delimiter);

}  // namespace asp
