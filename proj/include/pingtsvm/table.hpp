#pragma once

#include <string>
#include <variant>
#include <vector>

namespace pingtsvm {

enum class OutputFormat { Table, Csv, Jsonl };

OutputFormat output_format_from_name(const std::string& name);

/// A table cell: empty (rendered "n/a" / null), a double, an integer, or a
/// string. Doubles are written with the shortest representation that parses
/// back to the same bits, which keeps csv / jsonl output reproducible.
using Cell = std::variant<std::monostate, double, long long, std::string>;

struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;

  void add_row(std::vector<Cell> cells);
};

/// Renders the table in the requested format:
///  - Table: padded human-readable columns (doubles shortened to 6
///    significant digits),
///  - Csv: header line plus one comma-separated line per row,
///  - Jsonl: one {"column": value, ...} object per row.
/// Csv and Jsonl renderings are byte-deterministic functions of the data.
std::string render(const Table& table, OutputFormat format);

std::string format_double(double v);       // shortest round-trip form
std::string json_escape(const std::string& s);

}  // namespace pingtsvm
