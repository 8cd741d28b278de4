#include "pingtsvm/table.hpp"

#include <charconv>
#include <cstdio>
#include <sstream>
#include <stdexcept>

namespace pingtsvm {

namespace {

std::string human_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

std::string cell_text(const Cell& cell, bool human) {
  if (std::holds_alternative<std::monostate>(cell)) return "n/a";
  if (const auto* d = std::get_if<double>(&cell))
    return human ? human_double(*d) : format_double(*d);
  if (const auto* i = std::get_if<long long>(&cell)) return std::to_string(*i);
  return std::get<std::string>(cell);
}

std::string cell_json(const Cell& cell) {
  if (std::holds_alternative<std::monostate>(cell)) return "null";
  if (const auto* d = std::get_if<double>(&cell)) return format_double(*d);
  if (const auto* i = std::get_if<long long>(&cell)) return std::to_string(*i);
  return "\"" + json_escape(std::get<std::string>(cell)) + "\"";
}

}  // namespace

OutputFormat output_format_from_name(const std::string& name) {
  if (name == "table") return OutputFormat::Table;
  if (name == "csv") return OutputFormat::Csv;
  if (name == "jsonl") return OutputFormat::Jsonl;
  throw std::invalid_argument("unknown output format '" + name +
                              "' (expected table, csv or jsonl)");
}

void Table::add_row(std::vector<Cell> cells) {
  if (cells.size() != columns.size())
    throw std::invalid_argument("table row width does not match column count");
  rows.push_back(std::move(cells));
}

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

std::string json_escape(const std::string& s) {
  std::string out;
  out.reserve(s.size());
  for (const char c : s) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\r': out += "\\r"; break;
      case '\t': out += "\\t"; break;
      default:
        if (static_cast<unsigned char>(c) < 0x20) {
          char buf[8];
          std::snprintf(buf, sizeof(buf), "\\u%04x", c);
          out += buf;
        } else {
          out += c;
        }
    }
  }
  return out;
}

std::string render(const Table& table, OutputFormat format) {
  std::ostringstream out;
  switch (format) {
    case OutputFormat::Csv: {
      for (std::size_t j = 0; j < table.columns.size(); ++j)
        out << (j ? "," : "") << table.columns[j];
      out << '\n';
      for (const auto& row : table.rows) {
        for (std::size_t j = 0; j < row.size(); ++j)
          out << (j ? "," : "") << cell_text(row[j], false);
        out << '\n';
      }
      break;
    }
    case OutputFormat::Jsonl: {
      for (const auto& row : table.rows) {
        out << '{';
        for (std::size_t j = 0; j < row.size(); ++j) {
          out << (j ? "," : "") << '"' << json_escape(table.columns[j])
              << "\":" << cell_json(row[j]);
        }
        out << "}\n";
      }
      break;
    }
    case OutputFormat::Table: {
      std::vector<std::size_t> width(table.columns.size());
      std::vector<std::vector<std::string>> cells;
      for (std::size_t j = 0; j < table.columns.size(); ++j)
        width[j] = table.columns[j].size();
      for (const auto& row : table.rows) {
        std::vector<std::string> line;
        for (std::size_t j = 0; j < row.size(); ++j) {
          line.push_back(cell_text(row[j], true));
          width[j] = std::max(width[j], line.back().size());
        }
        cells.push_back(std::move(line));
      }
      auto pad = [&](const std::string& text, std::size_t w, bool last) {
        out << text;
        if (!last)
          out << std::string(w - text.size() + 2, ' ');
      };
      for (std::size_t j = 0; j < table.columns.size(); ++j)
        pad(table.columns[j], width[j], j + 1 == table.columns.size());
      out << '\n';
      std::size_t rule = 0;
      for (std::size_t j = 0; j < width.size(); ++j)
        rule += width[j] + (j + 1 == width.size() ? 0 : 2);
      out << std::string(rule, '-') << '\n';
      for (const auto& line : cells) {
        for (std::size_t j = 0; j < line.size(); ++j)
          pad(line[j], width[j], j + 1 == line.size());
        out << '\n';
      }
      break;
    }
  }
  return out.str();
}

}  // namespace pingtsvm
