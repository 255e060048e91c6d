#pragma once

#include <cstdio>
#include <string>
#include <vector>

#include <json.hpp>

#include "scieval/csv.hpp"
#include "scieval/error.hpp"

namespace scieval {

enum class TableFormat { csv, markdown };

// One rendered analysis table: typed cells so numeric precision is applied
// at render time and a persisted run can be re-rendered bit-identically.
struct Cell {
  enum class Kind { text, integer, real, empty };

  Kind kind = Kind::empty;
  std::string text;
  long long integer = 0;
  double real = 0.0;

  static Cell of_text(std::string value) {
    Cell c;
    c.kind = Kind::text;
    c.text = std::move(value);
    return c;
  }
  static Cell of_int(long long value) {
    Cell c;
    c.kind = Kind::integer;
    c.integer = value;
    return c;
  }
  static Cell of_real(double value) {
    Cell c;
    c.kind = Kind::real;
    c.real = value;
    return c;
  }
  static Cell none() { return Cell{}; }

  std::string render(int precision) const {
    switch (kind) {
      case Kind::text:
        return text;
      case Kind::integer:
        return std::to_string(integer);
      case Kind::real: {
        char buf[64];
        std::snprintf(buf, sizeof(buf), "%.*f", precision, real);
        return buf;
      }
      default:
        return "";
    }
  }
};

struct Table {
  std::string name;
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;
};

inline std::string render_table(const Table& table, TableFormat format,
                                int precision = 3) {
  std::string out;
  if (format == TableFormat::csv) {
    for (std::size_t c = 0; c < table.columns.size(); ++c) {
      if (c) out += ',';
      out += csv::escape(table.columns[c]);
    }
    out += '\n';
    for (const auto& row : table.rows) {
      for (std::size_t c = 0; c < row.size(); ++c) {
        if (c) out += ',';
        out += csv::escape(row[c].render(precision));
      }
      out += '\n';
    }
  } else {
    out += '|';
    for (const auto& col : table.columns) {
      out += ' ';
      out += col;
      out += " |";
    }
    out += "\n|";
    for (std::size_t c = 0; c < table.columns.size(); ++c) out += " --- |";
    out += '\n';
    for (const auto& row : table.rows) {
      out += '|';
      for (const Cell& cell : row) {
        out += ' ';
        out += cell.render(precision);
        out += " |";
      }
      out += '\n';
    }
  }
  return out;
}

inline nlohmann::json table_to_json(const Table& table) {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& row : table.rows) {
    nlohmann::json jrow = nlohmann::json::array();
    for (const Cell& cell : row) {
      switch (cell.kind) {
        case Cell::Kind::text: jrow.push_back(cell.text); break;
        case Cell::Kind::integer: jrow.push_back(cell.integer); break;
        case Cell::Kind::real: jrow.push_back(cell.real); break;
        default: jrow.push_back(nullptr); break;
      }
    }
    rows.push_back(std::move(jrow));
  }
  return nlohmann::json{{"name", table.name},
                        {"columns", table.columns},
                        {"rows", std::move(rows)}};
}

inline Table table_from_json(const nlohmann::json& j) {
  Table table;
  try {
    table.name = j.at("name").get<std::string>();
    table.columns = j.at("columns").get<std::vector<std::string>>();
    for (const auto& jrow : j.at("rows")) {
      std::vector<Cell> row;
      for (const auto& jcell : jrow) {
        if (jcell.is_null()) row.push_back(Cell::none());
        else if (jcell.is_string()) row.push_back(Cell::of_text(jcell.get<std::string>()));
        else if (jcell.is_number_integer()) row.push_back(Cell::of_int(jcell.get<long long>()));
        else row.push_back(Cell::of_real(jcell.get<double>()));
      }
      table.rows.push_back(std::move(row));
    }
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("malformed table json: ") + e.what());
  }
  return table;
}

}  // namespace scieval
