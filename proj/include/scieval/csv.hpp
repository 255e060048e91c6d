#pragma once

#include <charconv>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "scieval/error.hpp"

namespace scieval::csv {

struct Row {
  std::size_t line = 0;  // 1-based; the header occupies line 1
  std::vector<std::string> fields;
};

namespace detail {

inline std::string read_whole_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw DataError("missing or unreadable file: " + path.string());
  }
  std::string content((std::istreambuf_iterator<char>(in)),
                      std::istreambuf_iterator<char>());
  return content;
}

// Splits one buffer into records of fields. RFC-4180 style: fields separated
// by commas, a field may be quoted with '"', doubled quotes unescape to one
// quote, quoted fields may contain commas and newlines. CRLF accepted.
inline std::vector<Row> parse_records(std::string_view buf,
                                      const std::string& file_label) {
  std::vector<Row> rows;
  std::size_t i = 0;
  std::size_t line = 1;
  while (i < buf.size()) {
    Row row;
    row.line = line;
    std::string field;
    bool done = false;
    while (!done) {
      field.clear();
      if (i < buf.size() && buf[i] == '"') {
        ++i;
        bool closed = false;
        while (i < buf.size()) {
          char ch = buf[i];
          if (ch == '"') {
            if (i + 1 < buf.size() && buf[i + 1] == '"') {
              field.push_back('"');
              i += 2;
            } else {
              ++i;
              closed = true;
              break;
            }
          } else {
            if (ch == '\n') ++line;
            field.push_back(ch);
            ++i;
          }
        }
        if (!closed) {
          throw DataError(file_label + ":" + std::to_string(row.line) +
                          ": unterminated quoted field");
        }
        if (i < buf.size() && buf[i] != ',' && buf[i] != '\n' &&
            buf[i] != '\r') {
          throw DataError(file_label + ":" + std::to_string(row.line) +
                          ": stray character after closing quote");
        }
      } else {
        while (i < buf.size() && buf[i] != ',' && buf[i] != '\n' &&
               buf[i] != '\r') {
          field.push_back(buf[i]);
          ++i;
        }
      }
      row.fields.push_back(std::move(field));
      if (i >= buf.size()) {
        done = true;
      } else if (buf[i] == ',') {
        ++i;
      } else {
        if (buf[i] == '\r') {
          ++i;
          if (i < buf.size() && buf[i] == '\n') ++i;
        } else {
          ++i;  // '\n'
        }
        ++line;
        done = true;
      }
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace detail

// Reads a whole CSV file, enforcing an exact header. Unknown, missing or
// reordered columns are rejected; every data row must have the header's
// field count.
inline std::vector<Row> read_file(const std::filesystem::path& path,
                                  std::span<const std::string_view> header) {
  const std::string label = path.filename().string();
  std::vector<Row> rows = detail::parse_records(detail::read_whole_file(path), label);
  if (rows.empty()) {
    throw DataError(label + ": empty file, expected a header row");
  }
  const Row& head = rows.front();
  if (head.fields.size() != header.size()) {
    throw DataError(label + ": header has " +
                    std::to_string(head.fields.size()) + " columns, expected " +
                    std::to_string(header.size()));
  }
  for (std::size_t c = 0; c < header.size(); ++c) {
    if (head.fields[c] != header[c]) {
      throw DataError(label + ": unknown column '" + head.fields[c] +
                      "' at position " + std::to_string(c + 1) +
                      ", expected '" + std::string(header[c]) + "'");
    }
  }
  std::vector<Row> out;
  out.reserve(rows.size() - 1);
  for (std::size_t r = 1; r < rows.size(); ++r) {
    Row& row = rows[r];
    if (row.fields.size() == 1 && row.fields[0].empty()) continue;  // blank line
    if (row.fields.size() != header.size()) {
      throw DataError(label + ":" + std::to_string(row.line) + ": has " +
                      std::to_string(row.fields.size()) +
                      " fields, expected " + std::to_string(header.size()));
    }
    out.push_back(std::move(row));
  }
  return out;
}

inline std::string field_context(const std::string& file, std::size_t line,
                                 std::string_view column) {
  return file + ":" + std::to_string(line) + ": column '" +
         std::string(column) + "'";
}

inline long long parse_int(std::string_view text, const std::string& file,
                           std::size_t line, std::string_view column) {
  long long value = 0;
  const char* begin = text.data();
  const char* end = begin + text.size();
  auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc() || ptr != end || text.empty()) {
    throw DataError(field_context(file, line, column) + ": not an integer: '" +
                    std::string(text) + "'");
  }
  return value;
}

inline double parse_real(std::string_view text, const std::string& file,
                         std::size_t line, std::string_view column) {
  double value = 0;
  const char* begin = text.data();
  const char* end = begin + text.size();
  auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc() || ptr != end || text.empty()) {
    throw DataError(field_context(file, line, column) + ": not a number: '" +
                    std::string(text) + "'");
  }
  return value;
}

inline bool parse_bool01(std::string_view text, const std::string& file,
                         std::size_t line, std::string_view column) {
  if (text == "0") return false;
  if (text == "1") return true;
  throw DataError(field_context(file, line, column) + ": expected 0 or 1, got '" +
                  std::string(text) + "'");
}

// Quotes a value for CSV output when it contains a delimiter, quote or
// newline; otherwise returns it verbatim.
inline std::string escape(std::string_view value) {
  bool needs_quotes = false;
  for (char ch : value) {
    if (ch == ',' || ch == '"' || ch == '\n' || ch == '\r') {
      needs_quotes = true;
      break;
    }
  }
  if (!needs_quotes) return std::string(value);
  std::string out = "\"";
  for (char ch : value) {
    if (ch == '"') out += "\"\"";
    else out.push_back(ch);
  }
  out += "\"";
  return out;
}

}  // namespace scieval::csv
