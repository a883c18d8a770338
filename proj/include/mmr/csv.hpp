#pragma once

// RFC-4180 reader. Produces raw string cells; typing happens later.

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "mmr/error.hpp"

namespace mmr::csv {

// nullopt marks a missing (empty, unquoted) cell.
using Cell = std::optional<std::string>;

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<Cell>> rows;
};

namespace detail {

struct Cursor {
  std::string_view text;
  std::size_t pos = 0;
  std::size_t line = 1;

  bool done() const { return pos >= text.size(); }
  char peek() const { return text[pos]; }
};

// Consumes one record (possibly spanning lines inside quotes). Returns the
// cells and the line number the record started on.
inline std::vector<Cell> read_record(Cursor& c) {
  std::vector<Cell> cells;
  for (;;) {
    Cell cell;
    if (!c.done() && c.peek() == '"') {
      const std::size_t open_line = c.line;
      const std::size_t open_offset = c.pos;
      ++c.pos;
      std::string value;
      bool closed = false;
      while (!c.done()) {
        const char ch = c.peek();
        if (ch == '"') {
          if (c.pos + 1 < c.text.size() && c.text[c.pos + 1] == '"') {
            value.push_back('"');
            c.pos += 2;
            continue;
          }
          ++c.pos;
          closed = true;
          break;
        }
        if (ch == '\n') ++c.line;
        value.push_back(ch);
        ++c.pos;
      }
      if (!closed) throw ParseError("unterminated quoted field", open_line, open_offset);
      if (!c.done() && c.peek() != ',' && c.peek() != '\n' && c.peek() != '\r') {
        throw ParseError("unexpected character after closing quote", c.line, c.pos);
      }
      cell = std::move(value);
    } else {
      const std::size_t start = c.pos;
      while (!c.done() && c.peek() != ',' && c.peek() != '\n' && c.peek() != '\r') {
        if (c.peek() == '"') throw ParseError("quote inside unquoted field", c.line, c.pos);
        ++c.pos;
      }
      if (c.pos > start) cell = std::string(c.text.substr(start, c.pos - start));
    }
    cells.push_back(std::move(cell));
    if (c.done()) break;
    const char sep = c.peek();
    if (sep == ',') {
      ++c.pos;
      continue;
    }
    // End of record: \n, \r\n, or a lone \r.
    if (sep == '\r') ++c.pos;
    if (!c.done() && c.peek() == '\n') ++c.pos;
    ++c.line;
    break;
  }
  return cells;
}

inline bool blank_line_ahead(const Cursor& c) {
  return !c.done() && (c.peek() == '\n' || c.peek() == '\r');
}

}  // namespace detail

inline Table parse(std::string_view text) {
  if (text.size() >= 3 && text.substr(0, 3) == "\xEF\xBB\xBF") text.remove_prefix(3);
  Table table;
  detail::Cursor c{text};
  if (c.done()) return table;

  const auto header = detail::read_record(c);
  for (std::size_t i = 0; i < header.size(); ++i) {
    std::string name = header[i].value_or("");
    if (name.empty()) throw ParseError("empty column name", 1, 0);
    for (const auto& existing : table.header) {
      if (existing == name) throw ParseError("duplicate column name '" + name + "'", 1, 0);
    }
    table.header.push_back(std::move(name));
  }

  while (!c.done()) {
    if (detail::blank_line_ahead(c)) {
      if (c.peek() == '\r') ++c.pos;
      if (!c.done() && c.peek() == '\n') ++c.pos;
      ++c.line;
      continue;
    }
    const std::size_t line = c.line;
    const std::size_t offset = c.pos;
    auto record = detail::read_record(c);
    if (record.size() != table.header.size()) {
      throw ParseError("expected " + std::to_string(table.header.size()) + " fields, found " +
                           std::to_string(record.size()),
                       line, offset, "ragged-rows");
    }
    table.rows.push_back(std::move(record));
  }
  return table;
}

}  // namespace mmr::csv
