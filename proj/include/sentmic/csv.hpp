#pragma once

// Minimal RFC 4180 reader/writer shared by every file format in the project.
// Records remember the physical line they started on so parse errors can
// point at the offending row.

#include <array>
#include <charconv>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <fstream>
#include <iterator>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include "sentmic/error.hpp"

namespace sentmic::csv {

struct Record {
  std::size_t line = 0;
  std::vector<std::string> fields;
};

/// Splits `text` into records. A trailing newline does not produce an empty
/// record; blank lines are skipped. A leading UTF-8 BOM is ignored.
inline std::vector<Record> parse(std::string_view text) {
  if (text.starts_with("\xEF\xBB\xBF")) text.remove_prefix(3);

  std::vector<Record> out;
  Record current;
  std::string field;
  std::size_t line = 1;
  bool in_quotes = false;
  bool field_started = false;
  bool record_has_content = false;
  current.line = 1;

  auto end_field = [&] {
    current.fields.push_back(std::move(field));
    field.clear();
    field_started = false;
  };
  auto end_record = [&] {
    if (record_has_content) {
      end_field();
      out.push_back(std::move(current));
    }
    current = Record{};
    field.clear();
    field_started = false;
    record_has_content = false;
  };

  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (in_quotes) {
      if (c == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          field.push_back('"');
          ++i;
        } else {
          in_quotes = false;
        }
      } else {
        if (c == '\n') ++line;
        field.push_back(c);
      }
      continue;
    }
    switch (c) {
      case '"':
        if (field_started) {
          throw Error(ErrorKind::MalformedRow, "stray quote inside unquoted field", current.line);
        }
        in_quotes = true;
        field_started = true;
        record_has_content = true;
        break;
      case ',':
        record_has_content = true;
        end_field();
        break;
      case '\r':
        break;
      case '\n':
        end_record();
        ++line;
        current.line = line;
        break;
      default:
        if (!record_has_content) current.line = line;
        field.push_back(c);
        field_started = true;
        record_has_content = true;
        break;
    }
  }
  if (in_quotes) throw Error(ErrorKind::MalformedRow, "unterminated quoted field", current.line);
  end_record();
  return out;
}

inline bool needs_quoting(std::string_view s) {
  return s.find_first_of(",\"\r\n") != std::string_view::npos;
}

inline void append_field(std::string& out, std::string_view s) {
  if (!needs_quoting(s)) {
    out.append(s);
    return;
  }
  out.push_back('"');
  for (char c : s) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  out.push_back('"');
}

inline void append_row(std::string& out, const std::vector<std::string>& fields) {
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i) out.push_back(',');
    append_field(out, fields[i]);
  }
  out.push_back('\n');
}

/// Checks that the first record's fields equal `expected` exactly.
inline bool header_matches(const Record& header, const std::vector<std::string_view>& expected) {
  if (header.fields.size() != expected.size()) return false;
  for (std::size_t i = 0; i < expected.size(); ++i) {
    if (header.fields[i] != expected[i]) return false;
  }
  return true;
}

inline std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t");
  return std::string(s.substr(b, e - b + 1));
}

/// Strict decimal integer parse of the whole field.
inline bool parse_int(std::string_view s, std::int64_t& value) {
  const std::string t = trim(s);
  if (t.empty()) return false;
  const char* first = t.data();
  if (*first == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, t.data() + t.size(), value);
  return ec == std::errc{} && ptr == t.data() + t.size();
}

/// Strict finite floating-point parse of the whole field.
inline bool parse_double(std::string_view s, double& value) {
  const std::string t = trim(s);
  if (t.empty()) return false;
  const char* first = t.data();
  if (*first == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, t.data() + t.size(), value);
  return ec == std::errc{} && ptr == t.data() + t.size() && std::isfinite(value);
}

/// Shortest round-trip decimal representation.
inline std::string format_double(double v) {
  if (v == 0.0) v = 0.0;  // drop negative zero
  std::array<char, 64> buf{};
  auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return std::string(buf.data(), ptr);
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::IoFailure, "cannot open for reading").with_path(path);
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) throw Error(ErrorKind::IoFailure, "read failed").with_path(path);
  return ss.str();
}

inline void write_file(const std::string& path, std::string_view content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorKind::IoFailure, "cannot open for writing").with_path(path);
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  out.flush();
  if (!out) throw Error(ErrorKind::IoFailure, "write failed").with_path(path);
}

}  // namespace sentmic::csv
