#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "json.hpp"

namespace isostab {

using Json = nlohmann::ordered_json;

/// %.17g; non-finite values as "inf", "-inf", "nan".
std::string format_number(double x);
/// Deterministic JSON text: every float printed with 17 significant digits, non-finite floats as strings.
std::string dump_json(const Json& j, int indent = 2);
/// Non-finite doubles become strings so the document stays valid JSON.
Json json_number(double x);

/// RFC-4180 field: quoted when it contains a comma, quote, CR or LF.
std::string csv_field(const std::string& s);

class CsvTable {
 public:
  explicit CsvTable(std::vector<std::string> header) : header_(std::move(header)) {}
  void add_row(std::vector<std::string> cells);
  static std::string cell(double x) { return format_number(x); }
  std::size_t rows() const { return rows_.size(); }
  /// Header plus rows, CRLF line endings.
  std::string text() const;

 private:
  std::vector<std::string> header_;
  std::vector<std::vector<std::string>> rows_;
};

/// FNV-1a 64-bit as 16 hex digits.
std::string fnv1a_hex(const std::string& text);

}  // namespace isostab
