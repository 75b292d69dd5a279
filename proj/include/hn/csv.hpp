#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "hn/recalc.hpp"

namespace hn {

using CsvRows = std::vector<std::vector<std::string>>;

/// RFC 4180 reader. Accepts LF or CRLF line ends. Throws ValidationError on
/// an unterminated quoted field.
CsvRows parse_csv(std::string_view text);
/// Quotes fields holding a comma, quote, CR or LF. Lines end in CRLF.
std::string write_csv(const CsvRows& rows);

/// One write per non-empty field, row by row. "=..." is a formula and a
/// leading "'" keeps the rest as text.
std::vector<CellWrite> csv_writes(const CsvRows& rows);
/// Cached values of a page over its used rectangle from A1, as entry text.
CsvRows page_rows(const Page& page);

}  // namespace hn
