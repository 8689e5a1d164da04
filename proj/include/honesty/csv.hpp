#pragma once

#include <cstddef>
#include <istream>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

namespace honesty::csv {

using Row = std::vector<std::string>;

/// A CSV table held in memory. The first row of the source is the header.
struct Table {
    Row header;
    std::vector<Row> rows;

    /// Index of a named column, or nullopt.
    std::optional<std::size_t> find(std::string_view name) const;
    /// Index of a named column; throws DataError when absent.
    std::size_t column(std::string_view name) const;
};

/// RFC 4180 reader: quoted fields, doubled quotes, embedded newlines, CRLF.
Table read(std::istream& in);
Table read_file(const std::string& path);

/// Quotes a field only when it contains a comma, quote, CR or LF.
std::string escape(std::string_view field);
void write_row(std::ostream& out, const Row& row);

/// Shortest decimal text that parses back to exactly the same double.
std::string format_double(double value);
double parse_double(std::string_view text);
long long parse_int(std::string_view text);

}  // namespace honesty::csv
