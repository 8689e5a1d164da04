#include "honesty/csv.hpp"

#include "honesty/error.hpp"

#include <charconv>
#include <cmath>
#include <fstream>

namespace honesty::csv {

std::optional<std::size_t> Table::find(std::string_view name) const {
    for (std::size_t i = 0; i < header.size(); ++i) {
        if (header[i] == name) return i;
    }
    return std::nullopt;
}

std::size_t Table::column(std::string_view name) const {
    if (auto idx = find(name)) return *idx;
    throw DataError("CSV is missing required column '" + std::string(name) + "'");
}

Table read(std::istream& in) {
    Table table;
    Row row;
    std::string field;
    bool in_quotes = false;
    bool field_started = false;
    bool have_header = false;

    auto end_row = [&] {
        row.push_back(std::move(field));
        field.clear();
        field_started = false;
        // Skip blank lines.
        if (!(row.size() == 1 && row[0].empty())) {
            if (!have_header) {
                table.header = std::move(row);
                have_header = true;
            } else {
                table.rows.push_back(std::move(row));
            }
        }
        row.clear();
    };

    char ch;
    while (in.get(ch)) {
        if (in_quotes) {
            if (ch == '"') {
                if (in.peek() == '"') {
                    in.get(ch);
                    field.push_back('"');
                } else {
                    in_quotes = false;
                }
            } else {
                field.push_back(ch);
            }
            continue;
        }
        switch (ch) {
            case '"':
                in_quotes = true;
                field_started = true;
                break;
            case ',':
                row.push_back(std::move(field));
                field.clear();
                field_started = false;
                break;
            case '\r':
                if (in.peek() == '\n') in.get(ch);
                end_row();
                break;
            case '\n':
                end_row();
                break;
            default:
                field.push_back(ch);
                field_started = true;
        }
    }
    if (in_quotes) throw DataError("CSV ends inside a quoted field");
    if (field_started || !field.empty() || !row.empty()) end_row();

    for (std::size_t i = 0; i < table.rows.size(); ++i) {
        if (table.rows[i].size() != table.header.size()) {
            throw DataError("CSV row " + std::to_string(i + 2) + " has " +
                            std::to_string(table.rows[i].size()) + " fields, header has " +
                            std::to_string(table.header.size()));
        }
    }
    return table;
}

Table read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open " + path);
    return read(in);
}

std::string escape(std::string_view field) {
    if (field.find_first_of(",\"\r\n") == std::string_view::npos) return std::string(field);
    std::string out = "\"";
    for (char c : field) {
        if (c == '"') out.push_back('"');
        out.push_back(c);
    }
    out.push_back('"');
    return out;
}

void write_row(std::ostream& out, const Row& row) {
    for (std::size_t i = 0; i < row.size(); ++i) {
        if (i) out << ',';
        out << escape(row[i]);
    }
    out << '\n';
}

std::string format_double(double value) {
    if (std::isnan(value)) return "nan";
    if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value);
    if (ec != std::errc{}) throw Error("cannot format double");
    return std::string(buf, ptr);
}

double parse_double(std::string_view text) {
    if (text == "nan") return std::nan("");
    if (text == "inf") return INFINITY;
    if (text == "-inf") return -INFINITY;
    double value = 0.0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc{} || ptr != text.data() + text.size()) {
        throw DataError("not a number: '" + std::string(text) + "'");
    }
    return value;
}

long long parse_int(std::string_view text) {
    long long value = 0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc{} || ptr != text.data() + text.size()) {
        throw DataError("not an integer: '" + std::string(text) + "'");
    }
    return value;
}

}  // namespace honesty::csv
