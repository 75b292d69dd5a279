#include "hn/csv.hpp"

#include <algorithm>

#include "hn/error.hpp"

namespace hn {

CsvRows parse_csv(std::string_view text) {
    CsvRows rows;
    std::vector<std::string> row;
    std::string field;
    bool quoted = false, at_start = true, any = false;
    std::size_t i = 0;
    auto end_field = [&] {
        row.push_back(std::move(field));
        field.clear();
        at_start = true;
    };
    auto end_row = [&] {
        end_field();
        rows.push_back(std::move(row));
        row.clear();
    };
    while (i < text.size()) {
        char c = text[i];
        any = true;
        if (quoted) {
            if (c == '"') {
                if (i + 1 < text.size() && text[i + 1] == '"') {
                    field.push_back('"');
                    i += 2;
                    continue;
                }
                quoted = false;
            } else {
                field.push_back(c);
            }
            ++i;
            continue;
        }
        if (c == '"' && at_start) {
            quoted = true;
            at_start = false;
        } else if (c == ',') {
            end_field();
        } else if (c == '\r' && i + 1 < text.size() && text[i + 1] == '\n') {
            end_row();
            ++i;
            any = false;
        } else if (c == '\n') {
            end_row();
            any = false;
        } else {
            field.push_back(c);
            at_start = false;
        }
        ++i;
    }
    if (quoted) throw ValidationError("unterminated quoted field in CSV");
    if (any) end_row();
    return rows;
}

std::string write_csv(const CsvRows& rows) {
    std::string out;
    for (const auto& row : rows) {
        for (std::size_t i = 0; i < row.size(); ++i) {
            if (i) out.push_back(',');
            const std::string& f = row[i];
            if (f.find_first_of(",\"\r\n") == std::string::npos) {
                out += f;
                continue;
            }
            out.push_back('"');
            for (char c : f) {
                if (c == '"') out.push_back('"');
                out.push_back(c);
            }
            out.push_back('"');
        }
        out += "\r\n";
    }
    return out;
}

std::vector<CellWrite> csv_writes(const CsvRows& rows) {
    std::vector<CellWrite> writes;
    for (std::size_t r = 0; r < rows.size(); ++r)
        for (std::size_t c = 0; c < rows[r].size(); ++c) {
            if (rows[r][c].empty()) continue;
            CellAddr addr{static_cast<int>(c) + 1, static_cast<int>(r) + 1};
            writes.push_back(CellWrite{addr, rows[r][c], std::nullopt, std::nullopt});
        }
    return writes;
}

CsvRows page_rows(const Page& page) {
    int rows = 0, cols = 0;
    for (const auto& [addr, cell] : page.cells) {
        if (cell.cached.is_blank()) continue;
        rows = std::max(rows, addr.row);
        cols = std::max(cols, addr.col);
    }
    CsvRows out(static_cast<std::size_t>(rows), std::vector<std::string>(static_cast<std::size_t>(cols)));
    for (const auto& [addr, cell] : page.cells) {
        if (cell.cached.is_blank()) continue;
        const Value& v = cell.cached;
        out[addr.row - 1][addr.col - 1] = v.is_render() ? display(v) : literal_source(v);
    }
    return out;
}

}  // namespace hn
