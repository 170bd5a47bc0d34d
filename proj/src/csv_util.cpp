#include "csv_util.hpp"

#include "tracecf/errors.hpp"

namespace tracecf::detail {

std::vector<std::vector<std::string>> parse_csv_text(std::string_view text) {
    std::vector<std::vector<std::string>> rows;
    std::vector<std::string> row;
    std::string field;
    bool in_quotes = false;
    bool field_started = false;
    bool row_started = false;

    auto end_field = [&] {
        row.push_back(std::move(field));
        field.clear();
        field_started = false;
    };
    auto end_row = [&] {
        end_field();
        rows.push_back(std::move(row));
        row.clear();
        row_started = false;
    };

    for (std::size_t i = 0; i < text.size(); ++i) {
        char c = text[i];
        if (in_quotes) {
            if (c == '"') {
                if (i + 1 < text.size() && text[i + 1] == '"') {
                    field += '"';
                    ++i;
                } else {
                    in_quotes = false;
                }
            } else {
                field += c;
            }
            continue;
        }
        if (!row_started && !field_started && c == '#') {
            // comment line
            while (i < text.size() && text[i] != '\n') ++i;
            continue;
        }
        switch (c) {
            case '"':
                if (field_started && !field.empty())
                    throw ParseError("CSV: quote inside unquoted field");
                in_quotes = true;
                field_started = true;
                row_started = true;
                break;
            case ',':
                end_field();
                row_started = true;
                break;
            case '\r':
                break;
            case '\n':
                if (row_started || field_started) end_row();
                break;
            default:
                field += c;
                field_started = true;
                row_started = true;
                break;
        }
    }
    if (in_quotes) throw ParseError("CSV: unterminated quoted field");
    if (row_started || field_started) end_row();
    return rows;
}

std::string csv_quote(std::string_view field) {
    bool needs_quotes = field.find_first_of(",\"\n\r") != std::string_view::npos;
    if (!needs_quotes && !field.empty() && field.front() == '#') needs_quotes = true;
    if (!needs_quotes) return std::string(field);
    std::string out = "\"";
    for (char c : field) {
        if (c == '"') out += '"';
        out += c;
    }
    out += '"';
    return out;
}

std::string csv_join(const std::vector<std::string>& fields) {
    std::string out;
    for (std::size_t i = 0; i < fields.size(); ++i) {
        if (i) out += ',';
        out += csv_quote(fields[i]);
    }
    return out;
}

}  // namespace tracecf::detail
