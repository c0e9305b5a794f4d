#include "skyreview/csv.hpp"

namespace skyreview::csv {

std::vector<Row> parse(const std::string& text) {
    std::vector<Row> rows;
    std::size_t i = 0;
    std::size_t line = 1;
    const std::size_t n = text.size();

    if (n >= 3 && text.compare(0, 3, "\xEF\xBB\xBF") == 0) i = 3;

    while (i < n) {
        Row row;
        row.line_no = line;
        std::string field;
        bool in_quotes = false;
        bool row_done = false;
        while (i < n && !row_done) {
            char c = text[i];
            if (in_quotes) {
                if (c == '"') {
                    if (i + 1 < n && text[i + 1] == '"') {
                        field.push_back('"');
                        i += 2;
                    } else {
                        in_quotes = false;
                        ++i;
                    }
                } else {
                    if (c == '\n') ++line;
                    field.push_back(c);
                    ++i;
                }
            } else {
                switch (c) {
                    case '"':
                        in_quotes = true;
                        ++i;
                        break;
                    case ',':
                        row.fields.push_back(std::move(field));
                        field.clear();
                        ++i;
                        break;
                    case '\r':
                        ++i;
                        if (i < n && text[i] == '\n') ++i;
                        ++line;
                        row_done = true;
                        break;
                    case '\n':
                        ++i;
                        ++line;
                        row_done = true;
                        break;
                    default:
                        field.push_back(c);
                        ++i;
                }
            }
        }
        row.fields.push_back(std::move(field));
        // skip a trailing empty line
        if (!(row.fields.size() == 1 && row.fields[0].empty() && i >= n)) {
            rows.push_back(std::move(row));
        }
    }
    return rows;
}

}  // namespace skyreview::csv
