#ifndef SKYREVIEW_CSV_HPP
#define SKYREVIEW_CSV_HPP

#include <cstddef>
#include <string>
#include <vector>

namespace skyreview::csv {

struct Row {
    std::vector<std::string> fields;
    std::size_t line_no = 0;  // physical line where the row starts, 1-based
};

/// RFC-4180 style parser: quoted fields may contain commas, quotes ("")
/// and embedded newlines. Handles \n and \r\n endings and a UTF-8 BOM.
std::vector<Row> parse(const std::string& text);

}  // namespace skyreview::csv

#endif
