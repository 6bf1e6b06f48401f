#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace idrr {

// Header plus rows of a delimited text file. Quoted fields ("...", with "" as an escaped
// quote) may contain the delimiter and newlines.
struct DelimitedTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
    // 1-based source line where each row starts, for error messages.
    std::vector<std::size_t> row_lines;

    // Position of a header column, or npos.
    std::size_t column(std::string_view name) const;
};

DelimitedTable parse_delimited(std::string_view text, char delimiter);
DelimitedTable read_delimited_file(const std::string& path, char delimiter);

std::string read_text_file(const std::string& path);

}  // namespace idrr
