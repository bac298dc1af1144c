#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace foppa::csv {

struct Dialect {
    char delimiter = ',';
    /// When false every physical line is one record and an unterminated
    /// quote makes the line malformed. When true a quoted field may span
    /// lines (used for files this project writes itself).
    bool multiline = false;
};

struct MalformedLine {
    std::size_t line = 0;
    std::string reason;
};

/// Header plus data rows; rows keep the physical line they started on.
struct Table {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
    std::vector<std::size_t> rowLines;
    std::vector<MalformedLine> skipped;

    std::optional<std::size_t> column(std::string_view name) const;
    /// Throws foppa::InputError when the column is missing.
    std::size_t require_column(std::string_view name) const;
};

/// Reads delimiter-separated text with a header row. Malformed lines
/// (unbalanced quotes, stray quotes, wrong field count) are counted in
/// `skipped` and never returned as rows. An empty stream yields an empty
/// header. A UTF-8 byte-order mark is ignored.
Table read(std::istream& in, const Dialect& dialect = {});
Table read_file(const std::filesystem::path& path, const Dialect& dialect = {});

/// RFC 4180 style writer: fields containing the delimiter, a quote, CR or LF
/// are quoted with doubled quotes; lines end with "\n".
class Writer {
public:
    explicit Writer(std::ostream& out, char delimiter = ',') : out_(out), delimiter_(delimiter) {}
    void row(const std::vector<std::string>& fields);

private:
    std::ostream& out_;
    char delimiter_;
};

std::string quote_field(std::string_view field, char delimiter = ',');

/// Writes header + rows to `path`; throws foppa::InputError on I/O failure.
void write_file(const std::filesystem::path& path, const std::vector<std::string>& header,
                const std::vector<std::vector<std::string>>& rows, char delimiter = ',');

}  // namespace foppa::csv
