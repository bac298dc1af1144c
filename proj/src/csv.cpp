#include "foppa/csv.hpp"

#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "foppa/types.hpp"

namespace foppa::csv {

namespace {

enum class ParseStatus { Complete, NeedsMore, Malformed };

struct LineParse {
    ParseStatus status = ParseStatus::Complete;
    std::string reason;
};

// Parses one logical record from `text` (which may already hold several
// physical lines joined by '\n').
LineParse parse_record(std::string_view text, char delim, std::vector<std::string>& fields) {
    fields.clear();
    std::string cur;
    std::size_t i = 0;
    bool fieldStart = true;
    bool quoted = false;
    bool afterQuote = false;
    while (i < text.size()) {
        const char c = text[i];
        if (quoted) {
            if (c == '"') {
                if (i + 1 < text.size() && text[i + 1] == '"') {
                    cur += '"';
                    i += 2;
                    continue;
                }
                quoted = false;
                afterQuote = true;
                ++i;
                continue;
            }
            cur += c;
            ++i;
            continue;
        }
        if (c == delim) {
            fields.push_back(std::move(cur));
            cur.clear();
            fieldStart = true;
            afterQuote = false;
            ++i;
            continue;
        }
        if (afterQuote) return {ParseStatus::Malformed, "text after closing quote"};
        if (c == '"') {
            if (!fieldStart) return {ParseStatus::Malformed, "unescaped quote inside field"};
            quoted = true;
            fieldStart = false;
            ++i;
            continue;
        }
        fieldStart = false;
        cur += c;
        ++i;
    }
    if (quoted) return {ParseStatus::NeedsMore, "unbalanced quote"};
    fields.push_back(std::move(cur));
    return {};
}

// One record starting at the next line. Lines are kept raw so a CR inside a
// quoted field survives; a trailing CR only ends the record.
bool get_record(std::istream& in, const Dialect& dialect, std::size_t& lineNo, std::string& record,
                std::vector<std::string>& fields, LineParse& st) {
    std::string line;
    if (!std::getline(in, line)) return false;
    ++lineNo;
    if (lineNo == 1 && line.rfind("\xEF\xBB\xBF", 0) == 0) line.erase(0, 3);
    record = line;
    auto parse = [&] {
        std::string body = record;
        if (!body.empty() && body.back() == '\r') body.pop_back();
        st = parse_record(body, dialect.delimiter, fields);
        return body.empty();
    };
    const bool empty = parse();
    if (empty) {
        record.clear();
        return true;
    }
    while (st.status == ParseStatus::NeedsMore && dialect.multiline && std::getline(in, line)) {
        ++lineNo;
        record += '\n';
        record += line;
        parse();
    }
    return true;
}

}  // namespace

std::optional<std::size_t> Table::column(std::string_view name) const {
    for (std::size_t i = 0; i < header.size(); ++i)
        if (header[i] == name) return i;
    return std::nullopt;
}

std::size_t Table::require_column(std::string_view name) const {
    if (auto c = column(name)) return *c;
    throw InputError("missing column '" + std::string(name) + "'");
}

Table read(std::istream& in, const Dialect& dialect) {
    Table table;
    std::size_t lineNo = 0;
    std::vector<std::string> fields;

    bool haveHeader = false;
    LineParse st;
    std::string record;
    while (!haveHeader && get_record(in, dialect, lineNo, record, fields, st)) {
        if (record.empty()) continue;
        if (st.status != ParseStatus::Complete) throw InputError("malformed header: " + st.reason);
        table.header = fields;
        haveHeader = true;
    }
    if (!haveHeader) return table;

    while (true) {
        const std::size_t startLine = lineNo + 1;
        if (!get_record(in, dialect, lineNo, record, fields, st)) break;
        if (record.empty()) continue;
        if (st.status != ParseStatus::Complete) {
            table.skipped.push_back({startLine, st.reason});
            continue;
        }
        if (fields.size() != table.header.size()) {
            table.skipped.push_back({startLine, "expected " + std::to_string(table.header.size()) +
                                                    " fields, found " + std::to_string(fields.size())});
            continue;
        }
        table.rows.push_back(fields);
        table.rowLines.push_back(startLine);
    }
    return table;
}

Table read_file(const std::filesystem::path& path, const Dialect& dialect) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputError("cannot open " + path.string());
    return read(in, dialect);
}

std::string quote_field(std::string_view field, char delimiter) {
    if (field.find_first_of(std::string{delimiter, '"', '\n', '\r'}) == std::string_view::npos)
        return std::string(field);
    std::string out = "\"";
    for (char c : field) {
        if (c == '"') out += '"';
        out += c;
    }
    out += '"';
    return out;
}

void Writer::row(const std::vector<std::string>& fields) {
    for (std::size_t i = 0; i < fields.size(); ++i) {
        if (i) out_ << delimiter_;
        out_ << quote_field(fields[i], delimiter_);
    }
    out_ << '\n';
}

void write_file(const std::filesystem::path& path, const std::vector<std::string>& header,
                const std::vector<std::vector<std::string>>& rows, char delimiter) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw InputError("cannot write " + path.string());
    Writer w(out, delimiter);
    w.row(header);
    for (const auto& r : rows) w.row(r);
    out.flush();
    if (!out) throw InputError("write failed for " + path.string());
}

}  // namespace foppa::csv
