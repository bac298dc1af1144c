#include "foppa/text.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <cstdio>

namespace foppa::text {

namespace {

// U+00C0..U+00FF. "" means punctuation (becomes a space).
constexpr std::array<const char*, 64> kLatin1Upper = {
    "A",  "A", "A", "A", "A", "A", "AE", "C", "E", "E", "E", "E", "I", "I", "I", "I",
    "D",  "N", "O", "O", "O", "O", "O",  "",  "O", "U", "U", "U", "U", "Y", "TH", "SS",
    "A",  "A", "A", "A", "A", "A", "AE", "C", "E", "E", "E", "E", "I", "I", "I", "I",
    "D",  "N", "O", "O", "O", "O", "O",  "",  "O", "U", "U", "U", "U", "Y", "TH", "Y",
};

// U+0100..U+017F, upper/lower pairs share a base letter.
constexpr std::array<const char*, 128> kLatinExtA = {
    "A",  "A",  "A",  "A",  "A",  "A",  "C",  "C",  "C",  "C",  "C",  "C",  "C",  "C",  "D",  "D",
    "D",  "D",  "E",  "E",  "E",  "E",  "E",  "E",  "E",  "E",  "E",  "E",  "G",  "G",  "G",  "G",
    "G",  "G",  "G",  "G",  "H",  "H",  "H",  "H",  "I",  "I",  "I",  "I",  "I",  "I",  "I",  "I",
    "I",  "I",  "IJ", "IJ", "J",  "J",  "K",  "K",  "K",  "L",  "L",  "L",  "L",  "L",  "L",  "L",
    "L",  "L",  "L",  "N",  "N",  "N",  "N",  "N",  "N",  "N",  "N",  "N",  "O",  "O",  "O",  "O",
    "O",  "O",  "OE", "OE", "R",  "R",  "R",  "R",  "R",  "R",  "S",  "S",  "S",  "S",  "S",  "S",
    "S",  "S",  "T",  "T",  "T",  "T",  "T",  "T",  "U",  "U",  "U",  "U",  "U",  "U",  "U",  "U",
    "U",  "U",  "U",  "U",  "W",  "W",  "Y",  "Y",  "Y",  "Z",  "Z",  "Z",  "Z",  "Z",  "Z",  "S",
};

// Returns the code point and advances `i`; invalid sequences yield 0xFFFD.
char32_t next_code_point(std::string_view s, std::size_t& i) {
    const auto b0 = static_cast<unsigned char>(s[i]);
    auto cont = [&](std::size_t k) -> int {
        if (i + k >= s.size()) return -1;
        const auto b = static_cast<unsigned char>(s[i + k]);
        return (b & 0xC0) == 0x80 ? (b & 0x3F) : -1;
    };
    if (b0 < 0x80) {
        ++i;
        return b0;
    }
    if ((b0 & 0xE0) == 0xC0) {
        const int c1 = cont(1);
        if (c1 >= 0 && b0 >= 0xC2) {
            i += 2;
            return static_cast<char32_t>(((b0 & 0x1F) << 6) | c1);
        }
    } else if ((b0 & 0xF0) == 0xE0) {
        const int c1 = cont(1);
        const int c2 = cont(2);
        if (c1 >= 0 && c2 >= 0) {
            i += 3;
            return static_cast<char32_t>(((b0 & 0x0F) << 12) | (c1 << 6) | c2);
        }
    } else if ((b0 & 0xF8) == 0xF0) {
        const int c1 = cont(1);
        const int c2 = cont(2);
        const int c3 = cont(3);
        if (c1 >= 0 && c2 >= 0 && c3 >= 0) {
            i += 4;
            return static_cast<char32_t>(((b0 & 0x07) << 18) | (c1 << 12) | (c2 << 6) | c3);
        }
    }
    ++i;
    return 0xFFFD;
}

bool is_space_byte(char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v'; }

}  // namespace

std::string_view trim(std::string_view s) {
    std::size_t b = 0;
    std::size_t e = s.size();
    while (b < e && is_space_byte(s[b])) ++b;
    while (e > b && is_space_byte(s[e - 1])) --e;
    return s.substr(b, e - b);
}

bool is_ascii_digits(std::string_view s) {
    if (s.empty()) return false;
    for (char c : s)
        if (c < '0' || c > '9') return false;
    return true;
}

std::vector<std::string> split(std::string_view s, char delimiter) {
    std::vector<std::string> out;
    std::size_t start = 0;
    for (std::size_t i = 0; i <= s.size(); ++i) {
        if (i == s.size() || s[i] == delimiter) {
            out.emplace_back(s.substr(start, i - start));
            start = i + 1;
        }
    }
    return out;
}

std::string join(const std::vector<std::string>& parts, std::string_view glue) {
    std::string out;
    for (std::size_t i = 0; i < parts.size(); ++i) {
        if (i) out += glue;
        out += parts[i];
    }
    return out;
}

std::string fold_upper_ascii(std::string_view utf8) {
    std::string out;
    out.reserve(utf8.size());
    std::size_t i = 0;
    while (i < utf8.size()) {
        const char32_t cp = next_code_point(utf8, i);
        if (cp < 0x80) {
            const char c = static_cast<char>(cp);
            if (c >= 'a' && c <= 'z')
                out += static_cast<char>(c - 'a' + 'A');
            else if ((c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9'))
                out += c;
            else
                out += ' ';
        } else if (cp >= 0xC0 && cp <= 0xFF) {
            const char* m = kLatin1Upper[cp - 0xC0];
            out += *m ? m : " ";
        } else if (cp >= 0x100 && cp <= 0x17F) {
            out += kLatinExtA[cp - 0x100];
        } else {
            out += ' ';
        }
    }
    return out;
}

std::string collapse_spaces(std::string_view s) {
    std::string out;
    out.reserve(s.size());
    bool pending = false;
    for (char c : s) {
        if (is_space_byte(c)) {
            pending = !out.empty();
            continue;
        }
        if (pending) out += ' ';
        pending = false;
        out += c;
    }
    return out;
}

std::optional<std::int64_t> parse_scaled_decimal(std::string_view raw, int scale) {
    // Drop grouping: ASCII whitespace, NBSP (C2 A0), narrow NBSP (E2 80 AF).
    std::string s;
    for (std::size_t i = 0; i < raw.size(); ++i) {
        const auto c = static_cast<unsigned char>(raw[i]);
        if (is_space_byte(static_cast<char>(c))) continue;
        if (c == 0xC2 && i + 1 < raw.size() && static_cast<unsigned char>(raw[i + 1]) == 0xA0) {
            ++i;
            continue;
        }
        if (c == 0xE2 && i + 2 < raw.size() && static_cast<unsigned char>(raw[i + 1]) == 0x80 &&
            static_cast<unsigned char>(raw[i + 2]) == 0xAF) {
            i += 2;
            continue;
        }
        s += static_cast<char>(c);
    }
    if (s.empty()) return std::nullopt;
    if (s.front() == '+') s.erase(0, 1);

    int dots = 0;
    int commas = 0;
    for (char c : s) {
        if (c == '.') ++dots;
        else if (c == ',') ++commas;
        else if (c < '0' || c > '9') return std::nullopt;
    }
    // The decimal mark is the last mark when both kinds appear, or a lone
    // mark of one kind; repeated marks of a single kind are grouping.
    std::size_t mark = std::string::npos;
    if (dots && commas) {
        mark = s.find_last_of(".,");
        const char other = s[mark] == '.' ? ',' : '.';
        if (s.find(s[mark]) != mark) return std::nullopt;  // decimal mark appears twice
        if (s.find(other, mark) != std::string::npos) return std::nullopt;
    } else if (dots == 1) {
        mark = s.find('.');
    } else if (commas == 1) {
        mark = s.find(',');
    }
    std::string intPart;
    std::string fracPart;
    for (std::size_t i = 0; i < s.size(); ++i) {
        const char c = s[i];
        if (c == '.' || c == ',') continue;
        (mark != std::string::npos && i > mark ? fracPart : intPart) += c;
    }
    if (intPart.empty() && fracPart.empty()) return std::nullopt;
    if (intPart.size() > 15) return std::nullopt;

    __int128 value = 0;
    for (char c : intPart) value = value * 10 + (c - '0');
    for (int k = 0; k < scale; ++k) {
        value *= 10;
        if (static_cast<std::size_t>(k) < fracPart.size()) value += fracPart[k] - '0';
    }
    if (fracPart.size() > static_cast<std::size_t>(scale) && fracPart[scale] >= '5') value += 1;
    if (value > INT64_MAX) return std::nullopt;
    return static_cast<std::int64_t>(value);
}

std::string format_scaled(std::int64_t value, int scale, int decimals) {
    const bool negative = value < 0;
    __int128 v = negative ? -static_cast<__int128>(value) : value;
    __int128 div = 1;
    for (int k = decimals; k < scale; ++k) div *= 10;
    if (div > 1) v = (v + div / 2) / div;
    __int128 unit = 1;
    for (int k = 0; k < decimals; ++k) unit *= 10;
    const auto whole = static_cast<unsigned long long>(v / unit);
    const auto frac = static_cast<unsigned long long>(v % unit);
    std::string out = negative ? "-" : "";
    out += std::to_string(whole);
    if (decimals > 0) {
        std::string f = std::to_string(frac);
        out += '.';
        out += std::string(static_cast<std::size_t>(decimals) - f.size(), '0') + f;
    }
    return out;
}

std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::optional<double> parse_double(std::string_view s) {
    s = trim(s);
    if (s.empty()) return std::nullopt;
    std::string tmp(s);
    char* end = nullptr;
    const double v = std::strtod(tmp.c_str(), &end);
    if (end != tmp.c_str() + tmp.size()) return std::nullopt;
    return v;
}

std::optional<std::int64_t> parse_int(std::string_view s) {
    s = trim(s);
    std::int64_t v = 0;
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || p != s.data() + s.size() || s.empty()) return std::nullopt;
    return v;
}

}  // namespace foppa::text
