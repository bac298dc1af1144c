#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace foppa::text {

std::string_view trim(std::string_view s);
bool is_ascii_digits(std::string_view s);
std::vector<std::string> split(std::string_view s, char delimiter);
std::string join(const std::vector<std::string>& parts, std::string_view glue);

/// Decodes UTF-8 and maps each code point to upper-case ASCII: Latin-1 and
/// Latin Extended-A letters lose their diacritics (ligatures expand, e.g.
/// "œ" -> "OE"); anything that is not a letter or digit becomes a space.
/// Invalid UTF-8 bytes are treated as punctuation.
std::string fold_upper_ascii(std::string_view utf8);

/// Collapses whitespace runs to one space and trims both ends.
std::string collapse_spaces(std::string_view s);

/// Parses a decimal written with either "." or "," as decimal mark, spaces
/// and non-breaking spaces as grouping. Returns the value scaled by
/// 10^scale, rounded half away from zero. Negative values and garbage yield
/// nullopt.
std::optional<std::int64_t> parse_scaled_decimal(std::string_view raw, int scale);

/// Renders value / 10^scale with exactly `decimals` fraction digits
/// (decimals <= scale; extra digits are rounded half-up).
std::string format_scaled(std::int64_t value, int scale, int decimals);

/// Round-trippable rendering of a double for checkpoints.
std::string format_double(double v);
std::optional<double> parse_double(std::string_view s);
std::optional<std::int64_t> parse_int(std::string_view s);

}  // namespace foppa::text
