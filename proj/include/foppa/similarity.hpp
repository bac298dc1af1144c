#pragma once

#include <cstddef>
#include <string_view>

namespace foppa::similarity {

/// Unit-cost edit distance over bytes (inputs are folded ASCII).
std::size_t levenshtein(std::string_view a, std::string_view b);

/// |A ∩ B| / min(|A|, |B|) over space-separated token multisets; 0 when
/// either side has no token.
double token_overlap(std::string_view a, std::string_view b);

/// max(token_overlap, 1 - levenshtein / max length). Symmetric, in [0, 1],
/// 0 when either string is empty, 1 when the strings are equal or one token
/// multiset contains the other.
double name_similarity(std::string_view a, std::string_view b);

}  // namespace foppa::similarity
