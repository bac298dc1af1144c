#include "foppa/similarity.hpp"

#include <algorithm>
#include <string>
#include <vector>

namespace foppa::similarity {

namespace {

std::vector<std::string_view> sorted_tokens(std::string_view s) {
    std::vector<std::string_view> out;
    std::size_t i = 0;
    while (i < s.size()) {
        while (i < s.size() && s[i] == ' ') ++i;
        std::size_t j = i;
        while (j < s.size() && s[j] != ' ') ++j;
        if (j > i) out.push_back(s.substr(i, j - i));
        i = j;
    }
    std::sort(out.begin(), out.end());
    return out;
}

}  // namespace

std::size_t levenshtein(std::string_view a, std::string_view b) {
    if (a.size() < b.size()) std::swap(a, b);
    // Common prefix and suffix do not change the distance.
    while (!b.empty() && a.front() == b.front()) {
        a.remove_prefix(1);
        b.remove_prefix(1);
    }
    while (!b.empty() && a.back() == b.back()) {
        a.remove_suffix(1);
        b.remove_suffix(1);
    }
    if (b.empty()) return a.size();

    thread_local std::vector<std::size_t> row;
    row.resize(b.size() + 1);
    for (std::size_t j = 0; j <= b.size(); ++j) row[j] = j;
    for (std::size_t i = 1; i <= a.size(); ++i) {
        std::size_t diag = row[0];
        row[0] = i;
        for (std::size_t j = 1; j <= b.size(); ++j) {
            const std::size_t up = row[j];
            const std::size_t cost = a[i - 1] == b[j - 1] ? 0 : 1;
            row[j] = std::min({row[j] + 1, row[j - 1] + 1, diag + cost});
            diag = up;
        }
    }
    return row[b.size()];
}

double token_overlap(std::string_view a, std::string_view b) {
    const auto ta = sorted_tokens(a);
    const auto tb = sorted_tokens(b);
    if (ta.empty() || tb.empty()) return 0.0;
    std::size_t common = 0;
    std::size_t i = 0;
    std::size_t j = 0;
    while (i < ta.size() && j < tb.size()) {
        if (ta[i] == tb[j]) {
            ++common;
            ++i;
            ++j;
        } else if (ta[i] < tb[j]) {
            ++i;
        } else {
            ++j;
        }
    }
    return static_cast<double>(common) / static_cast<double>(std::min(ta.size(), tb.size()));
}

double name_similarity(std::string_view a, std::string_view b) {
    if (a.empty() || b.empty()) return 0.0;
    if (a == b) return 1.0;
    const double overlap = token_overlap(a, b);
    const double longest = static_cast<double>(std::max(a.size(), b.size()));
    const double lengthGap = static_cast<double>(a.size() > b.size() ? a.size() - b.size() : b.size() - a.size());
    // The edit route cannot beat 1 - lengthGap/longest; skip it when the
    // overlap already reaches that bound.
    if (overlap >= 1.0 - lengthGap / longest) return overlap;
    const double edit = 1.0 - static_cast<double>(levenshtein(a, b)) / longest;
    return std::max(overlap, edit);
}

}  // namespace foppa::similarity
