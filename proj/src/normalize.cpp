#include "foppa/normalize.hpp"

#include <algorithm>

#include "foppa/registry.hpp"
#include "foppa/text.hpp"

namespace foppa::normalize {

namespace {

// Drops "( ... )" spans, innermost first. Unmatched parentheses stay and are
// later turned into spaces by the punctuation rule.
std::string strip_parentheses(std::string_view raw) {
    std::string s(raw);
    for (;;) {
        const auto close = s.find(')');
        if (close == std::string::npos) break;
        const auto open = s.rfind('(', close);
        if (open == std::string::npos) {
            s[close] = ' ';
            continue;
        }
        s.replace(open, close - open + 1, " ");
    }
    return s;
}

std::string replace_ampersand(std::string_view s) {
    std::string out;
    out.reserve(s.size() + 8);
    for (char c : s) {
        if (c == '&')
            out += " ET ";
        else
            out += c;
    }
    return out;
}

std::vector<std::string> tokens(const std::string& folded) { return text::split(folded, ' '); }

// Removes postal tokens and the digit groups that follow them.
std::string strip_postal_tokens(const std::string& folded, const std::vector<std::string>& postalTokens) {
    if (folded.empty()) return folded;
    const auto toks = tokens(folded);
    std::vector<std::string> kept;
    for (std::size_t i = 0; i < toks.size(); ++i) {
        if (std::find(postalTokens.begin(), postalTokens.end(), toks[i]) != postalTokens.end()) {
            while (i + 1 < toks.size() && text::is_ascii_digits(toks[i + 1])) ++i;
            continue;
        }
        kept.push_back(toks[i]);
    }
    return text::join(kept, " ");
}

std::optional<std::string> five_digit_run(std::string_view s) {
    std::size_t i = 0;
    while (i < s.size()) {
        if (s[i] >= '0' && s[i] <= '9') {
            std::size_t j = i;
            while (j < s.size() && s[j] >= '0' && s[j] <= '9') ++j;
            if (j - i == 5) return std::string(s.substr(i, 5));
            i = j;
        } else {
            ++i;
        }
    }
    return std::nullopt;
}

}  // namespace

std::string normalize_name(std::string_view raw) {
    const auto noParens = strip_parentheses(raw);
    const auto withEt = replace_ampersand(noParens);
    return text::collapse_spaces(text::fold_upper_ascii(withEt));
}

Address normalize_address(std::string_view street, std::string_view zipcode, std::string_view city,
                          const AddressConfig& config) {
    Address out;
    out.street = strip_postal_tokens(normalize_name(street), config.postalTokens);

    const auto zipFolded = strip_postal_tokens(normalize_name(zipcode), config.postalTokens);
    // The raw zipcode field may hold a country prefix ("F-75008"), keep the digits.
    if (auto z = five_digit_run(zipFolded)) out.zipcode = *z;

    auto cityFolded = strip_postal_tokens(normalize_name(city), config.postalTokens);
    std::string noDigits;
    for (char c : cityFolded) noDigits += (c >= '0' && c <= '9') ? ' ' : c;
    out.city = text::collapse_spaces(noDigits);
    return out;
}

void PostalTable::add(std::string_view city, std::string_view zipcode) {
    const auto key = normalize_name(city);
    const auto zip = std::string(text::trim(zipcode));
    if (key.empty() || zip.size() != 5 || !text::is_ascii_digits(zip)) return;
    table_[key].insert(zip);
}

PostalTable PostalTable::load(const std::filesystem::path& path, const csv::Dialect& dialect,
                              const std::string& cityColumn, const std::string& zipColumn) {
    const auto t = csv::read_file(path, dialect);
    const auto ci = t.require_column(cityColumn);
    const auto zi = t.require_column(zipColumn);
    PostalTable table;
    for (const auto& row : t.rows) table.add(row[ci], row[zi]);
    return table;
}

const std::set<std::string>* PostalTable::zipcodes(const std::string& foldedCity) const {
    auto it = table_.find(foldedCity);
    return it == table_.end() ? nullptr : &it->second;
}

std::optional<std::string> fill_zipcode(const std::string& foldedCity, const PostalTable& table) {
    if (foldedCity.empty()) return std::nullopt;
    const auto* zips = table.zipcodes(foldedCity);
    if (!zips || zips->size() != 1) return std::nullopt;
    return *zips->begin();
}

std::optional<std::string> department_of(std::string_view zipcode) {
    if (zipcode.size() != 5 || !text::is_ascii_digits(zipcode)) return std::nullopt;
    if (zipcode.starts_with("97") || zipcode.starts_with("98")) return std::string(zipcode.substr(0, 3));
    return std::string(zipcode.substr(0, 2));
}

void merge_by_declared_siret(std::vector<AgentOccurrence>& occurrences, NormalizeStats* stats) {
    std::set<std::string> keys;
    for (auto& occ : occurrences) {
        if (occ.declaredSiret.empty()) continue;
        auto id = registry::validate_siret(occ.declaredSiret);
        if (!id) {
            if (stats) ++stats->invalidDeclaredSirets;
            continue;
        }
        occ.identifier = *id;
        occ.idSource = IdSource::Declared;
        if (id->kind() == IdKind::FullSiret) {
            occ.agentKey = "S:" + id->value();
            keys.insert(occ.agentKey);
        }
    }
    if (stats) stats->siretKeys = keys.size();
}

NormalizeStats normalize_occurrences(std::vector<AgentOccurrence>& occurrences, const PostalTable& postal,
                                     const AddressConfig& config) {
    NormalizeStats stats;
    for (auto& occ : occurrences) {
        occ.normalizedName = normalize_name(occ.rawName);
        const auto addr = normalize_address(occ.street, occ.zipcode, occ.city, config);
        occ.normStreet = addr.street;
        occ.normZipcode = addr.zipcode;
        occ.normCity = addr.city;
        occ.zipcodeFilled = false;
        if (occ.normZipcode.empty() && !occ.normCity.empty()) {
            if (auto z = fill_zipcode(occ.normCity, postal)) {
                occ.normZipcode = *z;
                occ.zipcodeFilled = true;
                ++stats.zipcodesFilled;
            }
        }
        occ.department = department_of(occ.normZipcode).value_or("");
        occ.agentKey.clear();
        occ.identifier.reset();
        occ.idSource = IdSource::None;
    }
    merge_by_declared_siret(occurrences, &stats);
    return stats;
}

}  // namespace foppa::normalize
