#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "foppa/csv.hpp"
#include "foppa/types.hpp"

namespace foppa::normalize {

/// Removes parenthesized text (innermost first), maps "&" to " ET ", folds
/// diacritics, turns punctuation into spaces, collapses spaces and upper-cases.
/// The result only contains [A-Z0-9 ] and is a fixed point of the function.
std::string normalize_name(std::string_view raw);

struct AddressConfig {
    /// Tokens that mark postal (not geographic) information; the token and
    /// the digit groups following it are removed.
    std::vector<std::string> postalTokens = {"BP", "CS", "CEDEX", "TSA"};
};

struct Address {
    std::string street;
    std::string zipcode;
    std::string city;
    bool operator==(const Address&) const = default;
};

Address normalize_address(std::string_view street, std::string_view zipcode, std::string_view city,
                          const AddressConfig& config = {});

/// City name (folded like normalize_name) -> zipcodes.
class PostalTable {
public:
    PostalTable() = default;
    void add(std::string_view city, std::string_view zipcode);
    /// Reads delimiter-separated (city, zipcode) lines with a header; column
    /// names are configurable, zipcodes that are not 5 digits are ignored.
    static PostalTable load(const std::filesystem::path& path, const csv::Dialect& dialect = {},
                            const std::string& cityColumn = "city", const std::string& zipColumn = "zipcode");

    const std::set<std::string>* zipcodes(const std::string& foldedCity) const;
    std::size_t size() const { return table_.size(); }

private:
    std::map<std::string, std::set<std::string>> table_;
};

/// The city's zipcode when the table maps it to exactly one.
std::optional<std::string> fill_zipcode(const std::string& foldedCity, const PostalTable& table);

/// Two-digit department, three digits for overseas ("97x"/"98x"), Corsica
/// collapsed to "20". Nullopt unless the zipcode is exactly 5 digits.
std::optional<std::string> department_of(std::string_view zipcode);

struct NormalizeStats {
    std::size_t zipcodesFilled = 0;
    std::size_t invalidDeclaredSirets = 0;
    std::size_t siretKeys = 0;
};

/// Tags occurrences sharing a valid 14-digit declared SIRET with the same
/// agent key ("S:" + SIRET) and sets their identifier (source Declared).
/// A 9-digit declaration becomes a SirenOnly identifier without a key.
/// Invalid declarations are counted and ignored.
void merge_by_declared_siret(std::vector<AgentOccurrence>& occurrences, NormalizeStats* stats = nullptr);

/// Normalizes names and addresses, fills zipcodes from the postal table
/// (never overwriting a present one), derives departments, then applies
/// merge_by_declared_siret.
NormalizeStats normalize_occurrences(std::vector<AgentOccurrence>& occurrences, const PostalTable& postal,
                                     const AddressConfig& config = {});

}  // namespace foppa::normalize
