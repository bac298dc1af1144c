#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "foppa/types.hpp"

namespace foppa::criteria {

/// Folded keyword stems per class. A keyword matches when it starts a token
/// sequence of the folded criterion name.
class Lexicon {
public:
    /// French procurement vocabulary shipped with the tool.
    static Lexicon french_default();
    /// CSV with columns keyword,class.
    static Lexicon load(const std::filesystem::path& path);

    void add(std::string_view keyword, CriterionClass cls);
    const std::vector<std::pair<std::string, CriterionClass>>& entries() const { return entries_; }

private:
    std::vector<std::pair<std::string, CriterionClass>> entries_;
};

struct RawCriterion {
    std::string name;
    std::optional<Weight> weight;
    bool operator==(const RawCriterion&) const = default;
};

/// Numeric tokens of a weight field in order; everything that is neither a
/// number nor a configured separator is discarded.
std::vector<Weight> clean_weight_field(std::string_view raw, const std::vector<std::string>& separators);

struct SplitResult {
    std::vector<RawCriterion> criteria;
    bool countMismatch = false;
};

SplitResult split_criteria(std::string_view namesField, std::string_view weightsField,
                           const std::vector<std::string>& separators);

/// Separates names and weights written together ("Prix: 60; Qualite: 40",
/// "Valeur technique (60 points), prix (40 points)").
std::vector<RawCriterion> unmix_names_weights(std::string_view field,
                                              const std::vector<std::string>& separators = {});

struct NormalizedWeights {
    std::vector<Weight> weights;
    bool normalized = false;
};

/// Scales positive weights to sum to 100: each becomes 100*w/sum rounded half
/// up to 2 decimals, and the rounding residual goes to the largest (first on
/// ties). Empty input, a zero sum or a negative weight leaves the originals
/// with normalized=false.
NormalizedWeights normalize_weights(const std::vector<Weight>& weights);

/// Class of a criterion name; priority PRICE > DEADLINE > ENVIRONMENTAL >
/// SOCIAL > TECHNICAL, OTHERS when nothing matches.
CriterionClass classify_criterion(std::string_view rawName, const Lexicon& lexicon);

struct ClassifiedCriterion {
    std::string name;
    CriterionClass cls = CriterionClass::Others;
    std::optional<Weight> weight;
    bool operator==(const ClassifiedCriterion&) const = default;
};

struct PriceResult {
    std::vector<ClassifiedCriterion> criteria;
    bool conflict = false;
};

/// Ensures exactly one PRICE criterion when a price weight is known. The
/// dedicated field wins over a mixed-in price; several mixed-in prices are
/// folded into the first one with their weights summed.
PriceResult extract_price_weight(std::string_view priceField, std::vector<ClassifiedCriterion> others);

struct LotCriteria {
    std::vector<Criterion> criteria;
    bool flagged = false;
};

/// Runs the whole repair for one lot's raw fields.
LotCriteria process_lot(LotId lotId, std::string_view namesField, std::string_view weightsField,
                        std::string_view priceField, const std::vector<std::string>& separators,
                        const Lexicon& lexicon);

}  // namespace foppa::criteria
