#include "foppa/criteria.hpp"

#include <algorithm>
#include <array>
#include <cctype>

#include "foppa/csv.hpp"
#include "foppa/ingest.hpp"
#include "foppa/normalize.hpp"
#include "foppa/text.hpp"

namespace foppa::criteria {

namespace {

bool is_digit(char c) { return c >= '0' && c <= '9'; }

struct NumberSpan {
    std::size_t begin = 0;
    std::size_t end = 0;
};

// Next "digits[(.|,)digits]" token at or after `from`.
std::optional<NumberSpan> next_number(std::string_view s, std::size_t from) {
    std::size_t i = from;
    while (i < s.size() && !is_digit(s[i])) ++i;
    if (i == s.size()) return std::nullopt;
    std::size_t j = i;
    while (j < s.size() && is_digit(s[j])) ++j;
    if (j + 1 < s.size() && (s[j] == '.' || s[j] == ',') && is_digit(s[j + 1])) {
        j += 1;
        while (j < s.size() && is_digit(s[j])) ++j;
    }
    return NumberSpan{i, j};
}

std::optional<Weight> to_weight(std::string_view token) {
    if (auto v = text::parse_scaled_decimal(token, 6)) return Weight{*v};
    return std::nullopt;
}

std::string strip_edges(std::string_view s, std::string_view junk) {
    std::size_t b = 0;
    std::size_t e = s.size();
    while (b < e && junk.find(s[b]) != std::string_view::npos) ++b;
    while (e > b && junk.find(s[e - 1]) != std::string_view::npos) --e;
    return std::string(s.substr(b, e - b));
}

// Drops unit words that trail or lead a weight ("60 points", "40 %").
std::string strip_units(std::string s) {
    static const std::array<std::string_view, 5> kUnits = {"points", "point", "pts", "pt", "%"};
    for (;;) {
        s = strip_edges(s, " \t:()-=%.,;");
        bool changed = false;
        std::string lower = s;
        std::transform(lower.begin(), lower.end(), lower.begin(), [](unsigned char c) { return std::tolower(c); });
        for (auto u : kUnits) {
            if (lower.size() >= u.size() && lower.compare(0, u.size(), u) == 0 &&
                (lower.size() == u.size() || !std::isalpha(static_cast<unsigned char>(lower[u.size()])))) {
                s.erase(0, u.size());
                changed = true;
                break;
            }
            if (lower.size() >= u.size() && lower.compare(lower.size() - u.size(), u.size(), u) == 0 &&
                (lower.size() == u.size() ||
                 !std::isalpha(static_cast<unsigned char>(lower[lower.size() - u.size() - 1])))) {
                s.erase(s.size() - u.size());
                changed = true;
                break;
            }
        }
        if (!changed) return s;
    }
}

bool matches_keyword(const std::string& paddedName, const std::string& keyword) {
    return paddedName.find(" " + keyword) != std::string::npos;
}

}  // namespace

Lexicon Lexicon::french_default() {
    Lexicon lex;
    const std::vector<std::pair<CriterionClass, std::vector<const char*>>> table = {
        {CriterionClass::Price,
         {"PRIX", "COUT", "TARIF", "MONTANT", "OFFRE FINANCIERE", "FINANCIER", "REMISE", "BORDEREAU"}},
        {CriterionClass::Deadline,
         {"DELAI", "DATE", "DUREE", "CALENDRIER", "PLANNING", "RAPIDITE", "RETRO PLANNING"}},
        {CriterionClass::Environmental,
         {"ENVIRONNEMENT", "ECOLOG", "DEVELOPPEMENT DURABLE", "DURABLE", "CARBONE", "ENERGETIQUE", "DECHET",
          "RECYCL", "BIOLOGIQUE", "EMISSION", "NUISANCE"}},
        {CriterionClass::Social,
         {"SOCIAL", "SOCIALE", "INSERTION", "EMPLOI", "HANDICAP", "SOLIDAIRE", "EQUITABLE", "APPRENTI",
          "SOCIETAL"}},
        {CriterionClass::Technical,
         {"TECHNI", "QUALIT", "VALEUR", "METHOD", "MEMOIRE", "PERFORMANC", "ORGANISATION", "MOYENS", "REFERENCE",
          "COMPETENC", "EXPERIENCE", "ASSISTANCE", "GARANTIE", "FONCTIONN", "ESTHETI", "ARCHITECT", "MAINTENANCE",
          "SERVICE APRES", "SAV", "PERSONNEL", "SECURITE"}},
    };
    for (const auto& [cls, words] : table)
        for (const char* w : words) lex.add(w, cls);
    return lex;
}

Lexicon Lexicon::load(const std::filesystem::path& path) {
    const auto t = csv::read_file(path);
    const auto k = t.require_column("keyword");
    const auto c = t.require_column("class");
    Lexicon lex;
    for (std::size_t r = 0; r < t.rows.size(); ++r) {
        auto cls = parse_criterion_class(t.rows[r][c]);
        if (!cls) throw InputError(path.string() + ": unknown criterion class '" + t.rows[r][c] + "'");
        lex.add(t.rows[r][k], *cls);
    }
    return lex;
}

void Lexicon::add(std::string_view keyword, CriterionClass cls) {
    auto folded = normalize::normalize_name(keyword);
    if (!folded.empty()) entries_.emplace_back(std::move(folded), cls);
}

std::vector<Weight> clean_weight_field(std::string_view raw, const std::vector<std::string>& separators) {
    // Separators become hard boundaries so "60---40" cannot read as one token.
    std::string s(raw);
    for (const auto& sep : separators) {
        if (sep.empty()) continue;
        for (auto pos = s.find(sep); pos != std::string::npos; pos = s.find(sep, pos + 1))
            s.replace(pos, sep.size(), std::string(sep.size(), ' '));
    }
    std::vector<Weight> out;
    std::size_t from = 0;
    while (auto span = next_number(s, from)) {
        if (auto w = to_weight(std::string_view(s).substr(span->begin, span->end - span->begin))) out.push_back(*w);
        from = span->end;
    }
    return out;
}

SplitResult split_criteria(std::string_view namesField, std::string_view weightsField,
                           const std::vector<std::string>& separators) {
    SplitResult result;
    const auto names = ingest::split_on_separators(namesField, separators);
    const auto weights = clean_weight_field(weightsField, separators);
    const bool aligned = names.size() == weights.size();
    result.countMismatch = !weights.empty() && !aligned;
    for (std::size_t i = 0; i < names.size(); ++i) {
        RawCriterion c{names[i], std::nullopt};
        if (aligned) c.weight = weights[i];
        result.criteria.push_back(std::move(c));
    }
    return result;
}

std::vector<RawCriterion> unmix_names_weights(std::string_view field, const std::vector<std::string>& separators) {
    std::vector<std::string> segSeps = separators;
    segSeps.insert(segSeps.end(), {";", "\n", ", "});
    std::vector<RawCriterion> out;
    for (const auto& segment : ingest::split_on_separators(field, segSeps)) {
        auto span = next_number(segment, 0);
        if (!span) {
            out.push_back({std::string(text::trim(segment)), std::nullopt});
            continue;
        }
        std::string name = strip_edges(segment.substr(0, span->begin), " \t:()-=%.,;");
        if (name.empty()) name = strip_units(segment.substr(span->end));
        auto weight = to_weight(std::string_view(segment).substr(span->begin, span->end - span->begin));
        if (name.empty()) continue;
        out.push_back({std::move(name), weight});
    }
    return out;
}

NormalizedWeights normalize_weights(const std::vector<Weight>& weights) {
    NormalizedWeights out{weights, false};
    if (weights.empty()) return out;
    __int128 sum = 0;
    for (const auto& w : weights) {
        if (w.micros < 0) return out;
        sum += w.micros;
    }
    if (sum == 0) return out;

    std::vector<std::int64_t> hundredths;
    hundredths.reserve(weights.size());
    std::int64_t total = 0;
    for (const auto& w : weights) {
        // round_half_up(10000 * w / sum)
        const __int128 num = static_cast<__int128>(20000) * w.micros + sum;
        const auto h = static_cast<std::int64_t>(num / (2 * sum));
        hundredths.push_back(h);
        total += h;
    }
    const auto largest = std::max_element(weights.begin(), weights.end()) - weights.begin();
    hundredths[static_cast<std::size_t>(largest)] += 10000 - total;

    out.weights.clear();
    for (auto h : hundredths) out.weights.push_back(Weight::from_hundredths(h));
    out.normalized = true;
    return out;
}

CriterionClass classify_criterion(std::string_view rawName, const Lexicon& lexicon) {
    const std::string padded = " " + normalize::normalize_name(rawName);
    static constexpr std::array<CriterionClass, 5> kPriority = {CriterionClass::Price, CriterionClass::Deadline,
                                                                CriterionClass::Environmental, CriterionClass::Social,
                                                                CriterionClass::Technical};
    for (auto cls : kPriority)
        for (const auto& [keyword, kwClass] : lexicon.entries())
            if (kwClass == cls && matches_keyword(padded, keyword)) return cls;
    return CriterionClass::Others;
}

PriceResult extract_price_weight(std::string_view priceField, std::vector<ClassifiedCriterion> others) {
    PriceResult result;
    const auto dedicated = clean_weight_field(priceField, {});
    std::vector<std::size_t> prices;
    for (std::size_t i = 0; i < others.size(); ++i)
        if (others[i].cls == CriterionClass::Price) prices.push_back(i);

    if (!dedicated.empty()) {
        const Weight p = dedicated.front();
        if (prices.empty()) {
            others.insert(others.begin(), ClassifiedCriterion{"Prix", CriterionClass::Price, p});
        } else {
            for (auto i : prices)
                if (others[i].weight && *others[i].weight != p) result.conflict = true;
            others[prices.front()].weight = p;
        }
    } else if (prices.size() > 1) {
        std::optional<Weight> sum;
        for (auto i : prices)
            if (others[i].weight) sum = Weight{sum.value_or(Weight{}).micros + others[i].weight->micros};
        others[prices.front()].weight = sum;
    }
    // Drop every PRICE entry but the first.
    if (prices.size() > 1) {
        std::vector<ClassifiedCriterion> kept;
        bool seen = false;
        for (auto& c : others) {
            if (c.cls == CriterionClass::Price) {
                if (seen) continue;
                seen = true;
            }
            kept.push_back(std::move(c));
        }
        others = std::move(kept);
    }
    result.criteria = std::move(others);
    return result;
}

LotCriteria process_lot(LotId lotId, std::string_view namesField, std::string_view weightsField,
                        std::string_view priceField, const std::vector<std::string>& separators,
                        const Lexicon& lexicon) {
    LotCriteria out;
    std::vector<RawCriterion> raw;
    const bool namesHaveDigits = std::any_of(namesField.begin(), namesField.end(), is_digit);
    if (text::trim(weightsField).empty() && namesHaveDigits) {
        raw = unmix_names_weights(namesField, separators);
    } else {
        auto split = split_criteria(namesField, weightsField, separators);
        raw = std::move(split.criteria);
        out.flagged = split.countMismatch;
    }

    std::vector<ClassifiedCriterion> classified;
    for (auto& r : raw) {
        if (r.name.empty()) continue;
        const auto cls = classify_criterion(r.name, lexicon);
        classified.push_back({std::move(r.name), cls, r.weight});
    }
    auto priced = extract_price_weight(priceField, std::move(classified));
    out.flagged = out.flagged || priced.conflict;

    const bool allWeighted =
        !priced.criteria.empty() &&
        std::all_of(priced.criteria.begin(), priced.criteria.end(), [](const auto& c) { return c.weight.has_value(); });
    NormalizedWeights norm;
    if (allWeighted) {
        std::vector<Weight> ws;
        for (const auto& c : priced.criteria) ws.push_back(*c.weight);
        norm = normalize_weights(ws);
    }
    for (std::size_t i = 0; i < priced.criteria.size(); ++i) {
        auto& c = priced.criteria[i];
        Criterion crit;
        crit.lotId = lotId;
        crit.ordinal = static_cast<int>(i + 1);
        crit.rawName = c.name;
        crit.criterionClass = c.cls;
        crit.weight = norm.normalized ? std::optional<Weight>(norm.weights[i]) : c.weight;
        crit.weightIsNormalized = norm.normalized;
        out.criteria.push_back(std::move(crit));
    }
    return out;
}

}  // namespace foppa::criteria
