#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace foppa {

using LotId = std::int64_t;
using OccurrenceId = std::int64_t;

/// Calendar date without time zone. Ordering is chronological.
struct Date {
    int year = 0;
    int month = 0;
    int day = 0;

    auto operator<=>(const Date&) const = default;

    /// Accepts YYYY-MM-DD (optionally followed by a time part), YYYY/MM/DD,
    /// DD/MM/YYYY and DD/MM/YY (two-digit years map to 19xx when >= 70).
    static std::optional<Date> parse(std::string_view text);
    std::string to_string() const;
};

enum class Role { Buyer, Winner };
enum class ContractType { Goods, Services, Works };

std::string_view to_string(Role role);
std::optional<Role> parse_role(std::string_view text);
std::string_view to_string(ContractType type);
std::optional<ContractType> parse_contract_type(std::string_view text);

enum class IdKind { FullSiret, SirenOnly, InternalCode };

/// National identifier of an agent: a 14-digit SIRET, a 9-digit SIREN, or an
/// internal code ("U" + zero-padded sequence) for agents nobody could identify.
class Identifier {
public:
    static Identifier full_siret(std::string digits);
    static Identifier siren_only(std::string digits);
    static Identifier internal_code(std::uint64_t sequence);
    /// Inverse of render(); throws std::invalid_argument on malformed text.
    static Identifier parse(std::string_view rendered);

    IdKind kind() const { return kind_; }
    const std::string& value() const { return value_; }
    const std::string& render() const { return value_; }
    bool is_registry_id() const { return kind_ != IdKind::InternalCode; }
    /// First 9 digits for SIRET/SIREN, empty for internal codes.
    std::string siren() const;

    auto operator<=>(const Identifier&) const = default;

private:
    Identifier(IdKind kind, std::string value) : kind_(kind), value_(std::move(value)) {}
    IdKind kind_;
    std::string value_;
};

std::string_view to_string(IdKind kind);

/// Where an occurrence's current identifier came from.
enum class IdSource { None, Declared, Identified, Cluster, Internal };
std::string_view to_string(IdSource source);
IdSource parse_id_source(std::string_view text);

/// Fixed-point decimal in millionths. Used for criterion weights so that
/// normalization and its rounding are exact.
struct Weight {
    static constexpr std::int64_t kScale = 1'000'000;
    std::int64_t micros = 0;

    static Weight from_hundredths(std::int64_t h) { return Weight{h * 10'000}; }
    static Weight from_integer(std::int64_t v) { return Weight{v * kScale}; }
    auto operator<=>(const Weight&) const = default;
    /// Shortest decimal rendering (trailing zeros dropped, at least 2 decimals).
    std::string to_string() const;
};

/// Money amount in cents.
struct Money {
    std::int64_t cents = 0;
    std::string currency;
    auto operator<=>(const Money&) const = default;
};

struct LotRecord {
    LotId lotId = 0;
    std::string noticeId;
    std::string lotNumber;
    Date publicationDate;
    std::optional<Date> awardDate;
    std::optional<ContractType> contractType;
    std::string activityCode;
    std::optional<std::int64_t> numberOfOffers;
    std::optional<Money> awardedValue;
    bool cancelled = false;
    std::string contractNoticeRef;
    // Raw criterion fields, consumed by the criteria stage.
    std::string criteriaNames;
    std::string criteriaWeights;
    std::string priceWeight;
    std::string sourceFile;
    std::int64_t sourceLine = 0;

    /// Award date when known, publication date otherwise.
    Date reference_date() const { return awardDate.value_or(publicationDate); }
    bool operator==(const LotRecord&) const = default;
};

/// One appearance of a buyer or winner on one lot. Empty strings mean absent.
struct AgentOccurrence {
    OccurrenceId occurrenceId = 0;
    LotId lotId = 0;
    Role role = Role::Buyer;
    std::string rawName;
    std::string street;
    std::string zipcode;
    std::string city;
    std::string country;
    std::string declaredSiret;
    bool splitConflict = false;

    // Filled by normalize.
    std::string normalizedName;
    std::string normStreet;
    std::string normZipcode;
    std::string normCity;
    std::string department;
    bool zipcodeFilled = false;
    std::string agentKey;

    // Filled by normalize / identify / merge.
    std::optional<Identifier> identifier;
    IdSource idSource = IdSource::None;

    bool operator==(const AgentOccurrence&) const = default;
};

enum class CriterionClass { Price, Deadline, Technical, Environmental, Social, Others };
std::string_view to_string(CriterionClass c);
std::optional<CriterionClass> parse_criterion_class(std::string_view text);

struct Criterion {
    LotId lotId = 0;
    int ordinal = 0;
    std::string rawName;
    CriterionClass criterionClass = CriterionClass::Others;
    std::optional<Weight> weight;
    bool weightIsNormalized = false;
    bool operator==(const Criterion&) const = default;
};

/// Thrown for configuration problems (exit status 2 in the CLI).
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Thrown for unreadable or structurally invalid input data (exit status 3).
class InputError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Thrown when an internal invariant is violated (exit status 4).
class InvariantViolation : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

}  // namespace foppa
