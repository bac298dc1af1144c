#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "foppa/csv.hpp"
#include "foppa/types.hpp"

namespace foppa::registry {

/// Strips spaces; 14 digits give a FullSiret, 9 digits a SirenOnly.
/// No checksum is applied: historical codes do not always satisfy it.
std::optional<Identifier> validate_siret(std::string_view raw);

/// (SIREN, NIC) = (first 9, last 5) characters of a FullSiret.
std::pair<std::string, std::string> split_siret(const Identifier& siret);

struct RegistryEntity {
    std::string siren;
    std::vector<std::string> legalNames;  // folded, current first
    std::optional<Date> creationDate;
    std::optional<Date> closureDate;
    std::string activityCode;
};

struct RegistryFacility {
    std::string siret;
    std::string parentSiren;
    std::string nic;
    std::vector<std::string> names;  // folded
    std::string street;
    std::string zipcode;
    std::string city;
    std::string department;
    std::string activityCode;
    std::optional<Date> openDate;
    std::optional<Date> closeDate;
    std::optional<std::size_t> entity;  // index into Registry::entities()
    bool orphan = false;
};

/// Open at `date`: absent open date counts as always open, absent close date
/// as still open.
bool temporally_valid(const RegistryFacility& facility, const Date& date);

/// Activity-code prefix after dropping punctuation ("43.21A" -> "43" for 2).
std::string activity_prefix(std::string_view code, int length);

/// Maps contract classification prefixes (CPV) to compatible registry
/// activity prefixes. Lookup uses the longest key that prefixes the code.
class ActivityTable {
public:
    void add(std::string cpvPrefix, std::string activityPrefix);
    /// CSV with columns cpv_prefix,activity_prefix.
    static ActivityTable load(const std::filesystem::path& path);
    const std::set<std::string>* compatible(std::string_view cpv) const;
    bool empty() const { return table_.empty(); }

private:
    std::map<std::string, std::set<std::string>> table_;
};

/// Column mapping for registry extracts. Multi-valued fields list several
/// columns, and each cell may hold alternatives separated by '|'.
struct RegistryColumns {
    std::string siren = "siren";
    std::vector<std::string> legalNames = {"denomination", "former_names"};
    std::string creationDate = "creation_date";
    std::string closureDate = "closure_date";
    std::string entityActivity = "activity";

    std::string siret = "siret";
    std::vector<std::string> facilityNames = {"names"};
    std::string street = "street";
    std::string zipcode = "zipcode";
    std::string city = "city";
    std::string facilityActivity = "activity";
    std::string openDate = "open_date";
    std::string closeDate = "close_date";
};

class Registry {
public:
    Registry() = default;

    /// Adds an entity; names are folded. Throws InputError on a bad or
    /// duplicate SIREN.
    void add_entity(RegistryEntity entity);
    /// Adds a facility, deriving SIREN/NIC/department and folding text.
    /// Throws InputError unless the SIRET is 14 digits.
    void add_facility(RegistryFacility facility);
    /// Resolves parent links and builds the lookup indexes. Must be called
    /// after the last add and before any lookup.
    void finalize(int activityPrefixLength = 2);

    static Registry load(const std::filesystem::path& entities, const std::filesystem::path& facilities,
                         const RegistryColumns& columns = {}, const csv::Dialect& dialect = {},
                         int activityPrefixLength = 2);

    const std::vector<RegistryEntity>& entities() const { return entities_; }
    const std::vector<RegistryFacility>& facilities() const { return facilities_; }
    const RegistryEntity* entity_of(const RegistryFacility& f) const {
        return f.entity ? &entities_[*f.entity] : nullptr;
    }
    std::optional<std::size_t> find_siret(std::string_view siret) const;

    /// Facility indexes by department / activity prefix / name token. Each
    /// list is sorted ascending. The activity index files a facility under
    /// its own prefix and its parent's; facilities with neither are filed
    /// under "".
    const std::vector<std::uint32_t>& by_department(const std::string& dept) const;
    const std::vector<std::uint32_t>& by_activity(const std::string& prefix) const;
    const std::vector<std::uint32_t>& by_name_token(const std::string& token) const;

    int activity_prefix_length() const { return activityPrefixLength_; }
    std::size_t orphan_count() const;

private:
    std::vector<RegistryEntity> entities_;
    std::vector<RegistryFacility> facilities_;
    std::unordered_map<std::string, std::size_t> sirenIndex_;
    std::unordered_map<std::string, std::size_t> siretIndex_;
    std::unordered_map<std::string, std::vector<std::uint32_t>> byDepartment_;
    std::unordered_map<std::string, std::vector<std::uint32_t>> byActivity_;
    std::unordered_map<std::string, std::vector<std::uint32_t>> byToken_;
    int activityPrefixLength_ = 2;
};

}  // namespace foppa::registry
