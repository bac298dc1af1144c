#include "foppa/registry.hpp"

#include <algorithm>

#include "foppa/normalize.hpp"
#include "foppa/text.hpp"

namespace foppa::registry {

namespace {

const std::vector<std::uint32_t> kNone;

const std::vector<std::uint32_t>& lookup(const std::unordered_map<std::string, std::vector<std::uint32_t>>& index,
                                         const std::string& key) {
    auto it = index.find(key);
    return it == index.end() ? kNone : it->second;
}

std::vector<std::string> fold_names(const std::vector<std::string>& raw) {
    std::vector<std::string> out;
    for (const auto& r : raw) {
        for (const auto& alt : text::split(r, '|')) {
            auto n = normalize::normalize_name(alt);
            if (!n.empty() && std::find(out.begin(), out.end(), n) == out.end()) out.push_back(std::move(n));
        }
    }
    return out;
}

std::string cell(const csv::Table& t, const std::vector<std::string>& row, const std::string& column) {
    if (column.empty()) return {};
    auto idx = t.column(column);
    return idx ? row[*idx] : std::string{};
}

}  // namespace

std::optional<Identifier> validate_siret(std::string_view raw) {
    std::string digits;
    for (char c : raw) {
        if (c == ' ' || c == '\t') continue;
        digits += c;
    }
    if (!text::is_ascii_digits(digits)) return std::nullopt;
    if (digits.size() == 14) return Identifier::full_siret(std::move(digits));
    if (digits.size() == 9) return Identifier::siren_only(std::move(digits));
    return std::nullopt;
}

std::pair<std::string, std::string> split_siret(const Identifier& siret) {
    if (siret.kind() != IdKind::FullSiret) throw std::invalid_argument("split_siret needs a full SIRET");
    return {siret.value().substr(0, 9), siret.value().substr(9, 5)};
}

bool temporally_valid(const RegistryFacility& facility, const Date& date) {
    if (facility.openDate && date < *facility.openDate) return false;
    if (facility.closeDate && *facility.closeDate < date) return false;
    return true;
}

std::string activity_prefix(std::string_view code, int length) {
    std::string out;
    for (char c : code) {
        if (static_cast<int>(out.size()) == length) break;
        if (std::isalnum(static_cast<unsigned char>(c))) out += static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
    }
    return static_cast<int>(out.size()) == length ? out : std::string{};
}

void ActivityTable::add(std::string cpvPrefix, std::string activityPrefix) {
    std::string key;
    for (char c : cpvPrefix)
        if (std::isdigit(static_cast<unsigned char>(c))) key += c;
    if (key.empty() || activityPrefix.empty()) return;
    table_[key].insert(activity_prefix(activityPrefix, static_cast<int>(activityPrefix.size())));
}

ActivityTable ActivityTable::load(const std::filesystem::path& path) {
    const auto t = csv::read_file(path);
    const auto c = t.require_column("cpv_prefix");
    const auto a = t.require_column("activity_prefix");
    ActivityTable table;
    for (const auto& row : t.rows) table.add(row[c], row[a]);
    return table;
}

const std::set<std::string>* ActivityTable::compatible(std::string_view cpv) const {
    std::string digits;
    for (char c : cpv)
        if (std::isdigit(static_cast<unsigned char>(c))) digits += c;
    for (std::size_t len = digits.size(); len > 0; --len) {
        auto it = table_.find(digits.substr(0, len));
        if (it != table_.end()) return &it->second;
    }
    return nullptr;
}

void Registry::add_entity(RegistryEntity entity) {
    if (entity.siren.size() != 9 || !text::is_ascii_digits(entity.siren))
        throw InputError("invalid SIREN '" + entity.siren + "'");
    if (sirenIndex_.count(entity.siren)) throw InputError("duplicate SIREN " + entity.siren);
    entity.legalNames = fold_names(entity.legalNames);
    sirenIndex_.emplace(entity.siren, entities_.size());
    entities_.push_back(std::move(entity));
}

void Registry::add_facility(RegistryFacility f) {
    auto id = validate_siret(f.siret);
    if (!id || id->kind() != IdKind::FullSiret) throw InputError("invalid SIRET '" + f.siret + "'");
    f.siret = id->value();
    std::tie(f.parentSiren, f.nic) = split_siret(*id);
    f.names = fold_names(f.names);
    const auto addr = normalize::normalize_address(f.street, f.zipcode, f.city);
    f.street = addr.street;
    f.zipcode = addr.zipcode;
    f.city = addr.city;
    f.department = normalize::department_of(f.zipcode).value_or("");
    if (siretIndex_.count(f.siret)) throw InputError("duplicate SIRET " + f.siret);
    siretIndex_.emplace(f.siret, facilities_.size());
    facilities_.push_back(std::move(f));
}

void Registry::finalize(int activityPrefixLength) {
    activityPrefixLength_ = activityPrefixLength;
    byDepartment_.clear();
    byActivity_.clear();
    byToken_.clear();
    for (std::size_t i = 0; i < facilities_.size(); ++i) {
        auto& f = facilities_[i];
        auto it = sirenIndex_.find(f.parentSiren);
        f.entity = it == sirenIndex_.end() ? std::nullopt : std::optional<std::size_t>(it->second);
        f.orphan = !f.entity;

        const auto idx = static_cast<std::uint32_t>(i);
        byDepartment_[f.department].push_back(idx);

        std::set<std::string> prefixes;
        if (auto p = activity_prefix(f.activityCode, activityPrefixLength); !p.empty()) prefixes.insert(p);
        if (f.entity)
            if (auto p = activity_prefix(entities_[*f.entity].activityCode, activityPrefixLength); !p.empty())
                prefixes.insert(p);
        if (prefixes.empty()) prefixes.insert("");
        for (const auto& p : prefixes) byActivity_[p].push_back(idx);

        std::set<std::string> toks;
        const auto& names = f.names.empty() && f.entity ? entities_[*f.entity].legalNames : f.names;
        for (const auto& n : names)
            for (auto& t : text::split(n, ' '))
                if (!t.empty()) toks.insert(t);
        for (const auto& t : toks) byToken_[t].push_back(idx);
    }
}

Registry Registry::load(const std::filesystem::path& entities, const std::filesystem::path& facilities,
                        const RegistryColumns& cols, const csv::Dialect& dialect, int activityPrefixLength) {
    Registry reg;
    csv::Dialect d = dialect;
    d.multiline = true;
    const auto et = csv::read_file(entities, d);
    et.require_column(cols.siren);
    for (const auto& row : et.rows) {
        RegistryEntity e;
        e.siren = std::string(text::trim(cell(et, row, cols.siren)));
        for (const auto& c : cols.legalNames) e.legalNames.push_back(cell(et, row, c));
        e.creationDate = Date::parse(cell(et, row, cols.creationDate));
        e.closureDate = Date::parse(cell(et, row, cols.closureDate));
        e.activityCode = std::string(text::trim(cell(et, row, cols.entityActivity)));
        reg.add_entity(std::move(e));
    }
    const auto ft = csv::read_file(facilities, d);
    ft.require_column(cols.siret);
    for (const auto& row : ft.rows) {
        RegistryFacility f;
        f.siret = cell(ft, row, cols.siret);
        for (const auto& c : cols.facilityNames) f.names.push_back(cell(ft, row, c));
        f.street = cell(ft, row, cols.street);
        f.zipcode = cell(ft, row, cols.zipcode);
        f.city = cell(ft, row, cols.city);
        f.activityCode = std::string(text::trim(cell(ft, row, cols.facilityActivity)));
        f.openDate = Date::parse(cell(ft, row, cols.openDate));
        f.closeDate = Date::parse(cell(ft, row, cols.closeDate));
        reg.add_facility(std::move(f));
    }
    reg.finalize(activityPrefixLength);
    return reg;
}

std::optional<std::size_t> Registry::find_siret(std::string_view siret) const {
    auto it = siretIndex_.find(std::string(siret));
    return it == siretIndex_.end() ? std::nullopt : std::optional<std::size_t>(it->second);
}

const std::vector<std::uint32_t>& Registry::by_department(const std::string& dept) const {
    return lookup(byDepartment_, dept);
}
const std::vector<std::uint32_t>& Registry::by_activity(const std::string& prefix) const {
    return lookup(byActivity_, prefix);
}
const std::vector<std::uint32_t>& Registry::by_name_token(const std::string& token) const {
    return lookup(byToken_, token);
}

std::size_t Registry::orphan_count() const {
    return static_cast<std::size_t>(
        std::count_if(facilities_.begin(), facilities_.end(), [](const auto& f) { return f.orphan; }));
}

}  // namespace foppa::registry
