#include "foppa/types.hpp"

#include <cstdio>

#include "foppa/text.hpp"

namespace foppa {

namespace {

bool valid_ymd(int y, int m, int d) {
    if (y < 1000 || y > 9999 || m < 1 || m > 12 || d < 1) return false;
    static constexpr int kDays[] = {31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
    const bool leap = (y % 4 == 0 && y % 100 != 0) || y % 400 == 0;
    const int limit = kDays[m - 1] + (m == 2 && leap ? 1 : 0);
    return d <= limit;
}

std::optional<int> digits_at(std::string_view s, std::size_t pos, std::size_t len) {
    if (pos + len > s.size()) return std::nullopt;
    auto sub = s.substr(pos, len);
    if (!text::is_ascii_digits(sub)) return std::nullopt;
    int v = 0;
    for (char c : sub) v = v * 10 + (c - '0');
    return v;
}

}  // namespace

std::optional<Date> Date::parse(std::string_view raw) {
    const auto s = text::trim(raw);
    Date d;
    if (s.size() >= 10 && (s[4] == '-' || s[4] == '/') && s[7] == s[4]) {
        auto y = digits_at(s, 0, 4), m = digits_at(s, 5, 2), dd = digits_at(s, 8, 2);
        if (!y || !m || !dd) return std::nullopt;
        if (s.size() > 10 && s[10] != 'T' && s[10] != ' ') return std::nullopt;
        d = {*y, *m, *dd};
    } else if ((s.size() == 10 || s.size() == 8) && s[2] == '/' && s[5] == '/') {
        auto dd = digits_at(s, 0, 2), m = digits_at(s, 3, 2);
        auto y = digits_at(s, 6, s.size() - 6);
        if (!y || !m || !dd) return std::nullopt;
        int year = *y;
        if (s.size() == 8) year += year >= 70 ? 1900 : 2000;
        d = {year, *m, *dd};
    } else {
        return std::nullopt;
    }
    if (!valid_ymd(d.year, d.month, d.day)) return std::nullopt;
    return d;
}

std::string Date::to_string() const {
    char buf[16];
    std::snprintf(buf, sizeof buf, "%04d-%02d-%02d", year, month, day);
    return buf;
}

std::string_view to_string(Role role) { return role == Role::Buyer ? "buyer" : "winner"; }

std::optional<Role> parse_role(std::string_view text) {
    if (text == "buyer") return Role::Buyer;
    if (text == "winner") return Role::Winner;
    return std::nullopt;
}

std::string_view to_string(ContractType type) {
    switch (type) {
    case ContractType::Goods: return "goods";
    case ContractType::Services: return "services";
    case ContractType::Works: return "works";
    }
    return "";
}

std::optional<ContractType> parse_contract_type(std::string_view raw) {
    const auto folded = text::collapse_spaces(text::fold_upper_ascii(raw));
    if (folded == "U" || folded == "GOODS" || folded == "SUPPLIES" || folded == "FOURNITURES")
        return ContractType::Goods;
    if (folded == "S" || folded == "SERVICES") return ContractType::Services;
    if (folded == "W" || folded == "WORKS" || folded == "TRAVAUX") return ContractType::Works;
    return std::nullopt;
}

Identifier Identifier::full_siret(std::string digits) {
    if (digits.size() != 14 || !text::is_ascii_digits(digits))
        throw std::invalid_argument("SIRET must be 14 digits: " + digits);
    return Identifier(IdKind::FullSiret, std::move(digits));
}

Identifier Identifier::siren_only(std::string digits) {
    if (digits.size() != 9 || !text::is_ascii_digits(digits))
        throw std::invalid_argument("SIREN must be 9 digits: " + digits);
    return Identifier(IdKind::SirenOnly, std::move(digits));
}

Identifier Identifier::internal_code(std::uint64_t sequence) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "U%06llu", static_cast<unsigned long long>(sequence));
    return Identifier(IdKind::InternalCode, buf);
}

Identifier Identifier::parse(std::string_view rendered) {
    if (!rendered.empty() && rendered.front() == 'U' && text::is_ascii_digits(rendered.substr(1)))
        return Identifier(IdKind::InternalCode, std::string(rendered));
    if (rendered.size() == 14) return full_siret(std::string(rendered));
    if (rendered.size() == 9) return siren_only(std::string(rendered));
    throw std::invalid_argument("not an identifier: " + std::string(rendered));
}

std::string Identifier::siren() const {
    if (kind_ == IdKind::InternalCode) return {};
    return value_.substr(0, 9);
}

std::string_view to_string(IdKind kind) {
    switch (kind) {
    case IdKind::FullSiret: return "SIRET";
    case IdKind::SirenOnly: return "SIREN";
    case IdKind::InternalCode: return "INTERNAL";
    }
    return "";
}

std::string_view to_string(IdSource source) {
    switch (source) {
    case IdSource::None: return "";
    case IdSource::Declared: return "DECLARED";
    case IdSource::Identified: return "IDENTIFIED";
    case IdSource::Cluster: return "CLUSTER";
    case IdSource::Internal: return "INTERNAL";
    }
    return "";
}

IdSource parse_id_source(std::string_view text) {
    if (text == "DECLARED") return IdSource::Declared;
    if (text == "IDENTIFIED") return IdSource::Identified;
    if (text == "CLUSTER") return IdSource::Cluster;
    if (text == "INTERNAL") return IdSource::Internal;
    return IdSource::None;
}

std::string Weight::to_string() const {
    std::string s = text::format_scaled(micros, 6, 6);
    while (s.size() > 1 && s.back() == '0' && s[s.size() - 3] != '.') s.pop_back();
    return s;
}

std::string_view to_string(CriterionClass c) {
    switch (c) {
    case CriterionClass::Price: return "PRICE";
    case CriterionClass::Deadline: return "DEADLINE";
    case CriterionClass::Technical: return "TECHNICAL";
    case CriterionClass::Environmental: return "ENVIRONMENTAL";
    case CriterionClass::Social: return "SOCIAL";
    case CriterionClass::Others: return "OTHERS";
    }
    return "";
}

std::optional<CriterionClass> parse_criterion_class(std::string_view text) {
    const auto folded = text::collapse_spaces(text::fold_upper_ascii(text));
    if (folded == "PRICE") return CriterionClass::Price;
    if (folded == "DEADLINE") return CriterionClass::Deadline;
    if (folded == "TECHNICAL") return CriterionClass::Technical;
    if (folded == "ENVIRONMENTAL") return CriterionClass::Environmental;
    if (folded == "SOCIAL") return CriterionClass::Social;
    if (folded == "OTHERS") return CriterionClass::Others;
    return std::nullopt;
}

}  // namespace foppa
