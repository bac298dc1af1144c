#include "foppa/ingest.hpp"

#include <algorithm>
#include <fstream>
#include <set>

#include "foppa/normalize.hpp"
#include "foppa/text.hpp"

namespace foppa::ingest {

namespace {

const std::string kEmpty;

bool marker_set(std::string_view raw) {
    const auto v = text::collapse_spaces(text::fold_upper_ascii(raw));
    return !(v.empty() || v == "0" || v == "N" || v == "NO" || v == "NON" || v == "FALSE");
}

std::size_t part_count(const std::string& value, const std::vector<std::string>& separators) {
    return split_on_separators(value, separators).size();
}

}  // namespace

const std::vector<std::string>& mandatory_fields() {
    static const std::vector<std::string> kFields = {"noticeId", "lotNumber", "publicationDate", "buyerName",
                                                     "winnerName"};
    return kFields;
}

ColumnMap default_ted_columns() {
    return {
        {"noticeId", "ID_NOTICE_CAN"},
        {"lotNumber", "ID_LOT_AWARDED"},
        {"publicationDate", "DT_DISPATCH"},
        {"awardDate", "DT_AWARD"},
        {"contractType", "TYPE_OF_CONTRACT"},
        {"cpv", "CPV"},
        {"numberOfOffers", "NUMBER_OFFERS"},
        {"awardedValue", "AWARD_VALUE_EURO"},
        {"cancelledMarker", "CANCELLED"},
        {"contractNoticeRef", "ID_NOTICE_CN"},
        {"buyerName", "CAE_NAME"},
        {"buyerStreet", "CAE_ADDRESS"},
        {"buyerZipcode", "CAE_POSTAL_CODE"},
        {"buyerCity", "CAE_TOWN"},
        {"buyerCountry", "ISO_COUNTRY_CODE"},
        {"buyerSiret", "CAE_NATIONALID"},
        {"winnerName", "WIN_NAME"},
        {"winnerStreet", "WIN_ADDRESS"},
        {"winnerZipcode", "WIN_POSTAL_CODE"},
        {"winnerCity", "WIN_TOWN"},
        {"winnerCountry", "WIN_COUNTRY_CODE"},
        {"winnerSiret", "WIN_NATIONALID"},
        {"criteriaNames", "CRIT_CRITERIA"},
        {"criteriaWeights", "CRIT_WEIGHTS"},
        {"priceWeight", "CRIT_PRICE_WEIGHT"},
    };
}

const std::string& RawLotRow::get(const std::string& field) const {
    auto it = cells.find(field);
    return it == cells.end() ? kEmpty : it->second;
}

ParsedTable parse_table(std::istream& source, const IngestConfig& config, const std::string& sourceName) {
    auto dialect = config.dialect;
    dialect.multiline = false;
    const auto table = csv::read(source, dialect);

    std::vector<std::string> missing;
    for (const auto& field : mandatory_fields()) {
        auto it = config.columns.find(field);
        if (it == config.columns.end() || !table.column(it->second))
            missing.push_back(field + (it == config.columns.end() ? " (unmapped)" : " -> " + it->second));
    }
    if (!missing.empty())
        throw ConfigError("mandatory column missing in " + (sourceName.empty() ? "input" : sourceName) + ": " +
                          text::join(missing, ", "));

    std::vector<std::pair<std::string, std::size_t>> mapped;
    for (const auto& [field, column] : config.columns)
        if (auto idx = table.column(column)) mapped.emplace_back(field, *idx);

    ParsedTable out;
    out.skipped = table.skipped;
    out.rows.reserve(table.rows.size());
    for (std::size_t r = 0; r < table.rows.size(); ++r) {
        RawLotRow row;
        row.sourceFile = sourceName;
        row.sourceLine = table.rowLines[r];
        for (const auto& [field, idx] : mapped) row.cells.emplace(field, table.rows[r][idx]);
        out.rows.push_back(std::move(row));
    }
    return out;
}

std::string_view to_string(RejectReason reason) {
    switch (reason) {
    case RejectReason::MissingNoticeId: return "missing-notice-id";
    case RejectReason::MissingLotNumber: return "missing-lot-number";
    case RejectReason::BadPublicationDate: return "bad-publication-date";
    case RejectReason::OutOfPeriod: return "out-of-period";
    case RejectReason::DuplicateLot: return "duplicate-lot";
    }
    return "";
}

BuildResult build_lot(const RawLotRow& row, const IngestConfig& config) {
    LotRecord lot;
    lot.noticeId = std::string(text::trim(row.get("noticeId")));
    if (lot.noticeId.empty()) return {std::nullopt, RejectReason::MissingNoticeId};
    lot.lotNumber = std::string(text::trim(row.get("lotNumber")));
    if (lot.lotNumber.empty()) return {std::nullopt, RejectReason::MissingLotNumber};

    auto pub = Date::parse(row.get("publicationDate"));
    if (!pub) return {std::nullopt, RejectReason::BadPublicationDate};
    if (*pub < config.periodFrom || config.periodTo < *pub) return {std::nullopt, RejectReason::OutOfPeriod};
    lot.publicationDate = *pub;
    lot.awardDate = Date::parse(row.get("awardDate"));
    lot.contractType = parse_contract_type(row.get("contractType"));
    lot.activityCode = std::string(text::trim(row.get("cpv")));

    if (auto n = text::parse_scaled_decimal(row.get("numberOfOffers"), 0)) lot.numberOfOffers = *n;
    if (auto cents = text::parse_scaled_decimal(row.get("awardedValue"), 2)) {
        auto currency = std::string(text::trim(row.get("currency")));
        lot.awardedValue = Money{*cents, currency.empty() ? config.defaultCurrency : currency};
    }

    const auto winner = std::string(text::trim(row.get("winnerName")));
    const auto winnerFolded = normalize::normalize_name(winner);
    const bool unsuccessful = !winnerFolded.empty() &&
                              std::find(config.unsuccessfulMarkers.begin(), config.unsuccessfulMarkers.end(),
                                        winnerFolded) != config.unsuccessfulMarkers.end();
    lot.cancelled = (winner.empty() && marker_set(row.get("cancelledMarker"))) || unsuccessful;

    lot.contractNoticeRef = std::string(text::trim(row.get("contractNoticeRef")));
    lot.criteriaNames = row.get("criteriaNames");
    lot.criteriaWeights = row.get("criteriaWeights");
    lot.priceWeight = row.get("priceWeight");
    lot.sourceFile = row.sourceFile;
    lot.sourceLine = static_cast<std::int64_t>(row.sourceLine);
    return {std::move(lot), std::nullopt};
}

std::vector<std::string> detect_separators(const std::vector<std::string>& values,
                                           const std::vector<std::string>& knownSeparators) {
    std::vector<std::string> found;
    for (const auto& sep : knownSeparators) {
        if (sep.empty() || std::find(found.begin(), found.end(), sep) != found.end()) continue;
        for (const auto& v : values) {
            if (v.find(sep) != std::string::npos) {
                found.push_back(sep);
                break;
            }
        }
    }
    std::stable_sort(found.begin(), found.end(),
                     [](const std::string& a, const std::string& b) { return a.size() > b.size(); });
    return found;
}

std::vector<std::string> split_on_separators(std::string_view value, const std::vector<std::string>& separators) {
    std::vector<std::string> ordered = separators;
    std::stable_sort(ordered.begin(), ordered.end(),
                     [](const std::string& a, const std::string& b) { return a.size() > b.size(); });

    std::vector<std::string> parts;
    std::string cur;
    auto flush = [&] {
        auto t = text::trim(cur);
        if (!t.empty()) parts.emplace_back(t);
        cur.clear();
    };
    std::size_t i = 0;
    while (i < value.size()) {
        const std::string* hit = nullptr;
        for (const auto& sep : ordered) {
            if (!sep.empty() && value.compare(i, sep.size(), sep) == 0) {
                hit = &sep;
                break;
            }
        }
        if (!hit) {
            cur += value[i++];
            continue;
        }
        flush();
        i += hit->size();
        const bool repeated = std::all_of(hit->begin(), hit->end(), [&](char c) { return c == hit->front(); });
        if (repeated)
            while (i < value.size() && value[i] == hit->front()) ++i;
    }
    flush();
    return parts;
}

std::vector<AgentOccurrence> split_joint_agents(const AgentFields& fields, Role role,
                                                const std::vector<std::string>& separators) {
    auto single = [&](bool conflict) {
        AgentOccurrence occ;
        occ.role = role;
        occ.rawName = std::string(text::trim(fields.name));
        occ.street = std::string(text::trim(fields.street));
        occ.zipcode = std::string(text::trim(fields.zipcode));
        occ.city = std::string(text::trim(fields.city));
        occ.country = std::string(text::trim(fields.country));
        occ.declaredSiret = std::string(text::trim(fields.siret));
        occ.splitConflict = conflict;
        return std::vector<AgentOccurrence>{occ};
    };

    const std::vector<const std::string*> splittable = {&fields.name, &fields.street, &fields.zipcode, &fields.city};
    std::vector<std::string> values;
    for (auto* v : splittable) values.push_back(*v);
    const auto found = detect_separators(values, separators);
    if (found.empty()) return single(false);

    std::size_t k = 0;
    bool agree = true;
    for (auto* v : splittable) {
        if (text::trim(*v).empty()) continue;
        const auto n = part_count(*v, found);
        if (k == 0)
            k = n;
        else if (n != k)
            agree = false;
    }
    if (!agree || k < 2) return single(!agree);

    auto partsOf = [&](const std::string& v) {
        auto p = split_on_separators(v, found);
        if (p.empty()) p.assign(k, "");
        return p;
    };
    const auto names = partsOf(fields.name);
    const auto streets = partsOf(fields.street);
    const auto zips = partsOf(fields.zipcode);
    const auto cities = partsOf(fields.city);
    // A declared identifier is only attributable when it splits the same way.
    auto sirets = split_on_separators(fields.siret, found);
    if (sirets.size() != k) sirets.assign(k, "");

    std::vector<AgentOccurrence> out;
    for (std::size_t i = 0; i < k; ++i) {
        AgentOccurrence occ;
        occ.role = role;
        occ.rawName = names[i];
        occ.street = streets[i];
        occ.zipcode = zips[i];
        occ.city = cities[i];
        occ.country = std::string(text::trim(fields.country));
        occ.declaredSiret = sirets[i];
        out.push_back(std::move(occ));
    }
    return out;
}

IngestResult ingest_streams(std::vector<std::pair<std::string, std::istream*>> sources, const IngestConfig& config) {
    IngestResult result;
    std::set<std::pair<std::string, std::string>> seen;
    LotId nextLot = 1;
    OccurrenceId nextOcc = 1;

    for (auto& [name, stream] : sources) {
        auto parsed = parse_table(*stream, config, name);
        for (auto& s : parsed.skipped) result.skipped.emplace_back(name, s);
        for (const auto& row : parsed.rows) {
            auto built = build_lot(row, config);
            if (!built.lot) {
                result.rejected.push_back({row.sourceFile, row.sourceLine, *built.reject});
                continue;
            }
            if (!seen.emplace(built.lot->noticeId, built.lot->lotNumber).second) {
                result.rejected.push_back({row.sourceFile, row.sourceLine, RejectReason::DuplicateLot});
                continue;
            }
            LotRecord lot = std::move(*built.lot);
            lot.lotId = nextLot++;

            for (Role role : {Role::Buyer, Role::Winner}) {
                const std::string p = role == Role::Buyer ? "buyer" : "winner";
                AgentFields f{row.get(p + "Name"), row.get(p + "Street"), row.get(p + "Zipcode"),
                              row.get(p + "City"), row.get(p + "Country"), row.get(p + "Siret")};
                if (text::trim(f.name).empty()) continue;
                if (role == Role::Winner) {
                    const auto folded = normalize::normalize_name(f.name);
                    if (std::find(config.unsuccessfulMarkers.begin(), config.unsuccessfulMarkers.end(), folded) !=
                        config.unsuccessfulMarkers.end())
                        continue;
                }
                ++result.occurrencesBeforeSplit;
                for (auto& occ : split_joint_agents(f, role, config.separators)) {
                    if (occ.rawName.empty()) continue;
                    occ.occurrenceId = nextOcc++;
                    occ.lotId = lot.lotId;
                    result.occurrences.push_back(std::move(occ));
                }
            }
            result.lots.push_back(std::move(lot));
        }
    }
    return result;
}

IngestResult ingest_tables(const std::vector<std::filesystem::path>& files, const IngestConfig& config) {
    std::vector<std::ifstream> streams;
    streams.reserve(files.size());
    std::vector<std::pair<std::string, std::istream*>> sources;
    for (const auto& f : files) {
        streams.emplace_back(f, std::ios::binary);
        if (!streams.back()) throw InputError("cannot open " + f.string());
    }
    for (std::size_t i = 0; i < files.size(); ++i) sources.emplace_back(files[i].filename().string(), &streams[i]);
    return ingest_streams(std::move(sources), config);
}

}  // namespace foppa::ingest
