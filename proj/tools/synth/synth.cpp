#include "synth.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>

#include "foppa/csv.hpp"
#include "foppa/ingest.hpp"
#include "foppa/normalize.hpp"

namespace foppa::synth {

namespace {

std::string fmt(const char* f, long long v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, f, v);
    return buf;
}

std::string date_string(int y, int m, int d) {
    char buf[16];
    std::snprintf(buf, sizeof buf, "%04d-%02d-%02d", y, m, d);
    return buf;
}

const std::vector<std::string> kDepartments{"69", "75", "13", "33", "44", "38", "59", "974", "20", "01"};
const std::vector<std::string> kBuyerKinds{"COMMUNE DE", "CENTRE HOSPITALIER", "SYNDICAT", "OFFICE PUBLIC",
                                           "DEPARTEMENT DE", "REGIE"};
const std::map<std::string, std::string> kSectorWord{{"41", "CONSTRUCTION"}, {"43", "ELECTRICITE"},
                                                     {"62", "INFORMATIQUE"}, {"71", "INGENIERIE"},
                                                     {"46", "FOURNITURES"}};
const std::map<std::string, std::string> kSectorCode{
    {"41", "41.20A"}, {"43", "43.21A"}, {"62", "62.01Z"}, {"71", "71.12B"}, {"46", "46.69B"}};

std::string unique_word(Rng& rng, std::set<std::string>& used, int syllables) {
    for (;;) {
        auto w = pseudo_word(rng, syllables);
        if (used.insert(w).second) return w;
    }
}

// Accented spelling of an upper-case ASCII word that folds back to it.
std::string accent(const std::string& s, Rng& rng) {
    std::string out;
    for (char c : s) {
        if (c == 'E' && rng.chance(0.5))
            out += "\xC3\x89";  // É
        else if (c == 'A' && rng.chance(0.3))
            out += "\xC3\x80";  // À
        else if (c == 'C' && rng.chance(0.2))
            out += "\xC3\x87";  // Ç
        else
            out += c;
    }
    return out;
}

std::string lower_ascii(std::string s) {
    for (auto& c : s)
        if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
    return s;
}

std::string title_case(std::string s) {
    bool start = true;
    for (auto& c : s) {
        if (c == ' ' || c == '-') {
            start = true;
            continue;
        }
        if (!start && c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
        start = false;
    }
    return s;
}

// One letter of the longest token replaced; keeps similarity high.
std::string typo(const std::string& s, Rng& rng) {
    std::size_t bestStart = 0, bestLen = 0, start = 0;
    for (std::size_t i = 0; i <= s.size(); ++i) {
        if (i == s.size() || s[i] == ' ') {
            if (i - start > bestLen) {
                bestLen = i - start;
                bestStart = start;
            }
            start = i + 1;
        }
    }
    if (bestLen < 6) return s;
    std::string out = s;
    const auto pos = bestStart + 1 + rng.below(bestLen - 2);
    out[pos] = out[pos] == 'X' ? 'Y' : 'X';
    return out;
}

std::string noisy_name(const std::string& name, Rng& rng) {
    std::string s = name;
    if (rng.chance(0.25)) s = typo(s, rng);
    if (rng.chance(0.6)) s = accent(s, rng);
    if (rng.chance(0.3)) {
        const auto sp = s.find(' ');
        if (sp != std::string::npos) s.replace(sp, 1, rng.chance(0.5) ? " - " : "-");
    }
    if (rng.chance(0.3)) s += rng.chance(0.5) ? " (SIEGE)" : " (agence principale)";
    if (rng.chance(0.2)) s += ".";
    if (rng.chance(0.4)) s = title_case(s);
    return s;
}

}  // namespace

std::uint64_t Rng::below(std::uint64_t n) {
    if (n <= 1) return 0;
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    std::uint64_t x;
    do x = engine_();
    while (x >= limit);
    return x % n;
}

bool Rng::chance(double p) { return static_cast<double>(engine_() >> 11) * 0x1.0p-53 < p; }

std::string pseudo_word(Rng& rng, int syllables) {
    static const std::string cons = "BCDFGLMNPRSTV";
    static const std::string vow = "AEIOU";
    std::string w;
    for (int i = 0; i < syllables; ++i) {
        w += cons[rng.below(cons.size())];
        w += vow[rng.below(vow.size())];
    }
    if (rng.chance(0.5)) w += "LNRS"[rng.below(4)];
    return w;
}

const std::vector<CpvMapping>& cpv_mappings() {
    static const std::vector<CpvMapping> m{{"45", "41"}, {"45", "43"}, {"72", "62"},
                                           {"71", "71"}, {"30", "46"}, {"33", "46"}};
    return m;
}

World make_world(const RegistrySpec& spec) {
    World w;
    Rng rng(spec.seed);
    std::set<std::string> used;

    const auto nDept = std::min(spec.departments, kDepartments.size());
    for (std::size_t d = 0; d < nDept; ++d) {
        const auto& dept = kDepartments[d];
        for (std::size_t c = 0; c < spec.citiesPerDepartment; ++c) {
            City city;
            city.name = unique_word(rng, used, 3);
            city.zipcode = dept.size() == 3 ? dept + fmt("%02lld", static_cast<long long>(c * 10 % 100))
                                            : dept + fmt("%03lld", static_cast<long long>(10 * (c + 1)));
            city.department = dept;
            w.cities.push_back(city);
        }
    }
    if (nDept >= 2) {
        // Same city name in two departments: its zipcode cannot be guessed.
        City twin = w.cities[spec.citiesPerDepartment];
        twin.zipcode = kDepartments[0] + "999";
        twin.department = kDepartments[0];
        w.ambiguousCities.push_back(twin.name);
        w.cities.push_back(twin);
    }

    std::vector<std::string> sectors;
    for (const auto& [code, word] : kSectorWord) sectors.push_back(code);

    auto add_entity = [&](bool buyer) {
        Entity e;
        e.siren = fmt("%09lld", 300000000LL + static_cast<long long>(w.entities.size()) * 7919LL);
        e.isBuyer = buyer;
        std::string sector;
        if (buyer) {
            e.name = rng.pick(kBuyerKinds) + " " + unique_word(rng, used, 3);
            e.activity = "84.11Z";
        } else {
            sector = rng.pick(sectors);
            e.name = unique_word(rng, used, 3) + " " + kSectorWord.at(sector);
            if (rng.chance(0.3)) e.name += " " + unique_word(rng, used, 2);
            e.activity = kSectorCode.at(sector);
        }
        const auto entityIdx = w.entities.size();
        w.entities.push_back(e);

        const int n = buyer ? 1 + static_cast<int>(rng.below(2)) : 1 + static_cast<int>(rng.below(spec.maxFacilities));
        const auto& home = w.cities[rng.below(w.cities.size())];
        for (int k = 0; k < n; ++k) {
            Facility f;
            f.entity = entityIdx;
            f.siret = e.siren + fmt("%05lld", 10LL + 13LL * k);
            f.name = rng.chance(0.4) ? std::string{} : e.name;
            f.street = std::to_string(1 + rng.below(200)) + " " + (rng.chance(0.5) ? "RUE " : "AVENUE ") +
                       unique_word(rng, used, 2);
            // Facilities of one entity often share a department.
            if (k == 0 || rng.chance(0.5)) {
                std::vector<const City*> same;
                for (const auto& c : w.cities)
                    if (c.department == home.department) same.push_back(&c);
                f.city = *same[rng.below(same.size())];
            } else {
                f.city = w.cities[rng.below(w.cities.size())];
            }
            f.activity = rng.chance(0.1) ? std::string{} : e.activity;
            f.openDate = date_string(1990 + static_cast<int>(rng.below(18)), 1 + static_cast<int>(rng.below(12)), 1);
            if (k > 0 && rng.chance(spec.closedRate))
                f.closeDate = date_string(2011 + static_cast<int>(rng.below(4)), 6, 30);
            w.facilities.push_back(f);
        }
    };
    for (std::size_t i = 0; i < spec.buyers; ++i) add_entity(true);
    for (std::size_t i = 0; i < spec.winners; ++i) add_entity(false);
    return w;
}

const std::string& World::display_name(const Facility& f) const {
    return f.name.empty() ? entities[f.entity].name : f.name;
}

bool World::city_unique(const std::string& foldedCity) const {
    std::set<std::string> zips;
    for (const auto& c : cities)
        if (c.name == foldedCity) zips.insert(c.zipcode);
    return zips.size() == 1;
}

registry::Registry World::build_registry(int activityPrefixLength) const {
    registry::Registry reg;
    for (const auto& e : entities) {
        registry::RegistryEntity re;
        re.siren = e.siren;
        re.legalNames = {e.name};
        re.activityCode = e.activity;
        reg.add_entity(std::move(re));
    }
    for (const auto& f : facilities) {
        registry::RegistryFacility rf;
        rf.siret = f.siret;
        if (!f.name.empty()) rf.names = {f.name};
        rf.street = f.street;
        rf.zipcode = f.city.zipcode;
        rf.city = f.city.name;
        rf.activityCode = f.activity;
        rf.openDate = Date::parse(f.openDate);
        rf.closeDate = Date::parse(f.closeDate);
        reg.add_facility(std::move(rf));
    }
    reg.finalize(activityPrefixLength);
    return reg;
}

void World::write_reference(const std::filesystem::path& dir) const {
    std::filesystem::create_directories(dir);
    std::vector<std::vector<std::string>> rows;
    for (const auto& e : entities) rows.push_back({e.siren, e.name, "", "1985-01-01", "", e.activity});
    csv::write_file(dir / "entities.csv",
                    {"siren", "denomination", "former_names", "creation_date", "closure_date", "activity"}, rows);
    rows.clear();
    for (const auto& f : facilities)
        rows.push_back({f.siret, f.name, f.street, f.city.zipcode, f.city.name, f.activity, f.openDate, f.closeDate});
    csv::write_file(dir / "facilities.csv",
                    {"siret", "names", "street", "zipcode", "city", "activity", "open_date", "close_date"}, rows);
    rows.clear();
    for (const auto& c : cities) rows.push_back({c.name, c.zipcode});
    csv::write_file(dir / "postal.csv", {"city", "zipcode"}, rows);
    rows.clear();
    for (const auto& m : cpv_mappings()) rows.push_back({m.cpv, m.activity});
    csv::write_file(dir / "activity.csv", {"cpv_prefix", "activity_prefix"}, rows);
}

Mention mention_of(const World& world, std::size_t fi, Rng& rng, Perturbation p, bool activityApplies) {
    const auto& f = world.facilities[fi];
    Mention m;
    m.facility = fi;
    m.name = world.display_name(f);
    m.street = f.street;
    m.zipcode = f.city.zipcode;
    m.city = f.city.name;
    m.tier = static_cast<int>(p);

    if (p == Perturbation::Noise) {
        m.tier = 1;
        m.name = noisy_name(m.name, rng);
        if (rng.chance(0.4)) m.street = lower_ascii(accent(m.street, rng));
        if (rng.chance(0.3)) m.city += " CEDEX " + std::to_string(1 + rng.below(9));
        if (rng.chance(0.3)) m.zipcode = "F-" + m.zipcode;
        if (rng.chance(0.3)) m.city = title_case(accent(m.city, rng));
    } else if (p == Perturbation::MissingAddress) {
        m.tier = 2;
        switch (rng.below(4)) {
        case 0: m.street.clear(); break;
        case 1: m.zipcode.clear(); break;
        case 2:
            m.zipcode.clear();
            m.city.clear();
            break;
        default:
            m.street.clear();
            m.zipcode.clear();
            m.city.clear();
            break;
        }
    }
    const bool hasDepartment = !m.zipcode.empty() || (!m.city.empty() && world.city_unique(m.city));
    m.expectUnblockable = !hasDepartment && !activityApplies;
    return m;
}

std::vector<TedRow> make_ted(const World& world, const TedSpec& spec) {
    Rng rng(spec.seed);
    std::vector<std::size_t> buyerFacilities;
    std::map<std::string, std::vector<std::size_t>> winnersBySector;
    std::vector<std::size_t> winnerFacilities;
    for (std::size_t i = 0; i < world.facilities.size(); ++i) {
        const auto& f = world.facilities[i];
        if (!f.closeDate.empty()) continue;  // mentioned agents are always active
        if (world.entities[f.entity].isBuyer) {
            buyerFacilities.push_back(i);
        } else {
            winnerFacilities.push_back(i);
            winnersBySector[world.entities[f.entity].activity.substr(0, 2)].push_back(i);
        }
    }

    auto perturbation = [&]() {
        const double u = static_cast<double>(rng.below(1000000)) / 1e6;
        if (u < spec.noiseRate) return Perturbation::Noise;
        if (u < spec.noiseRate + spec.missingAddressRate) return Perturbation::MissingAddress;
        return Perturbation::None;
    };

    std::vector<TedRow> rows;
    std::size_t notice = 0;
    while (rows.size() < spec.lots) {
        ++notice;
        const int year = 2011 + static_cast<int>(rng.below(9));
        const auto noticeId = fmt("%04lld", year) + "-" + fmt("%06lld", static_cast<long long>(100000 + notice * 37));
        const auto dispatch = date_string(year, 1 + static_cast<int>(rng.below(12)), 1 + static_cast<int>(rng.below(28)));
        const bool hasCn = rng.chance(0.85);
        const std::size_t buyerF = rng.pick(buyerFacilities);
        const auto buyerPert = perturbation();
        const bool buyerDeclared = rng.chance(spec.buyerDeclaredRate);
        const int nLots = 1 + static_cast<int>(rng.below(3));

        for (int l = 1; l <= nLots && rows.size() < spec.lots; ++l) {
            TedRow r;
            r.noticeId = noticeId;
            r.lotNumber = std::to_string(l);
            r.dispatch = dispatch;
            if (rng.chance(0.8)) r.awardDate = date_string(year, 1, 1 + static_cast<int>(rng.below(28)));
            r.contractNoticeRef = hasCn ? "CN-" + noticeId : "";

            std::string sector;
            if (rng.chance(spec.cpvRate)) {
                const auto& m = rng.pick(cpv_mappings());
                r.cpv = m.cpv + "000000";
                sector = m.activity;
                r.contractType = m.cpv == "45" ? "W" : (m.cpv == "30" || m.cpv == "33") ? "U" : "S";
            } else {
                r.contractType = rng.chance(0.5) ? "S" : "";
            }
            if (rng.chance(0.7)) r.offers = std::to_string(1 + rng.below(12));
            if (rng.chance(0.7)) {
                const auto cents = static_cast<long long>(1000000 + rng.below(500000000));
                r.value = rng.chance(0.5) ? fmt("%lld", cents / 100) + "." + fmt("%02lld", cents % 100)
                                          : fmt("%lld", cents / 100) + "," + fmt("%02lld", cents % 100);
            }

            Mention buyer = mention_of(world, buyerF, rng, buyerPert, false);
            if (buyerDeclared) {
                buyer.declaredSiret = world.facilities[buyerF].siret;
                if (rng.chance(0.2))  // space-grouped, only valid once normalized
                    buyer.declaredSiret = buyer.declaredSiret.substr(0, 3) + " " + buyer.declaredSiret.substr(3, 3) +
                                          " " + buyer.declaredSiret.substr(6, 3) + " " + buyer.declaredSiret.substr(9);
            }
            r.buyers.push_back(buyer);

            const auto& pool = !sector.empty() && winnersBySector.count(sector) ? winnersBySector.at(sector)
                                                                                : winnerFacilities;
            const bool activityApplies = !sector.empty();
            if (rng.chance(spec.unknownAgentRate)) {
                Mention m;
                m.name = pseudo_word(rng, 3) + " " + pseudo_word(rng, 2) + " SARL";
                const auto& c = world.cities[rng.below(world.cities.size())];
                m.city = c.name;
                m.zipcode = c.zipcode;
                r.winners.push_back(m);
            } else if (rng.chance(spec.jointWinnerRate)) {
                for (int k = 0; k < 2; ++k)
                    r.winners.push_back(mention_of(world, rng.pick(pool), rng, Perturbation::None, activityApplies));
            } else {
                const auto wf = rng.pick(pool);
                auto m = mention_of(world, wf, rng, perturbation(), activityApplies);
                if (rng.chance(spec.winnerDeclaredRate)) m.declaredSiret = world.facilities[wf].siret;
                r.winners.push_back(m);
            }

            switch (rng.below(5)) {
            case 0:
                r.criteria = "Prix|Valeur technique|D\xC3\xA9lai de livraison";
                r.weights = "50|40|10";
                break;
            case 1:
                r.criteria = "Prix : 60 %, Valeur technique : 40 %";
                break;
            case 2:
                r.criteria = "Valeur technique|Performances environnementales";
                r.weights = "45|15";
                r.priceWeight = "40";
                break;
            case 3:
                r.criteria = "Qualit\xC3\xA9 // Co\xC3\xBBt";
                r.weights = "3 // 2";
                break;
            default: break;
            }
            rows.push_back(std::move(r));
        }
    }

    if (spec.cancelledLot && rows.size() > 3) {
        auto& r = rows[rows.size() / 2];
        r.winners.clear();
        Mention m;
        m.name = "INFRUCTUEUX";
        r.winners.push_back(m);
        r.cancelled = "1";
    }

    // Rejected rows: duplicates of earlier keys and out-of-period dispatch dates.
    for (std::size_t i = 0; i < spec.rejected && !rows.empty(); ++i) {
        // Copied from before the insertion point so the original is kept.
        TedRow r = rows[rng.below(rows.size() / 2)];
        r.expectRejected = true;
        if (i % 2 == 1) {
            r.lotNumber = "9" + std::to_string(i);
            r.dispatch = "2008-05-05";
        }
        rows.insert(rows.begin() + static_cast<std::ptrdiff_t>(rows.size() / 2 + i), r);
    }

    const std::vector<std::string> broken{
        "2016-000001,1,\"2016-03-01,unterminated quote",
        "2016-000002,1,2016-03-01,too,few,fields",
        "2016-000003,1,2016-03-01,x\"y\"z,,,,,,,,,,,,,,,,,,,,,,",
    };
    for (std::size_t i = 0; i < spec.malformed; ++i) {
        TedRow r;
        r.rawLine = broken[i % broken.size()];
        rows.insert(rows.begin() + static_cast<std::ptrdiff_t>((i + 1) * rows.size() / (spec.malformed + 1)), r);
    }
    return rows;
}

namespace {

std::string join_field(const std::vector<Mention>& ms, std::string Mention::*field) {
    std::string out;
    for (std::size_t i = 0; i < ms.size(); ++i) {
        if (i) out += " // ";
        out += ms[i].*field;
    }
    return out;
}

}  // namespace

void write_ted(const std::vector<TedRow>& rows, const std::filesystem::path& path) {
    const auto cols = ingest::default_ted_columns();
    // Fixed physical order, independent of the map's ordering.
    const std::vector<std::string> fields{
        "noticeId", "lotNumber", "publicationDate", "awardDate", "contractType", "cpv", "numberOfOffers",
        "awardedValue", "cancelledMarker", "contractNoticeRef", "buyerName", "buyerStreet", "buyerZipcode",
        "buyerCity", "buyerCountry", "buyerSiret", "winnerName", "winnerStreet", "winnerZipcode", "winnerCity",
        "winnerCountry", "winnerSiret", "criteriaNames", "criteriaWeights", "priceWeight"};
    std::ofstream out(path, std::ios::binary);
    if (!out) throw InputError("cannot write " + path.string());
    csv::Writer w(out);
    std::vector<std::string> header;
    for (const auto& f : fields) header.push_back(cols.at(f));
    w.row(header);
    for (const auto& r : rows) {
        if (r.rawLine) {
            out << *r.rawLine << "\n";
            continue;
        }
        w.row({r.noticeId, r.lotNumber, r.dispatch, r.awardDate, r.contractType, r.cpv, r.offers, r.value,
               r.cancelled, r.contractNoticeRef, join_field(r.buyers, &Mention::name),
               join_field(r.buyers, &Mention::street), join_field(r.buyers, &Mention::zipcode),
               join_field(r.buyers, &Mention::city), join_field(r.buyers, &Mention::country),
               join_field(r.buyers, &Mention::declaredSiret), join_field(r.winners, &Mention::name),
               join_field(r.winners, &Mention::street), join_field(r.winners, &Mention::zipcode),
               join_field(r.winners, &Mention::city), join_field(r.winners, &Mention::country),
               join_field(r.winners, &Mention::declaredSiret), r.criteria, r.weights, r.priceWeight});
    }
}

std::vector<TruthRow> truth_rows(const std::vector<TedRow>& rows, const World& world) {
    std::vector<TruthRow> truth;
    OccurrenceId next = 1;
    for (const auto& r : rows) {
        if (r.rawLine || r.expectRejected) continue;
        for (Role role : {Role::Buyer, Role::Winner}) {
            const auto& ms = role == Role::Buyer ? r.buyers : r.winners;
            for (const auto& m : ms) {
                if (m.name.empty() || m.name == "INFRUCTUEUX") continue;
                const OccurrenceId id = next++;
                if (!m.facility) continue;
                truth.push_back({id, world.facilities[*m.facility].siret, m.name, m.tier, m.expectUnblockable, role});
            }
        }
    }
    return truth;
}

void write_truth(const std::vector<TruthRow>& truth, const World&, const std::filesystem::path& path) {
    std::vector<std::vector<std::string>> rows;
    for (const auto& t : truth)
        rows.push_back({std::to_string(t.occurrenceId), t.siret, t.name, std::to_string(t.tier),
                        t.expectUnblockable ? "1" : "0", std::string(to_string(t.role))});
    csv::write_file(path, {"occurrenceId", "siret", "name", "tier", "expectUnblockable", "role"}, rows);
}

std::vector<std::string> contract_notices(const std::vector<TedRow>& rows, std::size_t extra, std::uint64_t seed) {
    std::set<std::string> ids;
    for (const auto& r : rows)
        if (!r.rawLine && !r.contractNoticeRef.empty()) ids.insert(r.contractNoticeRef);
    Rng rng(seed);
    for (std::size_t i = 0; i < extra; ++i) ids.insert("CN-ORPHAN-" + pseudo_word(rng, 3) + std::to_string(i));
    return {ids.begin(), ids.end()};
}

void write_fixture(const FixtureSpec& spec, const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir);
    const auto world = make_world(spec.registry);
    world.write_reference(dir);
    const auto rows = make_ted(world, spec.ted);
    write_ted(rows, dir / "ted.csv");
    write_truth(truth_rows(rows, world), world, dir / "truth.csv");

    std::vector<std::vector<std::string>> cn;
    for (const auto& id : contract_notices(rows, spec.extraContractNotices, spec.ted.seed + 1)) cn.push_back({id});
    csv::write_file(dir / "contract_notices.csv", {"ID_NOTICE_CN"}, cn);

    std::ofstream cfg(dir / "config.json", std::ios::binary);
    cfg << "{\n"
           "  \"inputs\": {\n"
           "    \"ted\": [\"ted.csv\"],\n"
           "    \"entities\": \"entities.csv\",\n"
           "    \"facilities\": \"facilities.csv\",\n"
           "    \"postal\": \"postal.csv\",\n"
           "    \"activity\": \"activity.csv\",\n"
           "    \"contractNotices\": \"contract_notices.csv\",\n"
           "    \"truth\": \"truth.csv\"\n"
           "  },\n"
           "  \"output\": \"out\",\n"
           "  \"jobs\": "
        << spec.jobs
        << ",\n"
           "  \"seed\": 42,\n"
           "  \"evaluation\": {\"samplePerRole\": 10}\n"
           "}\n";
}

FixtureSpec golden_spec() {
    FixtureSpec spec;
    spec.registry.buyers = 25;
    spec.registry.winners = 60;
    spec.registry.seed = 11;
    spec.ted.lots = 92;  // plus rejected and malformed rows: 100 data lines
    spec.ted.malformed = 3;
    spec.ted.rejected = 5;
    spec.ted.seed = 12;
    return spec;
}

PlantedFixture make_planted(std::size_t perRole, std::uint64_t seed) {
    PlantedFixture fx;
    RegistrySpec rs;
    rs.buyers = perRole * 3 / 2;
    rs.winners = perRole * 3 / 2;
    rs.departments = 8;
    rs.citiesPerDepartment = 8;
    rs.closedRate = 0.0;
    rs.seed = seed;
    fx.world = make_world(rs);

    Rng rng(seed + 1);
    std::vector<std::size_t> buyers, winners;
    std::set<std::size_t> usedEntities;
    for (std::size_t i = 0; i < fx.world.facilities.size(); ++i) {
        const auto& f = fx.world.facilities[i];
        if (!usedEntities.insert(f.entity).second) continue;  // one agent per entity
        (fx.world.entities[f.entity].isBuyer ? buyers : winners).push_back(i);
    }

    auto lot_for = [&](std::size_t n) {
        TedRow r;
        r.noticeId = "2017-" + fmt("%06lld", static_cast<long long>(n));
        r.lotNumber = "1";
        r.dispatch = "2017-06-15";
        return r;
    };

    std::size_t n = 0;
    for (std::size_t k = 0; k < perRole; ++k) {
        const auto tier = static_cast<Perturbation>(k % 3);
        // Buyer agent, with a fixed known winner alongside.
        {
            TedRow r = lot_for(++n);
            auto m = mention_of(fx.world, buyers[k], rng, tier, false);
            m.declaredSiret = fx.world.facilities[buyers[k]].siret;
            r.buyers.push_back(m);
            fx.rows.push_back(std::move(r));
        }
        {
            TedRow r = lot_for(++n);
            const auto wf = winners[k];
            const bool withCpv = rng.chance(0.5);
            if (withCpv) {
                const auto sector = fx.world.entities[fx.world.facilities[wf].entity].activity.substr(0, 2);
                for (const auto& m : cpv_mappings())
                    if (m.activity == sector) {
                        r.cpv = m.cpv + "000000";
                        break;
                    }
            }
            auto m = mention_of(fx.world, wf, rng, tier, !r.cpv.empty());
            m.declaredSiret = fx.world.facilities[wf].siret;
            // A buyer is mandatory; this one is unknown to the registry.
            Mention b;
            b.name = "ACHETEUR " + pseudo_word(rng, 3);
            r.buyers.push_back(b);
            r.winners.push_back(m);
            fx.rows.push_back(std::move(r));
        }
    }
    return fx;
}

}  // namespace foppa::synth
