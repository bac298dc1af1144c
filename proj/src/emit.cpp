#include "foppa/emit.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include "foppa/csv.hpp"
#include "foppa/text.hpp"

namespace foppa::emit {

namespace {

Column integer(std::string name, bool nullable = false) { return {std::move(name), ColumnType::Integer, nullable}; }
Column decimal(std::string name) { return {std::move(name), ColumnType::Decimal, true}; }
Column textCol(std::string name, bool nullable = true) { return {std::move(name), ColumnType::Text, nullable}; }

std::string opt_date(const std::optional<Date>& d) { return d ? d->to_string() : std::string{}; }
std::string flag(bool b) { return b ? "1" : "0"; }

int compare_cell(const std::string& a, const std::string& b, ColumnType type) {
    if (type == ColumnType::Integer) {
        const auto ia = text::parse_int(a);
        const auto ib = text::parse_int(b);
        if (ia && ib) return *ia < *ib ? -1 : (*ia > *ib ? 1 : 0);
    }
    return a.compare(b) < 0 ? -1 : (a == b ? 0 : 1);
}

std::string sql_type(ColumnType t) {
    switch (t) {
    case ColumnType::Integer: return "INTEGER";
    case ColumnType::Decimal: return "DECIMAL(20,2)";
    case ColumnType::Text: return "TEXT";
    }
    return "TEXT";
}

std::string sql_literal(const std::string& v, const Column& c) {
    if (v.empty() && c.nullable) return "NULL";
    if (c.type != ColumnType::Text && !v.empty()) return v;
    std::string out = "'";
    for (char ch : v) {
        if (ch == '\'') out += '\'';
        out += ch;
    }
    out += '\'';
    return out;
}

void add_link_rows(Table& table, Role role, const std::vector<AgentOccurrence>& occurrences,
                   const std::map<OccurrenceId, OccurrenceProvenance>& provenance) {
    std::set<std::pair<LotId, std::string>> seen;
    std::vector<const AgentOccurrence*> ordered;
    for (const auto& o : occurrences)
        if (o.role == role) ordered.push_back(&o);
    std::sort(ordered.begin(), ordered.end(),
              [](const auto* a, const auto* b) { return a->occurrenceId < b->occurrenceId; });
    for (const auto* o : ordered) {
        if (!o->identifier) throw InvariantViolation("occurrence " + std::to_string(o->occurrenceId) + " has no agent");
        if (!seen.emplace(o->lotId, o->identifier->value()).second) continue;
        auto prov = provenance.find(o->occurrenceId);
        table.rows.push_back({std::to_string(o->lotId), o->identifier->value(), std::to_string(o->occurrenceId),
                              std::string(to_string(o->idSource)),
                              prov == provenance.end() ? std::string{} : prov->second.caseKind,
                              flag(o->splitConflict)});
    }
}

}  // namespace

std::size_t Table::column_index(const std::string& column) const {
    for (std::size_t i = 0; i < columns.size(); ++i)
        if (columns[i].name == column) return i;
    throw std::out_of_range("no column " + column + " in " + name);
}

std::vector<std::string> Table::header() const {
    std::vector<std::string> h;
    for (const auto& c : columns) h.push_back(c.name);
    return h;
}

void Table::sort_by_key() {
    std::vector<std::size_t> keyIdx;
    for (const auto& k : primaryKey) keyIdx.push_back(column_index(k));
    std::stable_sort(rows.begin(), rows.end(), [&](const auto& a, const auto& b) {
        for (auto i : keyIdx) {
            const int c = compare_cell(a[i], b[i], columns[i].type);
            if (c != 0) return c < 0;
        }
        return false;
    });
}

const Table& OutputSchema::table(const std::string& name) const {
    for (const auto& t : tables)
        if (t.name == name) return t;
    throw std::out_of_range("no table " + name);
}

Table& OutputSchema::table(const std::string& name) {
    for (auto& t : tables)
        if (t.name == name) return t;
    throw std::out_of_range("no table " + name);
}

OutputSchema empty_schema() {
    OutputSchema s;
    s.tables.push_back({"Lots",
                        {integer("lotId"), textCol("noticeId", false), textCol("lotNumber", false),
                         textCol("publicationDate", false), textCol("awardDate"), textCol("contractType"),
                         textCol("activityCode"), integer("numberOfOffers", true), decimal("awardedValue"),
                         textCol("currency"), integer("cancelled"), textCol("contractNoticeRef"),
                         integer("criteriaFlag")},
                        {"lotId"},
                        {},
                        {}});
    s.tables.push_back({"Agents",
                        {textCol("agentId", false), textCol("idKind", false), textCol("street"), textCol("zipcode"),
                         textCol("city"), textCol("department"), textCol("country"), integer("occurrenceCount")},
                        {"agentId"},
                        {},
                        {}});
    s.tables.push_back({"Names",
                        {textCol("agentId", false), textCol("name", false)},
                        {"agentId", "name"},
                        {{"agentId", "Agents", "agentId"}},
                        {}});
    for (const char* link : {"LotBuyers", "LotSuppliers"}) {
        s.tables.push_back({link,
                            {integer("lotId"), textCol("agentId", false), integer("occurrenceId"),
                             textCol("idSource"), textCol("caseKind"), integer("splitConflict")},
                            {"lotId", "agentId"},
                            {{"lotId", "Lots", "lotId"}, {"agentId", "Agents", "agentId"}},
                            {}});
    }
    s.tables.push_back({"Criteria",
                        {integer("lotId"), integer("ordinal"), textCol("rawName"), textCol("criterionClass", false),
                         decimal("weight"), integer("weightIsNormalized")},
                        {"lotId", "ordinal"},
                        {{"lotId", "Lots", "lotId"}},
                        {}});
    return s;
}

OutputSchema build_tables(const std::vector<LotRecord>& lots, const std::vector<merge::CanonicalAgent>& agents,
                          const std::vector<AgentOccurrence>& occurrences, const std::vector<Criterion>& criteria,
                          const std::map<LotId, LotFlags>& lotFlags,
                          const std::map<OccurrenceId, OccurrenceProvenance>& provenance) {
    auto schema = empty_schema();
    auto& lotsT = schema.table("Lots");
    for (const auto& l : lots) {
        auto f = lotFlags.find(l.lotId);
        lotsT.rows.push_back(
            {std::to_string(l.lotId), l.noticeId, l.lotNumber, l.publicationDate.to_string(), opt_date(l.awardDate),
             l.contractType ? std::string(to_string(*l.contractType)) : std::string{}, l.activityCode,
             l.numberOfOffers ? std::to_string(*l.numberOfOffers) : std::string{},
             l.awardedValue ? text::format_scaled(l.awardedValue->cents, 2, 2) : std::string{},
             l.awardedValue ? l.awardedValue->currency : std::string{}, flag(l.cancelled), l.contractNoticeRef,
             flag(f != lotFlags.end() && f->second.criteriaFlagged)});
    }

    auto& agentsT = schema.table("Agents");
    auto& namesT = schema.table("Names");
    for (const auto& a : agents) {
        agentsT.rows.push_back({a.agentId.value(), std::string(to_string(a.agentId.kind())), a.street, a.zipcode,
                                a.city, a.department, a.country, std::to_string(a.memberOccurrenceIds.size())});
        for (const auto& n : a.names) namesT.rows.push_back({a.agentId.value(), n});
    }

    add_link_rows(schema.table("LotBuyers"), Role::Buyer, occurrences, provenance);
    add_link_rows(schema.table("LotSuppliers"), Role::Winner, occurrences, provenance);

    auto& critT = schema.table("Criteria");
    for (const auto& c : criteria) {
        std::string weight;
        if (c.weight) weight = c.weightIsNormalized ? text::format_scaled(c.weight->micros, 6, 2) : c.weight->to_string();
        critT.rows.push_back({std::to_string(c.lotId), std::to_string(c.ordinal), c.rawName,
                              std::string(to_string(c.criterionClass)), weight, flag(c.weightIsNormalized)});
    }

    for (auto& t : schema.tables) t.sort_by_key();
    if (auto problems = verify_integrity(schema); !problems.empty()) {
        std::string msg = "output schema integrity violated:";
        for (std::size_t i = 0; i < problems.size() && i < 20; ++i) msg += "\n  " + problems[i];
        throw InvariantViolation(msg);
    }
    return schema;
}

std::vector<std::string> verify_integrity(const OutputSchema& schema) {
    std::vector<std::string> problems;
    std::map<std::string, std::set<std::string>> keys;
    for (const auto& t : schema.tables) {
        std::vector<std::size_t> keyIdx;
        for (const auto& k : t.primaryKey) keyIdx.push_back(t.column_index(k));
        std::set<std::vector<std::string>> seen;
        for (const auto& row : t.rows) {
            if (row.size() != t.columns.size()) {
                problems.push_back(t.name + ": row width " + std::to_string(row.size()));
                continue;
            }
            std::vector<std::string> key;
            for (auto i : keyIdx) key.push_back(row[i]);
            if (!seen.insert(key).second) problems.push_back(t.name + ": duplicate key " + text::join(key, ","));
            for (std::size_t i = 0; i < row.size(); ++i)
                if (!t.columns[i].nullable && row[i].empty() && t.columns[i].type != ColumnType::Text)
                    problems.push_back(t.name + ": NULL in " + t.columns[i].name);
            if (keyIdx.size() == 1) keys[t.name].insert(row[keyIdx[0]]);
        }
    }
    for (const auto& t : schema.tables) {
        for (const auto& fk : t.foreignKeys) {
            const auto ci = t.column_index(fk.column);
            const auto& target = keys[fk.table];
            for (const auto& row : t.rows)
                if (!target.count(row[ci]))
                    problems.push_back(t.name + "." + fk.column + " -> " + fk.table + ": dangling '" + row[ci] + "'");
        }
    }
    return problems;
}

void write_csv(const OutputSchema& schema, const std::filesystem::path& directory) {
    std::filesystem::create_directories(directory);
    for (const auto& t : schema.tables) csv::write_file(directory / (t.name + ".csv"), t.header(), t.rows);
}

OutputSchema read_csv(const std::filesystem::path& directory) {
    auto schema = empty_schema();
    csv::Dialect d;
    d.multiline = true;
    for (auto& t : schema.tables) {
        const auto file = csv::read_file(directory / (t.name + ".csv"), d);
        if (file.header != t.header()) throw InputError(t.name + ".csv: unexpected header");
        if (!file.skipped.empty()) throw InputError(t.name + ".csv: malformed line " + std::to_string(file.skipped[0].line));
        t.rows = file.rows;
    }
    return schema;
}

std::string sql_dump(const OutputSchema& schema) {
    std::ostringstream out;
    out << "BEGIN TRANSACTION;\n";
    for (const auto& t : schema.tables) {
        out << "CREATE TABLE " << t.name << " (\n";
        for (const auto& c : t.columns) {
            out << "  " << c.name << ' ' << sql_type(c.type);
            if (!c.nullable) out << " NOT NULL";
            out << ",\n";
        }
        out << "  PRIMARY KEY (" << text::join(t.primaryKey, ", ") << ")";
        for (const auto& fk : t.foreignKeys)
            out << ",\n  FOREIGN KEY (" << fk.column << ") REFERENCES " << fk.table << " (" << fk.refColumn << ")";
        out << "\n);\n";
    }
    for (const auto& t : schema.tables) {
        const auto cols = text::join(t.header(), ", ");
        for (const auto& row : t.rows) {
            out << "INSERT INTO " << t.name << " (" << cols << ") VALUES (";
            for (std::size_t i = 0; i < row.size(); ++i) {
                if (i) out << ", ";
                out << sql_literal(row[i], t.columns[i]);
            }
            out << ");\n";
        }
    }
    out << "COMMIT;\n";
    return out.str();
}

void write_sql_dump(const OutputSchema& schema, const std::filesystem::path& path) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw InputError("cannot write " + path.string());
    out << sql_dump(schema);
    out.flush();
    if (!out) throw InputError("write failed for " + path.string());
}

std::map<std::string, std::vector<std::vector<std::string>>> parse_sql_inserts(const std::string& dump) {
    std::map<std::string, std::vector<std::vector<std::string>>> out;
    static const std::string kInsert = "INSERT INTO ";
    std::size_t pos = 0;
    while ((pos = dump.find(kInsert, pos)) != std::string::npos) {
        if (pos > 0 && dump[pos - 1] != '\n') {
            pos += kInsert.size();
            continue;
        }
        pos += kInsert.size();
        const auto nameEnd = dump.find(' ', pos);
        const auto table = dump.substr(pos, nameEnd - pos);
        pos = dump.find(") VALUES (", nameEnd);
        if (pos == std::string::npos) throw InputError("bad INSERT for " + table);
        pos += 10;
        std::vector<std::string> row;
        for (;;) {
            if (dump.compare(pos, 4, "NULL") == 0) {
                row.emplace_back();
                pos += 4;
            } else if (dump[pos] == '\'') {
                std::string v;
                ++pos;
                for (;;) {
                    if (dump[pos] == '\'') {
                        if (pos + 1 < dump.size() && dump[pos + 1] == '\'') {
                            v += '\'';
                            pos += 2;
                            continue;
                        }
                        ++pos;
                        break;
                    }
                    v += dump[pos++];
                }
                row.push_back(std::move(v));
            } else {
                const auto end = dump.find_first_of(",)", pos);
                row.push_back(dump.substr(pos, end - pos));
                pos = end;
            }
            if (dump.compare(pos, 2, ", ") == 0) {
                pos += 2;
                continue;
            }
            if (dump[pos] == ')') {
                ++pos;
                break;
            }
            throw InputError("bad INSERT values for " + table);
        }
        out[table].push_back(std::move(row));
    }
    return out;
}

}  // namespace foppa::emit
