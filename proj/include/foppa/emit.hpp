#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "foppa/merge.hpp"
#include "foppa/types.hpp"

namespace foppa::emit {

enum class ColumnType { Integer, Decimal, Text };

struct Column {
    std::string name;
    ColumnType type = ColumnType::Text;
    bool nullable = true;
};

struct ForeignKey {
    std::string column;
    std::string table;
    std::string refColumn;
};

/// One relational table; cells are text, "" is NULL for nullable columns.
struct Table {
    std::string name;
    std::vector<Column> columns;
    std::vector<std::string> primaryKey;
    std::vector<ForeignKey> foreignKeys;
    std::vector<std::vector<std::string>> rows;

    std::size_t column_index(const std::string& column) const;
    std::vector<std::string> header() const;
    /// Sorts rows by primary key (integers numerically, text bytewise).
    void sort_by_key();
    bool operator==(const Table& other) const { return name == other.name && rows == other.rows; }
};

/// Lots, Agents, Names, LotBuyers, LotSuppliers, Criteria, in that order.
struct OutputSchema {
    std::vector<Table> tables;
    const Table& table(const std::string& name) const;
    Table& table(const std::string& name);
};

/// Empty tables with their columns and keys.
OutputSchema empty_schema();

struct LotFlags {
    bool criteriaFlagged = false;
};

/// Provenance for link rows.
struct OccurrenceProvenance {
    std::string caseKind;
};

/// Builds all six tables. Link rows come from occurrence roles, duplicate
/// (lot, agent) pairs collapse onto the first occurrence. Throws
/// InvariantViolation listing dangling references.
OutputSchema build_tables(const std::vector<LotRecord>& lots, const std::vector<merge::CanonicalAgent>& agents,
                          const std::vector<AgentOccurrence>& occurrences, const std::vector<Criterion>& criteria,
                          const std::map<LotId, LotFlags>& lotFlags = {},
                          const std::map<OccurrenceId, OccurrenceProvenance>& provenance = {});

/// Referential-integrity and key-uniqueness problems, empty when sound.
std::vector<std::string> verify_integrity(const OutputSchema& schema);

/// One `<Table>.csv` per table (header, comma, RFC quoting).
void write_csv(const OutputSchema& schema, const std::filesystem::path& directory);
/// Reads the files written by write_csv back into a schema.
OutputSchema read_csv(const std::filesystem::path& directory);

/// CREATE TABLE statements with primary and foreign keys, then INSERTs in
/// primary-key order, inside one transaction.
void write_sql_dump(const OutputSchema& schema, const std::filesystem::path& path);
std::string sql_dump(const OutputSchema& schema);
/// Row values of every INSERT in a dump produced by sql_dump (NULL -> "").
std::map<std::string, std::vector<std::vector<std::string>>> parse_sql_inserts(const std::string& dump);

}  // namespace foppa::emit
