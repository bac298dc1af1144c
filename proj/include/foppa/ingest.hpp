#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "foppa/csv.hpp"
#include "foppa/types.hpp"

namespace foppa::ingest {

/// Semantic field name -> source column header.
using ColumnMap = std::map<std::string, std::string>;

/// Semantic fields a column map must provide.
const std::vector<std::string>& mandatory_fields();
/// Mapping for the TED award-notice CSV exports (2010 onwards).
ColumnMap default_ted_columns();

struct IngestConfig {
    csv::Dialect dialect;
    ColumnMap columns = default_ted_columns();
    std::vector<std::string> separators = {"---", " // ", "|"};
    std::vector<std::string> unsuccessfulMarkers = {"INFRUCTUEUX", "INFRUCTUEUSE", "SANS SUITE", "NON ATTRIBUE"};
    Date periodFrom{2010, 1, 1};
    Date periodTo{2020, 12, 31};
    std::string defaultCurrency = "EUR";
};

/// One source row keyed by semantic field. Fields whose column is absent
/// from the header are absent from the map.
struct RawLotRow {
    std::map<std::string, std::string> cells;
    std::string sourceFile;
    std::size_t sourceLine = 0;

    const std::string& get(const std::string& field) const;
};

struct ParsedTable {
    std::vector<RawLotRow> rows;
    std::vector<csv::MalformedLine> skipped;
};

/// Throws ConfigError when a mandatory column is missing from the header.
ParsedTable parse_table(std::istream& source, const IngestConfig& config, const std::string& sourceName = "");

enum class RejectReason { MissingNoticeId, MissingLotNumber, BadPublicationDate, OutOfPeriod, DuplicateLot };
std::string_view to_string(RejectReason reason);

struct BuildResult {
    std::optional<LotRecord> lot;
    std::optional<RejectReason> reject;
};

/// Types the row; lotId is left at 0 for the caller to assign.
BuildResult build_lot(const RawLotRow& row, const IngestConfig& config);

/// Subset of `knownSeparators` occurring in any value, longest first
/// (ties keep configured order).
std::vector<std::string> detect_separators(const std::vector<std::string>& values,
                                           const std::vector<std::string>& knownSeparators);

/// Splits `value` on any of `separators` (longest match wins; a separator made
/// of one repeated character also swallows further repeats). Parts are
/// trimmed and empty parts dropped.
std::vector<std::string> split_on_separators(std::string_view value, const std::vector<std::string>& separators);

/// Raw description of the agents of one role on one row.
struct AgentFields {
    std::string name;
    std::string street;
    std::string zipcode;
    std::string city;
    std::string country;
    std::string siret;
};

/// Splits jointly described agents. Non-empty name/street/zipcode/city fields
/// must all split into the same number k >= 2 of parts; otherwise one
/// occurrence with the unsplit fields is returned, flagged when any field did
/// contain a separator. Ids are left at 0.
std::vector<AgentOccurrence> split_joint_agents(const AgentFields& fields, Role role,
                                                const std::vector<std::string>& separators);

struct RejectedRow {
    std::string sourceFile;
    std::size_t sourceLine = 0;
    RejectReason reason;
};

struct IngestResult {
    std::vector<LotRecord> lots;
    std::vector<AgentOccurrence> occurrences;
    std::vector<RejectedRow> rejected;
    std::vector<std::pair<std::string, csv::MalformedLine>> skipped;
    std::size_t occurrencesBeforeSplit = 0;
};

/// Full ingest of several files in the given order: surrogate lot ids are
/// 1.. in row order, occurrence ids 1.. (buyers before winners per lot).
/// Rows whose (notice id, lot number) was already seen are rejected.
IngestResult ingest_tables(const std::vector<std::filesystem::path>& files, const IngestConfig& config);
IngestResult ingest_streams(std::vector<std::pair<std::string, std::istream*>> sources, const IngestConfig& config);

}  // namespace foppa::ingest
