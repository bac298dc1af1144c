#include "foppa/pipeline.hpp"

#include <algorithm>
#include <unordered_map>

#include "foppa/csv.hpp"
#include "foppa/text.hpp"

namespace foppa::pipeline {

namespace {

using Rows = std::vector<std::vector<std::string>>;

const csv::Dialect kCheckpointDialect{',', true};

std::string flag(bool b) { return b ? "1" : "0"; }

std::string opt_id(const std::optional<Identifier>& id) { return id ? id->render() : std::string{}; }

std::optional<Identifier> parse_opt_id(const std::string& s) {
    if (s.empty()) return std::nullopt;
    return Identifier::parse(s);
}

// Column accessor over one checkpoint file, failing loudly on corruption.
class Reader {
public:
    Reader(const std::filesystem::path& path) : path_(path) {
        if (!std::filesystem::exists(path)) throw ConfigError("checkpoint file missing: " + path.string());
        table_ = csv::read_file(path, kCheckpointDialect);
        if (!table_.skipped.empty())
            throw InputError(path.string() + ":" + std::to_string(table_.skipped.front().line) +
                             ": corrupt checkpoint line");
    }

    std::size_t size() const { return table_.rows.size(); }
    void select(std::size_t row) { row_ = row; }

    const std::string& str(const std::string& column) const {
        return table_.rows[row_][table_.require_column(column)];
    }
    std::int64_t integer(const std::string& column) const {
        auto v = text::parse_int(str(column));
        if (!v) fail(column);
        return *v;
    }
    std::optional<std::int64_t> opt_integer(const std::string& column) const {
        if (str(column).empty()) return std::nullopt;
        return integer(column);
    }
    double real(const std::string& column) const {
        auto v = text::parse_double(str(column));
        if (!v) fail(column);
        return *v;
    }
    bool boolean(const std::string& column) const { return str(column) == "1"; }
    std::optional<Date> date(const std::string& column) const {
        if (str(column).empty()) return std::nullopt;
        auto d = Date::parse(str(column));
        if (!d) fail(column);
        return d;
    }

private:
    [[noreturn]] void fail(const std::string& column) const {
        throw InputError(path_.string() + ": bad value in column " + column + ": " + str(column));
    }

    std::filesystem::path path_;
    csv::Table table_;
    std::size_t row_ = 0;
};

std::optional<ingest::RejectReason> parse_reject(const std::string& s) {
    using R = ingest::RejectReason;
    for (auto r : {R::MissingNoticeId, R::MissingLotNumber, R::BadPublicationDate, R::OutOfPeriod, R::DuplicateLot})
        if (ingest::to_string(r) == s) return r;
    return std::nullopt;
}

evaluate::Snapshot snapshot_of(const std::vector<AgentOccurrence>& occurrences) {
    evaluate::Snapshot s;
    for (const auto& o : occurrences)
        if (o.identifier) s.emplace(o.occurrenceId, o.identifier);
    return s;
}

evaluate::Snapshot separation_snapshot(const std::vector<AgentOccurrence>& occurrences) {
    evaluate::Snapshot s;
    for (const auto& o : occurrences)
        if (auto id = strict_declared(o.declaredSiret)) s.emplace(o.occurrenceId, id);
    return s;
}

void say(std::ostream* log, const std::string& line) {
    if (log) *log << line << "\n";
}

}  // namespace

std::string_view to_string(Stage stage) {
    switch (stage) {
    case Stage::Ingest: return "ingest";
    case Stage::Criteria: return "criteria";
    case Stage::Normalize: return "normalize";
    case Stage::Identify: return "identify";
    case Stage::Merge: return "merge";
    case Stage::Emit: return "emit";
    case Stage::Evaluate: return "evaluate";
    }
    return "";
}

std::optional<Stage> parse_stage(std::string_view text) {
    for (auto s : all_stages())
        if (to_string(s) == text) return s;
    return std::nullopt;
}

const std::vector<Stage>& all_stages() {
    static const std::vector<Stage> stages{Stage::Ingest, Stage::Criteria, Stage::Normalize, Stage::Identify,
                                           Stage::Merge,  Stage::Emit,     Stage::Evaluate};
    return stages;
}

bool operator==(const State& a, const State& b) {
    auto sameRejects = std::equal(a.rejected.begin(), a.rejected.end(), b.rejected.begin(), b.rejected.end(),
                                  [](const auto& x, const auto& y) {
                                      return x.sourceFile == y.sourceFile && x.sourceLine == y.sourceLine &&
                                             x.reason == y.reason;
                                  });
    auto sameSkips = std::equal(a.skipped.begin(), a.skipped.end(), b.skipped.begin(), b.skipped.end(),
                                [](const auto& x, const auto& y) {
                                    return x.first == y.first && x.second.line == y.second.line &&
                                           x.second.reason == y.second.reason;
                                });
    const auto& sa = a.normalizeStats;
    const auto& sb = b.normalizeStats;
    return a.completed == b.completed && a.lots == b.lots && a.occurrences == b.occurrences &&
           a.criteria == b.criteria && a.criteriaFlagged == b.criteriaFlagged && sameRejects && sameSkips &&
           a.occurrencesBeforeSplit == b.occurrencesBeforeSplit && sa.zipcodesFilled == sb.zipcodesFilled &&
           sa.invalidDeclaredSirets == sb.invalidDeclaredSirets && sa.siretKeys == sb.siretKeys &&
           a.matchLog == b.matchLog && a.clusters == b.clusters && a.snapshots == b.snapshots;
}

const registry::Registry& Resources::registry() {
    if (!registry_)
        registry_ = std::make_unique<registry::Registry>(
            registry::Registry::load(config_.inputs.entities, config_.inputs.facilities, config_.registryColumns,
                                     config_.ingest.dialect, config_.match.activityPrefixLength));
    return *registry_;
}

const normalize::PostalTable& Resources::postal() {
    if (!postal_) {
        postal_ = std::make_unique<normalize::PostalTable>();
        if (!config_.inputs.postal.empty())
            *postal_ = normalize::PostalTable::load(config_.inputs.postal, config_.ingest.dialect,
                                                    config_.postalCityColumn, config_.postalZipColumn);
    }
    return *postal_;
}

const registry::ActivityTable* Resources::activity() {
    if (!activityLoaded_) {
        activityLoaded_ = true;
        if (!config_.inputs.activity.empty())
            activity_ = std::make_unique<registry::ActivityTable>(registry::ActivityTable::load(config_.inputs.activity));
    }
    return activity_.get();
}

const criteria::Lexicon& Resources::lexicon() {
    if (!lexicon_)
        lexicon_ = std::make_unique<criteria::Lexicon>(config_.inputs.lexicon.empty()
                                                           ? criteria::Lexicon::french_default()
                                                           : criteria::Lexicon::load(config_.inputs.lexicon));
    return *lexicon_;
}

std::optional<Identifier> strict_declared(std::string_view raw) {
    if (!text::is_ascii_digits(raw)) return std::nullopt;
    if (raw.size() == 14) return Identifier::full_siret(std::string(raw));
    if (raw.size() == 9) return Identifier::siren_only(std::string(raw));
    return std::nullopt;
}

State run_ingest(const PipelineConfig& config) {
    auto result = ingest::ingest_tables(config.inputs.ted, config.ingest);
    State s;
    s.completed = Stage::Ingest;
    s.lots = std::move(result.lots);
    s.occurrences = std::move(result.occurrences);
    s.rejected = std::move(result.rejected);
    s.skipped = std::move(result.skipped);
    s.occurrencesBeforeSplit = result.occurrencesBeforeSplit;
    s.snapshots[kSeparation] = separation_snapshot(s.occurrences);
    return s;
}

void run_criteria(State& state, const PipelineConfig& config, Resources& res) {
    state.criteria.clear();
    state.criteriaFlagged.clear();
    const auto& lexicon = res.lexicon();
    for (const auto& lot : state.lots) {
        auto lc = criteria::process_lot(lot.lotId, lot.criteriaNames, lot.criteriaWeights, lot.priceWeight,
                                        config.ingest.separators, lexicon);
        if (lc.flagged) state.criteriaFlagged.insert(lot.lotId);
        for (auto& c : lc.criteria) state.criteria.push_back(std::move(c));
    }
    state.completed = Stage::Criteria;
}

void run_normalize(State& state, const PipelineConfig& config, Resources& res) {
    state.normalizeStats = normalize::normalize_occurrences(state.occurrences, res.postal(), config.address);
    state.snapshots[kNormalization] = snapshot_of(state.occurrences);
    state.completed = Stage::Normalize;
}

void run_identify(State& state, const PipelineConfig& config, Resources& res) {
    const auto& reg = res.registry();
    const auto* activity = res.activity();
    std::unordered_map<LotId, const LotRecord*> lots;
    for (const auto& l : state.lots) lots.emplace(l.lotId, &l);

    std::vector<std::size_t> pending;
    std::vector<identify::MatchQuery> queries;
    for (std::size_t i = 0; i < state.occurrences.size(); ++i) {
        const auto& o = state.occurrences[i];
        if (o.identifier) continue;
        auto it = lots.find(o.lotId);
        pending.push_back(i);
        queries.push_back(identify::make_query(o, it == lots.end() ? nullptr : it->second, activity));
    }
    const auto results = identify::identify_all(queries, reg, config.match, config.jobs);

    state.matchLog.clear();
    for (std::size_t k = 0; k < pending.size(); ++k) {
        auto& o = state.occurrences[pending[k]];
        if (results[k].identifier) {
            o.identifier = results[k].identifier;
            o.idSource = IdSource::Identified;
        }
        state.matchLog.push_back({o.occurrenceId, results[k]});
    }
    state.snapshots[kIdentification] = snapshot_of(state.occurrences);
    state.completed = Stage::Identify;
}

void run_merge(State& state, const PipelineConfig& config) {
    auto result = merge::merge_occurrences(state.occurrences, config.merge, config.jobs);
    state.clusters = std::move(result.clusters);
    state.snapshots[kClustering] = snapshot_of(state.occurrences);
    state.completed = Stage::Merge;
}

emit::OutputSchema run_emit(State& state, const PipelineConfig& config) {
    const auto agents = merge::build_agents(state.occurrences);
    std::map<LotId, emit::LotFlags> flags;
    for (auto id : state.criteriaFlagged) flags[id].criteriaFlagged = true;
    std::map<OccurrenceId, emit::OccurrenceProvenance> provenance;
    for (const auto& c : state.clusters)
        for (auto m : c.members) provenance[m].caseKind = std::string(merge::to_string(c.caseKind));

    auto schema = emit::build_tables(state.lots, agents, state.occurrences, state.criteria, flags, provenance);
    emit::write_csv(schema, config.output / "tables");
    emit::write_sql_dump(schema, config.output / "foppa.sql");
    state.completed = Stage::Emit;
    return schema;
}

std::set<OccurrenceId> known_siret_occurrences(const State& state) {
    std::set<OccurrenceId> known;
    for (const auto& o : state.occurrences) {
        auto id = registry::validate_siret(o.declaredSiret);
        if (id && id->kind() == IdKind::FullSiret) known.insert(o.occurrenceId);
    }
    return known;
}

MaskedRun mask_and_rerun(const State& state, const std::set<OccurrenceId>& masked, const PipelineConfig& config,
                         Resources& res) {
    MaskedRun run;
    run.masked = masked;
    for (const auto& o : state.occurrences)
        if (masked.count(o.occurrenceId))
            if (auto id = registry::validate_siret(o.declaredSiret)) run.truth.emplace(o.occurrenceId, *id);

    State& s = run.state;
    s.completed = Stage::Criteria;
    s.lots = state.lots;
    s.criteria = state.criteria;
    s.criteriaFlagged = state.criteriaFlagged;
    s.rejected = state.rejected;
    s.skipped = state.skipped;
    s.occurrencesBeforeSplit = state.occurrencesBeforeSplit;
    s.occurrences.reserve(state.occurrences.size());
    for (const auto& o : state.occurrences) {
        // Keep only what ingest produced.
        AgentOccurrence fresh;
        fresh.occurrenceId = o.occurrenceId;
        fresh.lotId = o.lotId;
        fresh.role = o.role;
        fresh.rawName = o.rawName;
        fresh.street = o.street;
        fresh.zipcode = o.zipcode;
        fresh.city = o.city;
        fresh.country = o.country;
        fresh.splitConflict = o.splitConflict;
        if (!masked.count(o.occurrenceId)) fresh.declaredSiret = o.declaredSiret;
        s.occurrences.push_back(std::move(fresh));
    }
    s.snapshots[kSeparation] = separation_snapshot(s.occurrences);
    run_normalize(s, config, res);
    run_identify(s, config, res);
    run_merge(s, config);

    // Audit: a masked occurrence must not show up in the declaration-based
    // snapshots nor carry a declaration-derived identifier.
    std::set<OccurrenceId> leaks;
    for (auto id : evaluate::masking_leaks(s.occurrences, masked)) leaks.insert(id);
    for (const char* stage : {kSeparation, kNormalization})
        for (const auto& [occ, id] : s.snapshots[stage])
            if (masked.count(occ)) leaks.insert(occ);
    run.leaks.assign(leaks.begin(), leaks.end());
    return run;
}

evaluate::EvaluationReport run_evaluate(State& state, const PipelineConfig& config, Resources& res, bool mask) {
    evaluate::Truth truth;
    if (!config.inputs.truth.empty()) truth = evaluate::load_truth(config.inputs.truth);

    evaluate::EvaluationReport report;
    const State* eval = &state;
    MaskedRun masked;
    if (mask) {
        masked = mask_and_rerun(state, known_siret_occurrences(state), config, res);
        for (const auto& [occ, id] : masked.truth) truth.emplace(occ, id);
        eval = &masked.state;
        report.masked = true;
        report.maskingLeaks = masked.leaks.size();
    }

    // Restrict truth to occurrences that exist in this run.
    std::set<OccurrenceId> present;
    for (const auto& o : eval->occurrences) present.insert(o.occurrenceId);
    std::erase_if(truth, [&](const auto& kv) { return !present.count(kv.first); });
    report.truthOccurrences = truth.size();

    auto snap = [&](const char* name) {
        auto it = eval->snapshots.find(name);
        return it == eval->snapshots.end() ? evaluate::Snapshot{} : it->second;
    };
    const auto identification = snap(kIdentification);
    const auto clustering = snap(kClustering);
    report.identification = evaluate::outcome_distribution(eval->occurrences, identification, truth);
    report.afterClustering = evaluate::outcome_distribution(eval->occurrences, clustering, truth);

    const std::vector<std::pair<std::string, evaluate::Snapshot>> stages{
        {"After Separation", snap(kSeparation)},
        {"After Normalization", snap(kNormalization)},
        {"After Identification", identification},
        {"After Clustering", clustering}};
    report.stagesStrict = evaluate::stage_accounting(stages, truth, false);
    report.stagesEntity = evaluate::stage_accounting(stages, truth, true);

    report.clusterSizes = evaluate::cluster_size_distribution(eval->clusters);
    report.distinctIdentifiers = evaluate::distinct_identifier_distribution(eval->clusters, identification);
    report.clusteringQuality = evaluate::clustering_outcomes(eval->clusters, truth);

    std::map<std::string, std::vector<OccurrenceId>> byAgent;
    for (const auto& [occ, id] : truth) byAgent[id.value()].push_back(occ);
    const auto clusteringIndex = evaluate::Clustering::from(eval->clusters);
    std::vector<double> conc, single;
    for (const auto& [siret, occs] : byAgent) {
        if (auto c = evaluate::concentration_ratio(occs, clusteringIndex)) conc.push_back(*c);
        if (auto s = evaluate::singleton_ratio(occs, clusteringIndex)) single.push_back(*s);
    }
    report.concentration = evaluate::ratio_distribution(conc);
    report.singleton = evaluate::ratio_distribution(single);

    for (const auto& e : eval->matchLog) ++report.failureStages[std::string(identify::to_string(e.result.failure))];

    if (!config.inputs.contractNotices.empty()) {
        const auto table = csv::read_file(config.inputs.contractNotices, config.ingest.dialect);
        const auto col = table.require_column(config.contractNoticeColumn);
        std::set<std::string> contracts;
        for (const auto& row : table.rows)
            if (!text::trim(row[col]).empty()) contracts.emplace(text::trim(row[col]));
        std::map<std::string, std::string> awards;
        for (const auto& lot : eval->lots) {
            auto& ref = awards[lot.noticeId];
            if (ref.empty()) ref = lot.contractNoticeRef;
        }
        report.coverage = evaluate::notice_coverage(contracts, awards);
    }

    const auto dir = config.output / (mask ? "report_masked" : "report");
    evaluate::write_report(report, dir);

    if (config.samplePerRole > 0) {
        // Labeling sample drawn among occurrences without a usable declared SIRET.
        const auto known = known_siret_occurrences(state);
        std::vector<AgentOccurrence> pool;
        for (const auto& o : state.occurrences)
            if (!known.count(o.occurrenceId)) pool.push_back(o);
        const auto sample = evaluate::sample_ground_truth(pool, config.samplePerRole, config.seed);
        std::map<OccurrenceId, const AgentOccurrence*> byId;
        for (const auto& o : pool) byId.emplace(o.occurrenceId, &o);
        Rows rows;
        for (auto id : sample.occurrences) {
            const auto* o = byId.at(id);
            rows.push_back({std::to_string(id), std::string(to_string(o->role)), o->rawName, o->city, ""});
        }
        csv::write_file(dir / "labeling_sample.csv", {"occurrenceId", "role", "name", "city", "siret"}, rows);
    }
    return report;
}

std::filesystem::path checkpoint_dir(const PipelineConfig& config, Stage stage) {
    return config.output / "checkpoints" / std::string(to_string(stage));
}

void write_checkpoint(const State& s, const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir);

    std::string snapshotStages;
    for (const auto& [name, snap] : s.snapshots) snapshotStages += (snapshotStages.empty() ? "" : "|") + name;
    csv::write_file(dir / "meta.csv", {"key", "value"},
                    {{"stage", std::string(to_string(s.completed))},
                     {"occurrencesBeforeSplit", std::to_string(s.occurrencesBeforeSplit)},
                     {"zipcodesFilled", std::to_string(s.normalizeStats.zipcodesFilled)},
                     {"invalidDeclaredSirets", std::to_string(s.normalizeStats.invalidDeclaredSirets)},
                     {"siretKeys", std::to_string(s.normalizeStats.siretKeys)},
                     {"snapshots", snapshotStages}});

    Rows rows;
    for (const auto& l : s.lots)
        rows.push_back({std::to_string(l.lotId), l.noticeId, l.lotNumber, l.publicationDate.to_string(),
                        l.awardDate ? l.awardDate->to_string() : "",
                        l.contractType ? std::string(to_string(*l.contractType)) : "", l.activityCode,
                        l.numberOfOffers ? std::to_string(*l.numberOfOffers) : "",
                        l.awardedValue ? std::to_string(l.awardedValue->cents) : "",
                        l.awardedValue ? l.awardedValue->currency : "", flag(l.cancelled), l.contractNoticeRef,
                        l.criteriaNames, l.criteriaWeights, l.priceWeight, l.sourceFile,
                        std::to_string(l.sourceLine)});
    csv::write_file(dir / "lots.csv",
                    {"lotId", "noticeId", "lotNumber", "publicationDate", "awardDate", "contractType", "activityCode",
                     "numberOfOffers", "awardedCents", "currency", "cancelled", "contractNoticeRef", "criteriaNames",
                     "criteriaWeights", "priceWeight", "sourceFile", "sourceLine"},
                    rows);

    rows.clear();
    for (const auto& o : s.occurrences)
        rows.push_back({std::to_string(o.occurrenceId), std::to_string(o.lotId), std::string(to_string(o.role)),
                        o.rawName, o.street, o.zipcode, o.city, o.country, o.declaredSiret, flag(o.splitConflict),
                        o.normalizedName, o.normStreet, o.normZipcode, o.normCity, o.department,
                        flag(o.zipcodeFilled), o.agentKey, opt_id(o.identifier), std::string(to_string(o.idSource))});
    csv::write_file(dir / "occurrences.csv",
                    {"occurrenceId", "lotId", "role", "rawName", "street", "zipcode", "city", "country",
                     "declaredSiret", "splitConflict", "normalizedName", "normStreet", "normZipcode", "normCity",
                     "department", "zipcodeFilled", "agentKey", "identifier", "idSource"},
                    rows);

    rows.clear();
    for (const auto& c : s.criteria)
        rows.push_back({std::to_string(c.lotId), std::to_string(c.ordinal), c.rawName,
                        std::string(to_string(c.criterionClass)), c.weight ? std::to_string(c.weight->micros) : "",
                        flag(c.weightIsNormalized)});
    csv::write_file(dir / "criteria.csv",
                    {"lotId", "ordinal", "rawName", "criterionClass", "weightMicros", "weightIsNormalized"}, rows);

    rows.clear();
    for (auto id : s.criteriaFlagged) rows.push_back({std::to_string(id)});
    csv::write_file(dir / "criteria_flags.csv", {"lotId"}, rows);

    rows.clear();
    for (const auto& r : s.rejected)
        rows.push_back({"reject", r.sourceFile, std::to_string(r.sourceLine), std::string(ingest::to_string(r.reason))});
    for (const auto& [file, m] : s.skipped) rows.push_back({"malformed", file, std::to_string(m.line), m.reason});
    csv::write_file(dir / "rejects.csv", {"kind", "sourceFile", "sourceLine", "reason"}, rows);

    rows.clear();
    for (const auto& e : s.matchLog) {
        const auto& r = e.result;
        rows.push_back({std::to_string(e.occurrenceId), opt_id(r.identifier),
                        std::string(identify::to_string(r.failure)), std::to_string(r.blocked),
                        std::to_string(r.afterName), std::to_string(r.afterAddress),
                        r.best ? std::to_string(r.best->facility) : "",
                        r.best ? text::format_double(r.best->nameSimilarity) : "",
                        r.best ? text::format_double(r.best->addressScore) : "",
                        r.best ? std::to_string(r.best->presenceMask) : ""});
    }
    csv::write_file(dir / "match_log.csv",
                    {"occurrenceId", "identifier", "failure", "blocked", "afterName", "afterAddress", "facility",
                     "nameSimilarity", "addressScore", "presenceMask"},
                    rows);

    rows.clear();
    for (const auto& c : s.clusters) {
        std::vector<std::string> members;
        for (auto m : c.members) members.push_back(std::to_string(m));
        rows.push_back({std::to_string(c.clusterId), std::string(merge::to_string(c.caseKind)),
                        opt_id(c.resolvedIdentifier), text::join(members, "|")});
    }
    csv::write_file(dir / "clusters.csv", {"clusterId", "caseKind", "resolvedIdentifier", "members"}, rows);

    rows.clear();
    for (const auto& [name, snap] : s.snapshots)
        for (const auto& [occ, id] : snap) rows.push_back({name, std::to_string(occ), opt_id(id)});
    csv::write_file(dir / "snapshots.csv", {"stage", "occurrenceId", "identifier"}, rows);
}

State read_checkpoint(const std::filesystem::path& dir) {
    if (!std::filesystem::is_directory(dir))
        throw ConfigError("missing checkpoint " + dir.string() + " (run the previous stage first)");
    State s;

    Reader meta(dir / "meta.csv");
    std::map<std::string, std::string> kv;
    for (std::size_t i = 0; i < meta.size(); ++i) {
        meta.select(i);
        kv[meta.str("key")] = meta.str("value");
    }
    auto stage = parse_stage(kv["stage"]);
    if (!stage) throw InputError(dir.string() + ": unknown stage '" + kv["stage"] + "'");
    s.completed = *stage;
    auto num = [&](const std::string& key) {
        auto v = text::parse_int(kv[key]);
        if (!v) throw InputError(dir.string() + ": bad meta value " + key);
        return static_cast<std::size_t>(*v);
    };
    s.occurrencesBeforeSplit = num("occurrencesBeforeSplit");
    s.normalizeStats.zipcodesFilled = num("zipcodesFilled");
    s.normalizeStats.invalidDeclaredSirets = num("invalidDeclaredSirets");
    s.normalizeStats.siretKeys = num("siretKeys");
    for (const auto& name : text::split(kv["snapshots"], '|'))
        if (!name.empty()) s.snapshots[name];

    Reader lots(dir / "lots.csv");
    for (std::size_t i = 0; i < lots.size(); ++i) {
        lots.select(i);
        LotRecord l;
        l.lotId = lots.integer("lotId");
        l.noticeId = lots.str("noticeId");
        l.lotNumber = lots.str("lotNumber");
        l.publicationDate = *lots.date("publicationDate");
        l.awardDate = lots.date("awardDate");
        if (!lots.str("contractType").empty()) l.contractType = parse_contract_type(lots.str("contractType"));
        l.activityCode = lots.str("activityCode");
        l.numberOfOffers = lots.opt_integer("numberOfOffers");
        if (auto cents = lots.opt_integer("awardedCents")) l.awardedValue = Money{*cents, lots.str("currency")};
        l.cancelled = lots.boolean("cancelled");
        l.contractNoticeRef = lots.str("contractNoticeRef");
        l.criteriaNames = lots.str("criteriaNames");
        l.criteriaWeights = lots.str("criteriaWeights");
        l.priceWeight = lots.str("priceWeight");
        l.sourceFile = lots.str("sourceFile");
        l.sourceLine = lots.integer("sourceLine");
        s.lots.push_back(std::move(l));
    }

    Reader occ(dir / "occurrences.csv");
    for (std::size_t i = 0; i < occ.size(); ++i) {
        occ.select(i);
        AgentOccurrence o;
        o.occurrenceId = occ.integer("occurrenceId");
        o.lotId = occ.integer("lotId");
        auto role = parse_role(occ.str("role"));
        if (!role) throw InputError(dir.string() + ": bad role " + occ.str("role"));
        o.role = *role;
        o.rawName = occ.str("rawName");
        o.street = occ.str("street");
        o.zipcode = occ.str("zipcode");
        o.city = occ.str("city");
        o.country = occ.str("country");
        o.declaredSiret = occ.str("declaredSiret");
        o.splitConflict = occ.boolean("splitConflict");
        o.normalizedName = occ.str("normalizedName");
        o.normStreet = occ.str("normStreet");
        o.normZipcode = occ.str("normZipcode");
        o.normCity = occ.str("normCity");
        o.department = occ.str("department");
        o.zipcodeFilled = occ.boolean("zipcodeFilled");
        o.agentKey = occ.str("agentKey");
        o.identifier = parse_opt_id(occ.str("identifier"));
        o.idSource = parse_id_source(occ.str("idSource"));
        s.occurrences.push_back(std::move(o));
    }

    Reader crit(dir / "criteria.csv");
    for (std::size_t i = 0; i < crit.size(); ++i) {
        crit.select(i);
        Criterion c;
        c.lotId = crit.integer("lotId");
        c.ordinal = static_cast<int>(crit.integer("ordinal"));
        c.rawName = crit.str("rawName");
        auto cls = parse_criterion_class(crit.str("criterionClass"));
        if (!cls) throw InputError(dir.string() + ": bad criterion class " + crit.str("criterionClass"));
        c.criterionClass = *cls;
        if (auto w = crit.opt_integer("weightMicros")) c.weight = Weight{*w};
        c.weightIsNormalized = crit.boolean("weightIsNormalized");
        s.criteria.push_back(std::move(c));
    }

    Reader flags(dir / "criteria_flags.csv");
    for (std::size_t i = 0; i < flags.size(); ++i) {
        flags.select(i);
        s.criteriaFlagged.insert(flags.integer("lotId"));
    }

    Reader rejects(dir / "rejects.csv");
    for (std::size_t i = 0; i < rejects.size(); ++i) {
        rejects.select(i);
        const auto line = static_cast<std::size_t>(rejects.integer("sourceLine"));
        if (rejects.str("kind") == "reject") {
            auto reason = parse_reject(rejects.str("reason"));
            if (!reason) throw InputError(dir.string() + ": bad reject reason " + rejects.str("reason"));
            s.rejected.push_back({rejects.str("sourceFile"), line, *reason});
        } else {
            s.skipped.push_back({rejects.str("sourceFile"), csv::MalformedLine{line, rejects.str("reason")}});
        }
    }

    Reader log(dir / "match_log.csv");
    for (std::size_t i = 0; i < log.size(); ++i) {
        log.select(i);
        MatchLogEntry e;
        e.occurrenceId = log.integer("occurrenceId");
        auto& r = e.result;
        r.identifier = parse_opt_id(log.str("identifier"));
        r.failure = identify::parse_failure_stage(log.str("failure"));
        r.blocked = static_cast<std::size_t>(log.integer("blocked"));
        r.afterName = static_cast<std::size_t>(log.integer("afterName"));
        r.afterAddress = static_cast<std::size_t>(log.integer("afterAddress"));
        if (!log.str("facility").empty()) {
            identify::CandidateScore best;
            best.facility = static_cast<std::uint32_t>(log.integer("facility"));
            best.nameSimilarity = log.real("nameSimilarity");
            best.addressScore = log.real("addressScore");
            best.presenceMask = static_cast<std::uint8_t>(log.integer("presenceMask"));
            r.best = best;
        }
        s.matchLog.push_back(std::move(e));
    }

    Reader clusters(dir / "clusters.csv");
    for (std::size_t i = 0; i < clusters.size(); ++i) {
        clusters.select(i);
        merge::AgentCluster c;
        c.clusterId = clusters.integer("clusterId");
        auto kind = merge::parse_case_kind(clusters.str("caseKind"));
        if (!kind) throw InputError(dir.string() + ": bad case kind " + clusters.str("caseKind"));
        c.caseKind = *kind;
        c.resolvedIdentifier = parse_opt_id(clusters.str("resolvedIdentifier"));
        for (const auto& m : text::split(clusters.str("members"), '|')) {
            auto v = text::parse_int(m);
            if (!v) throw InputError(dir.string() + ": bad cluster member " + m);
            c.members.push_back(*v);
        }
        s.clusters.push_back(std::move(c));
    }

    Reader snaps(dir / "snapshots.csv");
    for (std::size_t i = 0; i < snaps.size(); ++i) {
        snaps.select(i);
        s.snapshots[snaps.str("stage")].emplace(snaps.integer("occurrenceId"), parse_opt_id(snaps.str("identifier")));
    }
    return s;
}

State run_stages(const PipelineConfig& config, Stage from, Stage to, bool mask, std::ostream* log) {
    if (to < from) throw ConfigError("--stage-to comes before --stage-from");
    State state;
    if (from != Stage::Ingest) {
        const auto prev = static_cast<Stage>(static_cast<int>(from) - 1);
        state = read_checkpoint(checkpoint_dir(config, prev));
        if (state.completed != prev)
            throw ConfigError("checkpoint " + checkpoint_dir(config, prev).string() + " holds stage " +
                              std::string(to_string(state.completed)));
    }

    Resources res(config);
    for (auto stage : all_stages()) {
        if (stage < from || to < stage) continue;
        switch (stage) {
        case Stage::Ingest:
            state = run_ingest(config);
            say(log, "ingest: " + std::to_string(state.lots.size()) + " lots, " +
                         std::to_string(state.occurrences.size()) + " agent occurrences (" +
                         std::to_string(state.occurrencesBeforeSplit) + " before split), " +
                         std::to_string(state.rejected.size()) + " rows rejected, " +
                         std::to_string(state.skipped.size()) + " malformed lines skipped");
            break;
        case Stage::Criteria:
            run_criteria(state, config, res);
            say(log, "criteria: " + std::to_string(state.criteria.size()) + " criteria, " +
                         std::to_string(state.criteriaFlagged.size()) + " lots flagged");
            break;
        case Stage::Normalize:
            run_normalize(state, config, res);
            say(log, "normalize: " + std::to_string(state.normalizeStats.zipcodesFilled) + " zipcodes filled, " +
                         std::to_string(state.normalizeStats.invalidDeclaredSirets) + " invalid declared SIRETs");
            break;
        case Stage::Identify:
            run_identify(state, config, res);
            say(log, "identify: " + std::to_string(state.matchLog.size()) + " queries, " +
                         std::to_string(std::count_if(state.matchLog.begin(), state.matchLog.end(),
                                                      [](const auto& e) { return e.result.identifier.has_value(); })) +
                         " matched");
            break;
        case Stage::Merge:
            run_merge(state, config);
            say(log, "merge: " + std::to_string(state.clusters.size()) + " clusters");
            break;
        case Stage::Emit: {
            const auto schema = run_emit(state, config);
            say(log, "emit: " + std::to_string(schema.table("Agents").rows.size()) + " agents written to " +
                         (config.output / "tables").string());
            break;
        }
        case Stage::Evaluate: {
            const auto report = run_evaluate(state, config, res, mask);
            say(log, std::string("evaluate: report written") + (mask ? " (masked)" : "") + ", " +
                         std::to_string(report.truthOccurrences) + " truth occurrences");
            if (report.maskingLeaks)
                throw InvariantViolation("masking soundness: " + std::to_string(report.maskingLeaks) +
                                         " masked occurrences reached identification through their declaration");
            continue;  // no checkpoint: evaluation does not change the state
        }
        }
        write_checkpoint(state, checkpoint_dir(config, stage));
    }
    return state;
}

}  // namespace foppa::pipeline
