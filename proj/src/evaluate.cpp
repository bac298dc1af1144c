#include "foppa/evaluate.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <random>
#include <sstream>

#include "foppa/csv.hpp"
#include "foppa/normalize.hpp"
#include "foppa/registry.hpp"
#include "foppa/text.hpp"

namespace foppa::evaluate {

namespace {

constexpr std::array<MatchOutcome, 4> kOutcomes{MatchOutcome::Full, MatchOutcome::Partial, MatchOutcome::Incorrect,
                                                MatchOutcome::None};

std::string pct(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}

// Uniform integer in [0, bound) from raw 64-bit draws, independent of the
// standard library's distribution implementation.
std::uint64_t bounded(std::mt19937_64& rng, std::uint64_t bound) {
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
    std::uint64_t x;
    do x = rng();
    while (x >= limit);
    return x % bound;
}

Histogram make_histogram(std::vector<std::string> labels) {
    Histogram h;
    h.counts.assign(labels.size(), 0);
    h.labels = std::move(labels);
    return h;
}

const char* role_label(Role r) { return r == Role::Buyer ? "BUYER" : "WINNER"; }

}  // namespace

std::string_view to_string(MatchOutcome outcome) {
    switch (outcome) {
    case MatchOutcome::Full: return "FULL";
    case MatchOutcome::Partial: return "PARTIAL";
    case MatchOutcome::Incorrect: return "INCORRECT";
    case MatchOutcome::None: return "NONE";
    }
    return "";
}

MatchOutcome classify_outcome(const std::optional<Identifier>& predicted, const Identifier& truth) {
    if (!predicted || !predicted->is_registry_id()) return MatchOutcome::None;
    if (predicted->value() == truth.value()) return MatchOutcome::Full;
    if (predicted->siren() == truth.siren()) return MatchOutcome::Partial;
    return MatchOutcome::Incorrect;
}

Truth load_truth(const std::filesystem::path& path) {
    const auto table = csv::read_file(path);
    const auto idCol = table.require_column("occurrenceId");
    const auto siretCol = table.require_column("siret");
    Truth truth;
    for (std::size_t r = 0; r < table.rows.size(); ++r) {
        const auto& row = table.rows[r];
        const auto id = text::parse_int(row[idCol]);
        const auto siret = registry::validate_siret(row[siretCol]);
        if (!id || !siret || siret->kind() != IdKind::FullSiret)
            throw InputError(path.string() + ":" + std::to_string(table.rowLines[r]) + ": bad truth row");
        truth.insert_or_assign(*id, *siret);
    }
    return truth;
}

Sample sample_ground_truth(const std::vector<AgentOccurrence>& occurrences, std::size_t perRole, std::uint64_t seed) {
    // role -> agent key -> representative
    std::map<Role, std::map<std::string, OccurrenceId>> agents;
    for (const auto& o : occurrences) {
        const auto name = normalize::normalize_name(o.rawName);
        const auto city = normalize::normalize_name(o.city);
        if (name.empty() || city.empty()) continue;
        auto [it, inserted] = agents[o.role].emplace(name + '\x1f' + city, o.occurrenceId);
        if (!inserted) it->second = std::min(it->second, o.occurrenceId);
    }

    Sample sample;
    std::mt19937_64 rng(seed);
    for (Role role : {Role::Buyer, Role::Winner}) {
        std::vector<OccurrenceId> pool;
        for (const auto& [key, rep] : agents[role]) pool.push_back(rep);
        const std::size_t take = std::min(perRole, pool.size());
        if (take < perRole) sample.shortfall[role] = perRole - take;
        for (std::size_t i = 0; i < take; ++i)
            std::swap(pool[i], pool[i + bounded(rng, pool.size() - i)]);
        sample.occurrences.insert(sample.occurrences.end(), pool.begin(), pool.begin() + take);
    }
    std::sort(sample.occurrences.begin(), sample.occurrences.end());
    return sample;
}

Clustering Clustering::from(const std::vector<merge::AgentCluster>& clusters) {
    Clustering c;
    for (const auto& cl : clusters) {
        c.size[cl.clusterId] = cl.members.size();
        for (auto m : cl.members) c.clusterOf[m] = cl.clusterId;
    }
    return c;
}

std::optional<double> concentration_ratio(const std::vector<OccurrenceId>& agentOccurrences, const Clustering& c) {
    std::map<std::int64_t, std::size_t> perCluster;
    std::size_t total = 0;
    for (auto o : agentOccurrences) {
        auto it = c.clusterOf.find(o);
        if (it == c.clusterOf.end()) continue;
        ++perCluster[it->second];
        ++total;
    }
    if (total == 0) return std::nullopt;
    std::size_t best = 0;
    for (const auto& [id, n] : perCluster) best = std::max(best, n);
    return static_cast<double>(best) / static_cast<double>(total);
}

std::optional<double> singleton_ratio(const std::vector<OccurrenceId>& agentOccurrences, const Clustering& c) {
    std::size_t total = 0, singles = 0;
    for (auto o : agentOccurrences) {
        auto it = c.clusterOf.find(o);
        if (it == c.clusterOf.end()) continue;
        ++total;
        if (c.size.at(it->second) == 1) ++singles;
    }
    if (total == 0) return std::nullopt;
    return static_cast<double>(singles) / static_cast<double>(total);
}

std::size_t Histogram::total() const {
    std::size_t t = 0;
    for (auto c : counts) t += c;
    return t;
}

std::vector<double> Histogram::percentages() const {
    const auto t = total();
    std::vector<double> out;
    for (auto c : counts) out.push_back(t ? 100.0 * static_cast<double>(c) / static_cast<double>(t) : 0.0);
    return out;
}

Histogram cluster_size_distribution(const std::vector<merge::AgentCluster>& clusters) {
    auto h = make_histogram({"1", "2", "3", "4", "5", "6+"});
    for (const auto& c : clusters) ++h.counts[std::min<std::size_t>(c.members.size(), 6) - 1];
    return h;
}

Histogram distinct_identifier_distribution(const std::vector<merge::AgentCluster>& clusters,
                                           const std::map<OccurrenceId, std::optional<Identifier>>& before) {
    auto h = make_histogram({"0", "1", "2", "3", "4", "5+"});
    for (const auto& c : clusters) {
        std::set<std::string> ids;
        for (auto m : c.members) {
            auto it = before.find(m);
            if (it != before.end() && it->second && it->second->is_registry_id()) ids.insert(it->second->value());
        }
        ++h.counts[std::min<std::size_t>(ids.size(), 5)];
    }
    return h;
}

Histogram ratio_distribution(const std::vector<double>& ratios) {
    auto h = make_histogram({"[0.0,0.1)", "[0.1,0.2)", "[0.2,0.3)", "[0.3,0.4)", "[0.4,0.5)", "[0.5,0.6)",
                             "[0.6,0.7)", "[0.7,0.8)", "[0.8,0.9)", "[0.9,1.0)", "1.0"});
    for (double r : ratios) {
        if (r >= 1.0) {
            ++h.counts[10];
            continue;
        }
        // Ratios are quotients of small integers; nudge before flooring so
        // 0.3 lands in [0.3,0.4).
        const auto bin = static_cast<std::size_t>(std::max(0.0, r * 10.0 + 1e-9));
        ++h.counts[std::min<std::size_t>(bin, 9)];
    }
    return h;
}

std::size_t OutcomeCounts::total() const {
    std::size_t t = 0;
    for (auto c : counts) t += c;
    return t;
}

double OutcomeCounts::percent(MatchOutcome o) const {
    const auto t = total();
    return t ? 100.0 * static_cast<double>(counts[static_cast<std::size_t>(o)]) / static_cast<double>(t) : 0.0;
}

std::vector<StageRow> stage_accounting(const std::vector<std::pair<std::string, Snapshot>>& stages,
                                       const Truth& truth, bool entityLevel) {
    std::vector<StageRow> rows;
    for (const auto& [name, snapshot] : stages) {
        StageRow row;
        row.stage = name;
        for (const auto& [occ, trueId] : truth) {
            auto it = snapshot.find(occ);
            const auto outcome =
                classify_outcome(it == snapshot.end() ? std::nullopt : it->second, trueId);
            switch (outcome) {
            case MatchOutcome::Full: ++row.correct; break;
            case MatchOutcome::Partial: ++(entityLevel ? row.correct : row.incorrect); break;
            case MatchOutcome::Incorrect: ++row.incorrect; break;
            case MatchOutcome::None: ++row.missing; break;
            }
        }
        rows.push_back(row);
    }
    return rows;
}

std::optional<NoticeCoverage> notice_coverage(const std::set<std::string>& contractNoticeIds,
                                              const std::map<std::string, std::string>& awardNoticeRefs) {
    if (contractNoticeIds.empty() || awardNoticeRefs.empty()) return std::nullopt;
    std::set<std::string> cited;
    std::size_t orphanAwards = 0;
    for (const auto& [award, ref] : awardNoticeRefs) {
        if (!ref.empty()) cited.insert(ref);
        if (ref.empty() || !contractNoticeIds.count(ref)) ++orphanAwards;
    }
    std::size_t uncited = 0;
    for (const auto& c : contractNoticeIds)
        if (!cited.count(c)) ++uncited;
    NoticeCoverage cov;
    cov.unmatchedContractsPercent = 100.0 * static_cast<double>(uncited) / static_cast<double>(contractNoticeIds.size());
    cov.unmatchedAwardsPercent = 100.0 * static_cast<double>(orphanAwards) / static_cast<double>(awardNoticeRefs.size());
    return cov;
}

std::vector<OccurrenceId> masking_leaks(const std::vector<AgentOccurrence>& occurrences,
                                        const std::set<OccurrenceId>& masked) {
    std::vector<OccurrenceId> leaks;
    for (const auto& o : occurrences) {
        if (!masked.count(o.occurrenceId)) continue;
        if (!o.declaredSiret.empty() || o.idSource == IdSource::Declared || o.agentKey.rfind("S:", 0) == 0)
            leaks.push_back(o.occurrenceId);
    }
    return leaks;
}

std::map<Role, RoleOutcomes> outcome_distribution(const std::vector<AgentOccurrence>& occurrences,
                                                  const Snapshot& predicted, const Truth& truth) {
    std::map<Role, RoleOutcomes> out;
    // (role, true SIRET) -> outcome tallies
    std::map<std::pair<Role, std::string>, std::array<std::size_t, 4>> agents;
    for (const auto& o : occurrences) {
        auto t = truth.find(o.occurrenceId);
        if (t == truth.end()) continue;
        auto p = predicted.find(o.occurrenceId);
        const auto outcome = classify_outcome(p == predicted.end() ? std::nullopt : p->second, t->second);
        const auto idx = static_cast<std::size_t>(outcome);
        ++out[o.role].occurrences.counts[idx];
        ++agents[{o.role, t->second.value()}][idx];
    }
    for (const auto& [key, tally] : agents) {
        std::size_t best = 0;  // enum order already encodes the tie-break
        for (std::size_t i = 1; i < 4; ++i)
            if (tally[i] > tally[best]) best = i;
        ++out[key.first].uniqueAgents.counts[best];
    }
    return out;
}

OutcomeCounts clustering_outcomes(const std::vector<merge::AgentCluster>& clusters, const Truth& truth) {
    OutcomeCounts counts;
    for (const auto& c : clusters) {
        std::set<std::string> sirets, sirens;
        for (auto m : c.members) {
            auto it = truth.find(m);
            if (it == truth.end()) continue;
            sirets.insert(it->second.value());
            sirens.insert(it->second.siren());
        }
        if (sirets.empty()) continue;
        const auto o = sirets.size() == 1   ? MatchOutcome::Full
                       : sirens.size() == 1 ? MatchOutcome::Partial
                                            : MatchOutcome::Incorrect;
        ++counts.counts[static_cast<std::size_t>(o)];
    }
    return counts;
}

namespace {

void render_histogram(std::ostringstream& out, const std::string& title, const Histogram& h) {
    out << title << " (n=" << h.total() << ")\n";
    const auto p = h.percentages();
    for (std::size_t i = 0; i < h.labels.size(); ++i)
        out << "  " << h.labels[i] << "\t" << h.counts[i] << "\t" << pct(p[i]) << "%\n";
    out << "\n";
}

void render_outcomes(std::ostringstream& out, const std::string& title, const std::map<Role, RoleOutcomes>& m) {
    out << title << "\n";
    out << "  role\tbasis\tFULL\tPARTIAL\tINCORRECT\tNONE\ttotal\n";
    for (const auto& [role, ro] : m) {
        for (const auto& [basis, counts] : {std::pair{"occurrences", &ro.occurrences},
                                            std::pair{"unique agents", &ro.uniqueAgents}}) {
            out << "  " << role_label(role) << "\t" << basis;
            for (auto o : kOutcomes)
                out << "\t" << counts->counts[static_cast<std::size_t>(o)] << " (" << pct(counts->percent(o)) << "%)";
            out << "\t" << counts->total() << "\n";
        }
    }
    out << "\n";
}

void render_stages(std::ostringstream& out, const std::string& title, const std::vector<StageRow>& rows) {
    out << title << "\n  stage\tcorrect\tincorrect\tmissing\n";
    for (const auto& r : rows) {
        const double t = static_cast<double>(r.correct + r.incorrect + r.missing);
        auto share = [&](std::size_t v) { return pct(t > 0 ? 100.0 * static_cast<double>(v) / t : 0.0); };
        out << "  " << r.stage << "\t" << r.correct << " (" << share(r.correct) << "%)\t" << r.incorrect << " ("
            << share(r.incorrect) << "%)\t" << r.missing << " (" << share(r.missing) << "%)\n";
    }
    out << "\n";
}

std::vector<std::vector<std::string>> histogram_rows(const Histogram& h) {
    std::vector<std::vector<std::string>> rows;
    const auto p = h.percentages();
    for (std::size_t i = 0; i < h.labels.size(); ++i) rows.push_back({h.labels[i], std::to_string(h.counts[i]), pct(p[i])});
    return rows;
}

}  // namespace

std::string render_report(const EvaluationReport& r) {
    std::ostringstream out;
    out << "Evaluation report" << (r.masked ? " (masked known identifiers)" : "") << "\n";
    out << "truth occurrences: " << r.truthOccurrences << "\n";
    if (r.masked) out << "masking leaks: " << r.maskingLeaks << "\n";
    out << "\n";
    render_outcomes(out, "Identification outcomes (after identification)", r.identification);
    render_outcomes(out, "Identification outcomes (after clustering)", r.afterClustering);
    render_stages(out, "Stage accounting, strict (PARTIAL counted incorrect)", r.stagesStrict);
    render_stages(out, "Stage accounting, entity-level (PARTIAL counted correct)", r.stagesEntity);
    render_histogram(out, "Agents per cluster", r.clusterSizes);
    render_histogram(out, "Distinct identifiers per cluster", r.distinctIdentifiers);
    out << "Clusters by true identifiers (n=" << r.clusteringQuality.total() << ")\n";
    for (auto o : {MatchOutcome::Full, MatchOutcome::Partial, MatchOutcome::Incorrect})
        out << "  " << to_string(o) << "\t" << r.clusteringQuality.counts[static_cast<std::size_t>(o)] << "\t"
            << pct(r.clusteringQuality.percent(o)) << "%\n";
    out << "\n";
    render_histogram(out, "Concentration ratio", r.concentration);
    render_histogram(out, "Singleton ratio", r.singleton);
    out << "Identification failures by stage\n";
    for (const auto& [stage, n] : r.failureStages) out << "  " << stage << "\t" << n << "\n";
    out << "\n";
    out << "Notice coverage\n";
    if (r.coverage)
        out << "  contract notices without award notice\t" << pct(r.coverage->unmatchedContractsPercent) << "%\n"
            << "  award notices citing no contract notice\t" << pct(r.coverage->unmatchedAwardsPercent) << "%\n";
    else
        out << "  absent\n";
    return out.str();
}

void write_report(const EvaluationReport& r, const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir);
    {
        std::ofstream f(dir / "report.txt", std::ios::binary);
        f << render_report(r);
        if (!f) throw InputError("cannot write " + (dir / "report.txt").string());
    }

    std::vector<std::vector<std::string>> outcomes;
    for (const auto& [stage, m] : {std::pair{"identification", &r.identification},
                                   std::pair{"clustering", &r.afterClustering}})
        for (const auto& [role, ro] : *m)
            for (const auto& [basis, counts] : {std::pair{"occurrences", &ro.occurrences},
                                                std::pair{"unique_agents", &ro.uniqueAgents}})
                for (auto o : kOutcomes)
                    outcomes.push_back({stage, role_label(role), basis, std::string(to_string(o)),
                                        std::to_string(counts->counts[static_cast<std::size_t>(o)]),
                                        pct(counts->percent(o))});
    csv::write_file(dir / "outcomes.csv", {"stage", "role", "basis", "outcome", "count", "percent"}, outcomes);

    std::vector<std::vector<std::string>> stages;
    for (const auto& [notion, rows] : {std::pair{"strict", &r.stagesStrict}, std::pair{"entity", &r.stagesEntity}})
        for (const auto& s : *rows)
            stages.push_back({notion, s.stage, std::to_string(s.correct), std::to_string(s.incorrect),
                              std::to_string(s.missing)});
    csv::write_file(dir / "stage_accounting.csv", {"notion", "stage", "correct", "incorrect", "missing"}, stages);

    const std::vector<std::string> histHeader{"bin", "count", "percent"};
    csv::write_file(dir / "cluster_sizes.csv", histHeader, histogram_rows(r.clusterSizes));
    csv::write_file(dir / "distinct_identifiers.csv", histHeader, histogram_rows(r.distinctIdentifiers));
    csv::write_file(dir / "concentration_ratio.csv", histHeader, histogram_rows(r.concentration));
    csv::write_file(dir / "singleton_ratio.csv", histHeader, histogram_rows(r.singleton));

    std::vector<std::vector<std::string>> quality;
    for (auto o : {MatchOutcome::Full, MatchOutcome::Partial, MatchOutcome::Incorrect})
        quality.push_back({std::string(to_string(o)),
                           std::to_string(r.clusteringQuality.counts[static_cast<std::size_t>(o)]),
                           pct(r.clusteringQuality.percent(o))});
    csv::write_file(dir / "clustering_quality.csv", {"outcome", "count", "percent"}, quality);

    std::vector<std::vector<std::string>> failures;
    for (const auto& [stage, n] : r.failureStages) failures.push_back({stage, std::to_string(n)});
    csv::write_file(dir / "failure_stages.csv", {"stage", "count"}, failures);

    std::vector<std::vector<std::string>> coverage;
    if (r.coverage) {
        coverage.push_back({"unmatched_contracts", pct(r.coverage->unmatchedContractsPercent)});
        coverage.push_back({"unmatched_awards", pct(r.coverage->unmatchedAwardsPercent)});
    }
    csv::write_file(dir / "notice_coverage.csv", {"metric", "percent"}, coverage);
}

}  // namespace foppa::evaluate
