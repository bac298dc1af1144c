#pragma once

// Synthetic registry and TED award tables with planted ground truth.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "foppa/registry.hpp"
#include "foppa/types.hpp"

namespace foppa::synth {

class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}
    /// Uniform in [0, n).
    std::uint64_t below(std::uint64_t n);
    bool chance(double p);
    template <class T>
    const T& pick(const std::vector<T>& v) {
        return v[below(v.size())];
    }

private:
    std::mt19937_64 engine_;
};

/// Pronounceable upper-case word of `syllables` syllables.
std::string pseudo_word(Rng& rng, int syllables);

struct City {
    std::string name;
    std::string zipcode;
    std::string department;
};

struct Facility {
    std::string siret;
    std::string name;  // empty: the facility goes by its entity's name
    std::string street;
    City city;
    std::string activity;
    std::string openDate;
    std::string closeDate;
    std::size_t entity = 0;
};

struct Entity {
    std::string siren;
    std::string name;
    std::string activity;
    bool isBuyer = false;
};

struct RegistrySpec {
    std::size_t buyers = 50;
    std::size_t winners = 150;
    int maxFacilities = 3;
    std::size_t departments = 6;
    std::size_t citiesPerDepartment = 5;
    double closedRate = 0.05;
    std::uint64_t seed = 1;
};

struct World {
    std::vector<City> cities;
    std::vector<Entity> entities;
    std::vector<Facility> facilities;
    /// Cities sharing a name across two zipcodes, so the postal fill is ambiguous.
    std::vector<std::string> ambiguousCities;

    registry::Registry build_registry(int activityPrefixLength = 2) const;
    /// entities.csv, facilities.csv, postal.csv, activity.csv
    void write_reference(const std::filesystem::path& dir) const;
    /// Whether `city` maps to exactly one zipcode in the postal table.
    bool city_unique(const std::string& foldedCity) const;
    /// The facility's name as the registry shows it.
    const std::string& display_name(const Facility& f) const;
};

World make_world(const RegistrySpec& spec);

/// CPV division codes the generator uses, each compatible with one activity
/// division of the registry side.
struct CpvMapping {
    std::string cpv;
    std::string activity;
};
const std::vector<CpvMapping>& cpv_mappings();

/// One agent mention in a generated TED row, with what the generator knows.
struct Mention {
    std::string name;
    std::string street;
    std::string zipcode;
    std::string city;
    std::string country = "FR";
    std::string declaredSiret;
    std::optional<std::size_t> facility;  // truth, when the agent is in the registry
    int tier = 0;
    /// Generator's expectation: no department and no activity once normalized.
    bool expectUnblockable = false;
};

struct TedRow {
    std::string noticeId;
    std::string lotNumber;
    std::string dispatch;
    std::string awardDate;
    std::string contractType;
    std::string cpv;
    std::string offers;
    std::string value;
    std::string cancelled;
    std::string contractNoticeRef;
    std::vector<Mention> buyers;   // joined with " // " when several
    std::vector<Mention> winners;
    std::string criteria;
    std::string weights;
    std::string priceWeight;
    /// Emitted verbatim instead of the fields (malformed line).
    std::optional<std::string> rawLine;
    /// Expected to be rejected by ingest (bad date, out of period, duplicate).
    bool expectRejected = false;
};

/// Writes the TED CSV with the default column headers.
void write_ted(const std::vector<TedRow>& rows, const std::filesystem::path& path);

struct TruthRow {
    OccurrenceId occurrenceId = 0;
    std::string siret;
    std::string name;
    int tier = 0;
    bool expectUnblockable = false;
    Role role = Role::Buyer;
};

/// Occurrence ids exactly as ingest assigns them (accepted rows in order,
/// buyers before winners, split parts in order, unsuccessful winners
/// dropped), for mentions whose agent is in the registry.
std::vector<TruthRow> truth_rows(const std::vector<TedRow>& rows, const World& world);
void write_truth(const std::vector<TruthRow>& truth, const World& world, const std::filesystem::path& path);

enum class Perturbation { None, Noise, MissingAddress };

/// Mention of facility `f` as a TED author would write it.
Mention mention_of(const World& world, std::size_t f, Rng& rng, Perturbation p, bool lotHasActivity);

struct TedSpec {
    std::size_t lots = 100;
    double buyerDeclaredRate = 0.4;
    double winnerDeclaredRate = 0.1;
    double jointWinnerRate = 0.05;
    double noiseRate = 0.3;
    double missingAddressRate = 0.1;
    double unknownAgentRate = 0.05;
    double cpvRate = 0.8;
    std::size_t malformed = 0;
    std::size_t rejected = 0;  // half duplicates, half out of period
    bool cancelledLot = true;
    std::uint64_t seed = 2;
};

std::vector<TedRow> make_ted(const World& world, const TedSpec& spec);

/// Contract-notice ids: every referenced one plus `extra` unreferenced.
std::vector<std::string> contract_notices(const std::vector<TedRow>& rows, std::size_t extra, std::uint64_t seed);

/// Everything for one pipeline run: reference files, TED table, truth,
/// contract notices and a config.json pointing at them.
struct FixtureSpec {
    RegistrySpec registry;
    TedSpec ted;
    std::size_t extraContractNotices = 5;
    int jobs = 1;
};

void write_fixture(const FixtureSpec& spec, const std::filesystem::path& dir);

/// The 100-row fixture used for golden and determinism checks.
FixtureSpec golden_spec();

/// Agents for the planted-truth protocol: `perRole` buyers and winners,
/// equally spread over tiers 0 (exact), 1 (noise) and 2 (missing address).
struct PlantedFixture {
    World world;
    std::vector<TedRow> rows;
};
PlantedFixture make_planted(std::size_t perRole, std::uint64_t seed);

}  // namespace foppa::synth
