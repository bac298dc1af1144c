#include "foppa/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

namespace foppa {

namespace {

using nlohmann::json;

// Walks one JSON object, recording type errors and unknown keys instead of
// stopping at the first one.
class Section {
public:
    Section(const json& node, std::string path, std::vector<std::string>& errors)
        : node_(node), path_(std::move(path)), errors_(errors) {
        if (!node_.is_object()) errors_.push_back(label() + ": expected an object");
    }

    ~Section() {
        if (!node_.is_object()) return;
        for (const auto& [key, value] : node_.items())
            if (!seen_.count(key)) errors_.push_back(where(key) + ": unknown key");
    }

    bool has(const std::string& key) {
        seen_.insert(key);
        return node_.is_object() && node_.contains(key) && !node_.at(key).is_null();
    }

    const json& at(const std::string& key) const { return node_.at(key); }
    std::string where(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

    void get(const std::string& key, std::string& out) {
        if (!has(key)) return;
        if (at(key).is_string())
            out = at(key).get<std::string>();
        else
            errors_.push_back(where(key) + ": expected a string");
    }

    void get(const std::string& key, double& out) {
        if (!has(key)) return;
        if (at(key).is_number())
            out = at(key).get<double>();
        else
            errors_.push_back(where(key) + ": expected a number");
    }

    void get(const std::string& key, int& out) {
        if (!has(key)) return;
        if (at(key).is_number_integer())
            out = at(key).get<int>();
        else
            errors_.push_back(where(key) + ": expected an integer");
    }

    void get(const std::string& key, std::uint64_t& out) {
        if (!has(key)) return;
        if (at(key).is_number_unsigned())
            out = at(key).get<std::uint64_t>();
        else
            errors_.push_back(where(key) + ": expected a non-negative integer");
    }

    void get(const std::string& key, bool& out) {
        if (!has(key)) return;
        if (at(key).is_boolean())
            out = at(key).get<bool>();
        else
            errors_.push_back(where(key) + ": expected true or false");
    }

    void get(const std::string& key, std::vector<std::string>& out) {
        if (!has(key)) return;
        const auto& v = at(key);
        if (v.is_string()) {
            out = {v.get<std::string>()};
            return;
        }
        if (!v.is_array()) {
            errors_.push_back(where(key) + ": expected a list of strings");
            return;
        }
        std::vector<std::string> items;
        for (const auto& item : v) {
            if (!item.is_string()) {
                errors_.push_back(where(key) + ": expected a list of strings");
                return;
            }
            items.push_back(item.get<std::string>());
        }
        out = std::move(items);
    }

    void get(const std::string& key, Date& out) {
        std::string text;
        if (!has(key)) return;
        get(key, text);
        if (text.empty()) return;
        if (auto d = Date::parse(text))
            out = *d;
        else
            errors_.push_back(where(key) + ": not a date: " + text);
    }

    void path(const std::string& key, std::filesystem::path& out, const std::filesystem::path& base) {
        std::string text;
        get(key, text);
        if (!text.empty()) out = resolve(text, base);
    }

    static std::filesystem::path resolve(const std::string& text, const std::filesystem::path& base) {
        std::filesystem::path p(text);
        return p.is_absolute() ? p : (base / p).lexically_normal();
    }

private:
    std::string label() const { return path_.empty() ? "config" : path_; }

    const json& node_;
    std::string path_;
    std::vector<std::string>& errors_;
    std::set<std::string> seen_;
};

void check_unit(double v, const std::string& field, std::vector<std::string>& errors) {
    if (!(v >= 0.0 && v <= 1.0))
        errors.push_back(field + " = " + std::to_string(v) + " is outside [0, 1]");
}

void check_file(const std::filesystem::path& p, const std::string& field, bool required,
                std::vector<std::string>& errors) {
    if (p.empty()) {
        if (required) errors.push_back(field + ": required path is missing");
        return;
    }
    std::error_code ec;
    if (!std::filesystem::is_regular_file(p, ec)) errors.push_back(field + ": file not found: " + p.string());
}

}  // namespace

std::vector<std::string> validate_config(const PipelineConfig& c) {
    std::vector<std::string> errors;
    if (c.inputs.ted.empty()) errors.push_back("inputs.ted: at least one TED table is required");
    for (std::size_t i = 0; i < c.inputs.ted.size(); ++i)
        check_file(c.inputs.ted[i], "inputs.ted[" + std::to_string(i) + "]", true, errors);
    check_file(c.inputs.entities, "inputs.entities", true, errors);
    check_file(c.inputs.facilities, "inputs.facilities", true, errors);
    check_file(c.inputs.postal, "inputs.postal", false, errors);
    check_file(c.inputs.activity, "inputs.activity", false, errors);
    check_file(c.inputs.lexicon, "inputs.lexicon", false, errors);
    check_file(c.inputs.contractNotices, "inputs.contractNotices", false, errors);
    check_file(c.inputs.truth, "inputs.truth", false, errors);
    if (c.output.empty()) errors.push_back("output: required path is missing");

    check_unit(c.match.nameThreshold, "match.nameThreshold", errors);
    check_unit(c.match.minScore, "match.minScore", errors);
    check_unit(c.merge.threshold, "merge.threshold", errors);
    for (const auto& [w, name] : {std::pair{&c.match.addressWeights, "match.addressWeights"},
                                  std::pair{&c.merge.addressWeights, "merge.addressWeights"}}) {
        if (w->street < 0 || w->zipcode < 0 || w->city < 0)
            errors.push_back(std::string(name) + ": weights must be non-negative");
        else if (w->street + w->zipcode + w->city <= 0)
            errors.push_back(std::string(name) + ": weights must not all be zero");
    }
    if (c.match.activityPrefixLength < 1)
        errors.push_back("match.activityPrefixLength = " + std::to_string(c.match.activityPrefixLength) +
                         " must be at least 1");
    if (c.jobs < 1) errors.push_back("jobs = " + std::to_string(c.jobs) + " must be at least 1");
    if (c.ingest.periodTo < c.ingest.periodFrom) errors.push_back("period: from is after to");
    if (c.ingest.separators.empty()) errors.push_back("separators: at least one separator is required");
    for (const auto& s : c.ingest.separators)
        if (s.empty()) errors.push_back("separators: empty separator");
    if (c.ingest.dialect.delimiter == '"' || c.ingest.dialect.delimiter == '\n')
        errors.push_back("delimiter: unusable character");
    for (const auto& field : ingest::mandatory_fields())
        if (!c.ingest.columns.count(field) || c.ingest.columns.at(field).empty())
            errors.push_back("columns." + field + ": mandatory field has no column");
    return errors;
}

PipelineConfig parse_config(const std::string& text, const std::filesystem::path& baseDir) {
    json root;
    try {
        root = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }

    PipelineConfig c;
    c.merge.addressWeights = c.match.addressWeights;
    std::vector<std::string> errors;
    {
        Section top(root, "", errors);

        if (top.has("inputs")) {
            Section in(top.at("inputs"), "inputs", errors);
            std::vector<std::string> ted;
            in.get("ted", ted);
            for (const auto& t : ted) c.inputs.ted.push_back(Section::resolve(t, baseDir));
            in.path("entities", c.inputs.entities, baseDir);
            in.path("facilities", c.inputs.facilities, baseDir);
            in.path("postal", c.inputs.postal, baseDir);
            in.path("activity", c.inputs.activity, baseDir);
            in.path("lexicon", c.inputs.lexicon, baseDir);
            in.path("contractNotices", c.inputs.contractNotices, baseDir);
            in.path("truth", c.inputs.truth, baseDir);
        } else {
            errors.push_back("inputs: required section is missing");
        }
        top.path("output", c.output, baseDir);

        std::string delimiter;
        top.get("delimiter", delimiter);
        if (delimiter == "\\t" || delimiter == "tab") delimiter = "\t";
        if (!delimiter.empty()) {
            if (delimiter.size() == 1)
                c.ingest.dialect.delimiter = delimiter[0];
            else
                errors.push_back("delimiter: expected a single character");
        }

        if (top.has("columns")) {
            Section cols(top.at("columns"), "columns", errors);
            for (auto& [field, column] : c.ingest.columns) cols.get(field, column);
        }
        if (top.has("registryColumns")) {
            auto& rc = c.registryColumns;
            Section cols(top.at("registryColumns"), "registryColumns", errors);
            cols.get("siren", rc.siren);
            cols.get("legalNames", rc.legalNames);
            cols.get("creationDate", rc.creationDate);
            cols.get("closureDate", rc.closureDate);
            cols.get("entityActivity", rc.entityActivity);
            cols.get("siret", rc.siret);
            cols.get("facilityNames", rc.facilityNames);
            cols.get("street", rc.street);
            cols.get("zipcode", rc.zipcode);
            cols.get("city", rc.city);
            cols.get("facilityActivity", rc.facilityActivity);
            cols.get("openDate", rc.openDate);
            cols.get("closeDate", rc.closeDate);
        }
        if (top.has("postalColumns")) {
            Section cols(top.at("postalColumns"), "postalColumns", errors);
            cols.get("city", c.postalCityColumn);
            cols.get("zipcode", c.postalZipColumn);
        }
        top.get("contractNoticeColumn", c.contractNoticeColumn);

        top.get("separators", c.ingest.separators);
        top.get("postalTokens", c.address.postalTokens);
        top.get("unsuccessfulMarkers", c.ingest.unsuccessfulMarkers);
        top.get("currency", c.ingest.defaultCurrency);
        if (top.has("period")) {
            Section period(top.at("period"), "period", errors);
            period.get("from", c.ingest.periodFrom);
            period.get("to", c.ingest.periodTo);
        }

        if (top.has("match")) {
            Section m(top.at("match"), "match", errors);
            m.get("nameThreshold", c.match.nameThreshold);
            m.get("minScore", c.match.minScore);
            m.get("activityPrefixLength", c.match.activityPrefixLength);
            m.get("allowUnblocked", c.match.allowUnblocked);
            if (m.has("addressWeights")) {
                Section w(m.at("addressWeights"), "match.addressWeights", errors);
                w.get("street", c.match.addressWeights.street);
                w.get("zipcode", c.match.addressWeights.zipcode);
                w.get("city", c.match.addressWeights.city);
            }
            c.merge.addressWeights = c.match.addressWeights;
        }
        if (top.has("merge")) {
            Section m(top.at("merge"), "merge", errors);
            m.get("threshold", c.merge.threshold);
        }

        top.get("seed", c.seed);
        top.get("jobs", c.jobs);
        if (top.has("evaluation")) {
            Section ev(top.at("evaluation"), "evaluation", errors);
            ev.get("samplePerRole", c.samplePerRole);
        }
    }

    for (auto& e : validate_config(c)) errors.push_back(std::move(e));
    if (!errors.empty()) {
        std::ostringstream msg;
        msg << "invalid configuration:";
        for (const auto& e : errors) msg << "\n  " << e;
        throw ConfigError(msg.str());
    }
    return c;
}

PipelineConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot read config file " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str(), path.parent_path().empty() ? std::filesystem::path(".") : path.parent_path());
}

}  // namespace foppa
