#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "foppa/config.hpp"
#include "foppa/criteria.hpp"
#include "foppa/normalize.hpp"
#include "foppa/pipeline.hpp"
#include "foppa/similarity.hpp"
#include "foppa/text.hpp"

namespace py = pybind11;
using namespace foppa;

namespace {

py::tuple address(std::string_view street, std::string_view zipcode, std::string_view city) {
    const auto a = normalize::normalize_address(street, zipcode, city);
    return py::make_tuple(a.street, a.zipcode, a.city);
}

// Weights in, normalized weights out; None when they cannot be normalized.
std::optional<std::vector<double>> weights(const std::vector<std::string>& raw) {
    std::vector<Weight> ws;
    for (const auto& r : raw) {
        const auto micros = text::parse_scaled_decimal(r, 6);
        if (!micros) throw py::value_error("not a weight: " + r);
        ws.push_back(Weight{*micros});
    }
    const auto out = criteria::normalize_weights(ws);
    if (!out.normalized) return std::nullopt;
    std::vector<double> v;
    for (const auto& w : out.weights) v.push_back(static_cast<double>(w.micros) / Weight::kScale);
    return v;
}

void run(const std::filesystem::path& config, const std::string& from, const std::string& to, bool mask,
         std::optional<int> jobs) {
    auto cfg = load_config(config);
    if (jobs) cfg.jobs = *jobs;
    const auto a = pipeline::parse_stage(from);
    const auto b = pipeline::parse_stage(to);
    if (!a || !b) throw py::value_error("unknown stage");
    py::gil_scoped_release release;
    pipeline::run_stages(cfg, *a, *b, mask);
}

}  // namespace

PYBIND11_MODULE(_foppa, m) {
    m.doc() = "Procurement award tables to a relational database";

    py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
    py::register_exception<InputError>(m, "InputError", PyExc_IOError);
    py::register_exception<InvariantViolation>(m, "InvariantViolation", PyExc_RuntimeError);

    m.def("normalize_name", [](std::string_view s) { return normalize::normalize_name(s); });
    m.def("normalize_address", &address, py::arg("street"), py::arg("zipcode"), py::arg("city"));
    m.def("department_of", [](std::string_view zip) { return normalize::department_of(zip); });
    m.def("name_similarity", [](std::string_view a, std::string_view b) { return similarity::name_similarity(a, b); });
    m.def("normalize_weights", &weights, "Scales weights to sum to 100 (2 decimals).");
    m.def("validate_config", [](const std::filesystem::path& p) { load_config(p); }, py::arg("path"));
    m.def("run", &run, py::arg("config"), py::arg("stage_from") = "ingest", py::arg("stage_to") = "evaluate",
          py::arg("mask") = false, py::arg("jobs") = std::nullopt);
}
