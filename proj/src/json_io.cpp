#include "gexpect/json_io.hpp"

#include "gexpect/errors.hpp"

#include <cmath>
#include <cstdio>

namespace gexpect {

namespace {

std::string fmt17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

Scaling scaling_from_string(const std::string& s) {
    if (s == "none") return Scaling::none;
    if (s == "inv_sqrt_n") return Scaling::inv_sqrt_n;
    if (s == "inv_n") return Scaling::inv_n;
    throw validation_error("unknown scaling '" + s + "'");
}

std::string scaling_to_string(Scaling s) {
    switch (s) {
    case Scaling::none: return "none";
    case Scaling::inv_sqrt_n: return "inv_sqrt_n";
    case Scaling::inv_n: return "inv_n";
    }
    return "none";
}

} // namespace

nlohmann::json family_to_json(const ScenarioFamily& family) {
    nlohmann::json measures = nlohmann::json::array();
    for (const auto& d : family.measures()) {
        nlohmann::json atoms = nlohmann::json::array();
        for (const Atom& a : d.atoms()) atoms.push_back({a.value, a.probability});
        measures.push_back({{"atoms", atoms}});
    }
    return {{"measures", measures}};
}

ScenarioFamily family_from_json(const nlohmann::json& j) {
    if (!j.is_object() || !j.contains("measures") || !j["measures"].is_array())
        throw validation_error("family JSON must be {\"measures\": [...]}");
    std::vector<DiscreteDistribution> measures;
    for (const auto& m : j["measures"]) {
        if (!m.is_object() || !m.contains("atoms") || !m["atoms"].is_array())
            throw validation_error("each measure must be {\"atoms\": [[value, prob], ...]}");
        std::vector<Atom> atoms;
        for (const auto& a : m["atoms"]) {
            if (!a.is_array() || a.size() != 2)
                throw validation_error("each atom must be a [value, prob] pair");
            atoms.push_back({a[0].get<double>(), a[1].get<double>()});
        }
        measures.emplace_back(std::move(atoms));
    }
    return ScenarioFamily(std::move(measures));
}

nlohmann::json test_function_to_json(const TestFunction& f) {
    if (f.kind() == TestFunction::Kind::piecewise_linear && f.amplitude() == 1.0 &&
        f.offset() == 0.0) {
        nlohmann::json knots = nlohmann::json::array();
        for (const auto& kn : f.knots()) knots.push_back({kn[0], kn[1]});
        return {{"knots", knots}};
    }
    return f.name();
}

TestFunction test_function_from_json(const nlohmann::json& j) {
    if (j.is_string()) return TestFunction::from_name(j.get<std::string>());
    if (j.is_object() && j.contains("knots")) {
        std::vector<std::array<double, 2>> knots;
        for (const auto& kn : j["knots"]) {
            if (!kn.is_array() || kn.size() != 2)
                throw validation_error("each knot must be an [x, y] pair");
            knots.push_back({kn[0].get<double>(), kn[1].get<double>()});
        }
        return TestFunction::piecewise_linear(std::move(knots));
    }
    throw validation_error("test function JSON must be a catalog name or {\"knots\": [...]}");
}

nlohmann::json dp_query_to_json(const DPQuery& q) {
    nlohmann::json j{{"family", family_to_json(q.family)},
                     {"phi", test_function_to_json(q.phi)},
                     {"n", q.n},
                     {"scaling", scaling_to_string(q.scaling)}};
    if (q.grid)
        j["backend"] = {{"grid", {{"dx", q.grid->dx}, {"half_width", q.grid->half_width}}}};
    else
        j["backend"] = "exact_support";
    return j;
}

DPQuery dp_query_from_json(const nlohmann::json& j) {
    if (!j.is_object() || !j.contains("family") || !j.contains("phi") || !j.contains("n"))
        throw validation_error("DP query JSON needs family, phi and n");
    DPQuery q{family_from_json(j["family"]), test_function_from_json(j["phi"]),
              j["n"].get<int>(), Scaling::none, std::nullopt, 5'000'000};
    if (j.contains("scaling")) q.scaling = scaling_from_string(j["scaling"].get<std::string>());
    if (j.contains("backend")) {
        const auto& b = j["backend"];
        if (b.is_string()) {
            if (b.get<std::string>() != "exact_support")
                throw validation_error("unknown DP backend '" + b.get<std::string>() + "'");
        } else if (b.is_object() && b.contains("grid")) {
            q.grid = GridBackend{b["grid"]["dx"].get<double>(),
                                 b["grid"]["half_width"].get<double>()};
        } else {
            throw validation_error("DP backend must be \"exact_support\" or {\"grid\": ...}");
        }
    }
    return q;
}

nlohmann::json nested_result_to_json(const NestedResult& r) {
    return {{"value", r.value},
            {"backend", r.backend},
            {"states_visited", r.states_visited},
            {"n", r.n}};
}

ExperimentConfig config_from_json(const nlohmann::json& j) {
    if (!j.is_object()) throw validation_error("config must be a JSON object");
    ExperimentConfig config;
    if (j.contains("sigmas")) config.sigmas = j["sigmas"].get<std::vector<double>>();
    if (j.contains("family")) config.family = family_from_json(j["family"]);
    if (j.contains("band_override")) {
        const auto& b = j["band_override"];
        if (!b.is_array() || b.size() != 2)
            throw validation_error("band_override must be [sigma_lower, sigma_upper]");
        config.band_override = VolatilityBand(b[0].get<double>(), b[1].get<double>());
    }
    if (j.contains("phi")) config.phi = test_function_from_json(j["phi"]);
    if (j.contains("n_list")) config.n_list = j["n_list"].get<std::vector<int>>();
    if (j.contains("mean_shift")) config.mean_shift = j["mean_shift"].get<double>();
    if (j.contains("dx")) config.dx = j["dx"].get<double>();
    if (j.contains("half_width")) config.half_width = j["half_width"].get<double>();
    if (j.contains("safety_factor")) config.safety_factor = j["safety_factor"].get<double>();
    if (j.contains("k_list")) config.k_list = j["k_list"].get<std::vector<double>>();
    if (j.contains("format")) {
        const std::string f = j["format"].get<std::string>();
        if (f == "csv")
            config.format = OutputFormat::csv;
        else if (f == "json")
            config.format = OutputFormat::json;
        else
            throw validation_error("format must be 'csv' or 'json'");
    }
    return config;
}

nlohmann::json config_to_json(const ExperimentConfig& config) {
    nlohmann::json j = nlohmann::json::object();
    if (config.sigmas) j["sigmas"] = *config.sigmas;
    if (config.family) j["family"] = family_to_json(*config.family);
    if (config.band_override)
        j["band_override"] = {config.band_override->sigma_lower, config.band_override->sigma_upper};
    j["phi"] = test_function_to_json(config.phi);
    j["n_list"] = config.n_list;
    j["mean_shift"] = config.mean_shift;
    j["dx"] = config.dx;
    if (config.half_width) j["half_width"] = *config.half_width;
    j["safety_factor"] = config.safety_factor;
    if (!config.k_list.empty()) j["k_list"] = config.k_list;
    j["format"] = config.format == OutputFormat::csv ? "csv" : "json";
    return j;
}

std::string report_to_csv(const ExperimentReport& report) {
    std::string out = "n,dp_value,reference,abs_error\n";
    for (const ReportRow& r : report.rows) {
        out += std::to_string(r.n);
        out += ',';
        out += fmt17(r.dp_value);
        out += ',';
        out += fmt17(r.reference);
        out += ',';
        out += fmt17(r.abs_error);
        out += '\n';
    }
    out += "# fitted_rate=";
    out += report.fitted_rate ? fmt17(*report.fitted_rate) : "none";
    out += '\n';
    return out;
}

nlohmann::json report_to_json(const ExperimentReport& report) {
    nlohmann::json rows = nlohmann::json::array();
    for (const ReportRow& r : report.rows)
        rows.push_back({{"n", r.n},
                        {"dp_value", r.dp_value},
                        {"reference", r.reference},
                        {"abs_error", r.abs_error}});
    nlohmann::json metadata{
        {"experiment", report.experiment},
        {"phi", report.phi_name},
        {"mean_shift", report.mean_shift},
        {"band", {report.band.sigma_lower, report.band.sigma_upper}},
        {"certificate",
         {{"mean_upper", report.certificate.mean_upper},
          {"mean_lower", report.certificate.mean_lower},
          {"second_moment_upper", report.certificate.second_moment_upper},
          {"second_moment_lower", report.certificate.second_moment_lower}}},
        {"elapsed_seconds", report.elapsed_seconds}};
    if (!report.config_echo.empty())
        metadata["config"] = nlohmann::json::parse(report.config_echo);
    if (!report.states_visited.empty()) metadata["states_visited"] = report.states_visited;
    if (!report.sup_gaps.empty()) metadata["sup_gaps"] = report.sup_gaps;
    nlohmann::json j{{"rows", rows}, {"metadata", metadata}};
    if (report.fitted_rate)
        j["fitted_rate"] = *report.fitted_rate;
    else
        j["fitted_rate"] = nullptr;
    return j;
}

std::string surface_to_csv(const SolutionSurface& surface) {
    std::string out = "t,x,u\n";
    for (std::size_t k = 0; k < surface.times.size(); ++k) {
        const auto& layer = surface.values[k];
        for (std::size_t j = 0; j < layer.size(); ++j) {
            out += fmt17(surface.times[k]);
            out += ',';
            out += fmt17(surface.x_at(j));
            out += ',';
            out += fmt17(layer[j]);
            out += '\n';
        }
    }
    return out;
}

} // namespace gexpect
