#include "gexpect/cli.hpp"

#include "gexpect/errors.hpp"
#include "gexpect/experiments.hpp"
#include "gexpect/json_io.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

namespace gexpect {

namespace {

std::vector<double> parse_double_list(const std::string& s) {
    std::vector<double> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item.empty()) continue;
        char* end = nullptr;
        const double v = std::strtod(item.c_str(), &end);
        if (end == item.c_str() || *end != '\0')
            throw validation_error("cannot parse number '" + item + "'");
        out.push_back(v);
    }
    if (out.empty()) throw validation_error("expected a comma-separated list of numbers");
    return out;
}

std::vector<int> parse_int_list(const std::string& s) {
    std::vector<int> out;
    for (double v : parse_double_list(s)) {
        const int n = static_cast<int>(std::llround(v));
        if (std::abs(v - n) > 0.0) throw validation_error("expected integers in the list");
        out.push_back(n);
    }
    return out;
}

nlohmann::json load_json_file(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw validation_error("cannot open '" + path + "'");
    nlohmann::json j;
    try {
        f >> j;
    } catch (const nlohmann::json::exception& e) {
        throw validation_error("cannot parse JSON in '" + path + "': " + e.what());
    }
    return j;
}

// A catalog name, or a path to a knots JSON document.
TestFunction parse_phi(const std::string& name_or_path) {
    if (name_or_path.size() > 5 && name_or_path.substr(name_or_path.size() - 5) == ".json")
        return test_function_from_json(load_json_file(name_or_path));
    return TestFunction::from_name(name_or_path);
}

void write_body(const std::string& out_path, const std::string& body) {
    if (out_path.empty()) {
        std::cout << body;
        return;
    }
    std::ofstream f(out_path, std::ios::binary | std::ios::trunc);
    if (!f) throw validation_error("cannot open output file '" + out_path + "'");
    f << body;
    if (!f) throw numerical_error("failed writing '" + out_path + "'");
}

struct Flags {
    std::string config, sigmas, family, phi, n, k, grid, format, out, scaling = "none";
    double dx = 0.01, half_width = 0.0, mu = 0.0, horizon = 1.0, safety = 0.5;
    bool require_strict_band = false;

    CLI::Option* o_sigmas = nullptr;
    CLI::Option* o_family = nullptr;
    CLI::Option* o_phi = nullptr;
    CLI::Option* o_n = nullptr;
    CLI::Option* o_k = nullptr;
    CLI::Option* o_dx = nullptr;
    CLI::Option* o_half_width = nullptr;
    CLI::Option* o_mu = nullptr;
    CLI::Option* o_safety = nullptr;
    CLI::Option* o_format = nullptr;
};

void add_common_flags(CLI::App* cmd, Flags& fl) {
    cmd->add_option("--config", fl.config, "JSON config file; flags override its values");
    fl.o_sigmas = cmd->add_option("--sigmas", fl.sigmas,
                                  "comma list of sigmas (symmetric two-point family)");
    fl.o_family = cmd->add_option("--family", fl.family, "path to a family JSON file");
    fl.o_phi = cmd->add_option("--phi", fl.phi, "catalog name or path to a knots JSON file");
    fl.o_n = cmd->add_option("--n", fl.n, "comma list of horizons n");
    fl.o_dx = cmd->add_option("--dx", fl.dx, "grid step");
    fl.o_half_width = cmd->add_option("--half-width", fl.half_width, "spatial half width");
    fl.o_mu = cmd->add_option("--mu", fl.mu, "mean shift");
    fl.o_safety = cmd->add_option("--safety-factor", fl.safety, "time-step safety factor in (0,1]");
    fl.o_format = cmd->add_option("--format", fl.format, "csv or json")
                      ->check(CLI::IsMember({"csv", "json"}));
    cmd->add_option("--out", fl.out, "output path (stdout when omitted)");
    cmd->add_flag("--require-strict-band", fl.require_strict_band,
                  "fail when sigma_lower is not strictly positive");
}

ExperimentConfig build_config(const Flags& fl) {
    ExperimentConfig config;
    if (!fl.config.empty()) config = config_from_json(load_json_file(fl.config));
    if (fl.o_sigmas->count() > 0) {
        config.sigmas = parse_double_list(fl.sigmas);
        config.family.reset();
    }
    if (fl.o_family->count() > 0) {
        config.family = family_from_json(load_json_file(fl.family));
        config.sigmas.reset();
    }
    if (fl.o_phi->count() > 0) config.phi = parse_phi(fl.phi);
    if (fl.o_n->count() > 0) config.n_list = parse_int_list(fl.n);
    if (fl.o_k != nullptr && fl.o_k->count() > 0) config.k_list = parse_double_list(fl.k);
    if (fl.o_dx->count() > 0) config.dx = fl.dx;
    if (fl.o_half_width->count() > 0) config.half_width = fl.half_width;
    if (fl.o_mu->count() > 0) config.mean_shift = fl.mu;
    if (fl.o_safety->count() > 0) config.safety_factor = fl.safety;
    if (fl.o_format->count() > 0)
        config.format = fl.format == "json" ? OutputFormat::json : OutputFormat::csv;
    return config;
}

std::string render_report(const ExperimentReport& report, OutputFormat format) {
    if (format == OutputFormat::csv) return report_to_csv(report);
    return report_to_json(report).dump(2) + "\n";
}

void check_strict_band(const Flags& fl, const VolatilityBand& band) {
    if (fl.require_strict_band && !(band.sigma_lower > 0.0))
        throw validation_error("sigma_lower must be strictly positive (--require-strict-band)");
}

void run_gheat(const Flags& fl) {
    const ExperimentConfig config = build_config(fl);
    VolatilityBand band(0.0, 0.0);
    if (fl.o_sigmas->count() > 0 && !config.family) {
        // for the solver the sigma list is the band itself; zero is allowed
        const std::vector<double> sigmas = parse_double_list(fl.sigmas);
        double lo = sigmas.front(), hi = sigmas.front();
        for (double s : sigmas) {
            lo = std::min(lo, s);
            hi = std::max(hi, s);
        }
        band = VolatilityBand(lo, hi);
    } else {
        band = VolatilityBand::from_certificate(certify_band(config.resolve_family()));
    }
    check_strict_band(fl, band);

    const double l = config.half_width.value_or(
        std::max({8.0 * band.sigma_upper, 16.0 * config.dx, 1.0}));
    const GridSpec grid(l, config.dx, fl.horizon, config.safety_factor);
    const SolutionSurface surface = solve_gheat(config.phi, band, grid);
    if (surface.narrow_domain)
        std::cerr << "warning: domain narrower than 6*sigma_upper*sqrt(T); "
                     "boundary effects may reach x = 0\n";

    const double at_origin = evaluate(surface, grid.horizon, 0.0);
    if (!fl.out.empty()) write_body(fl.out, surface_to_csv(surface));
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", at_origin);
    std::cout << "u(" << grid.horizon << ",0) = " << buf << "\n";
}

void run_expect(const Flags& fl) {
    const ExperimentConfig config = build_config(fl);
    if (config.n_list.size() != 1)
        throw validation_error("expect: provide exactly one horizon via --n");
    check_strict_band(fl, VolatilityBand::from_certificate(certify_band(config.resolve_family())));

    DPQuery q{config.resolve_family(), config.phi, config.n_list.front(), Scaling::none,
              std::nullopt, 5'000'000};
    q.scaling = fl.scaling == "inv_sqrt_n" ? Scaling::inv_sqrt_n
                : fl.scaling == "inv_n"    ? Scaling::inv_n
                                           : Scaling::none;
    if (!fl.grid.empty()) {
        const std::vector<double> g = parse_double_list(fl.grid);
        if (g.size() != 2) throw validation_error("--grid expects dx,half_width");
        q.grid = GridBackend{g[0], g[1]};
    }
    const NestedResult r = nested_expect(q);
    if (r.grid_exited)
        std::cerr << "warning: reachable sums left the value-function grid and were clamped\n";
    write_body(fl.out, nested_result_to_json(r).dump() + "\n");
}

void run_lln_cmd(const Flags& fl) {
    const ExperimentConfig config = build_config(fl);
    const ExperimentReport report = run_lln(config);
    write_body(fl.out, render_report(report, config.format));
}

void run_clt_cmd(const Flags& fl) {
    const ExperimentConfig config = build_config(fl);
    check_strict_band(fl, VolatilityBand::from_certificate(
                              certify_band(config.resolve_family().translated(-config.mean_shift))));
    const ExperimentReport report = run_clt(config);
    write_body(fl.out, render_report(report, config.format));
}

void run_approx_cmd(const Flags& fl) {
    const ExperimentConfig config = build_config(fl);
    std::vector<double> k_list = config.k_list;
    if (k_list.empty()) k_list = {4.0, 8.0, 16.0, 32.0};
    const UniformApproxResult result = uniform_approx_check(config.phi, k_list, config);
    write_body(fl.out, render_report(result.summary, config.format));
}

} // namespace

int run_cli(int argc, const char* const* argv) {
    CLI::App app{"sublinear-expectation toolkit: G-heat solver, nested DP and limit-theorem experiments"};
    app.require_subcommand(1);

    Flags fl_gheat, fl_expect, fl_lln, fl_clt, fl_approx;

    CLI::App* gheat = app.add_subcommand("gheat", "solve the G-heat equation, export the surface");
    add_common_flags(gheat, fl_gheat);
    gheat->add_option("--horizon", fl_gheat.horizon, "time horizon T");
    gheat->callback([&] { run_gheat(fl_gheat); });

    CLI::App* expect = app.add_subcommand("expect", "nested sublinear expectation of phi(S_n)");
    add_common_flags(expect, fl_expect);
    expect->add_option("--scaling", fl_expect.scaling, "none, inv_sqrt_n or inv_n")
        ->check(CLI::IsMember({"none", "inv_sqrt_n", "inv_n"}));
    expect->add_option("--grid", fl_expect.grid, "grid backend as dx,half_width");
    expect->callback([&] { run_expect(fl_expect); });

    CLI::App* lln = app.add_subcommand("lln", "law-of-large-numbers second-moment experiment");
    add_common_flags(lln, fl_lln);
    lln->callback([&] { run_lln_cmd(fl_lln); });

    CLI::App* clt = app.add_subcommand("clt", "central-limit-theorem convergence experiment");
    add_common_flags(clt, fl_clt);
    clt->callback([&] { run_clt_cmd(fl_clt); });

    CLI::App* approx = app.add_subcommand("approx", "uniformly continuous phi via Lipschitz smoothing");
    add_common_flags(approx, fl_approx);
    fl_approx.o_k = approx->add_option("--k", fl_approx.k, "comma list of smoothing slopes");
    approx->callback([&] { run_approx_cmd(fl_approx); });

    try {
        app.parse(argc, argv);
        return 0;
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    } catch (const validation_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const numerical_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}

int run_cli(const std::vector<std::string>& args) {
    std::vector<std::string> full;
    full.reserve(args.size() + 1);
    full.push_back("gexpect");
    full.insert(full.end(), args.begin(), args.end());
    std::vector<const char*> argv;
    argv.reserve(full.size());
    for (const std::string& s : full) argv.push_back(s.c_str());
    return run_cli(static_cast<int>(argv.size()), argv.data());
}

} // namespace gexpect
