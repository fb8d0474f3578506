#include "gexpect/experiments.hpp"

#include "gexpect/errors.hpp"
#include "gexpect/json_io.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

namespace gexpect {

namespace {

void check_n_list(const std::vector<int>& n_list) {
    if (n_list.empty()) throw validation_error("experiment: n_list must be nonempty");
    for (std::size_t i = 0; i < n_list.size(); ++i) {
        if (n_list[i] < 1) throw validation_error("experiment: n values must be positive");
        if (i > 0 && n_list[i] <= n_list[i - 1])
            throw validation_error("experiment: n_list must be strictly increasing");
    }
}

VolatilityBand resolve_band(const ExperimentConfig& config, const MomentCertificate& cert) {
    const VolatilityBand certified = VolatilityBand::from_certificate(cert);
    if (!config.band_override) return certified;
    const VolatilityBand& b = *config.band_override;
    const double lo2 = b.sigma_lower * b.sigma_lower;
    const double up2 = b.sigma_upper * b.sigma_upper;
    if (std::abs(lo2 - cert.second_moment_lower) > kCertTol ||
        std::abs(up2 - cert.second_moment_upper) > kCertTol)
        throw validation_error("experiment: band override does not match the certified band");
    return b;
}

GridSpec pde_grid(const ExperimentConfig& config, const VolatilityBand& band) {
    const double l = config.half_width.value_or(
        std::max({8.0 * band.sigma_upper, 16.0 * config.dx, 1.0}));
    return GridSpec(l, config.dx, 1.0, config.safety_factor);
}

class Stopwatch {
  public:
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    }

  private:
    std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

std::vector<ReportRow> rows_for_fit(const std::vector<ReportRow>& rows) {
    std::vector<ReportRow> kept;
    for (const ReportRow& r : rows)
        if (r.n >= 4) kept.push_back(r);
    return kept;
}

} // namespace

ScenarioFamily ExperimentConfig::resolve_family() const {
    if (family) return *family;
    if (sigmas) return make_symmetric_two_point_family(*sigmas);
    throw validation_error("experiment: provide a scenario family or a sigma list");
}

ExperimentReport run_lln(const ExperimentConfig& config) {
    check_n_list(config.n_list);
    const Stopwatch watch;

    const ScenarioFamily shifted = config.resolve_family();
    const ScenarioFamily centered = shifted.translated(-config.mean_shift);
    const MomentCertificate cert = certify_band(centered);
    if (!cert.zero_mean())
        throw validation_error("run_lln: family is not zero-mean certified after subtracting the shift");

    ExperimentReport report;
    report.experiment = "lln";
    report.phi_name = TestFunction::square().name();
    report.config_echo = config_to_json(config).dump();
    report.certificate = cert;
    report.band = VolatilityBand::from_certificate(cert);
    report.mean_shift = config.mean_shift;

    for (int n : config.n_list) {
        const double dp = lln_second_moment(centered, n);
        const double ref = cert.second_moment_upper / static_cast<double>(n);
        if (dp > ref + kCertTol)
            throw numerical_error("run_lln: computed second moment exceeds the sigma_upper^2/n bound");
        report.rows.push_back({n, dp, ref, std::abs(dp - ref)});
    }
    report.fitted_rate = fit_rate(rows_for_fit(report.rows));
    report.elapsed_seconds = watch.seconds();
    return report;
}

ExperimentReport run_clt(const ExperimentConfig& config) {
    check_n_list(config.n_list);
    const Stopwatch watch;

    const ScenarioFamily family = config.resolve_family().translated(-config.mean_shift);
    const MomentCertificate cert = certify_band(family);
    if (!cert.clt_admissible())
        throw validation_error(
            "run_clt: family is not CLT-admissible (needs certified zero mean and sigma_lower > 0)");
    const VolatilityBand band = resolve_band(config, cert);

    ExperimentReport report;
    report.experiment = "clt";
    report.phi_name = config.phi.name();
    report.config_echo = config_to_json(config).dump();
    report.certificate = cert;
    report.band = band;
    report.mean_shift = config.mean_shift;

    const double reference = gnormal_expect(config.phi, band, pde_grid(config, band));
    for (int n : config.n_list) {
        DPQuery q{family, config.phi, n, Scaling::inv_sqrt_n, std::nullopt, 5'000'000};
        const NestedResult r = nested_expect(q);
        report.rows.push_back({n, r.value, reference, std::abs(r.value - reference)});
        report.states_visited.push_back(r.states_visited);
    }
    report.fitted_rate = fit_rate(rows_for_fit(report.rows));
    report.elapsed_seconds = watch.seconds();
    return report;
}

std::optional<double> fit_rate(const std::vector<ReportRow>& rows) {
    if (rows.size() < 3) return std::nullopt;
    for (const ReportRow& r : rows)
        if (r.abs_error < 1e-12) return std::nullopt;

    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    const auto count = static_cast<double>(rows.size());
    for (const ReportRow& r : rows) {
        const double x = std::log(static_cast<double>(r.n));
        const double y = std::log(r.abs_error);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    const double denom = count * sxx - sx * sx;
    if (denom <= 0.0) return std::nullopt;
    const double slope = (count * sxy - sx * sy) / denom;
    return -slope + 0.0; // normalize -0
}

UniformApproxResult uniform_approx_check(const TestFunction& phi_uc,
                                         const std::vector<double>& k_list,
                                         const ExperimentConfig& config) {
    if (!phi_uc.bounded())
        throw validation_error("uniform_approx_check: phi must be bounded");
    if (k_list.empty()) throw validation_error("uniform_approx_check: k_list must be nonempty");
    for (std::size_t i = 0; i < k_list.size(); ++i) {
        if (!(k_list[i] > 0.0))
            throw validation_error("uniform_approx_check: smoothing slopes must be positive");
        if (i > 0 && k_list[i] <= k_list[i - 1])
            throw validation_error("uniform_approx_check: k_list must be strictly increasing");
    }
    const Stopwatch watch;

    const ScenarioFamily family = config.resolve_family();
    const VolatilityBand band = resolve_band(config, certify_band(family));
    const double scan_width =
        config.half_width.value_or(std::max({8.0 * band.sigma_upper, 16.0 * config.dx, 1.0}));

    UniformApproxResult result;
    result.k_list = k_list;
    result.summary.experiment = "approx";
    result.summary.phi_name = phi_uc.name();
    result.summary.config_echo = config_to_json(config).dump();
    result.summary.certificate = certify_band(family);
    result.summary.band = band;

    for (double k : k_list) {
        const TestFunction phi_k = TestFunction::lipschitz_smoothing(phi_uc, k);
        result.sup_gaps.push_back(sup_norm_gap(phi_k, phi_uc, scan_width));

        ExperimentConfig per_k = config;
        per_k.phi = phi_k;
        ExperimentReport report = run_clt(per_k);
        const ReportRow& last = report.rows.back();
        result.summary.rows.push_back({static_cast<int>(std::lround(k)), last.dp_value,
                                       last.reference, last.abs_error});
        result.per_k.push_back(std::move(report));
    }
    result.summary.sup_gaps = result.sup_gaps;
    result.summary.elapsed_seconds = watch.seconds();
    return result;
}

double sup_norm_gap(const TestFunction& a, const TestFunction& b, double half_width) {
    if (!(half_width > 0.0)) throw validation_error("sup_norm_gap: half_width must be positive");
    double gap = 0.0;
    auto consider = [&](double x) { gap = std::max(gap, std::abs(a(x) - b(x))); };

    consider(0.0);
    const int n_lin = 2000;
    for (int j = 0; j <= n_lin; ++j)
        consider(-half_width + 2.0 * half_width * static_cast<double>(j) / n_lin);
    // logarithmic sweep resolves structure concentrated near the origin
    const int n_log = 1200;
    const double lo = std::log(1e-9);
    const double hi = std::log(half_width);
    for (int j = 0; j <= n_log; ++j) {
        const double x = std::exp(lo + (hi - lo) * static_cast<double>(j) / n_log);
        consider(x);
        consider(-x);
    }
    for (double x : a.kinks()) {
        if (std::abs(x) <= half_width) consider(x);
    }
    for (double x : b.kinks()) {
        if (std::abs(x) <= half_width) consider(x);
    }
    return gap;
}

} // namespace gexpect
