#pragma once

#include "gexpect/gheat.hpp"
#include "gexpect/nested_dp.hpp"
#include "gexpect/scenario.hpp"
#include "gexpect/test_function.hpp"

#include <optional>
#include <string>
#include <vector>

namespace gexpect {

enum class OutputFormat { csv, json };

/// End-to-end experiment configuration. The family comes either from an
/// explicit scenario family or from a sigma list (symmetric two-point
/// construction); flags and config files populate the same fields.
struct ExperimentConfig {
    std::optional<std::vector<double>> sigmas;
    std::optional<ScenarioFamily> family;
    /// Optional band; must match the certified band of the family.
    std::optional<VolatilityBand> band_override;
    TestFunction phi = TestFunction::square();
    std::vector<int> n_list;
    double mean_shift = 0.0;
    double dx = 0.01;
    /// PDE/grid half width; defaults to 8 * sigma_upper.
    std::optional<double> half_width;
    double safety_factor = 0.5;
    /// Smoothing slopes for the uniform-approximation experiment.
    std::vector<double> k_list;
    OutputFormat format = OutputFormat::csv;

    ScenarioFamily resolve_family() const;
};

struct ReportRow {
    int n = 0;
    double dp_value = 0.0;
    double reference = 0.0;
    double abs_error = 0.0;
};

struct ExperimentReport {
    std::vector<ReportRow> rows;
    std::optional<double> fitted_rate;

    // metadata (excluded from the CSV body)
    std::string experiment;
    std::string phi_name;
    std::string config_echo; // canonical JSON of the config that produced the report
    MomentCertificate certificate;
    VolatilityBand band{0.0, 0.0};
    double mean_shift = 0.0;
    double elapsed_seconds = 0.0;
    std::vector<std::size_t> states_visited; // aligned with rows where applicable
    std::vector<double> sup_gaps;            // uniform-approximation runs only
};

/// LLN experiment: rows carry (n, E[|S_n/n - mu|^2], sigma_upper^2 / n,
/// |difference|). The family, after subtracting mean_shift, must be
/// zero-mean certified; the computed value never exceeds the reference
/// beyond 1e-9.
ExperimentReport run_lln(const ExperimentConfig& config);

/// CLT experiment: dp_value = E[phi(S_n / sqrt(n))] by nested DP,
/// reference = G-normal expectation of phi from the PDE solver. Requires
/// a CLT-admissible family (zero certified mean, sigma_lower > 0).
ExperimentReport run_clt(const ExperimentConfig& config);

/// Least-squares decay exponent of abs_error against n (slope of
/// log-error vs log-n, sign-flipped). Returns nothing when fewer than
/// three rows are given or any error is below 1e-12.
std::optional<double> fit_rate(const std::vector<ReportRow>& rows);

struct UniformApproxResult {
    /// One row per smoothing slope k (stored in the n column):
    /// dp/reference at the largest configured n for phi_k.
    ExperimentReport summary;
    std::vector<double> k_list;
    std::vector<double> sup_gaps;
    std::vector<ExperimentReport> per_k;
};

/// Corollary-style stability check for a bounded uniformly continuous
/// phi_uc: builds the Lipschitz regularizations phi_k, runs the CLT
/// experiment on each and reports the sup-norm gaps alongside.
UniformApproxResult uniform_approx_check(const TestFunction& phi_uc,
                                         const std::vector<double>& k_list,
                                         const ExperimentConfig& config);

/// max |a - b| over a dense scan of [-half_width, half_width]; the scan
/// mixes uniform and logarithmic spacing so cusp regions near 0 are seen.
double sup_norm_gap(const TestFunction& a, const TestFunction& b, double half_width);

} // namespace gexpect
