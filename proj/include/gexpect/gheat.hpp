#pragma once

#include "gexpect/scenario.hpp"
#include "gexpect/test_function.hpp"

#include <cstddef>
#include <vector>

namespace gexpect {

/// The pair (sigma_lower, sigma_upper) parameterizing the sublinear
/// function G and the G-normal distribution.
struct VolatilityBand {
    double sigma_lower = 0.0;
    double sigma_upper = 0.0;

    VolatilityBand(double lo, double hi);

    /// Band spanned by a moment certificate: sqrt of the extremal
    /// second moments.
    static VolatilityBand from_certificate(const MomentCertificate& cert);
};

/// Discretization of the space-time slab [0, horizon] x [-half_width, half_width].
/// The time step is safety_factor * dx^2 / sigma_upper^2, which keeps the
/// explicit update monotone.
struct GridSpec {
    double half_width = 8.0;
    double dx = 0.01;
    double horizon = 1.0;
    double safety_factor = 0.5;
    /// Upper bound on stored time layers (first and last always kept).
    std::size_t max_checkpoints = 65;

    GridSpec(double half_width, double dx, double horizon, double safety_factor = 0.5,
             std::size_t max_checkpoints = 65);
};

/// Discretized solution u(t, x) on the truncated slab, stored at
/// checkpoint times. Nodes are x_j = x_left + j*dx with x = 0 always a node.
struct SolutionSurface {
    double x_left = 0.0;
    double dx = 0.0;
    std::vector<double> times;               // checkpoint times, ascending, [0, T]
    std::vector<std::vector<double>> values; // one layer per checkpoint
    /// Set when half_width < 6 * sigma_upper * sqrt(horizon): the
    /// frozen boundary may then pollute values near x = 0.
    bool narrow_domain = false;

    std::size_t num_nodes() const { return values.empty() ? 0 : values.front().size(); }
    double x_at(std::size_t j) const { return x_left + static_cast<double>(j) * dx; }
    double x_right() const { return x_at(num_nodes() - 1); }
};

/// G(alpha) = 1/2 * (sigma_upper^2 * alpha^+ - sigma_lower^2 * alpha^-):
/// exactly 1/2 sigma_upper^2 alpha for alpha >= 0 and
/// 1/2 sigma_lower^2 alpha for alpha < 0.
double g_function(double alpha, const VolatilityBand& band);

/// One explicit time step u_j += dt * G(second difference / dx^2) on the
/// interior; the two boundary nodes are left untouched. Rejects dt above
/// the monotonicity bound dx^2 / sigma_upper^2.
std::vector<double> step_explicit(const std::vector<double>& u, const VolatilityBand& band,
                                  double dx, double dt);

/// Explicit monotone finite-difference solution of
///   du/dt - G(d^2u/dx^2) = 0,  u(0, .) = phi,
/// with Dirichlet boundary frozen at phi(+-half_width).
SolutionSurface solve_gheat(const TestFunction& phi, const VolatilityBand& band,
                            const GridSpec& spec);

/// Piecewise-linear interpolation in x and t. Exact at stored nodes;
/// rejects queries outside the stored domain.
double evaluate(const SolutionSurface& surface, double t, double x);

/// The G-normal expectation of phi: u(1, 0) of the G-heat flow started
/// at phi. The grid horizon is forced to 1.
double gnormal_expect(const TestFunction& phi, const VolatilityBand& band, const GridSpec& spec);

/// Classical oracle E[phi(sigma * N)], N standard normal, by panelled
/// Gauss-Legendre quadrature on [-10 sigma, 10 sigma] with panels split
/// at the kinks of phi. Absolute accuracy well below 1e-8 for the catalog.
double gaussian_expect(const TestFunction& phi, double sigma);

} // namespace gexpect
