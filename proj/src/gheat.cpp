#include "gexpect/gheat.hpp"

#include "gexpect/errors.hpp"

#include <algorithm>
#include <cmath>

namespace gexpect {

namespace {

constexpr double kPi = 3.14159265358979323846;

void step_into(const std::vector<double>& src, std::vector<double>& dst,
               const VolatilityBand& band, double dx, double dt) {
    const std::size_t n = src.size();
    dst.resize(n);
    dst.front() = src.front();
    dst.back() = src.back();
    const double inv_dx2 = 1.0 / (dx * dx);
    const double half_up = 0.5 * band.sigma_upper * band.sigma_upper;
    const double half_lo = 0.5 * band.sigma_lower * band.sigma_lower;
    for (std::size_t j = 1; j + 1 < n; ++j) {
        const double alpha = (src[j + 1] - 2.0 * src[j] + src[j - 1]) * inv_dx2;
        const double g = alpha >= 0.0 ? half_up * alpha : half_lo * alpha;
        dst[j] = src[j] + dt * g;
    }
}

void check_cfl(const VolatilityBand& band, double dx, double dt) {
    if (!(dt > 0.0)) throw numerical_error("step_explicit: dt must be positive");
    const double s2 = band.sigma_upper * band.sigma_upper;
    if (s2 > 0.0 && dt > (dx * dx / s2) * (1.0 + 1e-12))
        throw numerical_error("step_explicit: dt violates the monotonicity bound dx^2/sigma_upper^2");
}

// 20-point Gauss-Legendre rule on [-1, 1] via Newton iteration on the
// Legendre recurrence.
struct GaussRule {
    std::vector<double> nodes;
    std::vector<double> weights;
};

const GaussRule& gauss_legendre_20() {
    static const GaussRule rule = [] {
        const int n = 20;
        GaussRule r;
        r.nodes.resize(n);
        r.weights.resize(n);
        for (int i = 0; i < (n + 1) / 2; ++i) {
            double x = std::cos(kPi * (i + 0.75) / (n + 0.5));
            double dp = 0.0;
            for (int it = 0; it < 100; ++it) {
                double p0 = 1.0, p1 = x;
                for (int k = 2; k <= n; ++k) {
                    const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                    p0 = p1;
                    p1 = p2;
                }
                dp = n * (x * p1 - p0) / (x * x - 1.0);
                const double dxn = p1 / dp;
                x -= dxn;
                if (std::abs(dxn) < 1e-15) break;
            }
            r.nodes[i] = -x;
            r.nodes[n - 1 - i] = x;
            const double w = 2.0 / ((1.0 - x * x) * dp * dp);
            r.weights[i] = w;
            r.weights[n - 1 - i] = w;
        }
        return r;
    }();
    return rule;
}

} // namespace

VolatilityBand::VolatilityBand(double lo, double hi) : sigma_lower(lo), sigma_upper(hi) {
    if (!(lo >= 0.0) || !(hi >= lo) || !std::isfinite(hi))
        throw validation_error("VolatilityBand: need 0 <= sigma_lower <= sigma_upper < inf");
}

VolatilityBand VolatilityBand::from_certificate(const MomentCertificate& cert) {
    return VolatilityBand(std::sqrt(std::max(0.0, cert.second_moment_lower)),
                          std::sqrt(std::max(0.0, cert.second_moment_upper)));
}

GridSpec::GridSpec(double half_width_, double dx_, double horizon_, double safety_factor_,
                   std::size_t max_checkpoints_)
    : half_width(half_width_), dx(dx_), horizon(horizon_), safety_factor(safety_factor_),
      max_checkpoints(max_checkpoints_) {
    if (!(half_width > 0.0) || !(dx > 0.0) || !(horizon > 0.0))
        throw validation_error("GridSpec: half_width, dx and horizon must be positive");
    if (half_width / dx < 16.0 - 1e-9)
        throw validation_error("GridSpec: half_width / dx must be at least 16");
    if (!(safety_factor > 0.0) || !(safety_factor <= 1.0))
        throw validation_error("GridSpec: safety_factor must lie in (0, 1]");
    if (max_checkpoints < 2) throw validation_error("GridSpec: need at least 2 checkpoints");
}

double g_function(double alpha, const VolatilityBand& band) {
    return alpha >= 0.0 ? 0.5 * band.sigma_upper * band.sigma_upper * alpha
                        : 0.5 * band.sigma_lower * band.sigma_lower * alpha;
}

std::vector<double> step_explicit(const std::vector<double>& u, const VolatilityBand& band,
                                  double dx, double dt) {
    if (u.size() < 3) throw validation_error("step_explicit: need at least 3 nodes");
    if (!(dx > 0.0)) throw validation_error("step_explicit: dx must be positive");
    check_cfl(band, dx, dt);
    std::vector<double> next;
    step_into(u, next, band, dx, dt);
    return next;
}

SolutionSurface solve_gheat(const TestFunction& phi, const VolatilityBand& band,
                            const GridSpec& spec) {
    const auto m_half = static_cast<std::size_t>(std::llround(spec.half_width / spec.dx));
    const std::size_t n_nodes = 2 * m_half + 1;

    SolutionSurface surface;
    surface.dx = spec.dx;
    surface.x_left = -static_cast<double>(m_half) * spec.dx;
    const double l_eff = -surface.x_left;
    surface.narrow_domain = l_eff < 6.0 * band.sigma_upper * std::sqrt(spec.horizon);

    std::vector<double> u(n_nodes);
    for (std::size_t j = 0; j < n_nodes; ++j) {
        u[j] = phi(surface.x_at(j));
        if (!std::isfinite(u[j]))
            throw validation_error("solve_gheat: initial data is not finite on the grid");
    }

    const double s2 = band.sigma_upper * band.sigma_upper;
    std::size_t n_steps = 1;
    double dt = spec.horizon;
    if (s2 > 0.0) {
        const double dt_raw = spec.safety_factor * spec.dx * spec.dx / s2;
        n_steps = static_cast<std::size_t>(std::ceil(spec.horizon / dt_raw - 1e-12));
        n_steps = std::max<std::size_t>(n_steps, 1);
        dt = spec.horizon / static_cast<double>(n_steps);
    }
    check_cfl(band, spec.dx, dt);

    const std::size_t stride =
        std::max<std::size_t>(1, (n_steps + spec.max_checkpoints - 2) / (spec.max_checkpoints - 1));

    surface.times.push_back(0.0);
    surface.values.push_back(u);
    std::vector<double> next(n_nodes);
    for (std::size_t step = 1; step <= n_steps; ++step) {
        step_into(u, next, band, spec.dx, dt);
        u.swap(next);
        if (step % stride == 0 || step == n_steps) {
            surface.times.push_back(step == n_steps ? spec.horizon
                                                    : static_cast<double>(step) * dt);
            surface.values.push_back(u);
        }
    }
    return surface;
}

double evaluate(const SolutionSurface& surface, double t, double x) {
    if (surface.values.empty()) throw validation_error("evaluate: empty surface");
    const double t_max = surface.times.back();
    const double t_tol = 1e-12 * (1.0 + std::abs(t_max));
    const double x_tol = 1e-12 * (1.0 + surface.x_right());
    if (t < -t_tol || t > t_max + t_tol)
        throw validation_error("evaluate: time outside the stored horizon");
    if (x < surface.x_left - x_tol || x > surface.x_right() + x_tol)
        throw validation_error("evaluate: position outside the stored domain");

    t = std::clamp(t, 0.0, t_max);
    x = std::clamp(x, surface.x_left, surface.x_right());

    auto interp_x = [&](const std::vector<double>& layer) {
        double pos = (x - surface.x_left) / surface.dx;
        auto j = static_cast<std::size_t>(pos);
        if (j + 1 >= layer.size()) j = layer.size() - 2;
        double w = pos - static_cast<double>(j);
        if (w < 1e-12) w = 0.0;
        if (w > 1.0 - 1e-12) w = 1.0;
        return (1.0 - w) * layer[j] + w * layer[j + 1];
    };

    const auto it = std::upper_bound(surface.times.begin(), surface.times.end(), t);
    const auto hi = std::min<std::size_t>(
        static_cast<std::size_t>(it - surface.times.begin()), surface.times.size() - 1);
    if (hi == 0) return interp_x(surface.values.front());
    const std::size_t lo = hi - 1;
    const double span = surface.times[hi] - surface.times[lo];
    double w = span > 0.0 ? (t - surface.times[lo]) / span : 1.0;
    if (w < 1e-12) w = 0.0;
    if (w > 1.0 - 1e-12) w = 1.0;
    if (w == 0.0) return interp_x(surface.values[lo]);
    if (w == 1.0) return interp_x(surface.values[hi]);
    return (1.0 - w) * interp_x(surface.values[lo]) + w * interp_x(surface.values[hi]);
}

double gnormal_expect(const TestFunction& phi, const VolatilityBand& band, const GridSpec& spec) {
    const GridSpec unit(spec.half_width, spec.dx, 1.0, spec.safety_factor, spec.max_checkpoints);
    const SolutionSurface surface = solve_gheat(phi, band, unit);
    return evaluate(surface, 1.0, 0.0);
}

double gaussian_expect(const TestFunction& phi, double sigma) {
    if (!(sigma >= 0.0) || !std::isfinite(sigma))
        throw validation_error("gaussian_expect: sigma must be nonnegative and finite");
    if (sigma == 0.0) return phi(0.0);

    const double lo = -10.0 * sigma;
    const double hi = 10.0 * sigma;
    std::vector<double> cuts{lo, hi};
    for (double k : phi.kinks())
        if (k > lo && k < hi) cuts.push_back(k);
    std::sort(cuts.begin(), cuts.end());

    const GaussRule& rule = gauss_legendre_20();
    const double inv_norm = 1.0 / (sigma * std::sqrt(2.0 * kPi));
    const double max_panel = 0.5 * sigma;

    double acc = 0.0;
    for (std::size_t c = 0; c + 1 < cuts.size(); ++c) {
        const double a = cuts[c];
        const double b = cuts[c + 1];
        if (!(b > a)) continue;
        const auto n_sub = static_cast<std::size_t>(std::ceil((b - a) / max_panel));
        const double h = (b - a) / static_cast<double>(n_sub);
        for (std::size_t s = 0; s < n_sub; ++s) {
            const double pa = a + static_cast<double>(s) * h;
            const double mid = pa + 0.5 * h;
            const double half = 0.5 * h;
            for (std::size_t q = 0; q < rule.nodes.size(); ++q) {
                const double x = mid + half * rule.nodes[q];
                const double pdf = inv_norm * std::exp(-0.5 * (x / sigma) * (x / sigma));
                acc += half * rule.weights[q] * phi(x) * pdf;
            }
        }
    }
    return acc;
}

} // namespace gexpect
