#include "gexpect/nested_dp.hpp"

#include "gexpect/errors.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <unordered_map>
#include <vector>

namespace gexpect {

namespace {

// Reachable sums are merged when equal to 12 decimal digits; this keeps
// float-equal states (same sum reached along different atom orders)
// identified without collapsing genuinely distinct lattice points.
std::int64_t state_key(double v) {
    if (std::abs(v) > 9e5)
        throw numerical_error("nested_expect: partial sums too large for the exact-support backend");
    return std::llround(v * 1e12);
}

double apply_scaling(double s, Scaling scaling, int n) {
    switch (scaling) {
    case Scaling::none: return s;
    case Scaling::inv_sqrt_n: return s / std::sqrt(static_cast<double>(n));
    case Scaling::inv_n: return s / static_cast<double>(n);
    }
    return s;
}

std::vector<double> support_union(const ScenarioFamily& family) {
    std::vector<double> atoms;
    for (const auto& measure : family.measures())
        for (const Atom& a : measure.atoms()) atoms.push_back(a.value);
    std::sort(atoms.begin(), atoms.end());
    std::vector<double> unique;
    std::unordered_map<std::int64_t, bool> seen;
    for (double v : atoms)
        if (seen.emplace(state_key(v), true).second) unique.push_back(v);
    return unique;
}

// Sums merged by rounding can sit one key apart from a freshly computed
// lookup value; the neighbor keys cover that.
double lookup_state(const std::unordered_map<std::int64_t, double>& value, double s) {
    const std::int64_t k = state_key(s);
    for (std::int64_t delta : {0, -1, 1}) {
        auto it = value.find(k + delta);
        if (it != value.end()) return it->second;
    }
    throw numerical_error("nested_expect: internal state lookup failed");
}

NestedResult run_exact(const DPQuery& q) {
    const std::vector<double> atoms = support_union(q.family);

    // forward pass: reachable sums per stage, ascending
    std::vector<std::vector<double>> stages(static_cast<std::size_t>(q.n) + 1);
    stages[0] = {0.0};
    std::size_t total_states = 1;
    for (int i = 0; i < q.n; ++i) {
        std::unordered_map<std::int64_t, bool> seen;
        std::vector<double>& next = stages[static_cast<std::size_t>(i) + 1];
        for (double s : stages[static_cast<std::size_t>(i)]) {
            for (double a : atoms) {
                const double sum = s + a;
                if (seen.emplace(state_key(sum), true).second) {
                    next.push_back(sum);
                    if (total_states + next.size() > q.state_cap)
                        throw numerical_error("nested_expect: reachable support exceeds the state cap");
                }
            }
        }
        std::sort(next.begin(), next.end());
        total_states += next.size();
    }

    // backward pass
    std::unordered_map<std::int64_t, double> value;
    value.reserve(stages.back().size() * 2);
    for (double s : stages.back()) value.emplace(state_key(s), q.phi(apply_scaling(s, q.scaling, q.n)));

    for (int i = q.n - 1; i >= 0; --i) {
        std::unordered_map<std::int64_t, double> prev;
        prev.reserve(stages[static_cast<std::size_t>(i)].size() * 2);
        for (double s : stages[static_cast<std::size_t>(i)]) {
            double best = 0.0;
            bool first = true;
            for (const auto& measure : q.family.measures()) {
                double e = 0.0;
                for (const Atom& a : measure.atoms()) e += a.probability * lookup_state(value, s + a.value);
                if (first || e > best) {
                    best = e;
                    first = false;
                }
            }
            prev.emplace(state_key(s), best);
        }
        value.swap(prev);
    }

    NestedResult result;
    result.value = value.at(state_key(0.0));
    result.backend = "exact_support";
    result.states_visited = total_states;
    result.n = q.n;
    return result;
}

NestedResult run_grid(const DPQuery& q) {
    const GridBackend& g = *q.grid;
    if (!(g.dx > 0.0) || !(g.half_width > 0.0))
        throw validation_error("nested_expect: grid backend needs positive dx and half_width");
    const auto m_half = static_cast<std::size_t>(std::llround(g.half_width / g.dx));
    if (m_half == 0) throw validation_error("nested_expect: grid too coarse");
    if (m_half > 25'000'000)
        throw numerical_error("nested_expect: grid backend node count exceeds the budget");
    const std::size_t n_nodes = 2 * m_half + 1;
    const double x_left = -static_cast<double>(m_half) * g.dx;

    // sums reachable within n steps span [n*min(0,inf support), n*max(0,sup support)]
    const double n_d = static_cast<double>(q.n);
    const bool exited =
        n_d * std::max(0.0, q.family.max_support()) > g.half_width + 1e-9 ||
        n_d * std::min(0.0, q.family.min_support()) < -g.half_width - 1e-9;

    auto interp = [&](const std::vector<double>& layer, double x) {
        double pos = (x - x_left) / g.dx;
        if (pos <= 0.0) return layer.front();
        if (pos >= static_cast<double>(n_nodes - 1)) return layer.back();
        auto j = static_cast<std::size_t>(pos);
        double w = pos - static_cast<double>(j);
        if (w < 1e-12) w = 0.0;
        if (w > 1.0 - 1e-12) {
            w = 0.0;
            ++j;
        }
        return w == 0.0 ? layer[j] : (1.0 - w) * layer[j] + w * layer[j + 1];
    };

    std::vector<double> v(n_nodes);
    for (std::size_t j = 0; j < n_nodes; ++j)
        v[j] = q.phi(apply_scaling(x_left + static_cast<double>(j) * g.dx, q.scaling, q.n));

    std::vector<double> next(n_nodes);
    for (int i = q.n - 1; i >= 0; --i) {
        for (std::size_t j = 0; j < n_nodes; ++j) {
            const double x = x_left + static_cast<double>(j) * g.dx;
            double best = 0.0;
            bool first = true;
            for (const auto& measure : q.family.measures()) {
                double e = 0.0;
                for (const Atom& a : measure.atoms()) e += a.probability * interp(v, x + a.value);
                if (first || e > best) {
                    best = e;
                    first = false;
                }
            }
            next[j] = best;
        }
        v.swap(next);
    }

    NestedResult result;
    result.value = interp(v, 0.0);
    result.backend = "grid";
    result.states_visited = n_nodes * (static_cast<std::size_t>(q.n) + 1);
    result.n = q.n;
    result.grid_exited = exited;
    return result;
}

} // namespace

NestedResult nested_expect(const DPQuery& q) {
    if (q.n < 1) throw validation_error("nested_expect: n must be at least 1");
    return q.grid ? run_grid(q) : run_exact(q);
}

double lln_second_moment(const ScenarioFamily& family, int n) {
    if (n < 1) throw validation_error("lln_second_moment: n must be at least 1");
    if (!certify_band(family).zero_mean())
        throw validation_error("lln_second_moment: family is not zero-mean certified");
    DPQuery q{family, TestFunction::square(), n, Scaling::inv_n, std::nullopt, 5'000'000};
    return nested_expect(q).value;
}

double strategy_sup_oracle(const ScenarioFamily& family, const TestFunction& phi, int n,
                           Scaling scaling, int n_max) {
    if (n < 1) throw validation_error("strategy_sup_oracle: n must be at least 1");
    if (n > n_max)
        throw validation_error("strategy_sup_oracle: n exceeds the enumeration budget");
    std::size_t branching = 0;
    for (const auto& measure : family.measures()) branching += measure.atoms().size();
    double paths = 1.0;
    for (int i = 0; i < n; ++i) paths *= static_cast<double>(branching);
    if (paths > 2e7)
        throw validation_error("strategy_sup_oracle: choice tree exceeds the enumeration budget");

    std::function<double(double, int)> best_from = [&](double sum, int depth) -> double {
        if (depth == n) return phi(apply_scaling(sum, scaling, n));
        double best = 0.0;
        bool first = true;
        for (const auto& measure : family.measures()) {
            double e = 0.0;
            for (const Atom& a : measure.atoms()) e += a.probability * best_from(sum + a.value, depth + 1);
            if (first || e > best) {
                best = e;
                first = false;
            }
        }
        return best;
    };
    return best_from(0.0, 0);
}

} // namespace gexpect
