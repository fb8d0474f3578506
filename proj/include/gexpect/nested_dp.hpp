#pragma once

#include "gexpect/scenario.hpp"
#include "gexpect/test_function.hpp"

#include <cstddef>
#include <optional>
#include <string>

namespace gexpect {

/// Scaling applied inside phi at the terminal stage only:
/// E[phi(S_n)], E[phi(S_n / sqrt(n))] or E[phi(S_n / n)].
enum class Scaling { none, inv_sqrt_n, inv_n };

/// Grid representation for the value functions; piecewise-linear
/// interpolation between nodes, clamped at the edges.
struct GridBackend {
    double dx = 0.0;
    double half_width = 0.0;
};

/// A nested-expectation query: family, test function, horizon n,
/// terminal scaling and the value-function backend. Default backend is
/// exact_support (value functions live on the reachable sums).
struct DPQuery {
    ScenarioFamily family;
    TestFunction phi;
    int n = 1;
    Scaling scaling = Scaling::none;
    std::optional<GridBackend> grid; // engaged: grid backend
    std::size_t state_cap = 5'000'000;
};

struct NestedResult {
    double value = 0.0;
    std::string backend;
    std::size_t states_visited = 0;
    int n = 0;
    /// Grid backend only: some reachable sum left the grid and was clamped.
    bool grid_exited = false;
};

/// E[phi(scale(S_n))] by the backward recursion of nested independence:
///   v_n(s) = phi(scale(s)),
///   v_i(s) = max over measures of sum p * v_{i+1}(s + atom),
/// returning v_0(0). The newest variable is evaluated innermost.
NestedResult nested_expect(const DPQuery& q);

/// E[|S_n / n|^2] via the recursion with phi = square and 1/n scaling.
/// Requires a zero-mean-certified family; the result never exceeds
/// sigma_upper^2 / n beyond rounding.
double lln_second_moment(const ScenarioFamily& family, int n);

/// Independent oracle for the dynamic-programming principle: exhausts
/// the adapted-strategy tree (a measure choice at every realized partial
/// history, recomputed per history with no state merging or memoization)
/// and returns the largest classical expectation of phi(scale(S_n)).
/// Rejects instances whose choice tree exceeds the enumeration budget.
double strategy_sup_oracle(const ScenarioFamily& family, const TestFunction& phi, int n,
                           Scaling scaling = Scaling::none, int n_max = 4);

} // namespace gexpect
