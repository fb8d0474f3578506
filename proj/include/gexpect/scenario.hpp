#pragma once

#include "gexpect/errors.hpp"
#include "gexpect/test_function.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace gexpect {

/// Absolute tolerance for the probability-sum invariant.
inline constexpr double kProbSumTol = 1e-12;
/// Absolute tolerance for moment-certificate equalities; all certified
/// quantities are short exact sums, so the slack only absorbs rounding.
inline constexpr double kCertTol = 1e-9;

struct Atom {
    double value = 0.0;
    double probability = 0.0;
};

/// One linear expectation inside the sublinear envelope: a finite
/// discrete probability distribution on the real line.
class DiscreteDistribution {
  public:
    explicit DiscreteDistribution(std::vector<Atom> atoms);

    const std::vector<Atom>& atoms() const { return atoms_; }
    double min_value() const;
    double max_value() const;
    double mean() const;

    /// The distribution of X + mu.
    DiscreteDistribution translated(double mu) const;

  private:
    std::vector<Atom> atoms_;
};

/// A finite ambiguity set of measures. The induced sublinear expectation
/// is the pointwise maximum of the member linear expectations.
class ScenarioFamily {
  public:
    explicit ScenarioFamily(std::vector<DiscreteDistribution> measures);

    const std::vector<DiscreteDistribution>& measures() const { return measures_; }
    double min_support() const;
    double max_support() const;

    /// Every measure translated by mu.
    ScenarioFamily translated(double mu) const;

  private:
    std::vector<DiscreteDistribution> measures_;
};

/// Extremal first and second moments of a family:
/// mean_upper = E[X], mean_lower = -E[-X],
/// second_moment_upper = E[X^2] (sigma_bar^2),
/// second_moment_lower = -E[-X^2] (sigma_lower^2).
struct MomentCertificate {
    double mean_upper = 0.0;
    double mean_lower = 0.0;
    double second_moment_upper = 0.0;
    double second_moment_lower = 0.0;

    bool zero_mean(double tol = kCertTol) const {
        return std::abs(mean_upper) <= tol && std::abs(mean_lower) <= tol;
    }
    /// Zero certified mean and strictly positive lower variance.
    bool clt_admissible(double tol = kCertTol) const {
        return zero_mean(tol) && second_moment_lower > tol;
    }
};

/// Classical expectation sum(p * f(value)) over the atoms, in stored order.
template <class F>
double linear_expect(const DiscreteDistribution& dist, F&& f) {
    double acc = 0.0;
    for (const Atom& a : dist.atoms()) acc += a.probability * f(a.value);
    return acc;
}

/// The sublinear expectation: maximum of the member linear expectations.
/// Ties resolve to the first-listed measure (the value is unaffected).
template <class F>
double sublinear_expect(const ScenarioFamily& family, F&& f) {
    double best = linear_expect(family.measures().front(), f);
    for (std::size_t i = 1; i < family.measures().size(); ++i)
        best = std::max(best, linear_expect(family.measures()[i], f));
    return best;
}

/// ||f||_p = E[|f|^p]^(1/p). Rejects p < 1.
template <class F>
double p_norm(const ScenarioFamily& family, F&& f, double p) {
    if (!(p >= 1.0)) throw validation_error("p_norm: p must be >= 1");
    const double m = sublinear_expect(
        family, [&](double x) { return std::pow(std::abs(f(x)), p); });
    return std::pow(m, 1.0 / p);
}

/// Extremal moments by enumeration over the family.
MomentCertificate certify_band(const ScenarioFamily& family);

/// The canonical CLT-admissible family: one symmetric two-point measure
/// {+sigma, -sigma} with probability 1/2 each, per entry.
ScenarioFamily make_symmetric_two_point_family(const std::vector<double>& sigmas);

} // namespace gexpect
