#include "gexpect/scenario.hpp"

#include <cmath>
#include <limits>

namespace gexpect {

DiscreteDistribution::DiscreteDistribution(std::vector<Atom> atoms) : atoms_(std::move(atoms)) {
    if (atoms_.empty()) throw validation_error("DiscreteDistribution: at least one atom required");
    double sum = 0.0;
    for (const Atom& a : atoms_) {
        if (!std::isfinite(a.value)) throw validation_error("DiscreteDistribution: atom values must be finite");
        if (!(a.probability >= 0.0)) throw validation_error("DiscreteDistribution: probabilities must be nonnegative");
        sum += a.probability;
    }
    if (std::abs(sum - 1.0) > kProbSumTol)
        throw validation_error("DiscreteDistribution: probabilities must sum to 1 within 1e-12");
}

double DiscreteDistribution::min_value() const {
    double m = std::numeric_limits<double>::infinity();
    for (const Atom& a : atoms_) m = std::min(m, a.value);
    return m;
}

double DiscreteDistribution::max_value() const {
    double m = -std::numeric_limits<double>::infinity();
    for (const Atom& a : atoms_) m = std::max(m, a.value);
    return m;
}

double DiscreteDistribution::mean() const {
    return linear_expect(*this, [](double x) { return x; });
}

DiscreteDistribution DiscreteDistribution::translated(double mu) const {
    std::vector<Atom> shifted = atoms_;
    for (Atom& a : shifted) a.value += mu;
    return DiscreteDistribution(std::move(shifted));
}

ScenarioFamily::ScenarioFamily(std::vector<DiscreteDistribution> measures)
    : measures_(std::move(measures)) {
    if (measures_.empty()) throw validation_error("ScenarioFamily: at least one measure required");
}

double ScenarioFamily::min_support() const {
    double m = std::numeric_limits<double>::infinity();
    for (const auto& d : measures_) m = std::min(m, d.min_value());
    return m;
}

double ScenarioFamily::max_support() const {
    double m = -std::numeric_limits<double>::infinity();
    for (const auto& d : measures_) m = std::max(m, d.max_value());
    return m;
}

ScenarioFamily ScenarioFamily::translated(double mu) const {
    std::vector<DiscreteDistribution> shifted;
    shifted.reserve(measures_.size());
    for (const auto& d : measures_) shifted.push_back(d.translated(mu));
    return ScenarioFamily(std::move(shifted));
}

MomentCertificate certify_band(const ScenarioFamily& family) {
    MomentCertificate cert;
    cert.mean_upper = sublinear_expect(family, [](double x) { return x; });
    cert.mean_lower = -sublinear_expect(family, [](double x) { return -x; }) + 0.0;
    cert.second_moment_upper = sublinear_expect(family, [](double x) { return x * x; });
    cert.second_moment_lower = -sublinear_expect(family, [](double x) { return -(x * x); }) + 0.0;
    return cert;
}

ScenarioFamily make_symmetric_two_point_family(const std::vector<double>& sigmas) {
    if (sigmas.empty())
        throw validation_error("make_symmetric_two_point_family: sigma list must be nonempty");
    std::vector<DiscreteDistribution> measures;
    measures.reserve(sigmas.size());
    for (double s : sigmas) {
        if (!(s > 0.0) || !std::isfinite(s))
            throw validation_error("make_symmetric_two_point_family: sigmas must be positive and finite");
        measures.push_back(DiscreteDistribution({{-s, 0.5}, {s, 0.5}}));
    }
    return ScenarioFamily(std::move(measures));
}

} // namespace gexpect
