#include "gexpect/scenario.hpp"

#include "gexpect/errors.hpp"
#include "test_util.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace gexpect;

namespace {

ScenarioFamily family_f() { return make_symmetric_two_point_family({0.5, 1.0}); }

// independent enumeration used to freeze the derived expectations below
double enumerate_max(const ScenarioFamily& fam, double (*f)(double)) {
    double best = -1e300;
    for (const auto& d : fam.measures()) {
        double e = 0.0;
        for (const Atom& a : d.atoms()) e += a.probability * f(a.value);
        best = std::max(best, e);
    }
    return best;
}

} // namespace

TEST_CASE("linear_expect on the catalog") {
    const DiscreteDistribution coin({{-1.0, 0.5}, {1.0, 0.5}});
    CHECK(linear_expect(coin, TestFunction::square()) == 1.0);
    CHECK(linear_expect(coin, TestFunction::identity()) == 0.0);
    const DiscreteDistribution point({{0.0, 1.0}});
    CHECK(linear_expect(point, TestFunction::constant(7.0)) == 7.0);
}

TEST_CASE("sublinear_expect maximizes over the family") {
    const ScenarioFamily f = family_f();
    CHECK(enumerate_max(f, [](double x) { return x * x; }) == 1.0);
    CHECK(sublinear_expect(f, TestFunction::square()) == 1.0);
    CHECK(enumerate_max(f, [](double x) { return -x * x; }) == -0.25);
    CHECK(sublinear_expect(f, TestFunction::neg_square()) == -0.25);
    CHECK(sublinear_expect(f, TestFunction::constant(3.25)) == 3.25);
    CHECK(sublinear_expect(f, TestFunction::constant(-2.0)) == -2.0);
}

TEST_CASE("p_norm") {
    const ScenarioFamily f = family_f();
    CHECK(p_norm(f, TestFunction::identity(), 2.0) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(p_norm(f, TestFunction::constant(0.0), 3.0) == 0.0);
    const ScenarioFamily coin = make_symmetric_two_point_family({1.0});
    CHECK(p_norm(coin, TestFunction::identity(), 1.0) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK_THROWS_AS(p_norm(f, TestFunction::identity(), 0.5), validation_error);
}

TEST_CASE("certify_band") {
    const MomentCertificate c = certify_band(family_f());
    CHECK(c.mean_upper == 0.0);
    CHECK(c.mean_lower == 0.0);
    CHECK(c.second_moment_upper == 1.0);
    CHECK(c.second_moment_lower == 0.25);
    CHECK(c.clt_admissible());

    const MomentCertificate classical = certify_band(make_symmetric_two_point_family({1.0}));
    CHECK(classical.second_moment_upper == 1.0);
    CHECK(classical.second_moment_lower == 1.0);
    CHECK(classical.clt_admissible());

    const ScenarioFamily degenerate(std::vector<DiscreteDistribution>{
        DiscreteDistribution({{0.0, 1.0}})});
    const MomentCertificate d = certify_band(degenerate);
    CHECK(d.mean_upper == 0.0);
    CHECK(d.second_moment_upper == 0.0);
    CHECK(d.zero_mean());
    CHECK_FALSE(d.clt_admissible());
}

TEST_CASE("make_symmetric_two_point_family") {
    const MomentCertificate c = certify_band(make_symmetric_two_point_family({0.5, 0.75, 1.0}));
    CHECK(c.mean_upper == 0.0);
    CHECK(c.mean_lower == 0.0);
    CHECK(c.second_moment_upper == 1.0);
    CHECK(c.second_moment_lower == 0.25);
    CHECK_THROWS_AS(make_symmetric_two_point_family({}), validation_error);
    CHECK_THROWS_AS(make_symmetric_two_point_family({0.5, 0.0}), validation_error);
    CHECK_THROWS_AS(make_symmetric_two_point_family({-1.0}), validation_error);
}

TEST_CASE("construction invariants") {
    CHECK_THROWS_AS(DiscreteDistribution({}), validation_error);
    CHECK_THROWS_AS(DiscreteDistribution({{0.0, 0.7}, {1.0, 0.2}}), validation_error);
    CHECK_THROWS_AS(DiscreteDistribution({{0.0, 1.5}, {1.0, -0.5}}), validation_error);
    CHECK_THROWS_AS(DiscreteDistribution({{std::nan(""), 1.0}}), validation_error);
    CHECK_THROWS_AS(ScenarioFamily(std::vector<DiscreteDistribution>{}), validation_error);
}

TEST_CASE("sublinear axioms on random families") {
    std::mt19937_64 rng(20240811);
    std::uniform_real_distribution<double> lambda(0.0, 10.0);
    std::uniform_real_distribution<double> shift(-5.0, 5.0);

    for (int iter = 0; iter < 300; ++iter) {
        const ScenarioFamily fam = testutil::random_family(rng);
        const TestFunction f = testutil::random_pwl(rng);
        const TestFunction g = testutil::random_pwl(rng);
        const TestFunction bump = testutil::random_nonneg_pwl(rng);
        const double lam = lambda(rng);
        const double c = shift(rng);

        // monotonicity: f <= f + bump pointwise
        const double ef = sublinear_expect(fam, f);
        CHECK(ef <= sublinear_expect(fam, [&](double x) { return f(x) + bump(x); }) + 1e-9);

        // sub-additivity
        const double eg = sublinear_expect(fam, g);
        const double ediff = sublinear_expect(fam, [&](double x) { return f(x) - g(x); });
        CHECK(ef - eg <= ediff + 1e-9);

        // positive homogeneity and constant translatability
        CHECK(sublinear_expect(fam, f.scaled(lam)) == doctest::Approx(lam * ef).epsilon(1e-12));
        CHECK(sublinear_expect(fam, f.shifted(c)) == doctest::Approx(ef + c).epsilon(1e-12));

        // Minkowski for p in {1, 2, 3}
        for (double p : {1.0, 2.0, 3.0}) {
            const double lhs = p_norm(fam, [&](double x) { return f(x) + g(x); }, p);
            CHECK(lhs <= p_norm(fam, f, p) + p_norm(fam, g, p) + 1e-9);
        }

        // Hoelder with 1/p + 1/q = 1
        for (auto [p, q] : {std::pair{2.0, 2.0}, std::pair{3.0, 1.5}}) {
            const double lhs = sublinear_expect(fam, [&](double x) { return std::abs(f(x) * g(x)); });
            CHECK(lhs <= p_norm(fam, f, p) * p_norm(fam, g, q) + 1e-9);
        }
    }
}

TEST_CASE("proposition-2 additivity for mean-certain summands") {
    std::mt19937_64 rng(777101);
    std::uniform_real_distribution<double> coeff(-3.0, 3.0);

    for (int iter = 0; iter < 300; ++iter) {
        const TestFunction f = testutil::random_pwl(rng);
        const double a = coeff(rng);
        const double c = coeff(rng);

        // constants are mean-certain under every family
        const ScenarioFamily any = testutil::random_family(rng);
        const double ef = sublinear_expect(any, f);
        CHECK(sublinear_expect(any, [&](double x) { return f(x) + c; }) ==
              doctest::Approx(ef + c).epsilon(1e-12));

        // affine g over a family whose measures all have mean zero:
        // E[g] = -E[-g], so expectations add
        const ScenarioFamily centered = testutil::random_zero_mean_family(rng);
        auto g = [&](double x) { return a * x + c; };
        const double eg = sublinear_expect(centered, g);
        REQUIRE(std::abs(eg + sublinear_expect(centered, [&](double x) { return -g(x); })) <= 1e-9);
        const double sum = sublinear_expect(centered, [&](double x) { return f(x) + g(x); });
        CHECK(sum == doctest::Approx(sublinear_expect(centered, f) + eg).epsilon(1e-9));
    }
}

TEST_CASE("test function metadata") {
    const TestFunction hat = testutil::hat();
    CHECK(hat.bounded());
    CHECK(hat.lipschitz().value() == doctest::Approx(1.0));
    CHECK(hat.convexity() == Convexity::neither);
    CHECK(hat(0.0) == 1.0);
    CHECK(hat(0.5) == 0.5);
    CHECK(hat(5.0) == 0.0); // constant extension
    CHECK(hat(-5.0) == 0.0);

    const TestFunction ramp = TestFunction::piecewise_linear({{0.0, 0.0}, {1.0, 2.0}});
    CHECK(ramp.lipschitz().value() == doctest::Approx(2.0));

    CHECK(TestFunction::square().convexity() == Convexity::convex);
    CHECK(TestFunction::neg_square().convexity() == Convexity::concave);
    CHECK(TestFunction::positive_part().lipschitz().value() == 1.0);
    CHECK_FALSE(TestFunction::square().lipschitz().has_value());
    CHECK(TestFunction::sqrt_cap().bounded());
    CHECK_FALSE(TestFunction::sqrt_cap().lipschitz().has_value());
    CHECK(TestFunction::sqrt_cap()(0.25) == 0.5);
    CHECK(TestFunction::sqrt_cap()(-4.0) == 1.0);

    CHECK_THROWS_AS(TestFunction::piecewise_linear({{1.0, 0.0}, {1.0, 1.0}}), validation_error);
    CHECK_THROWS_AS(TestFunction::piecewise_linear({}), validation_error);
    CHECK_THROWS_AS(TestFunction::from_name("frobnicate"), validation_error);
    CHECK(TestFunction::from_name("constant:7")(123.0) == 7.0);

    const TestFunction scaled = TestFunction::positive_part().scaled(-2.0);
    CHECK(scaled.convexity() == Convexity::concave);
    CHECK(scaled.lipschitz().value() == doctest::Approx(2.0));
    CHECK(scaled(3.0) == -6.0);
}
