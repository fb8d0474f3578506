#include "gexpect/json_io.hpp"

#include "gexpect/errors.hpp"
#include "test_util.hpp"

#include <doctest.h>

#include <random>

using namespace gexpect;

TEST_CASE("family JSON round trip") {
    std::mt19937_64 rng(313);
    for (int trial = 0; trial < 20; ++trial) {
        const ScenarioFamily fam = testutil::random_family(rng);
        const ScenarioFamily back = family_from_json(family_to_json(fam));
        REQUIRE(back.measures().size() == fam.measures().size());
        for (std::size_t m = 0; m < fam.measures().size(); ++m) {
            const auto& a = fam.measures()[m].atoms();
            const auto& b = back.measures()[m].atoms();
            REQUIRE(a.size() == b.size());
            for (std::size_t i = 0; i < a.size(); ++i) {
                CHECK(a[i].value == b[i].value);
                CHECK(a[i].probability == b[i].probability);
            }
        }
    }
    CHECK_THROWS_AS(family_from_json(nlohmann::json::object()), validation_error);
    CHECK_THROWS_AS(family_from_json(nlohmann::json::parse(R"({"measures": [{"atoms": [[0]]}]})")),
                    validation_error);
}

TEST_CASE("test function JSON forms") {
    const TestFunction pwl = testutil::hat();
    const nlohmann::json j = test_function_to_json(pwl);
    REQUIRE(j.contains("knots"));
    const TestFunction back = test_function_from_json(j);
    for (double x : {-2.0, -0.3, 0.0, 0.7, 1.0, 3.0}) CHECK(back(x) == pwl(x));

    CHECK(test_function_from_json("positive_part")(2.0) == 2.0);
    CHECK(test_function_from_json("constant:3.5")(0.0) == 3.5);
    CHECK(test_function_from_json("sqrt_cap")(4.0) == 1.0);
    CHECK_THROWS_AS(test_function_from_json(nlohmann::json::object()), validation_error);
    CHECK_THROWS_AS(test_function_from_json("no_such_phi"), validation_error);
}

TEST_CASE("dp query JSON round trip") {
    DPQuery q{make_symmetric_two_point_family({0.5, 1.0}), TestFunction::positive_part(), 4,
              Scaling::inv_sqrt_n, std::nullopt, 5'000'000};
    const DPQuery back = dp_query_from_json(dp_query_to_json(q));
    CHECK(back.n == 4);
    CHECK(back.scaling == Scaling::inv_sqrt_n);
    CHECK_FALSE(back.grid.has_value());
    CHECK(nested_expect(back).value == nested_expect(q).value);

    q.grid = GridBackend{0.5, 6.0};
    const DPQuery grid_back = dp_query_from_json(dp_query_to_json(q));
    REQUIRE(grid_back.grid.has_value());
    CHECK(grid_back.grid->dx == 0.5);
    CHECK(grid_back.grid->half_width == 6.0);

    const NestedResult r = nested_expect(q);
    const nlohmann::json rj = nested_result_to_json(r);
    CHECK(rj["value"].get<double>() == r.value);
    CHECK(rj["backend"].get<std::string>() == "grid");
    CHECK(rj["n"].get<int>() == 4);
    CHECK(rj["states_visited"].get<std::size_t>() == r.states_visited);
}

TEST_CASE("config JSON mirrors the experiment fields") {
    const nlohmann::json j = nlohmann::json::parse(R"({
        "sigmas": [0.5, 1.0],
        "phi": "positive_part",
        "n_list": [4, 16],
        "mean_shift": 0.0,
        "dx": 0.05,
        "half_width": 8.0,
        "safety_factor": 0.5,
        "format": "csv"
    })");
    const ExperimentConfig config = config_from_json(j);
    CHECK(config.sigmas.has_value());
    CHECK(config.n_list == std::vector<int>{4, 16});
    CHECK(config.dx == 0.05);
    CHECK(config.half_width.value() == 8.0);
    CHECK(config.format == OutputFormat::csv);

    const nlohmann::json echo = config_to_json(config);
    const ExperimentConfig again = config_from_json(echo);
    CHECK(again.n_list == config.n_list);
    CHECK(again.dx == config.dx);

    CHECK_THROWS_AS(config_from_json(nlohmann::json::parse(R"({"format": "xml"})")),
                    validation_error);
    CHECK_THROWS_AS(config_from_json(nlohmann::json::array()), validation_error);
}

TEST_CASE("report CSV layout") {
    ExperimentReport report;
    report.rows.push_back({4, 0.5, 0.25, 0.25});
    report.rows.push_back({16, 0.375, 0.25, 0.125});
    report.fitted_rate = 0.5;
    CHECK(report_to_csv(report) ==
          "n,dp_value,reference,abs_error\n"
          "4,0.5,0.25,0.25\n"
          "16,0.375,0.25,0.125\n"
          "# fitted_rate=0.5\n");

    report.fitted_rate.reset();
    report.rows.clear();
    report.rows.push_back({1, 1.0 / 3.0, 0.0, 1.0 / 3.0});
    const std::string csv = report_to_csv(report);
    CHECK(csv.find("0.33333333333333331") != std::string::npos); // 17 significant digits
    CHECK(csv.find("# fitted_rate=none") != std::string::npos);
}

TEST_CASE("report JSON mirror") {
    ExperimentReport report;
    report.experiment = "clt";
    report.phi_name = "positive_part";
    report.rows.push_back({4, 0.375, 0.399, 0.024});
    report.fitted_rate = 0.5;
    report.band = VolatilityBand(0.5, 1.0);
    const nlohmann::json j = report_to_json(report);
    CHECK(j["rows"].size() == 1);
    CHECK(j["rows"][0]["n"].get<int>() == 4);
    CHECK(j["fitted_rate"].get<double>() == 0.5);
    CHECK(j["metadata"]["experiment"].get<std::string>() == "clt");

    report.fitted_rate.reset();
    CHECK(report_to_json(report)["fitted_rate"].is_null());
}

TEST_CASE("surface CSV layout") {
    const SolutionSurface s =
        solve_gheat(TestFunction::constant(1.0), VolatilityBand(0.5, 1.0), GridSpec(8.0, 0.5, 1.0));
    const std::string csv = surface_to_csv(s);
    CHECK(csv.rfind("t,x,u\n", 0) == 0);
    std::size_t lines = 0;
    for (char c : csv)
        if (c == '\n') ++lines;
    CHECK(lines == 1 + s.times.size() * s.num_nodes());
}
