#include "blendrp/harness.hpp"
#include "blendrp/synthetic.hpp"
#include "test_util.hpp"

#include <doctest.h>

#include <cmath>
#include <sstream>

using namespace blendrp;
using testutil::TempDir;

namespace {

ExperimentRecord record(double total, double regret, std::uint64_t seed = 1)
{
    ExperimentRecord r;
    r.case_name = "case";
    r.n_rp = 4;
    r.seed = seed;
    r.times.read = total;
    r.regret_pct = regret;
    r.objective_full = 100.0;
    r.objective_fixed = 100.0 + regret;
    return r;
}

int count_lines(const std::string& text)
{
    return static_cast<int>(std::count(text.begin(), text.end(), '\n'));
}

} // namespace

TEST_CASE("regret arithmetic")
{
    CHECK(compute_regret(107.4, 100.0) == doctest::Approx(7.4));
    CHECK(compute_regret(100.0, 100.0) == 0.0);
    CHECK(compute_regret(99.9999, 100.0) == doctest::Approx(-1e-4));
    CHECK_THROWS_AS(compute_regret(99.0, 100.0), RegretError);
    CHECK_THROWS_AS(compute_regret(1.0, 0.0), RegretError);
    CHECK_THROWS_AS(compute_regret(1.0, -5.0), RegretError);
}

TEST_CASE("regret flags non-optimal solutions")
{
    Solution good;
    good.status = SolveStatus::optimal;
    good.objective = 50.0;
    Solution bad;
    bad.status = SolveStatus::infeasible;
    CHECK(compute_regret(good, good) == 0.0);
    CHECK_THROWS_AS(compute_regret(bad, good), RegretError);
    CHECK_THROWS_AS(compute_regret(good, bad), RegretError);
}

TEST_CASE("content hash is 64-bit FNV-1a")
{
    CHECK(content_hash("") == "cbf29ce484222325");
    CHECK(content_hash("a") == "af63dc4c8601ec8c");
    CHECK(content_hash("foobar") == "85944171f73967e8");
}

TEST_CASE("full reduction through the pipeline has zero regret")
{
    TempDir dir("exact");
    write_system(make_synthetic_system({.seed = 6, .periods = 5, .hours = 3}), dir / "sys");
    for (const auto type : {WeightType::dirac, WeightType::convex, WeightType::subunit_conic, WeightType::conic}) {
        ExperimentConfig config;
        config.data = dir / "sys";
        config.method = ClusterMethod::hull;
        config.weight_type = type;
        config.n_rp = 5;
        config.seeds = {1};
        const auto records = run_experiment(config);
        REQUIRE(records.size() == 1);
        CHECK_MESSAGE(records[0].ok(), records[0].status);
        CHECK(std::abs(records[0].regret_pct) <= 1e-4);
        CHECK(records[0].case_name == "sys");
    }
}

TEST_CASE("mini-gep has zero regret for every method")
{
    for (const auto method : {ClusterMethod::kmeans, ClusterMethod::kmedoids, ClusterMethod::hull}) {
        ExperimentConfig config;
        config.data = testutil::fixture("mini-gep");
        config.method = method;
        config.weight_type = WeightType::dirac;
        config.n_rp = 1;
        config.seeds = {1, 2};
        for (const auto& r : run_experiment(config)) {
            CHECK_MESSAGE(r.ok(), r.status);
            CHECK(r.regret_pct == doctest::Approx(0.0).epsilon(1e-9));
            CHECK(r.objective_full == doctest::Approx(23.0));
        }
    }
}

TEST_CASE("repeated runs agree on everything except timings")
{
    TempDir dir("determinism");
    write_system(make_synthetic_system({.seed = 9, .periods = 8, .hours = 3}), dir / "sys");
    ExperimentConfig config;
    config.data = dir / "sys";
    config.method = ClusterMethod::kmeans;
    config.weight_type = WeightType::convex;
    config.n_rp = 3;
    config.seeds = {1, 2};
    const auto a = run_experiment(config);
    const auto b = run_experiment(config);
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        CHECK(a[i].status == b[i].status);
        CHECK(a[i].objective_reduced == b[i].objective_reduced);
        CHECK(a[i].objective_fixed == b[i].objective_fixed);
        CHECK(a[i].objective_full == b[i].objective_full);
        CHECK(a[i].regret_pct == b[i].regret_pct);
        CHECK(a[i].projection_error_mean == b[i].projection_error_mean);
        CHECK(a[i].regret_pct >= -1e-4);
    }
}

TEST_CASE("stage failures are recorded per seed")
{
    ExperimentConfig config;
    config.data = testutil::fixture("mini-gep");
    config.n_rp = 2; // more representatives than periods
    config.seeds = {1, 2, 3};
    const auto records = run_experiment(config);
    REQUIRE(records.size() == 3);
    for (const auto& r : records) CHECK_FALSE(r.ok());

    config.data = testutil::fixture("does-not-exist");
    config.n_rp = 1;
    const auto missing = run_experiment(config);
    REQUIRE(missing.size() == 3);
    CHECK(missing[0].status.rfind("data error", 0) == 0);

    config.seeds.clear();
    CHECK_THROWS_AS(run_experiment(config), std::invalid_argument);
}

TEST_CASE("the full-model optimum is cached in memory and on disk")
{
    TempDir dir("cache");
    write_system(make_synthetic_system({.seed = 2, .periods = 4, .hours = 3}), dir / "sys");
    ExperimentConfig config;
    config.data = dir / "sys";
    config.method = ClusterMethod::kmedoids;
    config.weight_type = WeightType::dirac;
    config.n_rp = 2;
    config.seeds = {1, 2, 3};
    config.cache_dir = dir / "cache";

    FullSolveCache cache(config.cache_dir);
    const auto first = run_experiment(config, &cache);
    CHECK(cache.misses() == 1);
    CHECK(cache.hits() == 2);

    FullSolveCache fresh(config.cache_dir);
    const auto second = run_experiment(config, &fresh);
    CHECK(fresh.misses() == 0);
    CHECK(fresh.hits() == 3);
    CHECK(first[0].objective_full == second[0].objective_full);
}

TEST_CASE("results.csv has one row per record and round-trips")
{
    TempDir dir("plots");
    std::vector<ExperimentRecord> one{record(1.5, 2.25)};
    one[0].projection_error_mean = 0.1 + 0.2; // not exactly representable in short decimal
    one[0].times.solve = 1e-7;
    emit_plot_data(one, dir.path());
    CHECK(count_lines(testutil::read_file(dir / "results.csv")) == 2);

    const auto parsed = parse_results_csv(dir / "results.csv");
    REQUIRE(parsed.size() == 1);
    const auto& p = parsed[0];
    const auto& r = one[0];
    CHECK(p.case_name == r.case_name);
    CHECK(p.mode == r.mode);
    CHECK(p.method == r.method);
    CHECK(p.weight_type == r.weight_type);
    CHECK(p.n_rp == r.n_rp);
    CHECK(p.seed == r.seed);
    CHECK(p.status == r.status);
    CHECK(p.times.read == r.times.read);
    CHECK(p.times.solve == r.times.solve);
    CHECK(p.regret_pct == r.regret_pct);
    CHECK(p.objective_fixed == r.objective_fixed);
    CHECK(p.projection_error_mean == r.projection_error_mean);

    CHECK_THROWS_AS(emit_plot_data({}, dir.path()), std::invalid_argument);
}

TEST_CASE("pareto.csv drops dominated points")
{
    TempDir dir("pareto");
    std::vector<ExperimentRecord> records{
        record(1.0, 10.0, 1), // fast, poor
        record(5.0, 2.0, 2),  // slow, good
        record(6.0, 3.0, 3),  // dominated by seed 2
        record(2.0, 5.0, 4),  // trade-off point
    };
    records.push_back(record(0.5, 0.0, 5));
    records.back().status = "fixed model infeasible"; // failures never enter the front
    const auto front = pareto_front(records);
    CHECK(front == std::vector<std::size_t>{0, 3, 1});

    emit_plot_data(records, dir.path());
    const auto pareto = parse_results_csv(dir / "pareto.csv");
    REQUIRE(pareto.size() == 3);
    for (const auto& r : pareto) CHECK(r.seed != 3);
    CHECK(parse_results_csv(dir / "results.csv").size() == 5);
}
