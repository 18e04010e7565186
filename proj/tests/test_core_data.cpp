#include "blendrp/core_data.hpp"
#include "blendrp/synthetic.hpp"
#include "test_util.hpp"

#include <doctest.h>

#include <cmath>
#include <limits>

using namespace blendrp;
using testutil::TempDir;

namespace {

/// One node, one carrier, one renewable producer, H = 2.
EnergySystem tiny_system(int periods)
{
    EnergySystem sys;
    sys.horizon = {periods, 2, 1.0, 8760.0};
    sys.nodes = {"n1"};
    sys.carriers = {"elec"};
    Asset pv;
    pv.name = "pv";
    pv.node = "n1";
    pv.carrier_out = "elec";
    pv.unit_capacity = 1.0;
    sys.assets = {pv};
    DemandSeries demand{"n1", "elec", 5.0, PeriodProfile(periods, 2, 0.0)};
    AssetSeries avail{"pv", PeriodProfile(periods, 2, 0.0)};
    for (int d = 0; d < periods; ++d) {
        demand.profile(d, 0) = 0.5 + 0.1 * d;
        demand.profile(d, 1) = 0.4;
        avail.profile(d, 0) = 0.0;
        avail.profile(d, 1) = 0.8;
    }
    sys.demands = {demand};
    sys.availability = {avail};
    return sys;
}

void replace_in_file(const std::filesystem::path& path, const std::string& from, const std::string& to)
{
    auto text = testutil::read_file(path);
    const auto pos = text.find(from);
    REQUIRE(pos != std::string::npos);
    text.replace(pos, from.size(), to);
    testutil::write_file(path, text);
}

} // namespace

TEST_CASE("mini-gep fixture loads with the expected entity counts")
{
    const auto sys = load_system(testutil::fixture("mini-gep"));
    CHECK(sys.nodes.size() == 1);
    CHECK(sys.carriers.size() == 1);
    CHECK(sys.assets.size() == 1);
    CHECK(sys.lines.empty());
    CHECK(sys.mode == ModelMode::gep);
    CHECK(sys.horizon.num_periods == 1);
    CHECK(sys.horizon.hours_per_period == 2);
    CHECK(sys.horizon.operational_weight() == doctest::Approx(1.0));

    const auto& g = sys.assets.front();
    CHECK(g.name == "g1");
    CHECK(g.investable);
    CHECK(g.inv_cost == 10.0);
    CHECK(g.var_cost == 1.0);
    CHECK_FALSE(g.ramp.has_value());
    CHECK(g.eff_in == 1.0);
    CHECK(validate_profiles(sys).empty());
}

TEST_CASE("operational weight annualizes over the modelled steps")
{
    Horizon h{365, 24, 1.0, 8760.0};
    CHECK(h.num_steps() == 8760);
    CHECK(h.operational_weight() == doctest::Approx(1.0));
    h = {10, 24, 1.0, 8760.0};
    CHECK(h.operational_weight() == doctest::Approx(36.5));
    h = {10, 12, 2.0, 8760.0};
    CHECK(h.operational_weight() == doctest::Approx(36.5));
}

TEST_CASE("an empty directory reports the missing config")
{
    TempDir dir("empty");
    try {
        load_system(dir.path());
        FAIL("expected DataError");
    } catch (const DataError& e) {
        CHECK(std::string(e.what()).find("config.json not found") != std::string::npos);
    }
}

TEST_CASE("unknown node reference names the file and line")
{
    TempDir dir("badref");
    write_system(load_system(testutil::fixture("mini-gep")), dir.path());
    replace_in_file(dir / "assets.csv", "g1,n1,", "g1,ZZ,");
    try {
        load_system(dir.path());
        FAIL("expected DataError");
    } catch (const DataError& e) {
        CHECK(std::string(e.what()).find("ZZ") != std::string::npos);
        CHECK(e.file().find("assets.csv") != std::string::npos);
        CHECK(e.line() == 2);
    }
}

TEST_CASE("schema violations are data errors")
{
    TempDir dir("schema");
    write_system(load_system(testutil::fixture("mini-gep")), dir.path());

    SUBCASE("non-numeric cost")
    {
        replace_in_file(dir / "assets.csv", ",10,", ",ten,");
        CHECK_THROWS_AS(load_system(dir.path()), DataError);
    }
    SUBCASE("unknown asset kind")
    {
        replace_in_file(dir / "assets.csv", "producer", "turbine");
        CHECK_THROWS_AS(load_system(dir.path()), DataError);
    }
    SUBCASE("duplicate profile cell")
    {
        auto text = testutil::read_file(dir / "demand.csv");
        text += "n1,elec,1,1,0.3\n";
        testutil::write_file(dir / "demand.csv", text);
        CHECK_THROWS_AS(load_system(dir.path()), DataError);
    }
    SUBCASE("hour outside the horizon")
    {
        auto text = testutil::read_file(dir / "demand.csv");
        text += "n1,elec,1,3,0.3\n";
        testutil::write_file(dir / "demand.csv", text);
        CHECK_THROWS_AS(load_system(dir.path()), DataError);
    }
}

TEST_CASE("profiles inside [0,1] validate cleanly")
{
    const auto sys = make_synthetic_system({.seed = 3, .periods = 4, .hours = 8});
    CHECK(validate_profiles(sys).empty());
}

TEST_CASE("an out-of-range availability value is reported with its coordinates")
{
    auto sys = make_synthetic_system({.seed = 3, .periods = 4, .hours = 8});
    auto& series = sys.availability.front();
    series.profile(2, 6) = 1.2; // period 3, hour 7 in 1-based terms
    const auto violations = validate_profiles(sys);
    REQUIRE(violations.size() == 1);
    const auto& v = violations.front();
    CHECK(v.kind == ProfileViolation::Kind::out_of_range);
    CHECK(v.profile == "availability");
    CHECK(v.entity == series.asset);
    CHECK(v.period == 2);
    CHECK(v.hour == 6);
    CHECK(v.value == 1.2);
    const auto text = v.describe();
    CHECK(text.find(series.asset) != std::string::npos);
}

TEST_CASE("a missing demand cell is a completeness violation")
{
    TempDir dir("missing");
    write_system(make_synthetic_system({.seed = 3, .periods = 4, .hours = 8}), dir.path());
    // Drop period 2, hour 5 of the first demand series.
    auto text = testutil::read_file(dir / "demand.csv");
    const auto pos = text.find("n1,elec,2,5,");
    REQUIRE(pos != std::string::npos);
    text.erase(pos, text.find('\n', pos) - pos + 1);
    testutil::write_file(dir / "demand.csv", text);

    const auto sys = load_system(dir.path());
    const auto violations = validate_profiles(sys);
    REQUIRE(violations.size() == 1);
    CHECK(violations.front().kind == ProfileViolation::Kind::missing);
    CHECK(violations.front().profile == "demand");
    CHECK(violations.front().period == 1);
    CHECK(violations.front().hour == 4);
}

TEST_CASE("storage bounds outside [0,1] are violations")
{
    auto sys = make_synthetic_system({.seed = 3, .periods = 4, .hours = 3});
    REQUIRE_FALSE(sys.storage_bounds.empty());
    sys.storage_bounds.front().max_frac[1] = 1.5;
    const auto violations = validate_profiles(sys);
    REQUIRE(violations.size() == 1);
    CHECK(violations.front().profile == "storage_bounds");
    CHECK(violations.front().hour == -1);
}

TEST_CASE("clustering matrix of one demand and one renewable has four rows")
{
    const auto sys = tiny_system(3);
    const auto c = build_clustering_matrix(sys);
    CHECK(c.num_features() == 4);
    CHECK(c.num_periods() == 3);
    REQUIRE(c.row_labels.size() == 4);
    CHECK(c.row_labels[0] == "demand:n1/elec:h1");
    CHECK(c.row_labels[2] == "availability:pv:h1");
    CHECK(c.values(0, 2) == doctest::Approx(0.7));
    CHECK(c.values(3, 1) == 0.8);
    CHECK(c.period_ids == std::vector<int>{1, 2, 3});
}

TEST_CASE("without renewables or inflows the matrix is the demand block")
{
    auto sys = tiny_system(3);
    sys.availability.clear(); // constant availability: not a renewable
    const auto c = build_clustering_matrix(sys);
    REQUIRE(c.num_features() == 2);
    for (int d = 0; d < 3; ++d) {
        CHECK(c.values(0, d) == sys.demands[0].profile(d, 0));
        CHECK(c.values(1, d) == sys.demands[0].profile(d, 1));
    }

    // An availability series of all ones contributes no rows either.
    sys = tiny_system(3);
    for (int d = 0; d < 3; ++d) {
        sys.availability[0].profile(d, 0) = 1.0;
        sys.availability[0].profile(d, 1) = 1.0;
    }
    CHECK_FALSE(is_renewable(sys, sys.assets[0]));
    CHECK(build_clustering_matrix(sys).num_features() == 2);
}

TEST_CASE("identical periods give identical columns")
{
    auto sys = tiny_system(2);
    for (int h = 0; h < 2; ++h) sys.demands[0].profile(1, h) = sys.demands[0].profile(0, h);
    const auto c = build_clustering_matrix(sys);
    CHECK(c.values.col(0) == c.values.col(1));
}

TEST_CASE("row count formula and value range hold on generated systems")
{
    for (std::uint64_t seed = 1; seed <= 12; ++seed) {
        const int periods = 2 + static_cast<int>(seed % 5);
        const int hours = 1 + static_cast<int>(seed % 7);
        const bool seasonal = seed % 2 == 0;
        const auto sys = make_synthetic_system(
            {.seed = seed, .periods = periods, .hours = hours, .seasonal_storage = seasonal});
        std::size_t renewables = 0;
        for (const auto& a : sys.assets) {
            if (a.kind == AssetKind::producer && is_renewable(sys, a)) ++renewables;
        }
        const auto c = build_clustering_matrix(sys);
        const auto expected = (sys.demands.size() + renewables + sys.inflows.size()) * static_cast<std::size_t>(hours);
        CHECK(static_cast<std::size_t>(c.num_features()) == expected);
        CHECK(c.num_periods() == periods);
        CHECK(c.values.minCoeff() >= 0.0);
        CHECK(c.values.maxCoeff() <= 1.0);

        // Determinism: same system, bit-identical matrix.
        CHECK(build_clustering_matrix(sys).values == c.values);
    }
}

TEST_CASE("write_system and load_system round-trip exactly")
{
    TempDir dir("roundtrip");
    const auto original = make_synthetic_system({.seed = 11, .periods = 5, .hours = 4});
    write_system(original, dir.path());
    const auto loaded = load_system(dir.path());

    CHECK(loaded.nodes == original.nodes);
    CHECK(loaded.carriers == original.carriers);
    REQUIRE(loaded.assets.size() == original.assets.size());
    for (std::size_t i = 0; i < loaded.assets.size(); ++i) {
        const auto& a = loaded.assets[i];
        const auto& b = original.assets[i];
        CHECK(a.name == b.name);
        CHECK(a.kind == b.kind);
        CHECK(a.investable == b.investable);
        CHECK(a.eff_out == b.eff_out);
        CHECK(a.ramp == b.ramp);
        CHECK(a.storage_cap == b.storage_cap);
        CHECK(a.initial_storage == b.initial_storage);
    }
    CHECK(loaded.lines.size() == original.lines.size());
    CHECK(build_clustering_matrix(loaded).values == build_clustering_matrix(original).values);
    REQUIRE(loaded.storage_bounds.size() == 1);
    CHECK(loaded.storage_bounds[0].min_frac == original.storage_bounds[0].min_frac);
}

TEST_CASE("mode names parse and print")
{
    CHECK(parse_mode("gep") == ModelMode::gep);
    CHECK(parse_mode("p2x") == ModelMode::p2x);
    CHECK(to_string(ModelMode::p2x) == "p2x");
    CHECK_THROWS(parse_mode("xyz"));
}
