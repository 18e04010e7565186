#include "blendrp/esom.hpp"
#include "blendrp/harness.hpp"
#include "blendrp/solve.hpp"
#include "blendrp/synthetic.hpp"
#include "test_util.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>

using namespace blendrp;

namespace {

int count_prefix(const std::vector<Constraint>& rows, const std::string& prefix)
{
    return static_cast<int>(std::count_if(rows.begin(), rows.end(),
                                          [&](const Constraint& c) { return c.name.rfind(prefix, 0) == 0; }));
}

int count_prefix(const std::vector<Variable>& vars, const std::string& prefix)
{
    return static_cast<int>(
        std::count_if(vars.begin(), vars.end(), [&](const Variable& v) { return v.name.rfind(prefix, 0) == 0; }));
}

double relative_gap(double a, double b) { return std::abs(a - b) / std::max(1.0, std::abs(b)); }

EnergySystem small_synthetic(ModelMode mode, bool seasonal = true)
{
    return make_synthetic_system({.seed = 5, .periods = 6, .hours = 4, .mode = mode, .seasonal_storage = seasonal});
}

} // namespace

TEST_CASE("mini-gep model has one balance row per hour and one investment variable")
{
    const auto sys = load_system(testutil::fixture("mini-gep"));
    const auto model = build_full_model(sys, ModelMode::gep);
    CHECK(count_prefix(model.constraints(), "bal_") == 2);
    CHECK(count_prefix(model.variables(), "inv_") == 1);
    CHECK(model.find_variable("inv_g1").has_value());
    CHECK(model.find_variable("pout_g1_r1_h2").has_value());
    CHECK(model.info.mode == ModelMode::gep);
    CHECK(model.info.num_reps == 1);
}

TEST_CASE("p2x models have no investment variables")
{
    const auto sys = small_synthetic(ModelMode::p2x);
    const auto model = build_full_model(sys, ModelMode::p2x);
    CHECK(count_prefix(model.variables(), "inv_") == 0);
    CHECK_FALSE(model.find_variable("cost_inv").has_value());
    CHECK(solve(model).optimal());
}

TEST_CASE("model structure on the synthetic system")
{
    const auto sys = small_synthetic(ModelMode::gep);
    const auto model = build_full_model(sys, ModelMode::gep);
    const int nodes = 3, carriers = 2, periods = 6, hours = 4;
    CHECK(count_prefix(model.constraints(), "bal_") == nodes * carriers * periods * hours);
    CHECK(count_prefix(model.variables(), "inter_hydro_d") == periods);
    CHECK(count_prefix(model.variables(), "spill_hydro_") == periods * hours);
    CHECK(count_prefix(model.variables(), "spill_battery_") == 0);
    CHECK(count_prefix(model.constraints(), "cycle_battery_") == periods);
    CHECK(count_prefix(model.constraints(), "tether_") == 1);
    // Ramping: two intra rows per hour transition plus two inter rows per period boundary, per gas unit.
    CHECK(count_prefix(model.constraints(), "rampup_gas_n1") == periods * (hours - 1));
    CHECK(count_prefix(model.constraints(), "irampup_gas_n1") == periods - 1);
    CHECK(count_prefix(model.constraints(), "irampdn_") == 3 * (periods - 1));

    // Inter-period level bounds come from storage_bounds.csv.
    const auto& inter = model.variable("inter_hydro_d3");
    const auto* hydro = sys.find_asset("hydro");
    CHECK(model.variables()[static_cast<std::size_t>(inter)].lower == doctest::Approx(0.05 * hydro->storage_cap));
}

TEST_CASE("model emission is deterministic")
{
    const auto sys = small_synthetic(ModelMode::gep);
    CHECK(lp_text(build_full_model(sys, ModelMode::gep)) == lp_text(build_full_model(sys, ModelMode::gep)));
}

TEST_CASE("all periods with identity weights reproduce the full model")
{
    for (const auto mode : {ModelMode::gep, ModelMode::p2x}) {
        const auto sys = small_synthetic(mode);
        const auto layout = build_clustering_matrix(sys);
        const auto reduced = build_model(sys, full_rep_data(layout), identity_weights(6), mode);
        const auto full = build_full_model(sys, mode);
        CHECK(lp_text(reduced) == lp_text(full));

        // The same reduction reached through clustering, with a permuted rep order.
        const auto r = reduce(layout, ClusterMethod::hull, WeightType::dirac, 6, 1);
        const auto permuted = build_model(sys, make_rep_data(layout, r.selection.reps), r.weights, mode);
        const auto a = solve(permuted);
        const auto b = solve(full);
        REQUIRE(a.optimal());
        REQUIRE(b.optimal());
        CHECK(relative_gap(a.objective, b.objective) <= 1e-6);
    }
}

TEST_CASE("inconsistent dimensions are rejected")
{
    const auto sys = small_synthetic(ModelMode::gep);
    const auto layout = build_clustering_matrix(sys);
    CHECK_THROWS_AS(build_model(sys, full_rep_data(layout), identity_weights(5), ModelMode::gep),
                    std::invalid_argument);
    const Eigen::MatrixXd three = layout.values.leftCols(3);
    CHECK_THROWS_AS(build_model(sys, make_rep_data(layout, three), identity_weights(6), ModelMode::gep),
                    std::invalid_argument);
    CHECK_THROWS_AS(make_rep_data(layout, Eigen::MatrixXd::Zero(3, 2)), std::invalid_argument);
}

TEST_CASE("fixing decisions at the full optimum reproduces the full objective")
{
    for (const auto mode : {ModelMode::gep, ModelMode::p2x}) {
        const auto sys = small_synthetic(mode);
        const auto full = build_full_model(sys, mode);
        const auto optimum = solve(full);
        REQUIRE(optimum.optimal());
        const auto fixed = fix_decisions(full, optimum, mode);
        const auto again = solve(fixed);
        REQUIRE(again.optimal());
        CHECK(relative_gap(again.objective, optimum.objective) <= 1e-7);

        const std::string pinned = mode == ModelMode::gep ? "inv_" : "inter_";
        for (const auto& v : fixed.variables()) {
            if (v.name.rfind(pinned, 0) == 0) CHECK(v.lower == v.upper);
        }
    }
}

TEST_CASE("fixing zero investment under unmet peak demand is infeasible")
{
    const auto sys = load_system(testutil::fixture("mini-gep"));
    const auto full = build_full_model(sys, ModelMode::gep);
    Solution zero;
    zero.status = SolveStatus::optimal;
    zero.names = {"inv_g1"};
    zero.values = {0.0};
    zero.build_index();
    const auto result = solve(fix_decisions(full, zero, ModelMode::gep));
    CHECK(result.status == SolveStatus::infeasible);

    Solution missing;
    missing.status = SolveStatus::optimal;
    CHECK_THROWS_AS(fix_decisions(full, missing, ModelMode::gep), std::invalid_argument);
    Solution failed;
    CHECK_THROWS_AS(fix_decisions(full, failed, ModelMode::gep), std::invalid_argument);
}

TEST_CASE("mini-gep: fixing an exact one-period reduction gives objective 23")
{
    const auto sys = load_system(testutil::fixture("mini-gep"));
    const auto layout = build_clustering_matrix(sys);
    const auto r = reduce(layout, ClusterMethod::kmeans, WeightType::dirac, 1, 1);
    const auto reduced = solve(build_model(sys, make_rep_data(layout, r.selection.reps), r.weights, ModelMode::gep));
    REQUIRE(reduced.optimal());
    CHECK(*reduced.value("inv_g1") == doctest::Approx(2.0));
    const auto fixed = solve(fix_decisions(build_full_model(sys, ModelMode::gep), reduced, ModelMode::gep));
    REQUIRE(fixed.optimal());
    CHECK(std::abs(fixed.objective - 23.0) <= 1e-8);
}

TEST_CASE("integer investment option")
{
    const auto sys = load_system(testutil::fixture("mini-gep"));
    const auto model = build_full_model(sys, ModelMode::gep, {.integer_investment = true});
    CHECK(model.variables()[static_cast<std::size_t>(model.variable("inv_g1"))].integer);
    const auto s = solve(model);
    REQUIRE(s.optimal());
    CHECK(s.objective == doctest::Approx(23.0));
}

TEST_CASE("sub-unit blending never lifts reconstructed production above capacity")
{
    const auto sys = small_synthetic(ModelMode::gep);
    const auto layout = build_clustering_matrix(sys);
    const auto r = reduce(layout, ClusterMethod::hull, WeightType::subunit_conic, 3, 1);
    const auto s = solve(build_model(sys, make_rep_data(layout, r.selection.reps), r.weights, ModelMode::gep));
    REQUIRE(s.optimal());
    const auto& w = r.weights.values;
    for (const auto& a : sys.assets) {
        if (a.kind != AssetKind::producer) continue;
        const double cap = *s.value(names::capacity(a.name));
        for (Eigen::Index d = 0; d < w.rows(); ++d) {
            for (int h = 0; h < sys.horizon.hours_per_period; ++h) {
                double blended = 0.0;
                for (Eigen::Index rep = 0; rep < w.cols(); ++rep) {
                    blended += w(d, rep) * *s.value(names::production(a.name, rep, h));
                }
                CHECK(blended <= cap + 1e-6);
            }
        }
    }
}

TEST_CASE("inter-period levels are reconstructed from intra-period deltas")
{
    const auto sys = small_synthetic(ModelMode::p2x);
    const auto layout = build_clustering_matrix(sys);
    const auto r = reduce(layout, ClusterMethod::hull, WeightType::convex, 3, 1);
    const auto s = solve(build_model(sys, make_rep_data(layout, r.selection.reps), r.weights, ModelMode::p2x));
    REQUIRE(s.optimal());
    const auto levels = reconstruct_inter_levels(sys, s, r.weights);
    REQUIRE(levels.size() == 1);
    for (int d = 0; d < 6; ++d) {
        CHECK(levels[0][static_cast<std::size_t>(d)] ==
              doctest::Approx(*s.value(names::inter_level("hydro", d))).epsilon(1e-6));
    }
    CHECK(levels[0].back() == doctest::Approx(sys.find_asset("hydro")->initial_storage).epsilon(1e-6));
}

TEST_CASE("decision-fixed models never beat the full optimum")
{
    for (const auto mode : {ModelMode::gep, ModelMode::p2x}) {
        const auto sys = small_synthetic(mode);
        const auto layout = build_clustering_matrix(sys);
        const auto full = build_full_model(sys, mode);
        const auto optimum = solve(full);
        REQUIRE(optimum.optimal());
        for (const auto type : {WeightType::dirac, WeightType::convex, WeightType::conic}) {
            const auto r = reduce(layout, ClusterMethod::kmeans, type, 2, 3);
            const auto reduced = solve(build_model(sys, make_rep_data(layout, r.selection.reps), r.weights, mode));
            REQUIRE(reduced.optimal());
            const auto fixed = solve(fix_decisions(full, reduced, mode));
            REQUIRE(fixed.optimal());
            CHECK(fixed.objective >= optimum.objective * (1.0 - 1e-6));
        }
    }
}

TEST_CASE("representative data falls back to constant profiles")
{
    const auto sys = small_synthetic(ModelMode::gep, false);
    const auto rd = full_rep_data(build_clustering_matrix(sys));
    CHECK(rd.availability("peak_n1", 0, 0) == 1.0);
    CHECK(rd.inflow("battery", 0, 0) == 0.0);
    CHECK(rd.demand("n2", "h2", 0, 0) == 0.0);
    CHECK(rd.demand("n1", "h2", 2, 1) == sys.demands[1].profile(2, 1));
}
