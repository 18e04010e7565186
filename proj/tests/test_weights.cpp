#include "blendrp/weights.hpp"
#include "oracles.hpp"

#include <doctest.h>

#include <cmath>
#include <limits>
#include <random>

using namespace blendrp;

namespace {

Eigen::VectorXd vec(std::initializer_list<double> values)
{
    Eigen::VectorXd v(static_cast<Eigen::Index>(values.size()));
    Eigen::Index i = 0;
    for (double x : values) v[i++] = x;
    return v;
}

bool near(const Eigen::VectorXd& a, const Eigen::VectorXd& b, double tol = 1e-9)
{
    return a.size() == b.size() && (a - b).cwiseAbs().maxCoeff() <= tol;
}

constexpr WeightType all_types[] = {WeightType::dirac, WeightType::convex, WeightType::subunit_conic,
                                    WeightType::conic};

} // namespace

TEST_CASE("simplex projection examples")
{
    CHECK(near(project_simplex(vec({0.5, 0.5})), vec({0.5, 0.5})));
    CHECK(near(project_simplex(vec({2.0, 0.0})), vec({1.0, 0.0})));
    CHECK(near(project_simplex(vec({0.4, 0.2})), vec({0.6, 0.4})));
    CHECK(near(oracle::projection(vec({0.4, 0.2}), WeightType::convex), vec({0.6, 0.4})));
    CHECK(near(project_simplex(vec({-5.0, -5.0, -5.0})), vec({1.0 / 3, 1.0 / 3, 1.0 / 3})));
    CHECK(near(project_simplex(vec({7.0})), vec({1.0})));
}

TEST_CASE("weight-space projection examples")
{
    CHECK(near(project_weights(vec({-1.0, 2.0}), WeightType::conic), vec({0.0, 2.0})));
    CHECK(near(project_weights(vec({0.3, 0.7}), WeightType::dirac), vec({0.0, 1.0})));
    CHECK(near(project_weights(vec({0.5, 0.5}), WeightType::dirac), vec({1.0, 0.0})));
    CHECK(near(project_weights(vec({0.2, 0.3}), WeightType::subunit_conic), vec({0.2, 0.3})));
    CHECK(near(project_weights(vec({0.9, 0.9}), WeightType::subunit_conic), vec({0.5, 0.5})));
    CHECK(near(project_weights(vec({-0.2, -0.3}), WeightType::subunit_conic), vec({0.0, 0.0})));
    CHECK(near(oracle::projection(vec({0.9, 0.9}), WeightType::subunit_conic), vec({0.5, 0.5})));
}

TEST_CASE("projections match the enumeration oracle and are idempotent")
{
    std::mt19937_64 rng(42);
    std::uniform_real_distribution<double> u(-1.5, 1.5);
    for (int n = 2; n <= 6; ++n) {
        for (int trial = 0; trial < 60; ++trial) {
            Eigen::VectorXd v(n);
            for (int i = 0; i < n; ++i) v[i] = u(rng);
            for (const auto type : all_types) {
                const auto w = project_weights(v, type);
                CHECK(near(w, oracle::projection(v, type), 1e-9));
                CHECK(near(project_weights(w, type), w, 1e-12));
                CHECK(in_weight_space(w, type));
            }
        }
    }
}

TEST_CASE("weight spaces are nested")
{
    const auto dirac = vec({0.0, 1.0, 0.0});
    const auto convex = vec({0.2, 0.5, 0.3});
    const auto subunit = vec({0.2, 0.5, 0.1});
    const auto conic = vec({0.2, 1.5, 0.1});
    CHECK(in_weight_space(dirac, WeightType::dirac));
    CHECK(in_weight_space(dirac, WeightType::convex));
    CHECK(in_weight_space(convex, WeightType::subunit_conic));
    CHECK(in_weight_space(subunit, WeightType::conic));
    CHECK_FALSE(in_weight_space(convex, WeightType::dirac));
    CHECK_FALSE(in_weight_space(subunit, WeightType::convex));
    CHECK_FALSE(in_weight_space(conic, WeightType::subunit_conic));
    CHECK_FALSE(in_weight_space(vec({-0.1, 0.5}), WeightType::conic));
}

TEST_CASE("weight type names")
{
    CHECK(parse_weight_type("subunit") == WeightType::subunit_conic);
    CHECK(parse_weight_type("subunit_conic") == WeightType::subunit_conic);
    CHECK(to_string(WeightType::subunit_conic) == "subunit");
    for (const auto t : all_types) CHECK(parse_weight_type(to_string(t)) == t);
    CHECK_THROWS(parse_weight_type("fuzzy"));
}

TEST_CASE("pgd with a zero gradient returns the projected start after one stall check")
{
    PgdParams params;
    params.learning_rate = 0.5;
    const auto zero = [](const Eigen::VectorXd& x) { return Eigen::VectorXd::Zero(x.size()).eval(); };
    const auto project = [](const Eigen::VectorXd& x) { return project_simplex(x); };
    const auto result = pgd(vec({2.0, 0.0}), zero, project, params);
    CHECK(near(result.x, vec({1.0, 0.0})));
    CHECK(result.iterations == 1);
    CHECK(result.converged);
}

TEST_CASE("pgd minimising distance to a point reproduces the simplex projection")
{
    const auto target = vec({0.4, 0.2});
    PgdParams params;
    params.learning_rate = 0.5;
    const auto grad = [&](const Eigen::VectorXd& x) { return (x - target).eval(); };
    const auto project = [](const Eigen::VectorXd& x) { return project_simplex(x); };
    const auto result = pgd(vec({1.0, 0.0}), grad, project, params);
    CHECK(near(result.x, vec({0.6, 0.4}), 1e-6));
}

TEST_CASE("pgd rejects non-finite gradients and missing step sizes")
{
    PgdParams params;
    params.learning_rate = 0.1;
    const auto bad = [](const Eigen::VectorXd& x) {
        Eigen::VectorXd g = x;
        g[0] = std::numeric_limits<double>::quiet_NaN();
        return g;
    };
    const auto project = [](const Eigen::VectorXd& x) { return project_simplex(x); };
    CHECK_THROWS_AS(pgd(vec({0.5, 0.5}), bad, project, params), PgdError);
    CHECK_THROWS_AS(pgd(vec({0.5, 0.5}), bad, project, PgdParams{}), std::invalid_argument);
}

TEST_CASE("pgd with step 1/L never increases the fitting objective")
{
    std::mt19937_64 rng(7);
    for (int trial = 0; trial < 20; ++trial) {
        const auto r = oracle::random_matrix(rng, 8, 4);
        const Eigen::VectorXd c = oracle::random_matrix(rng, 8, 1);
        PgdParams params;
        params.learning_rate = 1.0 / lipschitz_constant(r);
        double last = std::numeric_limits<double>::infinity();
        bool monotone = true;
        pgd(
            Eigen::VectorXd::Constant(4, 0.25), [&](const Eigen::VectorXd& w) { return fitting_gradient(r, c, w); },
            [](const Eigen::VectorXd& v) { return project_weights(v, WeightType::convex); }, params,
            [&](int, const Eigen::VectorXd& w) {
                const double f = fitting_objective(r, c, w);
                monotone = monotone && f <= last + 1e-12 * std::max(1.0, std::abs(last));
                last = f;
            });
        CHECK(monotone);
    }
}

TEST_CASE("gradient matches central finite differences")
{
    std::mt19937_64 rng(9);
    for (int trial = 0; trial < 20; ++trial) {
        const auto r = oracle::random_matrix(rng, 6, 3);
        const Eigen::VectorXd c = oracle::random_matrix(rng, 6, 1);
        const Eigen::VectorXd w = oracle::random_matrix(rng, 3, 1, -1.0, 1.0);
        const auto fd = oracle::finite_difference([&](const Eigen::VectorXd& x) { return fitting_objective(r, c, x); },
                                                  w);
        const auto g = fitting_gradient(r, c, w);
        CHECK((g - fd).norm() <= 1e-6 * std::max(1.0, g.norm()));
    }
}

TEST_CASE("Lipschitz constant is the top eigenvalue of R^T R")
{
    std::mt19937_64 rng(5);
    const auto r = oracle::random_matrix(rng, 10, 4);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(r.transpose() * r);
    CHECK(lipschitz_constant(r) == doctest::Approx(eig.eigenvalues().maxCoeff()).epsilon(1e-8));
}

TEST_CASE("least-squares initialisation")
{
    CHECK(near(least_squares_init(Eigen::MatrixXd::Identity(2, 2), vec({1.0, 0.0})), vec({1.0, 0.0})));
    const auto col = vec({1.0, 2.0, -1.0});
    CHECK(near(least_squares_init(col, 2.0 * col), vec({2.0}), 1e-12));

    std::mt19937_64 rng(3);
    const auto r = oracle::random_matrix(rng, 9, 4, -1.0, 1.0);
    const Eigen::VectorXd c = oracle::random_matrix(rng, 9, 1, -1.0, 1.0);
    const auto v = least_squares_init(r, c);
    const Eigen::VectorXd residual = r * v - c;
    CHECK((r.transpose() * residual).cwiseAbs().maxCoeff() <= 1e-8);

    // Rank deficient: duplicated column, minimum-norm solution splits evenly.
    Eigen::MatrixXd dup(2, 2);
    dup << 1.0, 1.0, 0.0, 0.0;
    CHECK(near(least_squares_init(dup, vec({2.0, 0.0})), vec({1.0, 1.0}), 1e-12));
}

TEST_CASE("fit_weights examples")
{
    Eigen::MatrixXd r(2, 2);
    r << 1.0, 0.0, 0.0, 1.0;
    Eigen::MatrixXd c(2, 1);
    c << 1.0, 1.0;

    const auto convex = fit_weights(r, c, WeightType::convex, {});
    CHECK(near(convex.values.row(0).transpose(), vec({0.5, 0.5}), 1e-6));
    CHECK(convex.errors[0] == doctest::Approx(std::sqrt(0.5)).epsilon(1e-6));

    const auto conic = fit_weights(r, c, WeightType::conic, {});
    CHECK(near(conic.values.row(0).transpose(), vec({1.0, 1.0}), 1e-6));
    CHECK(conic.errors[0] == doctest::Approx(0.0).epsilon(1e-6));

    // A period equal to a representative gets that representative's unit vector.
    Eigen::MatrixXd reps(3, 3);
    reps << 0.1, 0.9, 0.4, 0.7, 0.2, 0.4, 0.3, 0.3, 0.9;
    for (const auto type : all_types) {
        const auto w = fit_weights(reps, reps.col(1), type, {});
        CHECK(near(w.values.row(0).transpose(), Eigen::VectorXd::Unit(3, 1), 1e-6));
        CHECK(w.errors[0] <= 1e-6);
    }
}

TEST_CASE("Dirac weights follow the clustering assignment verbatim")
{
    std::mt19937_64 rng(17);
    const auto reps = oracle::random_matrix(rng, 5, 3);
    const auto data = oracle::random_matrix(rng, 5, 6);
    const std::vector<int> assignment{2, 0, 1, 1, 2, 0};
    const auto w = fit_weights(reps, data, WeightType::dirac, {}, &assignment);
    for (int d = 0; d < 6; ++d) {
        CHECK(near(w.values.row(d).transpose(), Eigen::VectorXd::Unit(3, assignment[static_cast<std::size_t>(d)]), 0));
        CHECK(w.errors[d] == doctest::Approx((reps.col(assignment[static_cast<std::size_t>(d)]) - data.col(d)).norm()));
    }
    CHECK(w.rep_totals[0] == 2.0);
    CHECK(w.rep_totals.sum() == 6.0);

    // Without an assignment, Dirac picks the nearest representative.
    const auto nearest = fit_weights(reps, data, WeightType::dirac, {});
    for (int d = 0; d < 6; ++d) CHECK(nearest.values(d, nearest_rep(reps, data.col(d))) == 1.0);

    const std::vector<int> bad{0, 0, 0};
    CHECK_THROWS_AS(fit_weights(reps, data, WeightType::dirac, {}, &bad), std::invalid_argument);
}

TEST_CASE("fitted weights match the constrained least-squares oracle")
{
    std::mt19937_64 rng(23);
    for (int trial = 0; trial < 25; ++trial) {
        const auto reps = oracle::random_matrix(rng, 10, 4);
        const auto data = oracle::random_matrix(rng, 10, 3);
        for (const auto type : {WeightType::convex, WeightType::subunit_conic, WeightType::conic}) {
            const auto w = fit_weights(reps, data, type, {});
            for (int d = 0; d < 3; ++d) {
                const auto best = oracle::constrained_least_squares(reps, data.col(d), type);
                const double optimum = (reps * best - data.col(d)).norm();
                CHECK(w.errors[d] <= optimum + 1e-6);
                CHECK(in_weight_space(w.values.row(d).transpose(), type, 1e-9));
            }
        }
    }
}

TEST_CASE("sub-unit fit equals a convex fit with an added null representative")
{
    // Allowing a null column in a convex combination is the same as relaxing
    // the row sum to <= 1.
    std::mt19937_64 rng(29);
    for (int trial = 0; trial < 25; ++trial) {
        const auto reps = oracle::random_matrix(rng, 8, 3);
        const auto data = oracle::random_matrix(rng, 8, 2, 0.0, 0.6);
        Eigen::MatrixXd augmented = Eigen::MatrixXd::Zero(8, 4);
        augmented.leftCols(3) = reps;
        const auto subunit = fit_weights(reps, data, WeightType::subunit_conic, {});
        const auto convex = fit_weights(augmented, data, WeightType::convex, {});
        for (int d = 0; d < 2; ++d) {
            CHECK(subunit.errors[d] == doctest::Approx(convex.errors[d]).epsilon(1e-6).scale(1.0));
            CHECK(near(subunit.values.row(d).transpose(), convex.values.row(d).head(3).transpose(), 1e-4));
        }
    }
}

TEST_CASE("projection errors are ordered by weight-space inclusion")
{
    std::mt19937_64 rng(31);
    for (int trial = 0; trial < 20; ++trial) {
        const auto reps = oracle::random_matrix(rng, 12, 4);
        const auto data = oracle::random_matrix(rng, 12, 5);
        Eigen::VectorXd errors[4];
        for (int t = 0; t < 4; ++t) errors[t] = fit_weights(reps, data, all_types[t], {}).errors;
        for (int d = 0; d < 5; ++d) {
            CHECK(errors[0][d] >= errors[1][d] - 1e-9);
            CHECK(errors[1][d] >= errors[2][d] - 1e-9);
            CHECK(errors[2][d] >= errors[3][d] - 1e-9);
        }
    }
}

TEST_CASE("identity weights")
{
    const auto w = identity_weights(4);
    CHECK(w.values == Eigen::MatrixXd::Identity(4, 4));
    CHECK(w.type == WeightType::dirac);
    CHECK(w.rep_totals == Eigen::VectorXd::Ones(4));
    CHECK(w.errors == Eigen::VectorXd::Zero(4));
}
