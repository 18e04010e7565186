#include "blendrp/clustering.hpp"
#include "oracles.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <set>

using namespace blendrp;

namespace {

Eigen::MatrixXd columns(std::initializer_list<std::initializer_list<double>> cols)
{
    const auto k = static_cast<Eigen::Index>(cols.begin()->size());
    Eigen::MatrixXd m(k, static_cast<Eigen::Index>(cols.size()));
    Eigen::Index j = 0;
    for (const auto& col : cols) {
        Eigen::Index i = 0;
        for (double x : col) m(i++, j) = x;
        ++j;
    }
    return m;
}

double hull_gap(const Eigen::MatrixXd& data, const Eigen::MatrixXd& reps)
{
    double worst = 0.0;
    for (Eigen::Index d = 0; d < data.cols(); ++d) {
        const auto w = oracle::constrained_least_squares(reps, data.col(d), WeightType::convex);
        worst = std::max(worst, (reps * w - data.col(d)).norm());
    }
    return worst;
}

} // namespace

TEST_CASE("k-means separates two obvious groups")
{
    const auto data = columns({{0, 0}, {0, 0}, {1, 1}});
    const auto result = kmeans(data, 2, 1);
    REQUIRE(result.selection.size() == 2);
    CHECK_FALSE(result.selection.sources.has_value());
    std::set<std::pair<double, double>> centroids;
    for (int j = 0; j < 2; ++j) centroids.insert({result.selection.reps(0, j), result.selection.reps(1, j)});
    CHECK(centroids == std::set<std::pair<double, double>>{{0.0, 0.0}, {1.0, 1.0}});
    CHECK(result.assignment.cost == doctest::Approx(0.0));
    CHECK(result.assignment.assignment[0] == result.assignment.assignment[1]);
}

TEST_CASE("k-means with k = D reproduces every column")
{
    std::mt19937_64 rng(1);
    const auto data = oracle::random_matrix(rng, 4, 6);
    const auto result = kmeans(data, 6, 3);
    CHECK(result.assignment.cost == doctest::Approx(0.0));
    for (int d = 0; d < 6; ++d) {
        CHECK((result.selection.reps.col(result.assignment.assignment[static_cast<std::size_t>(d)]) - data.col(d))
                  .norm() == doctest::Approx(0.0));
    }
}

TEST_CASE("k-means is deterministic and its cost never increases")
{
    std::mt19937_64 rng(2);
    const auto data = oracle::random_matrix(rng, 6, 40);
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        const auto a = kmeans(data, 5, seed);
        const auto b = kmeans(data, 5, seed);
        CHECK(a.selection.reps == b.selection.reps);
        CHECK(a.assignment.assignment == b.assignment.assignment);
        const auto& h = a.assignment.cost_history;
        REQUIRE_FALSE(h.empty());
        for (std::size_t i = 1; i < h.size(); ++i) CHECK(h[i] <= h[i - 1] + 1e-12);
    }
    CHECK_THROWS_AS(kmeans(data, 41, 1), std::invalid_argument);
    CHECK_THROWS_AS(kmeans(data, 0, 1), std::invalid_argument);
}

TEST_CASE("k-medoids picks the brute-force optimal pair on the small example")
{
    const auto data = columns({{0, 0}, {0.1, 0}, {1, 1}});
    const auto best = oracle::brute_force_medoids(data, 2);
    CHECK(best.medoids == std::vector<int>{0, 2});
    CHECK(best.cost == doctest::Approx(0.1));

    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        const auto result = kmedoids(data, 2, seed);
        REQUIRE(result.selection.sources.has_value());
        auto medoids = *result.selection.sources;
        std::sort(medoids.begin(), medoids.end());
        CHECK(medoids == best.medoids);
        CHECK(result.assignment.cost == doctest::Approx(0.1));
    }
}

TEST_CASE("k-medoids stays close to the exhaustive optimum on random data")
{
    std::mt19937_64 rng(4);
    for (int trial = 0; trial < 10; ++trial) {
        const auto data = oracle::random_matrix(rng, 3, 9);
        const auto best = oracle::brute_force_medoids(data, 3);
        const auto result = kmedoids(data, 3, static_cast<std::uint64_t>(trial));
        CHECK(result.assignment.cost >= best.cost - 1e-12);
        // Reps are actual columns of the data.
        for (int j = 0; j < 3; ++j) {
            CHECK(result.selection.reps.col(j) == data.col((*result.selection.sources)[static_cast<std::size_t>(j)]));
        }
        const auto& h = result.assignment.cost_history;
        for (std::size_t i = 1; i < h.size(); ++i) CHECK(h[i] <= h[i - 1] + 1e-12);
    }
}

TEST_CASE("k-medoids corner cases")
{
    std::mt19937_64 rng(6);
    const auto data = oracle::random_matrix(rng, 3, 5);
    const auto all = kmedoids(data, 5, 1);
    CHECK(all.assignment.cost == doctest::Approx(0.0));

    // Duplicated columns share one medoid.
    const auto dup = columns({{0.2, 0.2}, {0.2, 0.2}, {0.9, 0.1}});
    const auto r = kmedoids(dup, 2, 1);
    CHECK(r.assignment.assignment[0] == r.assignment.assignment[1]);
    CHECK(r.assignment.cost == doctest::Approx(0.0));
    CHECK_THROWS_AS(kmedoids(dup, 4, 1), std::invalid_argument);
}

TEST_CASE("gnomonic projection")
{
    const auto g = gnomonic_project(columns({{1, 0}, {0, 1}}));
    const double s = std::sqrt(0.5);
    CHECK(g.direction[0] == doctest::Approx(s));
    CHECK(g.direction[1] == doctest::Approx(s));
    CHECK(g.scaled(0, 0) == doctest::Approx(std::sqrt(2.0)));
    CHECK(g.scaled(1, 0) == doctest::Approx(0.0));
    CHECK(g.scaled(1, 1) == doctest::Approx(std::sqrt(2.0)));
    CHECK(g.degenerate.empty());

    const auto z = gnomonic_project(columns({{1, 0}, {0, 0}, {0, 1}}));
    CHECK(z.degenerate == std::vector<int>{1});

    CHECK_THROWS_AS(gnomonic_project(columns({{0, 0}, {0, 0}})), std::invalid_argument);

    std::mt19937_64 rng(8);
    const auto data = oracle::random_matrix(rng, 7, 30);
    const auto p = gnomonic_project(data);
    for (Eigen::Index d = 0; d < data.cols(); ++d) {
        CHECK(std::abs(p.scaled.col(d).dot(p.direction) - 1.0) <= 1e-12);
    }
}

TEST_CASE("hull distance examples")
{
    const auto reps = columns({{1, 0}, {0, 1}});
    const auto on_vertex = hull_distance(reps.col(1), reps);
    CHECK(on_vertex.distance == doctest::Approx(0.0).epsilon(1e-9));
    CHECK(on_vertex.weights[1] == doctest::Approx(1.0));

    Eigen::Vector2d c(1.0, 1.0);
    const auto mid = hull_distance(c, reps);
    CHECK(mid.distance == doctest::Approx(std::sqrt(0.5)).epsilon(1e-6));
    CHECK(mid.weights[0] == doctest::Approx(0.5).epsilon(1e-6));

    Eigen::Vector3d r(0.3, 0.1, 0.8);
    Eigen::Vector3d x(0.9, 0.4, 0.0);
    const auto single = hull_distance(x, Eigen::MatrixXd(r));
    CHECK(single.weights[0] == 1.0);
    CHECK(single.distance == doctest::Approx((r - x).norm()));
}

TEST_CASE("greedy hull starts at the point farthest from the mean")
{
    const auto data = columns({{0, 0}, {1, 0}, {0, 1}});
    CHECK(greedy_hull_indices(data, 1, {}) == std::vector<int>{1});
    const auto sel = greedy_hull(data, 1, HullType::convex);
    CHECK(sel.sources == std::vector<int>{1});
    CHECK(sel.reps.col(0) == data.col(1));
    CHECK(sel.hull == HullType::convex);
}

TEST_CASE("greedy hull: distances shrink per step and vanish at n_rp = D")
{
    std::mt19937_64 rng(10);
    for (int trial = 0; trial < 3; ++trial) {
        const auto data = oracle::random_matrix(rng, 6, 12);
        HullTrace trace;
        const auto picked = greedy_hull_indices(data, 12, {}, {}, &trace);
        CHECK(std::set<int>(picked.begin(), picked.end()).size() == 12);
        for (std::size_t i = 1; i < trace.max_distance.size(); ++i) {
            CHECK(trace.max_distance[i] <= trace.max_distance[i - 1] + 1e-9);
        }

        Eigen::MatrixXd reps(6, 12);
        for (int j = 0; j < 12; ++j) reps.col(j) = data.col(picked[static_cast<std::size_t>(j)]);
        CHECK(hull_gap(data, reps) <= 1e-6);
    }
}

TEST_CASE("greedy hull selects the vertices of a polytope with interior points")
{
    // Square corners plus interior points: four picks cover everything.
    const auto data = columns({{0.5, 0.5}, {0, 0}, {0.3, 0.6}, {1, 0}, {0, 1}, {0.2, 0.2}, {1, 1}});
    const auto picked = greedy_hull_indices(data, 4, {});
    CHECK(std::set<int>(picked.begin(), picked.end()) == std::set<int>{1, 3, 4, 6});
}

TEST_CASE("hull variants")
{
    std::mt19937_64 rng(12);
    const auto data = oracle::random_matrix(rng, 5, 15);

    SUBCASE("convex with the null point never returns the null column")
    {
        const auto sel = greedy_hull(data, 4, HullType::convex_null);
        REQUIRE(sel.sources.has_value());
        CHECK(sel.size() == 4);
        for (int j = 0; j < 4; ++j) {
            CHECK(sel.reps.col(j) == data.col((*sel.sources)[static_cast<std::size_t>(j)]));
            CHECK(sel.reps.col(j).norm() > 0.0);
        }
    }
    SUBCASE("conic returns exact unscaled data columns")
    {
        const auto sel = greedy_hull(data, 5, HullType::conic);
        REQUIRE(sel.sources.has_value());
        for (int j = 0; j < 5; ++j) {
            CHECK(sel.reps.col(j) == data.col((*sel.sources)[static_cast<std::size_t>(j)]));
        }
    }
    SUBCASE("conic skips degenerate columns")
    {
        Eigen::MatrixXd with_zero = data;
        with_zero.col(3).setZero();
        const auto sel = greedy_hull(with_zero, 14, HullType::conic);
        CHECK(std::find(sel.sources->begin(), sel.sources->end(), 3) == sel.sources->end());
        CHECK_THROWS_AS(greedy_hull(with_zero, 15, HullType::conic), std::invalid_argument);
    }
    SUBCASE("argument checks")
    {
        CHECK_THROWS_AS(greedy_hull(data, 16, HullType::convex), std::invalid_argument);
        CHECK_THROWS_AS(greedy_hull(data, 3, HullType::none), std::invalid_argument);
        CHECK_THROWS_AS(greedy_hull_indices(data, 2, {0, 1, 2}), std::invalid_argument);
    }
}

TEST_CASE("initial representatives seed the selection")
{
    std::mt19937_64 rng(14);
    const auto data = oracle::random_matrix(rng, 4, 10);
    const auto picked = greedy_hull_indices(data, 3, {7});
    REQUIRE(picked.size() == 3);
    CHECK(picked.front() == 7);
}

TEST_CASE("distance cache against uncached selection")
{
    // The cache is a heuristic; divergences are reported, not asserted.
    std::mt19937_64 rng(16);
    int identical = 0;
    int cache_hits = 0;
    constexpr int trials = 5;
    for (int trial = 0; trial < trials; ++trial) {
        const auto data = oracle::random_matrix(rng, 20, 50);
        HullOptions cached;
        HullOptions uncached;
        uncached.use_cache = false;
        HullTrace with_cache;
        HullTrace without_cache;
        const auto a = greedy_hull_indices(data, 10, {}, cached, &with_cache);
        const auto b = greedy_hull_indices(data, 10, {}, uncached, &without_cache);
        identical += std::set<int>(a.begin(), a.end()) == std::set<int>(b.begin(), b.end()) ? 1 : 0;
        cache_hits += with_cache.cache_hits;
        CHECK(without_cache.cache_hits == 0);
        CHECK(with_cache.projections <= without_cache.projections);
    }
    MESSAGE("cached and uncached hull selections coincided on " << identical << " of " << trials
                                                                << " instances; cache hits: " << cache_hits);
}

TEST_CASE("hull type follows the weight type")
{
    CHECK(hull_for(WeightType::dirac) == HullType::convex);
    CHECK(hull_for(WeightType::convex) == HullType::convex);
    CHECK(hull_for(WeightType::subunit_conic) == HullType::convex_null);
    CHECK(hull_for(WeightType::conic) == HullType::conic);
    CHECK(parse_method("kmedoids") == ClusterMethod::kmedoids);
    CHECK(parse_hull_type("convex_null") == HullType::convex_null);
    CHECK_THROWS(parse_method("dbscan"));
}

TEST_CASE("farthest-point initialisation is seeded and distinct")
{
    std::mt19937_64 rng(18);
    const auto data = oracle::random_matrix(rng, 3, 20);
    const auto a = farthest_point_init(data, 6, 99);
    CHECK(a == farthest_point_init(data, 6, 99));
    CHECK(std::set<int>(a.begin(), a.end()).size() == 6);
}
