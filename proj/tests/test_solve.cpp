#include "blendrp/esom.hpp"
#include "blendrp/solve.hpp"
#include "blendrp/synthetic.hpp"
#include "test_util.hpp"

#include <doctest.h>

#include <cmath>
#include <sstream>

using namespace blendrp;
using testutil::TempDir;

TEST_CASE("mini-gep solves to objective 23 with two units built")
{
    const auto sys = load_system(testutil::fixture("mini-gep"));
    const auto s = solve(build_full_model(sys, ModelMode::gep));
    REQUIRE(s.optimal());
    CHECK(std::abs(s.objective - 23.0) <= 1e-8);
    CHECK(*s.value("inv_g1") == doctest::Approx(2.0));
    CHECK(*s.value("cost_inv") == doctest::Approx(20.0));
    CHECK(*s.value("cost_op") == doctest::Approx(3.0));
    CHECK(*s.value("pout_g1_r1_h1") == doctest::Approx(2.0));
    CHECK(*s.value("pout_g1_r1_h2") == doctest::Approx(1.0));
    CHECK(s.failure == SolveFailure::none);
    CHECK(s.values.size() == s.names.size());
}

TEST_CASE("hand-built LP agrees with the enumerated vertex optimum")
{
    // min 3x + 2y  s.t. x + y >= 4, x - y <= 1, y <= 3, x, y >= 0.
    // Vertices of the feasible region: (1,3), (2.5,1.5), (inf...) -> optimum at (1,3): 9.
    LpModel m;
    const int x = m.add_variable("x");
    const int y = m.add_variable("y", 0.0, 3.0);
    m.add_constraint("cover", {{x, 1.0}, {y, 1.0}}, Sense::ge, 4.0);
    m.add_constraint("gap", {{x, 1.0}, {y, -1.0}}, Sense::le, 1.0);
    m.set_objective({{x, 3.0}, {y, 2.0}});
    const auto s = solve(m);
    REQUIRE(s.optimal());
    CHECK(s.objective == doctest::Approx(9.0));
    CHECK(*s.value("x") == doctest::Approx(1.0));
    CHECK(*s.value("y") == doctest::Approx(3.0));
}

TEST_CASE("demand above buildable capacity is infeasible")
{
    LpModel m;
    const int p = m.add_variable("p", 0.0, 5.0);
    m.add_constraint("bal", {{p, 1.0}}, Sense::eq, 6.0);
    m.set_objective({{p, 1.0}});
    CHECK(solve(m).status == SolveStatus::infeasible);

    // Same effect through the model builder: no investable producer, peak above capacity.
    auto sys = load_system(testutil::fixture("mini-gep"));
    sys.assets[0].investable = false;
    sys.assets[0].existing_units = 1.0;
    CHECK(solve(build_full_model(sys, ModelMode::gep)).status == SolveStatus::infeasible);
}

TEST_CASE("unbounded and empty models")
{
    LpModel unbounded;
    const int x = unbounded.add_variable("x", -kInf, kInf);
    unbounded.set_objective({{x, 1.0}});
    CHECK(solve(unbounded).status == SolveStatus::unbounded);

    LpModel empty;
    const auto s = solve(empty);
    CHECK(s.optimal());
    CHECK(s.objective == 0.0);
}

TEST_CASE("solver failures are distinguished")
{
    LpModel m;
    m.add_variable("x");
    SolverHandle missing;
    missing.backend = "nonexistent";
    const auto a = solve(m, missing);
    CHECK(a.status == SolveStatus::error);
    CHECK(a.failure == SolveFailure::backend_unavailable);

    SolverHandle bad;
    bad.tolerance = 0.0;
    const auto b = solve(m, bad);
    CHECK(b.status == SolveStatus::error);
    CHECK(b.failure == SolveFailure::numerical);

    CHECK(to_string(SolveFailure::time_limit) != to_string(SolveFailure::numerical));
}

TEST_CASE("LP files are byte-identical across writes")
{
    TempDir dir("lp");
    const auto sys = make_synthetic_system({.seed = 2, .periods = 4, .hours = 3});
    const auto model = build_full_model(sys, ModelMode::gep);
    write_lp_file(model, dir / "a.lp");
    write_lp_file(build_full_model(sys, ModelMode::gep), dir / "b.lp");
    const auto a = testutil::read_file(dir / "a.lp");
    CHECK_FALSE(a.empty());
    CHECK(a == testutil::read_file(dir / "b.lp"));
}

TEST_CASE("mini-gep LP file declares inv_g1 exactly once")
{
    const auto sys = load_system(testutil::fixture("mini-gep"));
    const auto text = lp_text(build_full_model(sys, ModelMode::gep));
    const auto bounds = text.substr(text.find("\nBounds\n"));
    std::istringstream lines(bounds);
    std::string line;
    int declared = 0;
    while (std::getline(lines, line)) {
        std::istringstream words(line);
        std::string w;
        while (words >> w) declared += w == "inv_g1" ? 1 : 0;
    }
    CHECK(declared == 1);
    CHECK(text.find("pout_g1_r1_h2") != std::string::npos);
    CHECK(text.find("Minimize") != std::string::npos);
    CHECK(text.find("Subject To") != std::string::npos);
    CHECK(text.rfind("End\n") == text.size() - 4);
}

TEST_CASE("LP file read back by the solver reproduces the in-memory optimum")
{
    TempDir dir("roundtrip");
    for (const auto mode : {ModelMode::gep, ModelMode::p2x}) {
        const auto sys = make_synthetic_system({.seed = 4, .periods = 5, .hours = 4, .mode = mode});
        const auto model = build_full_model(sys, mode);
        write_lp_file(model, dir / "model.lp");
        const auto direct = solve(model);
        const auto from_file = solve_lp_file(dir / "model.lp");
        REQUIRE(direct.optimal());
        REQUIRE(from_file.optimal());
        CHECK(std::abs(direct.objective - from_file.objective) <= 1e-8 * std::max(1.0, std::abs(direct.objective)));
    }

    const auto mini = build_full_model(load_system(testutil::fixture("mini-gep")), ModelMode::gep);
    write_lp_file(mini, dir / "mini.lp");
    const auto s = solve_lp_file(dir / "mini.lp");
    REQUIRE(s.optimal());
    CHECK(std::abs(s.objective - 23.0) <= 1e-8);
    CHECK(*s.value("inv_g1") == doctest::Approx(2.0));
}

TEST_CASE("LP writer handles bounds of every shape")
{
    LpModel m;
    const int a = m.add_variable("a");
    const int b = m.add_variable("b", -kInf, kInf);
    const int c = m.add_variable("c", 2.0, 2.0);
    const int d = m.add_variable("d", -1.0, 4.5);
    const int e = m.add_variable("e", -kInf, 3.0);
    const int f = m.add_variable("f", 0.0, kInf, true);
    m.add_constraint("r1", {{a, 1}, {b, 1}, {c, 1}, {d, 1}, {e, 1}, {f, 1}, {a, 1}}, Sense::ge, -3.0);
    m.add_constraint("r2", {{b, 1.0}}, Sense::ge, -10.0);
    m.add_constraint("r3", {{e, -1.0}}, Sense::le, 10.0);
    m.set_objective({{a, 1.0}, {b, 1.0}, {d, -0.25}, {e, 1.0}, {f, 2.0}});
    const auto text = lp_text(m);
    CHECK(text.find(" b free\n") != std::string::npos);
    CHECK(text.find(" c = 2\n") != std::string::npos);
    CHECK(text.find(" -1 <= d <= 4.5\n") != std::string::npos);
    CHECK(text.find(" -inf <= e <= 3\n") != std::string::npos);
    CHECK(text.find("General\n f\n") != std::string::npos);
    CHECK(text.find(" + 2 a") != std::string::npos); // merged duplicate term

    TempDir dir("shapes");
    write_lp_file(m, dir / "m.lp");
    const auto direct = solve(m);
    const auto read = solve_lp_file(dir / "m.lp");
    REQUIRE(direct.optimal());
    REQUIRE(read.optimal());
    CHECK(direct.objective == doctest::Approx(read.objective));
}

TEST_CASE("adding bounds never improves the objective")
{
    const auto sys = make_synthetic_system({.seed = 8, .periods = 4, .hours = 3});
    auto model = build_full_model(sys, ModelMode::gep);
    const auto base = solve(model);
    REQUIRE(base.optimal());
    model.set_bounds(model.variable("inv_gas_n1"), 1.0, 1.0);
    const auto pinned = solve(model);
    REQUIRE(pinned.optimal());
    CHECK(pinned.objective >= base.objective * (1.0 - 1e-9));
}

TEST_CASE("write_lp_file reports I/O failure")
{
    LpModel m;
    m.add_variable("x");
    CHECK_THROWS(write_lp_file(m, "/nonexistent-dir/sub/model.lp"));
}
