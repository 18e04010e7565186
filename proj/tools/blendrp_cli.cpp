// Command-line front end: data validation, clustering, weight fitting, LP
// export, full-model solves and experiment sweeps.
//
// Exit codes: 0 success, 1 usage or internal error, 2 data error, 3 solver
// failure.

#include "blendrp/clustering.hpp"
#include "blendrp/core_data.hpp"
#include "blendrp/esom.hpp"
#include "blendrp/harness.hpp"
#include "blendrp/solve.hpp"
#include "blendrp/synthetic.hpp"
#include "blendrp/weights.hpp"

#include <CLI11.hpp>

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

namespace fs = std::filesystem;
using namespace blendrp;

namespace {

constexpr int exit_usage = 1;
constexpr int exit_data = 2;
constexpr int exit_solver = 3;

class SolverFailure : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct Options {
    fs::path data;
    std::string mode;
    std::string method = "hull";
    std::string weights = "convex";
    int n_rp = 5;
    std::string seeds = "1";
    fs::path out = ".";
    fs::path input;
    fs::path cache;
    bool full = false;
    double tolerance = 1e-8;
    double time_limit = 0.0;
    // synth
    std::uint64_t synth_seed = 7;
    int periods = 12;
    int hours = 6;
    bool no_seasonal = false;
    bool greenfield = false;
};

std::vector<std::uint64_t> parse_seeds(const std::string& text)
{
    std::vector<std::uint64_t> seeds;
    std::stringstream in(text);
    std::string item;
    while (std::getline(in, item, ',')) {
        if (item.empty()) continue;
        std::size_t used = 0;
        const auto value = std::stoull(item, &used);
        if (used != item.size()) throw CLI::ValidationError("--seeds", "not an integer: " + item);
        seeds.push_back(value);
    }
    if (seeds.empty()) throw CLI::ValidationError("--seeds", "at least one seed is required");
    return seeds;
}

SolverHandle solver_handle(const Options& o)
{
    SolverHandle h;
    h.tolerance = o.tolerance;
    if (o.time_limit > 0.0) h.time_limit_seconds = o.time_limit;
    return h;
}

std::string format(double x)
{
    std::ostringstream s;
    s << std::setprecision(std::numeric_limits<double>::max_digits10) << x;
    return s.str();
}

ModelMode mode_of(const Options& o, const EnergySystem& system)
{
    return o.mode.empty() ? system.mode : parse_mode(o.mode);
}

std::ofstream open_output(const fs::path& path)
{
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
    return out;
}

Reduction reduction_for(const Options& o, const ClusteringMatrix& layout)
{
    return reduce(layout, parse_method(o.method), parse_weight_type(o.weights), o.n_rp, parse_seeds(o.seeds).front());
}

void write_reps(const ClusteringMatrix& layout, const Reduction& r, const fs::path& dir)
{
    auto out = open_output(dir / "reps.csv");
    out << "feature";
    for (Eigen::Index j = 0; j < r.selection.size(); ++j) out << ",r" << j + 1;
    out << '\n';
    for (Eigen::Index i = 0; i < r.selection.reps.rows(); ++i) {
        out << layout.row_labels[static_cast<std::size_t>(i)];
        for (Eigen::Index j = 0; j < r.selection.size(); ++j) out << ',' << format(r.selection.reps(i, j));
        out << '\n';
    }
    if (r.selection.sources) {
        auto src = open_output(dir / "sources.csv");
        src << "rep,period\n";
        for (std::size_t j = 0; j < r.selection.sources->size(); ++j) {
            src << j + 1 << ',' << layout.period_ids[static_cast<std::size_t>((*r.selection.sources)[j])] << '\n';
        }
    }
    if (r.assignment) {
        auto asg = open_output(dir / "assignment.csv");
        asg << "period,rep\n";
        for (std::size_t d = 0; d < r.assignment->assignment.size(); ++d) {
            asg << layout.period_ids[d] << ',' << r.assignment->assignment[d] + 1 << '\n';
        }
    }
}

void write_weights(const ClusteringMatrix& layout, const WeightMatrix& w, const fs::path& dir)
{
    auto out = open_output(dir / "weights.csv");
    out << "period,rep,value\n";
    for (Eigen::Index d = 0; d < w.num_periods(); ++d) {
        for (Eigen::Index r = 0; r < w.num_reps(); ++r) {
            if (w.values(d, r) == 0.0) continue;
            out << layout.period_ids[static_cast<std::size_t>(d)] << ',' << r + 1 << ',' << format(w.values(d, r))
                << '\n';
        }
    }
    auto err = open_output(dir / "projection_errors.csv");
    err << "period,error\n";
    for (Eigen::Index d = 0; d < w.num_periods(); ++d) {
        err << layout.period_ids[static_cast<std::size_t>(d)] << ',' << format(w.errors[d]) << '\n';
    }
}

int cmd_validate(const Options& o)
{
    const auto system = load_system(o.data);
    const auto violations = validate_profiles(system);
    for (const auto& v : violations) std::cout << v.describe() << '\n';
    if (!violations.empty()) {
        std::cerr << violations.size() << " profile violation(s)\n";
        return exit_data;
    }
    std::cout << "ok: " << system.assets.size() << " assets, " << system.horizon.num_periods << " periods x "
              << system.horizon.hours_per_period << " hours\n";
    return 0;
}

int cmd_cluster(const Options& o)
{
    const auto system = load_system(o.data);
    const auto layout = build_clustering_matrix(system);
    const auto r = select_representatives(layout, parse_method(o.method), parse_weight_type(o.weights), o.n_rp,
                                          parse_seeds(o.seeds).front());
    write_reps(layout, r, o.out);
    std::cout << "selected " << r.selection.size() << " representatives\n";
    return 0;
}

int cmd_fit_weights(const Options& o)
{
    const auto system = load_system(o.data);
    const auto layout = build_clustering_matrix(system);
    const auto r = reduction_for(o, layout);
    write_reps(layout, r, o.out);
    write_weights(layout, r.weights, o.out);
    std::cout << "mean projection error " << format(r.weights.errors.mean()) << '\n';
    return 0;
}

int cmd_build_lp(const Options& o)
{
    const auto system = load_system(o.data);
    const auto mode = mode_of(o, system);
    LpModel model;
    if (o.full) {
        model = build_full_model(system, mode);
    } else {
        const auto layout = build_clustering_matrix(system);
        const auto r = reduction_for(o, layout);
        model = build_model(system, make_rep_data(layout, r.selection.reps), r.weights, mode);
    }
    fs::create_directories(o.out);
    write_lp_file(model, o.out / "model.lp");
    std::cout << model.variables().size() << " variables, " << model.constraints().size() << " constraints\n";
    return 0;
}

int cmd_solve_full(const Options& o)
{
    const auto system = load_system(o.data);
    const auto model = build_full_model(system, mode_of(o, system));
    const auto solution = solve(model, solver_handle(o));
    if (!solution.optimal()) {
        throw SolverFailure("full model " + to_string(solution.status) +
                            (solution.message.empty() ? "" : ": " + solution.message));
    }
    auto out = open_output(o.out / "solution.csv");
    out << "variable,value\n";
    for (std::size_t i = 0; i < solution.names.size(); ++i) {
        out << solution.names[i] << ',' << format(solution.values[i]) << '\n';
    }
    std::cout << "objective " << format(solution.objective) << '\n';
    return 0;
}

int cmd_experiment(const Options& o)
{
    ExperimentConfig config;
    config.data = o.data;
    config.mode = o.mode.empty() ? load_system(o.data).mode : parse_mode(o.mode);
    config.method = parse_method(o.method);
    config.weight_type = parse_weight_type(o.weights);
    config.n_rp = o.n_rp;
    config.seeds = parse_seeds(o.seeds);
    config.solver = solver_handle(o);
    if (!o.cache.empty()) config.cache_dir = o.cache;

    const auto records = run_experiment(config);
    emit_plot_data(records, o.out);
    int code = 0;
    for (const auto& r : records) {
        std::cout << "seed " << r.seed << ": ";
        if (r.ok()) {
            std::cout << "regret " << format(r.regret_pct) << "% total " << format(r.times.total()) << " s\n";
            continue;
        }
        std::cout << r.status << '\n';
        const bool data_problem = r.status.rfind("data error", 0) == 0;
        code = std::max(code, data_problem ? exit_data : exit_solver);
    }
    return code;
}

int cmd_emit_plots(const Options& o)
{
    const auto records = parse_results_csv(o.input);
    emit_plot_data(records, o.out);
    std::cout << records.size() << " records, " << pareto_front(records).size() << " on the Pareto front\n";
    return 0;
}

int cmd_synth(const Options& o)
{
    SyntheticOptions s;
    s.seed = o.synth_seed;
    s.periods = o.periods;
    s.hours = o.hours;
    s.mode = o.mode.empty() ? ModelMode::gep : parse_mode(o.mode);
    s.seasonal_storage = !o.no_seasonal;
    s.greenfield = o.greenfield;
    write_system(make_synthetic_system(s), o.out);
    std::cout << "wrote " << o.out.string() << '\n';
    return 0;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Representative-period reduction of energy system models"};
    app.require_subcommand(1);
    Options o;

    const std::vector<std::string> modes{"gep", "p2x"};
    const std::vector<std::string> methods{"kmeans", "kmedoids", "hull"};
    const std::vector<std::string> weight_types{"dirac", "convex", "subunit", "conic"};

    auto add_data = [&](CLI::App* c) { c->add_option("--data", o.data, "Data directory")->required(); };
    auto add_mode = [&](CLI::App* c) {
        c->add_option("--mode", o.mode, "Model mode (default: from config.json)")
            ->check(CLI::IsMember(modes));
    };
    auto add_reduction = [&](CLI::App* c) {
        c->add_option("--method", o.method, "Clustering method")->check(CLI::IsMember(methods));
        c->add_option("--weights", o.weights, "Weight type")->check(CLI::IsMember(weight_types));
        c->add_option("--n-rp", o.n_rp, "Number of representative periods")->check(CLI::PositiveNumber);
        c->add_option("--seeds", o.seeds, "Comma-separated seeds");
    };
    auto add_out = [&](CLI::App* c) { c->add_option("--out", o.out, "Output directory"); };
    auto add_solver = [&](CLI::App* c) {
        c->add_option("--tolerance", o.tolerance, "Solver feasibility tolerance")->check(CLI::PositiveNumber);
        c->add_option("--time-limit", o.time_limit, "Solver time limit in seconds");
    };

    auto* validate = app.add_subcommand("validate", "Check a data directory");
    add_data(validate);

    auto* cluster = app.add_subcommand("cluster", "Select representative periods");
    add_data(cluster);
    add_reduction(cluster);
    add_out(cluster);

    auto* fit = app.add_subcommand("fit-weights", "Select representatives and fit period weights");
    add_data(fit);
    add_reduction(fit);
    add_out(fit);

    auto* build = app.add_subcommand("build-lp", "Write the (reduced or full) model as an LP file");
    add_data(build);
    add_mode(build);
    add_reduction(build);
    add_out(build);
    build->add_flag("--full", o.full, "Write the full-resolution model");

    auto* solve_full = app.add_subcommand("solve-full", "Solve the full-resolution model");
    add_data(solve_full);
    add_mode(solve_full);
    add_out(solve_full);
    add_solver(solve_full);

    auto* experiment = app.add_subcommand("experiment", "Run the reduction pipeline and report regret");
    add_data(experiment);
    add_mode(experiment);
    add_reduction(experiment);
    add_out(experiment);
    add_solver(experiment);
    experiment->add_option("--cache", o.cache, "Directory caching full-model optima");

    auto* plots = app.add_subcommand("emit-plots", "Rewrite results.csv and pareto.csv from a results file");
    plots->add_option("--in", o.input, "Existing results.csv")->required()->check(CLI::ExistingFile);
    add_out(plots);

    auto* synth = app.add_subcommand("synth", "Write a synthetic test system");
    add_mode(synth);
    add_out(synth);
    synth->add_option("--seed", o.synth_seed, "Profile seed");
    synth->add_option("--periods", o.periods, "Number of base periods")->check(CLI::PositiveNumber);
    synth->add_option("--hours", o.hours, "Hours per period")->check(CLI::PositiveNumber);
    synth->add_flag("--no-seasonal", o.no_seasonal, "Omit the seasonal reservoir");
    synth->add_flag("--greenfield", o.greenfield, "Start investable producers at zero units");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : exit_usage; // --help and friends exit cleanly
    }

    try {
        if (*validate) return cmd_validate(o);
        if (*cluster) return cmd_cluster(o);
        if (*fit) return cmd_fit_weights(o);
        if (*build) return cmd_build_lp(o);
        if (*solve_full) return cmd_solve_full(o);
        if (*experiment) return cmd_experiment(o);
        if (*plots) return cmd_emit_plots(o);
        if (*synth) return cmd_synth(o);
    } catch (const DataError& e) {
        std::cerr << "data error";
        if (!e.file().empty()) {
            std::cerr << " in " << e.file();
            if (e.line() > 0) std::cerr << ':' << e.line();
        }
        std::cerr << ": " << e.what() << '\n';
        return exit_data;
    } catch (const SolverFailure& e) {
        std::cerr << "solver failure: " << e.what() << '\n';
        return exit_solver;
    } catch (const CLI::ValidationError& e) {
        std::cerr << e.what() << '\n';
        return exit_usage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return exit_usage;
    }
    return exit_usage;
}
