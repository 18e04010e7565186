#include "blendrp/solve.hpp"

#include "csv.hpp"

#include <Highs.h>

#include <chrono>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace blendrp {

namespace {

bool configure(Highs& highs, const SolverHandle& handle, Solution& out)
{
    if (!(handle.tolerance > 0.0)) {
        out.status = SolveStatus::error;
        out.failure = SolveFailure::numerical;
        out.message = "solver tolerance must be positive";
        return false;
    }
    highs.setOptionValue("output_flag", false);
    highs.setOptionValue("random_seed", 0);
    highs.setOptionValue("primal_feasibility_tolerance", handle.tolerance);
    highs.setOptionValue("dual_feasibility_tolerance", handle.tolerance);
    if (handle.time_limit_seconds) {
        highs.setOptionValue("time_limit", *handle.time_limit_seconds);
    }
    return true;
}

Solution run(Highs& highs, Solution out)
{
    const auto start = std::chrono::steady_clock::now();
    HighsStatus status = highs.run();
    auto model_status = highs.getModelStatus();
    if (model_status == HighsModelStatus::kUnboundedOrInfeasible) {
        highs.setOptionValue("presolve", "off");
        status = highs.run();
        model_status = highs.getModelStatus();
    }
    out.solve_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

    switch (model_status) {
    case HighsModelStatus::kOptimal:
    case HighsModelStatus::kModelEmpty:
        out.status = SolveStatus::optimal;
        break;
    case HighsModelStatus::kInfeasible:
        out.status = SolveStatus::infeasible;
        break;
    case HighsModelStatus::kUnbounded:
    case HighsModelStatus::kUnboundedOrInfeasible:
        out.status = SolveStatus::unbounded;
        break;
    case HighsModelStatus::kTimeLimit:
        out.status = SolveStatus::error;
        out.failure = SolveFailure::time_limit;
        out.message = "time limit reached";
        return out;
    default:
        out.status = SolveStatus::error;
        out.failure = SolveFailure::numerical;
        out.message = "solver finished with status '" + highs.modelStatusToString(model_status) + "'";
        return out;
    }
    if (status == HighsStatus::kError) {
        out.status = SolveStatus::error;
        out.failure = SolveFailure::numerical;
        out.message = "solver reported an error";
        return out;
    }
    if (out.status == SolveStatus::optimal) {
        out.objective = highs.getInfo().objective_function_value;
        if (model_status == HighsModelStatus::kModelEmpty) {
            out.objective = highs.getLp().offset_;
        }
        const auto& values = highs.getSolution().col_value;
        const auto& lp = highs.getLp();
        out.values.assign(values.begin(), values.end());
        if (out.names.empty()) {
            out.names = lp.col_names_;
        }
        out.values.resize(out.names.size(), 0.0);
        out.build_index();
    }
    return out;
}

} // namespace

Solution solve(const LpModel& model, const SolverHandle& handle)
{
    Solution out;
    if (handle.backend != "highs") {
        out.status = SolveStatus::error;
        out.failure = SolveFailure::backend_unavailable;
        out.message = "LP backend '" + handle.backend + "' is not available (built-in backend: highs)";
        return out;
    }
    Highs highs;
    if (!configure(highs, handle, out)) {
        return out;
    }

    const auto& vars = model.variables();
    const auto& cons = model.constraints();
    if (vars.empty()) {
        // Rows without variables are either trivially satisfied or infeasible.
        out.status = SolveStatus::optimal;
        for (const auto& c : cons) {
            const bool ok = (c.sense == Sense::le && 0.0 <= c.rhs) || (c.sense == Sense::ge && 0.0 >= c.rhs)
                            || (c.sense == Sense::eq && c.rhs == 0.0);
            if (!ok) out.status = SolveStatus::infeasible;
        }
        return out;
    }
    HighsLp lp;
    lp.num_col_ = static_cast<HighsInt>(vars.size());
    lp.num_row_ = static_cast<HighsInt>(cons.size());
    lp.sense_ = ObjSense::kMinimize;
    lp.col_cost_.assign(vars.size(), 0.0);
    for (const auto& t : model.objective()) {
        lp.col_cost_[static_cast<std::size_t>(t.var)] += t.coef;
    }
    bool any_integer = false;
    for (const auto& v : vars) {
        lp.col_lower_.push_back(v.lower);
        lp.col_upper_.push_back(v.upper);
        any_integer = any_integer || v.integer;
    }
    if (any_integer) {
        for (const auto& v : vars) {
            lp.integrality_.push_back(v.integer ? HighsVarType::kInteger : HighsVarType::kContinuous);
        }
    }
    lp.a_matrix_.format_ = MatrixFormat::kRowwise;
    lp.a_matrix_.num_col_ = lp.num_col_;
    lp.a_matrix_.num_row_ = lp.num_row_;
    lp.a_matrix_.start_.assign(1, 0);
    for (const auto& c : cons) {
        for (const auto& t : c.terms) {
            lp.a_matrix_.index_.push_back(static_cast<HighsInt>(t.var));
            lp.a_matrix_.value_.push_back(t.coef);
        }
        lp.a_matrix_.start_.push_back(static_cast<HighsInt>(lp.a_matrix_.index_.size()));
        switch (c.sense) {
        case Sense::le:
            lp.row_lower_.push_back(-kHighsInf);
            lp.row_upper_.push_back(c.rhs);
            break;
        case Sense::ge:
            lp.row_lower_.push_back(c.rhs);
            lp.row_upper_.push_back(kHighsInf);
            break;
        case Sense::eq:
            lp.row_lower_.push_back(c.rhs);
            lp.row_upper_.push_back(c.rhs);
            break;
        }
    }
    lp.a_matrix_.ensureColwise();

    if (highs.passModel(std::move(lp)) == HighsStatus::kError) {
        out.status = SolveStatus::error;
        out.failure = SolveFailure::numerical;
        out.message = "solver rejected the model";
        return out;
    }
    out.names.reserve(vars.size());
    for (const auto& v : vars) {
        out.names.push_back(v.name);
    }
    return run(highs, std::move(out));
}

Solution solve_lp_file(const std::filesystem::path& path, const SolverHandle& handle)
{
    Solution out;
    if (handle.backend != "highs") {
        out.status = SolveStatus::error;
        out.failure = SolveFailure::backend_unavailable;
        out.message = "LP backend '" + handle.backend + "' is not available (built-in backend: highs)";
        return out;
    }
    Highs highs;
    if (!configure(highs, handle, out)) {
        return out;
    }
    if (highs.readModel(path.string()) == HighsStatus::kError) {
        out.status = SolveStatus::error;
        out.failure = SolveFailure::numerical;
        out.message = "could not read " + path.string();
        return out;
    }
    return run(highs, std::move(out));
}

// ---------------------------------------------------------------------------
// LP text

namespace {

constexpr std::size_t kTermsPerLine = 6;

void write_terms(std::ostream& out, const LpModel& model, const std::vector<Term>& terms)
{
    if (terms.empty()) {
        // An empty row still needs a left-hand side; the first variable with a
        // zero coefficient keeps the row well-formed.
        out << " 0 " << model.variables().front().name;
        return;
    }
    for (std::size_t i = 0; i < terms.size(); ++i) {
        if (i > 0 && i % kTermsPerLine == 0) {
            out << "\n   ";
        }
        const auto& t = terms[i];
        const double magnitude = std::abs(t.coef);
        out << (t.coef < 0 ? " - " : " + ");
        if (magnitude != 1.0) {
            out << csv::format_double(magnitude) << ' ';
        }
        out << model.variables()[static_cast<std::size_t>(t.var)].name;
    }
}

} // namespace

std::string lp_text(const LpModel& model)
{
    std::ostringstream out;
    out << "\\ mode=" << to_string(model.info.mode) << " reps=" << model.info.num_reps
        << " weights=" << to_string(model.info.weight_type) << '\n';
    out << "Minimize\n obj:";
    if (model.objective().empty()) {
        if (!model.variables().empty()) {
            out << " 0 " << model.variables().front().name;
        }
    } else {
        write_terms(out, model, model.objective());
    }
    out << '\n';

    out << "Subject To\n";
    for (const auto& c : model.constraints()) {
        out << ' ' << c.name << ':';
        write_terms(out, model, c.terms);
        switch (c.sense) {
        case Sense::le: out << " <= "; break;
        case Sense::ge: out << " >= "; break;
        case Sense::eq: out << " = "; break;
        }
        out << csv::format_double(c.rhs) << '\n';
    }

    out << "Bounds\n";
    bool any_integer = false;
    for (const auto& v : model.variables()) {
        any_integer = any_integer || v.integer;
        const bool lower_inf = std::isinf(v.lower);
        const bool upper_inf = std::isinf(v.upper);
        out << ' ';
        if (lower_inf && upper_inf) {
            out << v.name << " free";
        } else if (v.lower == v.upper) {
            out << v.name << " = " << csv::format_double(v.lower);
        } else if (lower_inf) {
            out << "-inf <= " << v.name << " <= " << csv::format_double(v.upper);
        } else if (upper_inf) {
            out << v.name << " >= " << csv::format_double(v.lower);
        } else {
            out << csv::format_double(v.lower) << " <= " << v.name << " <= " << csv::format_double(v.upper);
        }
        out << '\n';
    }
    if (any_integer) {
        out << "General\n";
        for (const auto& v : model.variables()) {
            if (v.integer) out << ' ' << v.name << '\n';
        }
    }
    out << "End\n";
    return out.str();
}

void write_lp_file(const LpModel& model, const std::filesystem::path& path)
{
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw std::runtime_error("cannot open " + path.string() + " for writing");
    }
    out << lp_text(model);
    if (!out) {
        throw std::runtime_error("failed writing " + path.string());
    }
}

} // namespace blendrp
