#include "blendrp/lp_model.hpp"

#include <stdexcept>

namespace blendrp {

std::vector<Term> merge_terms(const std::vector<Term>& terms)
{
    std::vector<Term> out;
    out.reserve(terms.size());
    std::unordered_map<int, std::size_t> position;
    for (const auto& t : terms) {
        const auto [it, inserted] = position.emplace(t.var, out.size());
        if (inserted) {
            out.push_back(t);
        } else {
            out[it->second].coef += t.coef;
        }
    }
    std::erase_if(out, [](const Term& t) { return t.coef == 0.0; });
    return out;
}

int LpModel::add_variable(std::string name, double lower, double upper, bool integer)
{
    const int index = static_cast<int>(variables_.size());
    if (!var_index_.emplace(name, index).second) {
        throw std::invalid_argument("duplicate variable '" + name + "'");
    }
    if (lower > upper) {
        throw std::invalid_argument("variable '" + name + "' has lower bound above upper bound");
    }
    variables_.push_back(Variable{std::move(name), lower, upper, integer});
    return index;
}

int LpModel::add_constraint(std::string name, const std::vector<Term>& terms, Sense sense, double rhs)
{
    const int index = static_cast<int>(constraints_.size());
    for (const auto& t : terms) {
        if (t.var < 0 || t.var >= static_cast<int>(variables_.size())) {
            throw std::invalid_argument("constraint '" + name + "' references an undeclared variable");
        }
    }
    if (!con_index_.emplace(name, index).second) {
        throw std::invalid_argument("duplicate constraint '" + name + "'");
    }
    constraints_.push_back(Constraint{std::move(name), merge_terms(terms), sense, rhs});
    return index;
}

void LpModel::set_objective(const std::vector<Term>& terms)
{
    for (const auto& t : terms) {
        if (t.var < 0 || t.var >= static_cast<int>(variables_.size())) {
            throw std::invalid_argument("objective references an undeclared variable");
        }
    }
    objective_ = merge_terms(terms);
}

std::optional<int> LpModel::find_variable(const std::string& name) const
{
    const auto it = var_index_.find(name);
    if (it == var_index_.end()) {
        return std::nullopt;
    }
    return it->second;
}

int LpModel::variable(const std::string& name) const
{
    const auto index = find_variable(name);
    if (!index) {
        throw std::out_of_range("unknown variable '" + name + "'");
    }
    return *index;
}

void LpModel::set_bounds(int var, double lower, double upper)
{
    auto& v = variables_.at(static_cast<std::size_t>(var));
    if (lower > upper) {
        throw std::invalid_argument("variable '" + v.name + "' has lower bound above upper bound");
    }
    v.lower = lower;
    v.upper = upper;
}

std::string to_string(SolveStatus status)
{
    switch (status) {
    case SolveStatus::optimal: return "optimal";
    case SolveStatus::infeasible: return "infeasible";
    case SolveStatus::unbounded: return "unbounded";
    case SolveStatus::error: return "error";
    }
    return "error";
}

std::string to_string(SolveFailure failure)
{
    switch (failure) {
    case SolveFailure::none: return "none";
    case SolveFailure::backend_unavailable: return "backend_unavailable";
    case SolveFailure::time_limit: return "time_limit";
    case SolveFailure::numerical: return "numerical";
    }
    return "none";
}

void Solution::build_index()
{
    index.clear();
    index.reserve(names.size());
    for (std::size_t i = 0; i < names.size(); ++i) {
        index.emplace(names[i], i);
    }
}

std::optional<double> Solution::value(const std::string& name) const
{
    if (index.size() == names.size()) {
        const auto it = index.find(name);
        if (it == index.end() || it->second >= values.size()) {
            return std::nullopt;
        }
        return values[it->second];
    }
    for (std::size_t i = 0; i < names.size() && i < values.size(); ++i) {
        if (names[i] == name) return values[i];
    }
    return std::nullopt;
}

} // namespace blendrp
