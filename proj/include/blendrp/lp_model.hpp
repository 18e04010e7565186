#pragma once

#include "blendrp/core_data.hpp"
#include "blendrp/weights.hpp"

#include <limits>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

namespace blendrp {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

enum class Sense { le, ge, eq };

struct Term {
    int var = 0;
    double coef = 0.0;
};

struct Variable {
    std::string name;
    double lower = 0.0;
    double upper = kInf;
    bool integer = false;
};

struct Constraint {
    std::string name;
    std::vector<Term> terms; // one entry per variable, in first-use order
    Sense sense = Sense::eq;
    double rhs = 0.0;
};

struct ModelInfo {
    ModelMode mode = ModelMode::gep;
    int num_reps = 0;
    WeightType weight_type = WeightType::dirac;
};

/// Linear program in row form, minimised. Variable and constraint names are
/// unique; insertion order is the emission order.
class LpModel {
public:
    int add_variable(std::string name, double lower = 0.0, double upper = kInf, bool integer = false);
    /// Terms referencing the same variable are merged; zero coefficients dropped.
    int add_constraint(std::string name, const std::vector<Term>& terms, Sense sense, double rhs);
    void set_objective(const std::vector<Term>& terms);

    std::optional<int> find_variable(const std::string& name) const;
    int variable(const std::string& name) const; // throws std::out_of_range

    void set_bounds(int var, double lower, double upper);

    const std::vector<Variable>& variables() const { return variables_; }
    const std::vector<Constraint>& constraints() const { return constraints_; }
    const std::vector<Term>& objective() const { return objective_; }

    ModelInfo info;

private:
    std::vector<Variable> variables_;
    std::vector<Constraint> constraints_;
    std::vector<Term> objective_;
    std::unordered_map<std::string, int> var_index_;
    std::unordered_map<std::string, int> con_index_;
};

std::vector<Term> merge_terms(const std::vector<Term>& terms);

enum class SolveStatus { optimal, infeasible, unbounded, error };

/// Distinguishes the causes behind SolveStatus::error.
enum class SolveFailure { none, backend_unavailable, time_limit, numerical };

std::string to_string(SolveStatus status);
std::string to_string(SolveFailure failure);

struct Solution {
    SolveStatus status = SolveStatus::error;
    SolveFailure failure = SolveFailure::none;
    std::string message;
    double objective = 0.0;
    std::vector<std::string> names;
    std::vector<double> values;
    double solve_seconds = 0.0;

    std::unordered_map<std::string, std::size_t> index; // name -> position, see build_index()

    bool optimal() const { return status == SolveStatus::optimal; }
    void build_index();
    std::optional<double> value(const std::string& name) const;
};

} // namespace blendrp
