#pragma once

#include <Eigen/Dense>

#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace blendrp {

/// Admissible weight spaces, nested: dirac < convex < subunit_conic < conic.
enum class WeightType { dirac, convex, subunit_conic, conic };

std::string to_string(WeightType type);
/// Accepts "dirac", "convex", "subunit" / "subunit_conic", "conic".
WeightType parse_weight_type(const std::string& text);

struct PgdParams {
    int max_iter = 2000;
    double tolerance = 1e-8;
    std::optional<double> learning_rate; // nullopt = 1/L with L the largest eigenvalue of R^T R
};

/// Raised when PGD meets a non-finite gradient or iterate.
class PgdError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Euclidean projection onto the unit simplex {x >= 0, sum x = 1} (Condat's
/// algorithm, expected linear time).
Eigen::VectorXd project_simplex(const Eigen::VectorXd& v);

/// Euclidean projection onto the weight space of `type`. Dirac keeps the
/// largest coordinate (lowest index on ties).
Eigen::VectorXd project_weights(const Eigen::VectorXd& v, WeightType type);

using GradientFn = std::function<Eigen::VectorXd(const Eigen::VectorXd&)>;
using ProjectorFn = std::function<Eigen::VectorXd(const Eigen::VectorXd&)>;
using IterateObserver = std::function<void(int iteration, const Eigen::VectorXd& x)>;

struct PgdResult {
    Eigen::VectorXd x;
    int iterations = 0;
    bool converged = false;
};

/// Projected gradient descent. The start point is projected first; iteration
/// stops once the infinity-norm step falls to tolerance / max_iter. The
/// learning rate must be explicit here. The observer, if set, sees the
/// projected start as iteration 0 and each subsequent iterate.
PgdResult pgd(const Eigen::VectorXd& x0, const GradientFn& gradient, const ProjectorFn& projector,
              const PgdParams& params, const IterateObserver& observer = {});

/// Minimum-norm least-squares solution of R v = c.
Eigen::VectorXd least_squares_init(const Eigen::MatrixXd& reps, const Eigen::VectorXd& c);

/// Largest eigenvalue of R^T R by power iteration (50 steps).
double lipschitz_constant(const Eigen::MatrixXd& reps, int iterations = 50);

/// Half squared residual, 0.5 * ||R w - c||^2.
double fitting_objective(const Eigen::MatrixXd& reps, const Eigen::VectorXd& c, const Eigen::VectorXd& w);
/// Gradient of the half squared residual, R^T (R w - c).
Eigen::VectorXd fitting_gradient(const Eigen::MatrixXd& reps, const Eigen::VectorXd& c, const Eigen::VectorXd& w);

/// Index of the representative column nearest to `c` (lowest index on ties).
Eigen::Index nearest_rep(const Eigen::MatrixXd& reps, const Eigen::VectorXd& c);

struct ColumnFit {
    Eigen::VectorXd weights;
    double error = 0.0; // ||R w - c||_2
};

/// Fits one column. The PGD start is whichever of project(R^+ c) and the Dirac
/// vector e_{dirac_hint} has the smaller residual; `dirac_hint` defaults to the
/// nearest representative. Dirac type returns the Dirac vector directly.
ColumnFit fit_column(const Eigen::MatrixXd& reps, const Eigen::VectorXd& c, WeightType type, const PgdParams& params,
                     std::optional<Eigen::Index> dirac_hint = std::nullopt, std::optional<double> lipschitz = std::nullopt);

struct WeightMatrix {
    Eigen::MatrixXd values; // periods x reps
    WeightType type = WeightType::dirac;
    Eigen::VectorXd errors;     // per period ||R w_d - c_d||_2
    Eigen::VectorXd rep_totals; // column sums

    Eigen::Index num_periods() const { return values.rows(); }
    Eigen::Index num_reps() const { return values.cols(); }
};

/// Identity Dirac weights over `periods` representatives (the full model).
WeightMatrix identity_weights(Eigen::Index periods);

/// Fits a weight row for every column of `data` against `reps`. For Dirac
/// weights a clustering assignment, when given, is used verbatim.
WeightMatrix fit_weights(const Eigen::MatrixXd& reps, const Eigen::MatrixXd& data, WeightType type,
                         const PgdParams& params, const std::vector<int>* assignment = nullptr);

/// True when `row` lies in the weight space of `type` up to `tol`.
bool in_weight_space(const Eigen::VectorXd& row, WeightType type, double tol = 1e-9);

} // namespace blendrp
