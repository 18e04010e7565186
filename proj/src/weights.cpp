#include "blendrp/weights.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace blendrp {

std::string to_string(WeightType type)
{
    switch (type) {
    case WeightType::dirac: return "dirac";
    case WeightType::convex: return "convex";
    case WeightType::subunit_conic: return "subunit";
    case WeightType::conic: return "conic";
    }
    return "dirac";
}

WeightType parse_weight_type(const std::string& text)
{
    if (text == "dirac") return WeightType::dirac;
    if (text == "convex") return WeightType::convex;
    if (text == "subunit" || text == "subunit_conic") return WeightType::subunit_conic;
    if (text == "conic") return WeightType::conic;
    throw std::invalid_argument("unknown weight type '" + text + "'");
}

// Condat, "Fast projection onto the simplex and the l1 ball", Figure 2.
Eigen::VectorXd project_simplex(const Eigen::VectorXd& y)
{
    const Eigen::Index n = y.size();
    if (n == 0) {
        return y;
    }
    constexpr double radius = 1.0;

    std::vector<double> active;
    std::vector<double> pending;
    active.reserve(static_cast<std::size_t>(n));
    active.push_back(y[0]);
    double rho = y[0] - radius;
    for (Eigen::Index i = 1; i < n; ++i) {
        const double yi = y[i];
        if (yi > rho) {
            rho += (yi - rho) / static_cast<double>(active.size() + 1);
            if (rho > yi - radius) {
                active.push_back(yi);
            } else {
                pending.insert(pending.end(), active.begin(), active.end());
                active.assign(1, yi);
                rho = yi - radius;
            }
        }
    }
    for (const double yi : pending) {
        if (yi > rho) {
            active.push_back(yi);
            rho += (yi - rho) / static_cast<double>(active.size());
        }
    }
    std::size_t before = 0;
    do {
        before = active.size();
        for (auto it = active.begin(); it != active.end();) {
            if (*it <= rho) {
                const double removed = *it;
                it = active.erase(it);
                rho += (rho - removed) / static_cast<double>(active.size());
            } else {
                ++it;
            }
        }
    } while (active.size() != before);

    return (y.array() - rho).max(0.0).matrix();
}

Eigen::VectorXd project_weights(const Eigen::VectorXd& v, WeightType type)
{
    switch (type) {
    case WeightType::dirac: {
        Eigen::VectorXd out = Eigen::VectorXd::Zero(v.size());
        if (v.size() > 0) {
            Eigen::Index best = 0;
            for (Eigen::Index i = 1; i < v.size(); ++i) {
                if (v[i] > v[best]) best = i;
            }
            out[best] = 1.0;
        }
        return out;
    }
    case WeightType::convex:
        return project_simplex(v);
    case WeightType::subunit_conic: {
        Eigen::VectorXd positive = v.cwiseMax(0.0);
        if (positive.sum() <= 1.0) {
            return positive;
        }
        return project_simplex(v);
    }
    case WeightType::conic:
        return v.cwiseMax(0.0);
    }
    return v;
}

PgdResult pgd(const Eigen::VectorXd& x0, const GradientFn& gradient, const ProjectorFn& projector,
              const PgdParams& params, const IterateObserver& observer)
{
    if (!params.learning_rate || !(*params.learning_rate > 0.0)) {
        throw std::invalid_argument("pgd: learning rate must be explicit and positive");
    }
    if (params.max_iter < 1 || !(params.tolerance > 0.0)) {
        throw std::invalid_argument("pgd: need max_iter >= 1 and tolerance > 0");
    }
    const double alpha = *params.learning_rate;
    const double stall = params.tolerance / static_cast<double>(params.max_iter);

    PgdResult result;
    result.x = projector(x0);
    if (!result.x.allFinite()) {
        throw PgdError("pgd: projected start point is not finite");
    }
    if (observer) observer(0, result.x);
    for (int it = 1; it <= params.max_iter; ++it) {
        const Eigen::VectorXd g = gradient(result.x);
        if (!g.allFinite()) {
            std::ostringstream msg;
            msg << "pgd: non-finite gradient at iteration " << it;
            throw PgdError(msg.str());
        }
        const Eigen::VectorXd previous = result.x;
        result.x = projector(result.x - alpha * g);
        result.iterations = it;
        if (observer) observer(it, result.x);
        if ((previous - result.x).lpNorm<Eigen::Infinity>() <= stall) {
            result.converged = true;
            break;
        }
    }
    return result;
}

Eigen::VectorXd least_squares_init(const Eigen::MatrixXd& reps, const Eigen::VectorXd& c)
{
    return reps.completeOrthogonalDecomposition().solve(c);
}

double lipschitz_constant(const Eigen::MatrixXd& reps, int iterations)
{
    const Eigen::Index n = reps.cols();
    if (n == 0) {
        return 0.0;
    }
    // Ones plus a small ramp keeps the start off any eigenvector orthogonal to 1.
    Eigen::VectorXd v(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        v[i] = 1.0 + 0.01 * static_cast<double>(i + 1) / static_cast<double>(n);
    }
    v.normalize();
    double estimate = 0.0;
    for (int k = 0; k < iterations; ++k) {
        Eigen::VectorXd next = reps.transpose() * (reps * v);
        estimate = next.norm();
        if (estimate == 0.0) {
            return 0.0;
        }
        v = next / estimate;
    }
    return estimate;
}

double fitting_objective(const Eigen::MatrixXd& reps, const Eigen::VectorXd& c, const Eigen::VectorXd& w)
{
    return 0.5 * (reps * w - c).squaredNorm();
}

Eigen::VectorXd fitting_gradient(const Eigen::MatrixXd& reps, const Eigen::VectorXd& c, const Eigen::VectorXd& w)
{
    return reps.transpose() * (reps * w - c);
}

Eigen::Index nearest_rep(const Eigen::MatrixXd& reps, const Eigen::VectorXd& c)
{
    Eigen::Index best = 0;
    double best_dist = std::numeric_limits<double>::infinity();
    for (Eigen::Index j = 0; j < reps.cols(); ++j) {
        const double dist = (reps.col(j) - c).squaredNorm();
        if (dist < best_dist) {
            best_dist = dist;
            best = j;
        }
    }
    return best;
}

ColumnFit fit_column(const Eigen::MatrixXd& reps, const Eigen::VectorXd& c, WeightType type, const PgdParams& params,
                     std::optional<Eigen::Index> dirac_hint, std::optional<double> lipschitz)
{
    if (reps.cols() == 0) {
        throw std::invalid_argument("fit_column: representative matrix has no columns");
    }
    const Eigen::Index n = reps.cols();
    const Eigen::Index hint = dirac_hint.value_or(nearest_rep(reps, c));
    Eigen::VectorXd dirac = Eigen::VectorXd::Zero(n);
    dirac[hint] = 1.0;

    ColumnFit fit;
    if (type == WeightType::dirac) {
        fit.weights = dirac;
        fit.error = (reps * dirac - c).norm();
        return fit;
    }

    const Eigen::VectorXd ls = project_weights(least_squares_init(reps, c), type);
    const double ls_err = (reps * ls - c).norm();
    const double dirac_err = (reps * dirac - c).norm();
    const Eigen::VectorXd& start = ls.allFinite() && ls_err < dirac_err ? ls : dirac;

    PgdParams run = params;
    if (!run.learning_rate) {
        const double L = lipschitz.value_or(lipschitz_constant(reps));
        if (!(L > 0.0)) {
            // R is all zeros: every feasible weight has the same residual.
            fit.weights = start;
            fit.error = c.norm();
            return fit;
        }
        run.learning_rate = 1.0 / L;
    }
    const auto result = pgd(
        start, [&](const Eigen::VectorXd& w) { return fitting_gradient(reps, c, w); },
        [type](const Eigen::VectorXd& w) { return project_weights(w, type); }, run);
    fit.weights = result.x;
    fit.error = (reps * fit.weights - c).norm();
    return fit;
}

WeightMatrix identity_weights(Eigen::Index periods)
{
    WeightMatrix w;
    w.values = Eigen::MatrixXd::Identity(periods, periods);
    w.type = WeightType::dirac;
    w.errors = Eigen::VectorXd::Zero(periods);
    w.rep_totals = Eigen::VectorXd::Ones(periods);
    return w;
}

WeightMatrix fit_weights(const Eigen::MatrixXd& reps, const Eigen::MatrixXd& data, WeightType type,
                         const PgdParams& params, const std::vector<int>* assignment)
{
    if (reps.cols() == 0) {
        throw std::invalid_argument("fit_weights: no representatives");
    }
    if (reps.rows() != data.rows()) {
        throw std::invalid_argument("fit_weights: representative and data feature counts differ");
    }
    if (assignment != nullptr && static_cast<Eigen::Index>(assignment->size()) != data.cols()) {
        throw std::invalid_argument("fit_weights: assignment length differs from period count");
    }

    WeightMatrix out;
    out.type = type;
    out.values = Eigen::MatrixXd::Zero(data.cols(), reps.cols());
    out.errors.resize(data.cols());
    const std::optional<double> lipschitz =
        params.learning_rate ? std::nullopt : std::optional<double>(lipschitz_constant(reps));

    for (Eigen::Index d = 0; d < data.cols(); ++d) {
        std::optional<Eigen::Index> hint;
        if (assignment != nullptr) {
            const int r = (*assignment)[static_cast<std::size_t>(d)];
            if (r < 0 || r >= reps.cols()) {
                throw std::invalid_argument("fit_weights: assignment references unknown representative");
            }
            hint = r;
        }
        const auto fit = fit_column(reps, data.col(d), type, params, hint, lipschitz);
        out.values.row(d) = fit.weights.transpose();
        out.errors[d] = fit.error;
    }
    out.rep_totals = out.values.colwise().sum().transpose();
    return out;
}

bool in_weight_space(const Eigen::VectorXd& row, WeightType type, double tol)
{
    if ((row.array() < -tol).any()) {
        return false;
    }
    const double sum = row.sum();
    switch (type) {
    case WeightType::dirac: {
        int ones = 0;
        for (Eigen::Index i = 0; i < row.size(); ++i) {
            if (std::abs(row[i] - 1.0) <= tol) {
                ++ones;
            } else if (std::abs(row[i]) > tol) {
                return false;
            }
        }
        return ones == 1;
    }
    case WeightType::convex: return std::abs(sum - 1.0) <= tol;
    case WeightType::subunit_conic: return sum <= 1.0 + tol;
    case WeightType::conic: return true;
    }
    return false;
}

} // namespace blendrp
