#pragma once

// Independent reference implementations used to check the library: exhaustive
// active-set enumeration for the constrained least-squares problems, brute
// force over medoid subsets, and central finite differences.

#include "blendrp/weights.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <functional>
#include <limits>
#include <random>
#include <vector>

namespace oracle {

using blendrp::WeightType;

/// Solves min ||A_S w - c|| over the support S (columns listed in `support`),
/// optionally with sum(w) = 1. Returns false if the reduced system is singular.
inline bool solve_on_support(const Eigen::MatrixXd& a, const Eigen::VectorXd& c, const std::vector<int>& support,
                             bool sum_to_one, Eigen::VectorXd& w)
{
    const auto k = static_cast<Eigen::Index>(support.size());
    Eigen::MatrixXd as(a.rows(), k);
    for (Eigen::Index j = 0; j < k; ++j) as.col(j) = a.col(support[static_cast<std::size_t>(j)]);
    const Eigen::MatrixXd g = as.transpose() * as;
    const Eigen::VectorXd b = as.transpose() * c;
    Eigen::VectorXd ws;
    if (sum_to_one) {
        Eigen::MatrixXd kkt = Eigen::MatrixXd::Zero(k + 1, k + 1);
        kkt.topLeftCorner(k, k) = g;
        kkt.block(0, k, k, 1).setOnes();
        kkt.block(k, 0, 1, k).setOnes();
        Eigen::VectorXd rhs(k + 1);
        rhs << b, 1.0;
        Eigen::FullPivLU<Eigen::MatrixXd> lu(kkt);
        if (!lu.isInvertible()) return false;
        ws = lu.solve(rhs).head(k);
    } else {
        Eigen::FullPivLU<Eigen::MatrixXd> lu(g);
        if (!lu.isInvertible()) return false;
        ws = lu.solve(b);
    }
    w = Eigen::VectorXd::Zero(a.cols());
    for (Eigen::Index j = 0; j < k; ++j) w[support[static_cast<std::size_t>(j)]] = ws[j];
    return true;
}

/// Exact minimiser of ||A w - c|| over the weight space of `type`, found by
/// enumerating every support set and keeping the best feasible stationary
/// point. Exponential in the number of columns; meant for n <= 10. Dirac is
/// enumerated over the unit vectors (lowest index on ties).
inline Eigen::VectorXd constrained_least_squares(const Eigen::MatrixXd& a, const Eigen::VectorXd& c, WeightType type)
{
    const auto n = static_cast<int>(a.cols());
    Eigen::VectorXd best;
    double best_value = std::numeric_limits<double>::infinity();
    auto consider = [&](const Eigen::VectorXd& w) {
        const double value = (a * w - c).squaredNorm();
        if (value < best_value - 1e-15) {
            best_value = value;
            best = w;
        }
    };

    if (type == WeightType::dirac) {
        for (int j = 0; j < n; ++j) consider(Eigen::VectorXd::Unit(n, j));
        return best;
    }
    if (type != WeightType::convex) consider(Eigen::VectorXd::Zero(n));

    const double tol = 1e-12;
    for (unsigned mask = 1; mask < (1u << n); ++mask) {
        std::vector<int> support;
        for (int j = 0; j < n; ++j) {
            if (mask & (1u << j)) support.push_back(j);
        }
        const auto try_variant = [&](bool sum_to_one) {
            Eigen::VectorXd w;
            if (!solve_on_support(a, c, support, sum_to_one, w)) return;
            if (w.minCoeff() < -tol) return;
            if (type == WeightType::subunit_conic && !sum_to_one && w.sum() > 1.0 + tol) return;
            consider(w.cwiseMax(0.0));
        };
        switch (type) {
        case WeightType::convex: try_variant(true); break;
        case WeightType::subunit_conic: try_variant(false); try_variant(true); break;
        case WeightType::conic: try_variant(false); break;
        case WeightType::dirac: break;
        }
    }
    return best;
}

/// Euclidean projection of v onto the weight space: the least-squares problem
/// with A = I.
inline Eigen::VectorXd projection(const Eigen::VectorXd& v, WeightType type)
{
    return constrained_least_squares(Eigen::MatrixXd::Identity(v.size(), v.size()), v, type);
}

struct MedoidOptimum {
    std::vector<int> medoids;
    double cost = std::numeric_limits<double>::infinity();
};

/// Exhaustive k-medoids: the k-subset minimising the summed Euclidean distance
/// from every column to its nearest medoid. Ties keep the lexicographically
/// smallest subset.
inline MedoidOptimum brute_force_medoids(const Eigen::MatrixXd& data, int k)
{
    const auto n = static_cast<int>(data.cols());
    MedoidOptimum best;
    std::vector<int> pick(static_cast<std::size_t>(k));
    std::function<void(int, int)> rec = [&](int start, int depth) {
        if (depth == k) {
            double cost = 0.0;
            for (int d = 0; d < n; ++d) {
                double nearest = std::numeric_limits<double>::infinity();
                for (int m : pick) nearest = std::min(nearest, (data.col(d) - data.col(m)).norm());
                cost += nearest;
            }
            if (cost < best.cost - 1e-12) {
                best.cost = cost;
                best.medoids = pick;
            }
            return;
        }
        for (int i = start; i < n; ++i) {
            pick[static_cast<std::size_t>(depth)] = i;
            rec(i + 1, depth + 1);
        }
    };
    rec(0, 0);
    return best;
}

/// Central finite-difference gradient of f at x.
inline Eigen::VectorXd finite_difference(const std::function<double(const Eigen::VectorXd&)>& f,
                                         const Eigen::VectorXd& x, double h = 1e-6)
{
    Eigen::VectorXd g(x.size());
    for (Eigen::Index i = 0; i < x.size(); ++i) {
        Eigen::VectorXd up = x;
        Eigen::VectorXd down = x;
        up[i] += h;
        down[i] -= h;
        g[i] = (f(up) - f(down)) / (2.0 * h);
    }
    return g;
}

/// Uniform matrix with entries in [lo, hi) drawn from `rng`.
template <class Rng>
Eigen::MatrixXd random_matrix(Rng& rng, Eigen::Index rows, Eigen::Index cols, double lo = 0.0, double hi = 1.0)
{
    std::uniform_real_distribution<double> u(lo, hi);
    Eigen::MatrixXd m(rows, cols);
    for (Eigen::Index j = 0; j < cols; ++j) {
        for (Eigen::Index i = 0; i < rows; ++i) m(i, j) = u(rng);
    }
    return m;
}

} // namespace oracle
