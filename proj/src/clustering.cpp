#include "blendrp/clustering.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>

namespace blendrp {

std::string to_string(ClusterMethod method)
{
    switch (method) {
    case ClusterMethod::kmeans: return "kmeans";
    case ClusterMethod::kmedoids: return "kmedoids";
    case ClusterMethod::hull: return "hull";
    }
    return "kmeans";
}

std::string to_string(HullType type)
{
    switch (type) {
    case HullType::none: return "none";
    case HullType::convex: return "convex";
    case HullType::convex_null: return "convex_null";
    case HullType::conic: return "conic";
    }
    return "none";
}

ClusterMethod parse_method(const std::string& text)
{
    if (text == "kmeans") return ClusterMethod::kmeans;
    if (text == "kmedoids") return ClusterMethod::kmedoids;
    if (text == "hull") return ClusterMethod::hull;
    throw std::invalid_argument("unknown clustering method '" + text + "'");
}

HullType parse_hull_type(const std::string& text)
{
    if (text == "none") return HullType::none;
    if (text == "convex") return HullType::convex;
    if (text == "convex_null") return HullType::convex_null;
    if (text == "conic") return HullType::conic;
    throw std::invalid_argument("unknown hull type '" + text + "'");
}

HullType hull_for(WeightType type)
{
    switch (type) {
    case WeightType::dirac:
    case WeightType::convex: return HullType::convex;
    case WeightType::subunit_conic: return HullType::convex_null;
    case WeightType::conic: return HullType::conic;
    }
    return HullType::convex;
}

namespace {

void check_k(const Eigen::MatrixXd& data, int k)
{
    if (k < 1 || k > data.cols()) {
        throw std::invalid_argument("number of representatives " + std::to_string(k) + " outside 1.." +
                                    std::to_string(data.cols()));
    }
}

// Nearest centre for every column; lowest centre index on ties.
std::vector<int> assign_nearest(const Eigen::MatrixXd& data, const Eigen::MatrixXd& centres)
{
    std::vector<int> out(static_cast<std::size_t>(data.cols()), 0);
    for (Eigen::Index d = 0; d < data.cols(); ++d) {
        double best = std::numeric_limits<double>::infinity();
        for (Eigen::Index r = 0; r < centres.cols(); ++r) {
            const double dist = (data.col(d) - centres.col(r)).squaredNorm();
            if (dist < best) {
                best = dist;
                out[static_cast<std::size_t>(d)] = static_cast<int>(r);
            }
        }
    }
    return out;
}

} // namespace

std::vector<int> farthest_point_init(const Eigen::MatrixXd& data, int k, std::uint64_t seed)
{
    check_k(data, k);
    const Eigen::Index n = data.cols();
    std::mt19937_64 rng(seed);
    std::vector<int> chosen{static_cast<int>(rng() % static_cast<std::uint64_t>(n))};
    std::vector<bool> taken(static_cast<std::size_t>(n), false);
    taken[static_cast<std::size_t>(chosen.front())] = true;

    std::vector<double> min_dist(static_cast<std::size_t>(n), std::numeric_limits<double>::infinity());
    while (static_cast<int>(chosen.size()) < k) {
        const auto latest = data.col(chosen.back());
        int best = -1;
        double best_dist = -1.0;
        for (Eigen::Index d = 0; d < n; ++d) {
            auto& md = min_dist[static_cast<std::size_t>(d)];
            md = std::min(md, (data.col(d) - latest).squaredNorm());
            if (!taken[static_cast<std::size_t>(d)] && md > best_dist) {
                best_dist = md;
                best = static_cast<int>(d);
            }
        }
        chosen.push_back(best);
        taken[static_cast<std::size_t>(best)] = true;
    }
    return chosen;
}

ClusterResult kmeans(const Eigen::MatrixXd& data, int k, std::uint64_t seed, int max_iter)
{
    check_k(data, k);
    const auto init = farthest_point_init(data, k, seed);
    Eigen::MatrixXd centroids(data.rows(), k);
    for (int r = 0; r < k; ++r) {
        centroids.col(r) = data.col(init[static_cast<std::size_t>(r)]);
    }

    auto sse = [&](const std::vector<int>& assignment) {
        double total = 0.0;
        for (Eigen::Index d = 0; d < data.cols(); ++d) {
            total += (data.col(d) - centroids.col(assignment[static_cast<std::size_t>(d)])).squaredNorm();
        }
        return total;
    };

    ClusterResult result;
    auto& out = result.assignment;
    out.assignment = assign_nearest(data, centroids);
    out.cost_history.push_back(sse(out.assignment));
    for (int it = 1; it <= max_iter; ++it) {
        Eigen::MatrixXd sums = Eigen::MatrixXd::Zero(data.rows(), k);
        std::vector<int> counts(static_cast<std::size_t>(k), 0);
        for (Eigen::Index d = 0; d < data.cols(); ++d) {
            const int r = out.assignment[static_cast<std::size_t>(d)];
            sums.col(r) += data.col(d);
            ++counts[static_cast<std::size_t>(r)];
        }
        for (int r = 0; r < k; ++r) {
            if (counts[static_cast<std::size_t>(r)] > 0) {
                centroids.col(r) = sums.col(r) / static_cast<double>(counts[static_cast<std::size_t>(r)]);
            }
        }
        auto next = assign_nearest(data, centroids);
        out.cost_history.push_back(sse(next));
        out.iterations = it;
        if (next == out.assignment) {
            break;
        }
        out.assignment = std::move(next);
    }
    out.cost = out.cost_history.back();

    result.selection.reps = centroids;
    result.selection.method = ClusterMethod::kmeans;
    result.selection.hull = HullType::none;
    return result;
}

ClusterResult kmedoids(const Eigen::MatrixXd& data, int k, std::uint64_t seed, int max_iter)
{
    check_k(data, k);
    const Eigen::Index n = data.cols();
    Eigen::MatrixXd dist(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        dist(i, i) = 0.0;
        for (Eigen::Index j = i + 1; j < n; ++j) {
            dist(i, j) = dist(j, i) = (data.col(i) - data.col(j)).norm();
        }
    }

    std::vector<int> medoids = farthest_point_init(data, k, seed);
    auto assign = [&]() {
        std::vector<int> out(static_cast<std::size_t>(n), 0);
        for (Eigen::Index d = 0; d < n; ++d) {
            double best = std::numeric_limits<double>::infinity();
            for (int r = 0; r < k; ++r) {
                const double dd = dist(d, medoids[static_cast<std::size_t>(r)]);
                if (dd < best) {
                    best = dd;
                    out[static_cast<std::size_t>(d)] = r;
                }
            }
        }
        return out;
    };
    auto total = [&](const std::vector<int>& assignment) {
        double sum = 0.0;
        for (Eigen::Index d = 0; d < n; ++d) {
            sum += dist(d, medoids[static_cast<std::size_t>(assignment[static_cast<std::size_t>(d)])]);
        }
        return sum;
    };

    ClusterResult result;
    auto& out = result.assignment;
    out.assignment = assign();
    out.cost_history.push_back(total(out.assignment));
    for (int it = 1; it <= max_iter; ++it) {
        bool moved = false;
        for (int r = 0; r < k; ++r) {
            int best = medoids[static_cast<std::size_t>(r)];
            double best_cost = std::numeric_limits<double>::infinity();
            for (Eigen::Index cand = 0; cand < n; ++cand) {
                if (out.assignment[static_cast<std::size_t>(cand)] != r && cand != medoids[static_cast<std::size_t>(r)]) continue;
                double cost = 0.0;
                for (Eigen::Index d = 0; d < n; ++d) {
                    if (out.assignment[static_cast<std::size_t>(d)] == r) cost += dist(cand, d);
                }
                if (cost < best_cost) {
                    best_cost = cost;
                    best = static_cast<int>(cand);
                }
            }
            if (best != medoids[static_cast<std::size_t>(r)]) {
                medoids[static_cast<std::size_t>(r)] = best;
                moved = true;
            }
        }
        auto next = assign();
        out.cost_history.push_back(total(next));
        out.iterations = it;
        if (!moved && next == out.assignment) {
            break;
        }
        out.assignment = std::move(next);
    }
    out.cost = out.cost_history.back();

    result.selection.reps.resize(data.rows(), k);
    for (int r = 0; r < k; ++r) {
        result.selection.reps.col(r) = data.col(medoids[static_cast<std::size_t>(r)]);
    }
    result.selection.sources = medoids;
    result.selection.method = ClusterMethod::kmedoids;
    result.selection.hull = HullType::none;
    return result;
}

GnomonicProjection gnomonic_project(const Eigen::MatrixXd& data)
{
    if (data.cols() == 0) {
        throw std::invalid_argument("gnomonic_project: no columns");
    }
    const Eigen::VectorXd mean = data.rowwise().mean();
    const double norm = mean.norm();
    if (!(norm > 0.0)) {
        throw std::invalid_argument("gnomonic_project: mean column is zero");
    }
    GnomonicProjection out;
    out.direction = mean / norm;
    out.scaled = Eigen::MatrixXd::Zero(data.rows(), data.cols());
    for (Eigen::Index d = 0; d < data.cols(); ++d) {
        const double height = data.col(d).dot(out.direction);
        if (height <= degenerate_gnomonic_tolerance) {
            out.degenerate.push_back(static_cast<int>(d));
        } else {
            out.scaled.col(d) = data.col(d) / height;
        }
    }
    return out;
}

HullDistance hull_distance(const Eigen::VectorXd& c, const Eigen::MatrixXd& reps, const PgdParams& params)
{
    const auto fit = fit_column(reps, c, WeightType::convex, params);
    return {fit.error, fit.weights};
}

std::vector<int> greedy_hull_indices(const Eigen::MatrixXd& data, int n_rp, std::vector<int> initial,
                                     const HullOptions& options, HullTrace* trace)
{
    const Eigen::Index n = data.cols();
    if (n_rp < 1 || n_rp > n) {
        throw std::invalid_argument("number of representatives " + std::to_string(n_rp) + " outside 1.." +
                                    std::to_string(n));
    }
    if (static_cast<int>(initial.size()) > n_rp) {
        throw std::invalid_argument("more initial representatives than requested");
    }
    std::vector<bool> selected(static_cast<std::size_t>(n), false);
    for (const int r : initial) {
        if (r < 0 || r >= n || selected[static_cast<std::size_t>(r)]) {
            throw std::invalid_argument("invalid or repeated initial representative index");
        }
        selected[static_cast<std::size_t>(r)] = true;
    }

    if (initial.empty()) {
        const Eigen::VectorXd mean = data.rowwise().mean();
        int first = 0;
        double best = -1.0;
        for (Eigen::Index d = 0; d < n; ++d) {
            const double dist = (data.col(d) - mean).norm();
            if (dist > best) {
                best = dist;
                first = static_cast<int>(d);
            }
        }
        initial.push_back(first);
        selected[static_cast<std::size_t>(first)] = true;
    }

    std::vector<std::optional<double>> cache(static_cast<std::size_t>(n));
    while (static_cast<int>(initial.size()) < n_rp) {
        const int newest = initial.back();
        Eigen::MatrixXd reps(data.rows(), static_cast<Eigen::Index>(initial.size()));
        for (std::size_t j = 0; j < initial.size(); ++j) {
            reps.col(static_cast<Eigen::Index>(j)) = data.col(initial[j]);
        }
        PgdParams params = options.pgd;
        if (!params.learning_rate) {
            const double L = lipschitz_constant(reps);
            if (L > 0.0) params.learning_rate = 1.0 / L;
        }

        double best = -std::numeric_limits<double>::infinity();
        int best_index = -1;
        for (Eigen::Index d = 0; d < n; ++d) {
            if (selected[static_cast<std::size_t>(d)]) continue;
            auto& cached = cache[static_cast<std::size_t>(d)];
            double current = 0.0;
            if (options.use_cache && cached && (data.col(d) - data.col(newest)).norm() >= *cached) {
                current = *cached;
                if (trace) ++trace->cache_hits;
            } else {
                current = params.learning_rate ? hull_distance(data.col(d), reps, params).distance
                                               : data.col(d).norm();
                cached = current;
                if (trace) ++trace->projections;
            }
            if (current > best) {
                best = current;
                best_index = static_cast<int>(d);
            }
        }
        initial.push_back(best_index);
        selected[static_cast<std::size_t>(best_index)] = true;
        if (trace) trace->max_distance.push_back(best);
    }
    return initial;
}

RepSelection greedy_hull(const Eigen::MatrixXd& data, int n_rp, HullType hull, const std::vector<int>& initial,
                         const HullOptions& options, HullTrace* trace)
{
    const Eigen::Index n = data.cols();
    if (n_rp < 1 || n_rp > n) {
        throw std::invalid_argument("number of representatives " + std::to_string(n_rp) + " outside 1.." +
                                    std::to_string(n));
    }
    std::vector<int> sources;
    switch (hull) {
    case HullType::convex:
        sources = greedy_hull_indices(data, n_rp, initial, options, trace);
        break;
    case HullType::convex_null: {
        Eigen::MatrixXd augmented(data.rows(), n + 1);
        augmented.leftCols(n) = data;
        augmented.col(n).setZero();
        std::vector<int> seeds{static_cast<int>(n)};
        seeds.insert(seeds.end(), initial.begin(), initial.end());
        auto picked = greedy_hull_indices(augmented, n_rp + 1, seeds, options, trace);
        picked.erase(picked.begin());
        sources = std::move(picked);
        break;
    }
    case HullType::conic: {
        const auto projection = gnomonic_project(data);
        std::vector<int> valid;
        std::vector<int> position(static_cast<std::size_t>(n), -1);
        for (Eigen::Index d = 0; d < n; ++d) {
            if (!std::binary_search(projection.degenerate.begin(), projection.degenerate.end(), static_cast<int>(d))) {
                position[static_cast<std::size_t>(d)] = static_cast<int>(valid.size());
                valid.push_back(static_cast<int>(d));
            }
        }
        if (n_rp > static_cast<int>(valid.size())) {
            throw std::invalid_argument("conic hull: only " + std::to_string(valid.size()) +
                                        " non-degenerate columns for " + std::to_string(n_rp) + " representatives");
        }
        Eigen::MatrixXd scaled(data.rows(), static_cast<Eigen::Index>(valid.size()));
        for (std::size_t j = 0; j < valid.size(); ++j) {
            scaled.col(static_cast<Eigen::Index>(j)) = projection.scaled.col(valid[j]);
        }
        std::vector<int> seeds;
        for (const int r : initial) {
            if (r < 0 || r >= n || position[static_cast<std::size_t>(r)] < 0) {
                throw std::invalid_argument("conic hull: initial representative is degenerate or out of range");
            }
            seeds.push_back(position[static_cast<std::size_t>(r)]);
        }
        for (const int j : greedy_hull_indices(scaled, n_rp, seeds, options, trace)) {
            sources.push_back(valid[static_cast<std::size_t>(j)]);
        }
        break;
    }
    case HullType::none:
        throw std::invalid_argument("greedy_hull needs a hull type");
    }

    RepSelection out;
    out.reps.resize(data.rows(), static_cast<Eigen::Index>(sources.size()));
    for (std::size_t j = 0; j < sources.size(); ++j) {
        out.reps.col(static_cast<Eigen::Index>(j)) = data.col(sources[j]);
    }
    out.sources = std::move(sources);
    out.method = ClusterMethod::hull;
    out.hull = hull;
    return out;
}

} // namespace blendrp
