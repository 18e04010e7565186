#pragma once

#include "blendrp/weights.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace blendrp {

enum class ClusterMethod { kmeans, kmedoids, hull };
enum class HullType { none, convex, convex_null, conic };

std::string to_string(ClusterMethod method);
std::string to_string(HullType type);
ClusterMethod parse_method(const std::string& text);
HullType parse_hull_type(const std::string& text);

/// Hull matching a weight type: Dirac and convex use the convex hull,
/// sub-unit weights the convex hull with the null point, conic the conic hull.
HullType hull_for(WeightType type);

struct RepSelection {
    Eigen::MatrixXd reps;                    // K x n_rp
    std::optional<std::vector<int>> sources; // data column behind each rep, when reps are actual periods
    ClusterMethod method = ClusterMethod::kmeans;
    HullType hull = HullType::none;

    Eigen::Index size() const { return reps.cols(); }
};

struct ClusterAssignment {
    std::vector<int> assignment;      // period -> rep index
    double cost = 0.0;                // SSE for k-means, summed distance for k-medoids
    std::vector<double> cost_history; // cost after each assignment sweep
    int iterations = 0;
};

struct ClusterResult {
    RepSelection selection;
    ClusterAssignment assignment;
};

/// Lloyd's algorithm; centroids seeded by farthest-point traversal from a
/// seeded random first column.
ClusterResult kmeans(const Eigen::MatrixXd& data, int k, std::uint64_t seed, int max_iter = 300);

/// Alternating k-medoids (assign, then per-cluster medoid update).
ClusterResult kmedoids(const Eigen::MatrixXd& data, int k, std::uint64_t seed, int max_iter = 300);

/// Seeded farthest-point traversal used to initialise both k-methods.
std::vector<int> farthest_point_init(const Eigen::MatrixXd& data, int k, std::uint64_t seed);

inline constexpr double degenerate_gnomonic_tolerance = 1e-12;

struct GnomonicProjection {
    Eigen::MatrixXd scaled;   // degenerate columns left at zero
    Eigen::VectorXd direction;
    std::vector<int> degenerate;
};

/// Scales every column onto the hyperplane <x, q> = 1, q the normalised mean.
/// Throws std::invalid_argument if the mean column is zero.
GnomonicProjection gnomonic_project(const Eigen::MatrixXd& data);

struct HullDistance {
    double distance = 0.0;
    Eigen::VectorXd weights;
};

/// Euclidean distance from `c` to the convex hull of the columns of `reps`.
HullDistance hull_distance(const Eigen::VectorXd& c, const Eigen::MatrixXd& reps, const PgdParams& params = {});

struct HullOptions {
    bool use_cache = true;
    PgdParams pgd;
};

struct HullTrace {
    std::vector<double> max_distance; // best distance found at each greedy step
    int projections = 0;              // hull-distance evaluations performed
    int cache_hits = 0;
};

/// Greedy hull clustering on the columns of `data`. `initial` seeds the rep set
/// (empty = farthest point from the mean). Returns data column indices in
/// selection order.
std::vector<int> greedy_hull_indices(const Eigen::MatrixXd& data, int n_rp, std::vector<int> initial,
                                     const HullOptions& options = {}, HullTrace* trace = nullptr);

/// Greedy hull clustering for the requested hull type. `initial` holds data
/// column indices that seed the rep set; the null point of the convex_null
/// variant is always added in front of them.
RepSelection greedy_hull(const Eigen::MatrixXd& data, int n_rp, HullType hull, const std::vector<int>& initial = {},
                         const HullOptions& options = {}, HullTrace* trace = nullptr);

} // namespace blendrp
