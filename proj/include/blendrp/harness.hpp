#pragma once

#include "blendrp/clustering.hpp"
#include "blendrp/core_data.hpp"
#include "blendrp/esom.hpp"
#include "blendrp/solve.hpp"
#include "blendrp/weights.hpp"

#include <cstdint>
#include <filesystem>
#include <map>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace blendrp {

/// Regret below this (in percent) is treated as an error rather than noise.
inline constexpr double regret_error_threshold = -1e-2;

class RegretError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// 100 * (cost_fixed - cost_full) / cost_full. Throws RegretError when the
/// regret is below regret_error_threshold or cost_full is not positive.
double compute_regret(double cost_fixed, double cost_full);
/// As above; also throws RegretError unless both solutions are optimal.
double compute_regret(const Solution& fixed, const Solution& full);

/// One clustering + weight fit: the reduced time-series input of the model.
struct Reduction {
    RepSelection selection;
    std::optional<ClusterAssignment> assignment; // k-methods only
    WeightMatrix weights;
};

/// Clusters the columns of `layout` and fits weights of `type`. Hull
/// clustering uses the hull matching `type`; Dirac weights follow the
/// clustering assignment for the k-methods and the nearest representative
/// for hull clustering.
Reduction reduce(const ClusteringMatrix& layout, ClusterMethod method, WeightType type, int n_rp, std::uint64_t seed,
                 const PgdParams& pgd = {});
/// The clustering half of reduce(); weights are left empty.
Reduction select_representatives(const ClusteringMatrix& layout, ClusterMethod method, WeightType type, int n_rp,
                                 std::uint64_t seed, const PgdParams& pgd = {});
/// The weight-fitting half of reduce().
void fit_reduction(Reduction& reduction, const ClusteringMatrix& layout, WeightType type, const PgdParams& pgd = {});

struct ExperimentConfig {
    std::filesystem::path data;
    std::string case_name; // empty = data directory name
    ModelMode mode = ModelMode::gep;
    ClusterMethod method = ClusterMethod::hull;
    WeightType weight_type = WeightType::convex;
    int n_rp = 5;
    std::vector<std::uint64_t> seeds{1, 2, 3, 4, 5};
    PgdParams pgd;
    SolverHandle solver;
    std::optional<std::filesystem::path> cache_dir; // on-disk cache of full-model optima
};

struct StageTimes {
    double read = 0.0;
    double cluster = 0.0;
    double fit = 0.0;
    double build = 0.0;
    double solve = 0.0;

    double total() const { return read + cluster + fit + build + solve; }
};

struct ExperimentRecord {
    std::string case_name;
    ModelMode mode = ModelMode::gep;
    ClusterMethod method = ClusterMethod::hull;
    WeightType weight_type = WeightType::convex;
    int n_rp = 0;
    std::uint64_t seed = 0;
    std::string status = "ok"; // "ok" or a failure description
    StageTimes times;          // seconds, monotonic clock
    double objective_reduced = 0.0;
    double objective_fixed = 0.0;
    double objective_full = 0.0;
    double regret_pct = 0.0;
    double projection_error_mean = 0.0;
    double projection_error_max = 0.0;

    bool ok() const { return status == "ok"; }
};

/// Optima of full-resolution models keyed by a hash of the model text and the
/// solver settings. Safe to share between threads.
class FullSolveCache {
public:
    explicit FullSolveCache(std::optional<std::filesystem::path> directory = std::nullopt);

    /// Returns the cached optimum of `model`, solving it on a miss.
    Solution solve(const LpModel& model, const SolverHandle& handle);

    int hits() const;
    int misses() const;

private:
    std::optional<std::filesystem::path> directory_;
    mutable std::mutex mutex_;
    std::map<std::string, Solution> memory_;
    int hits_ = 0;
    int misses_ = 0;
};

/// 64-bit FNV-1a digest as 16 hex digits.
std::string content_hash(const std::string& text);

/// Runs the whole pipeline once per seed. Stage failures are recorded in the
/// record's status and do not stop the remaining seeds. `cache` may be shared
/// across calls on the same dataset; a private one is used when null.
std::vector<ExperimentRecord> run_experiment(const ExperimentConfig& config, FullSolveCache* cache = nullptr);

/// Writes results.csv and pareto.csv (records not dominated in total time and
/// regret) into `out_dir`.
void emit_plot_data(const std::vector<ExperimentRecord>& records, const std::filesystem::path& out_dir);

/// Indices of successful records not dominated in (total time, regret).
std::vector<std::size_t> pareto_front(const std::vector<ExperimentRecord>& records);

std::vector<ExperimentRecord> parse_results_csv(const std::filesystem::path& path);

} // namespace blendrp
