#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace blendrp {

/// Raised for unreadable, malformed, or inconsistent input data. Carries the
/// offending file and (1-based) line when known.
class DataError : public std::runtime_error {
public:
    DataError(const std::string& message, std::string file = {}, std::size_t line = 0);

    const std::string& file() const noexcept { return file_; }
    std::size_t line() const noexcept { return line_; }

private:
    std::string file_;
    std::size_t line_;
};

enum class ModelMode { gep, p2x };

std::string to_string(ModelMode mode);
ModelMode parse_mode(const std::string& text);

struct Horizon {
    int num_periods = 1;
    int hours_per_period = 1;
    double timestep_hours = 1.0;
    double hours_per_year = 8760.0;

    int num_steps() const { return num_periods * hours_per_period; }
    /// Annualization factor: time steps per year over time steps in the model.
    double operational_weight() const;
};

enum class AssetKind { producer, storage_short, storage_seasonal, conversion };

std::string to_string(AssetKind kind);

struct Asset {
    std::string name;
    std::string node;
    AssetKind kind = AssetKind::producer;
    std::string carrier_in;
    std::string carrier_out;
    bool investable = false;
    double unit_capacity = 0.0;   // MW per unit
    double existing_units = 0.0;
    double inv_cost = 0.0;        // per MW and year
    double var_cost = 0.0;        // per MWh
    double eff_in = 1.0;
    double eff_out = 1.0;
    std::optional<double> ramp;   // fraction of capacity per hour; absent = unconstrained
    double storage_cap = 0.0;     // MWh
    double inflow_max = 0.0;      // MWh per step
    double spill_cost = 0.0;
    double borrow_cost = 0.0;
    double initial_storage = 0.0; // MWh

    bool is_storage() const { return kind == AssetKind::storage_short || kind == AssetKind::storage_seasonal; }
    bool consumes() const { return is_storage() || kind == AssetKind::conversion; }
};

struct Line {
    std::string name;
    std::string from_node;
    std::string to_node;
    std::string carrier;
    double import_limit = 0.0;
    double export_limit = 0.0;
};

/// Dense period-by-hour series. Cells never supplied by the input hold NaN so
/// that completeness can be checked after loading.
class PeriodProfile {
public:
    PeriodProfile() = default;
    PeriodProfile(int periods, int hours, double fill);

    int periods() const { return periods_; }
    int hours() const { return hours_; }
    double operator()(int period, int hour) const { return values_[index(period, hour)]; }
    double& operator()(int period, int hour) { return values_[index(period, hour)]; }
    const std::vector<double>& values() const { return values_; }

private:
    std::size_t index(int period, int hour) const
    {
        return static_cast<std::size_t>(period) * static_cast<std::size_t>(hours_) + static_cast<std::size_t>(hour);
    }

    int periods_ = 0;
    int hours_ = 0;
    std::vector<double> values_;
};

struct DemandSeries {
    std::string node;
    std::string carrier;
    double peak = 0.0;     // MW
    PeriodProfile profile; // fraction of peak
};

struct AssetSeries {
    std::string asset;
    PeriodProfile profile;
};

struct StorageBounds {
    std::string asset;
    std::vector<double> min_frac; // per base period
    std::vector<double> max_frac;
};

/// Complete description of one energy system. Names in every list are sorted
/// lexicographically; all orderings derived from the system follow that order.
struct EnergySystem {
    Horizon horizon;
    ModelMode mode = ModelMode::gep;
    std::vector<std::string> nodes;
    std::vector<std::string> carriers;
    std::vector<Asset> assets;
    std::vector<Line> lines;
    std::vector<DemandSeries> demands;
    std::vector<AssetSeries> availability;
    std::vector<AssetSeries> inflows;
    std::vector<StorageBounds> storage_bounds;

    const Asset* find_asset(const std::string& name) const;
    const AssetSeries* find_availability(const std::string& asset) const;
    const AssetSeries* find_inflow(const std::string& asset) const;
    const StorageBounds* find_storage_bounds(const std::string& asset) const;
};

EnergySystem load_system(const std::filesystem::path& root);

/// Writes `system` in the same directory layout `load_system` reads.
void write_system(const EnergySystem& system, const std::filesystem::path& root);

struct ProfileViolation {
    enum class Kind { out_of_range, missing };
    Kind kind = Kind::out_of_range;
    std::string profile; // demand | availability | inflow | storage_bounds
    std::string entity;
    int period = 0;      // 0-based
    int hour = -1;       // 0-based, -1 for per-period series
    double value = 0.0;

    std::string describe() const;
};

std::vector<ProfileViolation> validate_profiles(const EnergySystem& system);

/// Identifies one row block of the clustering matrix.
struct FeatureBlock {
    enum class Kind { demand, availability, inflow };
    Kind kind = Kind::demand;
    std::string entity;  // "node/carrier" for demand, asset name otherwise
    std::string node;
    std::string carrier;
    std::size_t first_row = 0; // rows first_row .. first_row + H - 1, hour innermost
};

struct ClusteringMatrix {
    Eigen::MatrixXd values; // K x D
    int hours_per_period = 0;
    std::vector<FeatureBlock> blocks;
    std::vector<std::string> row_labels;
    std::vector<int> period_ids; // 1-based, as in the data files

    Eigen::Index num_features() const { return values.rows(); }
    Eigen::Index num_periods() const { return values.cols(); }
};

/// Producers whose availability profile dips below one somewhere; only these
/// contribute availability rows.
bool is_renewable(const EnergySystem& system, const Asset& asset);

ClusteringMatrix build_clustering_matrix(const EnergySystem& system);

} // namespace blendrp
