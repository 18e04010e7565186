#pragma once

#include "blendrp/core_data.hpp"
#include "blendrp/lp_model.hpp"
#include "blendrp/weights.hpp"

#include <Eigen/Dense>

namespace blendrp {

/// Time-varying data evaluated at the representatives: the clustering-matrix
/// layout plus one column per representative. Rows missing from the layout
/// fall back to their constant value (demand 0, availability 1, inflow 0).
struct RepData {
    std::vector<FeatureBlock> blocks;
    int hours_per_period = 0;
    Eigen::MatrixXd values; // K x n_rp

    Eigen::Index num_reps() const { return values.cols(); }

    double demand(const std::string& node, const std::string& carrier, Eigen::Index rep, int hour) const;
    double availability(const std::string& asset, Eigen::Index rep, int hour) const;
    double inflow(const std::string& asset, Eigen::Index rep, int hour) const;

private:
    const FeatureBlock* find(FeatureBlock::Kind kind, const std::string& entity) const;
};

RepData make_rep_data(const ClusteringMatrix& layout, const Eigen::MatrixXd& reps);
/// Every base period as its own representative.
RepData full_rep_data(const ClusteringMatrix& layout);

struct BuildOptions {
    bool integer_investment = false;
};

/// Builds the energy-system LP over `reps`, linking base periods to
/// representatives through `weights` (periods x reps).
LpModel build_model(const EnergySystem& system, const RepData& reps, const WeightMatrix& weights, ModelMode mode,
                    const BuildOptions& options = {});

/// The unreduced model: all periods, identity Dirac weights.
LpModel build_full_model(const EnergySystem& system, ModelMode mode, const BuildOptions& options = {});

/// Copy of `full_model` with the reduced model's decisions pinned: investment
/// units in GEP mode, inter-period storage levels in P2X mode.
LpModel fix_decisions(const LpModel& full_model, const Solution& reduced_solution, ModelMode mode);

/// Inter-period storage levels rebuilt from a solution's intra-period levels:
/// level_d = S0 + sum_{d' <= d} sum_r W_{d',r} (soc_{r,H} - soc0_r). Indexed
/// [seasonal storage in name order][period].
std::vector<std::vector<double>> reconstruct_inter_levels(const EnergySystem& system, const Solution& solution,
                                                          const WeightMatrix& weights);

namespace names {
std::string investment(const std::string& asset);
std::string capacity(const std::string& asset);
std::string production(const std::string& asset, Eigen::Index rep, int hour);
std::string consumption(const std::string& asset, Eigen::Index rep, int hour);
std::string flow(const std::string& line, Eigen::Index rep, int hour);
std::string intra_level(const std::string& asset, Eigen::Index rep, int hour);
std::string intra_start(const std::string& asset, Eigen::Index rep);
std::string inter_level(const std::string& asset, Eigen::Index period);
std::string spill(const std::string& asset, Eigen::Index rep, int hour);
std::string borrow(const std::string& asset, Eigen::Index rep, int hour);
std::string node_balance(const std::string& node, const std::string& carrier, Eigen::Index rep, int hour);
} // namespace names

} // namespace blendrp
