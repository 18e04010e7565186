#include "blendrp/esom.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace blendrp {

namespace names {

namespace {
std::string rh(Eigen::Index rep, int hour)
{
    return "_r" + std::to_string(rep + 1) + "_h" + std::to_string(hour + 1);
}
} // namespace

std::string investment(const std::string& asset) { return "inv_" + asset; }
std::string capacity(const std::string& asset) { return "cap_" + asset; }
std::string production(const std::string& asset, Eigen::Index rep, int hour) { return "pout_" + asset + rh(rep, hour); }
std::string consumption(const std::string& asset, Eigen::Index rep, int hour) { return "pin_" + asset + rh(rep, hour); }
std::string flow(const std::string& line, Eigen::Index rep, int hour) { return "flow_" + line + rh(rep, hour); }
std::string intra_level(const std::string& asset, Eigen::Index rep, int hour) { return "soc_" + asset + rh(rep, hour); }
std::string intra_start(const std::string& asset, Eigen::Index rep)
{
    return "soc0_" + asset + "_r" + std::to_string(rep + 1);
}
std::string inter_level(const std::string& asset, Eigen::Index period)
{
    return "inter_" + asset + "_d" + std::to_string(period + 1);
}
std::string spill(const std::string& asset, Eigen::Index rep, int hour) { return "spill_" + asset + rh(rep, hour); }
std::string borrow(const std::string& asset, Eigen::Index rep, int hour) { return "borrow_" + asset + rh(rep, hour); }
std::string node_balance(const std::string& node, const std::string& carrier, Eigen::Index rep, int hour)
{
    return "bal_" + node + "_" + carrier + rh(rep, hour);
}

} // namespace names

// ---------------------------------------------------------------------------

const FeatureBlock* RepData::find(FeatureBlock::Kind kind, const std::string& entity) const
{
    for (const auto& b : blocks) {
        if (b.kind == kind && b.entity == entity) return &b;
    }
    return nullptr;
}

double RepData::demand(const std::string& node, const std::string& carrier, Eigen::Index rep, int hour) const
{
    const auto* b = find(FeatureBlock::Kind::demand, node + "/" + carrier);
    return b ? values(static_cast<Eigen::Index>(b->first_row) + hour, rep) : 0.0;
}

double RepData::availability(const std::string& asset, Eigen::Index rep, int hour) const
{
    const auto* b = find(FeatureBlock::Kind::availability, asset);
    return b ? values(static_cast<Eigen::Index>(b->first_row) + hour, rep) : 1.0;
}

double RepData::inflow(const std::string& asset, Eigen::Index rep, int hour) const
{
    const auto* b = find(FeatureBlock::Kind::inflow, asset);
    return b ? values(static_cast<Eigen::Index>(b->first_row) + hour, rep) : 0.0;
}

RepData make_rep_data(const ClusteringMatrix& layout, const Eigen::MatrixXd& reps)
{
    if (reps.rows() != layout.num_features()) {
        throw std::invalid_argument("representative data has " + std::to_string(reps.rows()) +
                                    " features, layout expects " + std::to_string(layout.num_features()));
    }
    return RepData{layout.blocks, layout.hours_per_period, reps};
}

RepData full_rep_data(const ClusteringMatrix& layout)
{
    return make_rep_data(layout, layout.values);
}

// ---------------------------------------------------------------------------

namespace {

bool is_reservoir(const Asset& a)
{
    return a.kind == AssetKind::storage_seasonal && a.inflow_max > 0.0;
}

class ModelBuilder {
public:
    ModelBuilder(const EnergySystem& system, const RepData& reps, const WeightMatrix& weights, ModelMode mode,
                 const BuildOptions& options)
        : sys_(system), reps_(reps), w_(weights.values), mode_(mode), options_(options),
          periods_(system.horizon.num_periods), hours_(system.horizon.hours_per_period),
          nrp_(static_cast<int>(reps.num_reps())), tau_(system.horizon.timestep_hours)
    {
        if (w_.rows() != periods_) {
            throw std::invalid_argument("weight matrix has " + std::to_string(w_.rows()) + " rows for " +
                                        std::to_string(periods_) + " base periods");
        }
        if (w_.cols() != nrp_) {
            throw std::invalid_argument("weight matrix has " + std::to_string(w_.cols()) + " columns for " +
                                        std::to_string(nrp_) + " representatives");
        }
        if (reps.hours_per_period != hours_) {
            throw std::invalid_argument("representative data hours differ from the horizon");
        }
        if (nrp_ < 1) {
            throw std::invalid_argument("at least one representative is required");
        }
        if (!reps.values.allFinite() || !w_.allFinite()) {
            throw std::invalid_argument("representative data or weights contain non-finite values");
        }
        rep_totals_ = w_.colwise().sum().transpose();
    }

    LpModel build()
    {
        model_.info = {mode_, nrp_, WeightType::dirac};
        declare_variables();
        add_cost_definitions();
        add_node_balances();
        add_storage();
        add_conversion();
        add_capacity_limits();
        add_ramping();
        return std::move(model_);
    }

private:
    int var(const std::string& name) const { return model_.variable(name); }

    bool has_investment(const Asset& a) const { return mode_ == ModelMode::gep && a.investable; }

    void declare_variables()
    {
        if (mode_ == ModelMode::gep) {
            cost_inv_ = model_.add_variable("cost_inv");
        }
        cost_op_ = model_.add_variable("cost_op");
        for (const auto& a : sys_.assets) {
            if (has_investment(a)) {
                model_.add_variable(names::investment(a.name), 0.0, kInf, options_.integer_investment);
            }
            model_.add_variable(names::capacity(a.name));
        }
        for (const auto& a : sys_.assets) {
            for (int r = 0; r < nrp_; ++r) {
                for (int h = 0; h < hours_; ++h) {
                    model_.add_variable(names::production(a.name, r, h));
                    if (a.consumes()) {
                        model_.add_variable(names::consumption(a.name, r, h));
                    }
                }
            }
        }
        for (const auto& l : sys_.lines) {
            for (int r = 0; r < nrp_; ++r) {
                for (int h = 0; h < hours_; ++h) {
                    model_.add_variable(names::flow(l.name, r, h), -l.import_limit, l.export_limit);
                }
            }
        }
        for (const auto& a : sys_.assets) {
            if (!a.is_storage()) continue;
            for (int r = 0; r < nrp_; ++r) {
                model_.add_variable(names::intra_start(a.name, r));
                for (int h = 0; h < hours_; ++h) {
                    model_.add_variable(names::intra_level(a.name, r, h), 0.0, a.storage_cap);
                }
            }
            if (is_reservoir(a)) {
                for (int r = 0; r < nrp_; ++r) {
                    for (int h = 0; h < hours_; ++h) {
                        model_.add_variable(names::spill(a.name, r, h));
                        model_.add_variable(names::borrow(a.name, r, h));
                    }
                }
            }
            if (a.kind == AssetKind::storage_seasonal) {
                const auto* bounds = sys_.find_storage_bounds(a.name);
                for (int d = 0; d < periods_; ++d) {
                    const double lo = bounds ? bounds->min_frac[static_cast<std::size_t>(d)] : 0.0;
                    const double hi = bounds ? bounds->max_frac[static_cast<std::size_t>(d)] : 1.0;
                    model_.add_variable(names::inter_level(a.name, d), lo * a.storage_cap, hi * a.storage_cap);
                }
            }
        }
    }

    void add_cost_definitions()
    {
        std::vector<Term> objective;
        if (mode_ == ModelMode::gep) {
            std::vector<Term> terms{{cost_inv_, 1.0}};
            for (const auto& a : sys_.assets) {
                if (has_investment(a)) {
                    terms.push_back({var(names::investment(a.name)), -a.inv_cost * a.unit_capacity});
                }
            }
            model_.add_constraint("def_cost_inv", terms, Sense::eq, 0.0);
            objective.push_back({cost_inv_, 1.0});
        }

        const double w_op = sys_.horizon.operational_weight();
        std::vector<Term> terms{{cost_op_, 1.0}};
        for (int r = 0; r < nrp_; ++r) {
            const double scale = w_op * rep_totals_[r];
            for (int h = 0; h < hours_; ++h) {
                for (const auto& a : sys_.assets) {
                    if (a.kind == AssetKind::producer && a.var_cost != 0.0) {
                        terms.push_back({var(names::production(a.name, r, h)), -scale * a.var_cost});
                    }
                }
                for (const auto& a : sys_.assets) {
                    if (is_reservoir(a)) {
                        terms.push_back({var(names::spill(a.name, r, h)), -scale * a.spill_cost / tau_});
                        terms.push_back({var(names::borrow(a.name, r, h)), -scale * a.borrow_cost / tau_});
                    }
                }
            }
        }
        model_.add_constraint("def_cost_op", terms, Sense::eq, 0.0);
        objective.push_back({cost_op_, 1.0});
        model_.set_objective(objective);
    }

    void add_node_balances()
    {
        for (const auto& n : sys_.nodes) {
            for (const auto& x : sys_.carriers) {
                double peak = 0.0;
                for (const auto& d : sys_.demands) {
                    if (d.node == n && d.carrier == x) peak = d.peak;
                }
                for (int r = 0; r < nrp_; ++r) {
                    for (int h = 0; h < hours_; ++h) {
                        std::vector<Term> terms;
                        for (const auto& a : sys_.assets) {
                            if (a.node != n) continue;
                            if (a.carrier_out == x) terms.push_back({var(names::production(a.name, r, h)), 1.0});
                            if (a.consumes() && a.carrier_in == x) {
                                terms.push_back({var(names::consumption(a.name, r, h)), -1.0});
                            }
                        }
                        for (const auto& l : sys_.lines) {
                            if (l.carrier != x) continue;
                            if (l.from_node == n) terms.push_back({var(names::flow(l.name, r, h)), -1.0});
                            if (l.to_node == n) terms.push_back({var(names::flow(l.name, r, h)), 1.0});
                        }
                        model_.add_constraint(names::node_balance(n, x, r, h), terms, Sense::eq,
                                              reps_.demand(n, x, r, h) * peak);
                    }
                }
            }
        }
    }

    void add_storage()
    {
        for (const auto& a : sys_.assets) {
            if (!a.is_storage()) continue;
            const bool reservoir = is_reservoir(a);
            for (int r = 0; r < nrp_; ++r) {
                for (int h = 0; h < hours_; ++h) {
                    std::vector<Term> terms{{var(names::intra_level(a.name, r, h)), 1.0}};
                    terms.push_back({h == 0 ? var(names::intra_start(a.name, r))
                                            : var(names::intra_level(a.name, r, h - 1)),
                                     -1.0});
                    terms.push_back({var(names::consumption(a.name, r, h)), -a.eff_in * tau_});
                    terms.push_back({var(names::production(a.name, r, h)), tau_ / a.eff_out});
                    double rhs = 0.0;
                    if (reservoir) {
                        terms.push_back({var(names::spill(a.name, r, h)), 1.0});
                        terms.push_back({var(names::borrow(a.name, r, h)), -1.0});
                        rhs = reps_.inflow(a.name, r, h) * a.inflow_max;
                    }
                    model_.add_constraint("stor_" + a.name + "_r" + std::to_string(r + 1) + "_h" +
                                              std::to_string(h + 1),
                                          terms, Sense::eq, rhs);
                }
                if (a.kind == AssetKind::storage_short) {
                    model_.add_constraint("cycle_" + a.name + "_r" + std::to_string(r + 1),
                                          {{var(names::intra_level(a.name, r, hours_ - 1)), 1.0},
                                           {var(names::intra_start(a.name, r)), -1.0}},
                                          Sense::eq, 0.0);
                }
            }
            if (a.kind != AssetKind::storage_seasonal) continue;

            for (int d = 0; d < periods_; ++d) {
                std::vector<Term> terms{{var(names::inter_level(a.name, d)), 1.0}};
                if (d > 0) terms.push_back({var(names::inter_level(a.name, d - 1)), -1.0});
                for (int r = 0; r < nrp_; ++r) {
                    const double w = w_(d, r);
                    if (w == 0.0) continue;
                    terms.push_back({var(names::intra_level(a.name, r, hours_ - 1)), -w});
                    terms.push_back({var(names::intra_start(a.name, r)), w});
                }
                model_.add_constraint("interbal_" + a.name + "_d" + std::to_string(d + 1), terms, Sense::eq,
                                      d == 0 ? a.initial_storage : 0.0);
            }
            model_.add_constraint("endlvl_" + a.name, {{var(names::inter_level(a.name, periods_ - 1)), 1.0}},
                                  Sense::eq, a.initial_storage);
            std::vector<Term> tether;
            for (int r = 0; r < nrp_; ++r) {
                tether.push_back({var(names::intra_level(a.name, r, hours_ - 1)), w_(periods_ - 1, r)});
            }
            model_.add_constraint("tether_" + a.name, tether, Sense::eq, a.initial_storage);
        }
    }

    void add_conversion()
    {
        for (const auto& a : sys_.assets) {
            if (a.kind != AssetKind::conversion) continue;
            for (int r = 0; r < nrp_; ++r) {
                for (int h = 0; h < hours_; ++h) {
                    model_.add_constraint("conv_" + a.name + "_r" + std::to_string(r + 1) + "_h" +
                                              std::to_string(h + 1),
                                          {{var(names::consumption(a.name, r, h)), a.eff_in},
                                           {var(names::production(a.name, r, h)), -1.0 / a.eff_out}},
                                          Sense::eq, 0.0);
                }
            }
        }
    }

    void add_capacity_limits()
    {
        for (const auto& a : sys_.assets) {
            const int cap = var(names::capacity(a.name));
            std::vector<Term> units{{cap, 1.0}};
            if (has_investment(a)) {
                units.push_back({var(names::investment(a.name)), -a.unit_capacity});
            }
            model_.add_constraint("units_" + a.name, units, Sense::eq, a.unit_capacity * a.existing_units);

            for (int r = 0; r < nrp_; ++r) {
                for (int h = 0; h < hours_; ++h) {
                    const auto suffix = "_r" + std::to_string(r + 1) + "_h" + std::to_string(h + 1);
                    const double avail = a.kind == AssetKind::producer ? reps_.availability(a.name, r, h) : 1.0;
                    model_.add_constraint("maxout_" + a.name + suffix,
                                          {{var(names::production(a.name, r, h)), 1.0}, {cap, -avail}}, Sense::le,
                                          0.0);
                    if (a.is_storage()) {
                        model_.add_constraint("maxin_" + a.name + suffix,
                                              {{var(names::consumption(a.name, r, h)), 1.0}, {cap, -1.0}},
                                              Sense::le, 0.0);
                    }
                }
            }
        }
    }

    void add_ramping()
    {
        for (const auto& a : sys_.assets) {
            if (a.kind != AssetKind::producer || !a.ramp) continue;
            const int cap = var(names::capacity(a.name));
            const double limit = *a.ramp * tau_;
            for (int r = 0; r < nrp_; ++r) {
                for (int h = 1; h < hours_; ++h) {
                    const auto suffix = "_r" + std::to_string(r + 1) + "_h" + std::to_string(h + 1);
                    const int now = var(names::production(a.name, r, h));
                    const int before = var(names::production(a.name, r, h - 1));
                    model_.add_constraint("rampup_" + a.name + suffix, {{now, 1.0}, {before, -1.0}, {cap, -limit}},
                                          Sense::le, 0.0);
                    model_.add_constraint("rampdn_" + a.name + suffix, {{before, 1.0}, {now, -1.0}, {cap, -limit}},
                                          Sense::le, 0.0);
                }
            }
            for (int d = 1; d < periods_; ++d) {
                std::vector<Term> up;
                for (int r = 0; r < nrp_; ++r) {
                    if (w_(d, r) != 0.0) up.push_back({var(names::production(a.name, r, 0)), w_(d, r)});
                    if (w_(d - 1, r) != 0.0) {
                        up.push_back({var(names::production(a.name, r, hours_ - 1)), -w_(d - 1, r)});
                    }
                }
                std::vector<Term> down;
                for (const auto& t : up) down.push_back({t.var, -t.coef});
                up.push_back({cap, -limit});
                down.push_back({cap, -limit});
                const auto suffix = "_d" + std::to_string(d + 1);
                model_.add_constraint("irampup_" + a.name + suffix, up, Sense::le, 0.0);
                model_.add_constraint("irampdn_" + a.name + suffix, down, Sense::le, 0.0);
            }
        }
    }

    const EnergySystem& sys_;
    const RepData& reps_;
    const Eigen::MatrixXd& w_;
    ModelMode mode_;
    BuildOptions options_;
    int periods_;
    int hours_;
    int nrp_;
    double tau_;
    Eigen::VectorXd rep_totals_;
    LpModel model_;
    int cost_inv_ = -1;
    int cost_op_ = -1;
};

} // namespace

LpModel build_model(const EnergySystem& system, const RepData& reps, const WeightMatrix& weights, ModelMode mode,
                    const BuildOptions& options)
{
    auto model = ModelBuilder(system, reps, weights, mode, options).build();
    model.info.weight_type = weights.type;
    return model;
}

LpModel build_full_model(const EnergySystem& system, ModelMode mode, const BuildOptions& options)
{
    const auto layout = build_clustering_matrix(system);
    return build_model(system, full_rep_data(layout), identity_weights(system.horizon.num_periods), mode, options);
}

LpModel fix_decisions(const LpModel& full_model, const Solution& reduced_solution, ModelMode mode)
{
    if (!reduced_solution.optimal()) {
        throw std::invalid_argument("fix_decisions: reduced solution is not optimal");
    }
    LpModel fixed = full_model;
    const std::string prefix = mode == ModelMode::gep ? "inv_" : "inter_";
    for (std::size_t i = 0; i < full_model.variables().size(); ++i) {
        const auto& v = full_model.variables()[i];
        if (v.name.rfind(prefix, 0) != 0) continue;
        const auto value = reduced_solution.value(v.name);
        if (!value) {
            throw std::invalid_argument("fix_decisions: reduced solution lacks variable '" + v.name + "'");
        }
        double pinned = std::clamp(*value, v.lower, v.upper);
        if (v.integer) pinned = std::round(pinned);
        fixed.set_bounds(static_cast<int>(i), pinned, pinned);
    }
    return fixed;
}

std::vector<std::vector<double>> reconstruct_inter_levels(const EnergySystem& system, const Solution& solution,
                                                          const WeightMatrix& weights)
{
    const int hours = system.horizon.hours_per_period;
    std::vector<std::vector<double>> out;
    for (const auto& a : system.assets) {
        if (a.kind != AssetKind::storage_seasonal) continue;
        std::vector<double> deltas(static_cast<std::size_t>(weights.num_reps()));
        for (Eigen::Index r = 0; r < weights.num_reps(); ++r) {
            const auto end = solution.value(names::intra_level(a.name, r, hours - 1));
            const auto start = solution.value(names::intra_start(a.name, r));
            if (!end || !start) {
                throw std::invalid_argument("reconstruct_inter_levels: solution lacks storage levels of '" + a.name +
                                            "'");
            }
            deltas[static_cast<std::size_t>(r)] = *end - *start;
        }
        std::vector<double> levels;
        double level = a.initial_storage;
        for (Eigen::Index d = 0; d < weights.num_periods(); ++d) {
            for (Eigen::Index r = 0; r < weights.num_reps(); ++r) {
                level += weights.values(d, r) * deltas[static_cast<std::size_t>(r)];
            }
            levels.push_back(level);
        }
        out.push_back(std::move(levels));
    }
    return out;
}

} // namespace blendrp
