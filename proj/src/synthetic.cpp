#include "blendrp/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>
#include <tuple>

namespace blendrp {

namespace {

// mt19937_64 output is fixed by the standard; the distributions are not, so
// doubles are formed directly from the top 53 bits.
class Uniform {
public:
    explicit Uniform(std::uint64_t seed) : rng_(seed) {}
    double operator()() { return static_cast<double>(rng_() >> 11) * 0x1.0p-53; }
    double operator()(double lo, double hi) { return lo + (hi - lo) * (*this)(); }

private:
    std::mt19937_64 rng_;
};

double clamp01(double x) { return std::clamp(x, 0.0, 1.0); }

Asset producer(const std::string& name, const std::string& node, const std::string& carrier, double units,
               double inv_cost, double var_cost)
{
    Asset a;
    a.name = name;
    a.node = node;
    a.kind = AssetKind::producer;
    a.carrier_out = carrier;
    a.unit_capacity = 1.0;
    a.existing_units = units;
    a.inv_cost = inv_cost;
    a.var_cost = var_cost;
    return a;
}

} // namespace

EnergySystem make_synthetic_system(const SyntheticOptions& options)
{
    if (options.periods < 1 || options.hours < 1) {
        throw std::invalid_argument("synthetic system needs at least one period and one hour");
    }
    const int D = options.periods;
    const int H = options.hours;
    constexpr double two_pi = 2.0 * std::numbers::pi;
    Uniform uniform(options.seed);

    EnergySystem sys;
    sys.horizon = {D, H, 1.0, 8760.0};
    sys.mode = options.mode;
    sys.nodes = {"n1", "n2", "n3"};
    sys.carriers = {"elec", "h2"};

    const double base_units = options.greenfield ? 0.0 : 1.0;
    const double peaks[] = {10.0, 12.0, 8.0};
    for (std::size_t i = 0; i < sys.nodes.size(); ++i) {
        const auto& n = sys.nodes[i];
        const auto suffix = "_" + n;
        sys.assets.push_back(producer("solar" + suffix, n, "elec", 2.0 * base_units, 55000.0, 0.0));
        sys.assets.back().investable = true;
        sys.assets.push_back(producer("wind" + suffix, n, "elec", 2.0 * base_units, 90000.0, 0.0));
        sys.assets.back().investable = true;
        sys.assets.push_back(producer("gas" + suffix, n, "elec", 3.0 * base_units, 45000.0, 45.0));
        sys.assets.back().investable = true;
        sys.assets.back().ramp = 0.5;
        sys.assets.push_back(producer("peak" + suffix, n, "elec", 2.0 * peaks[i], 0.0, 400.0));
    }

    Asset battery;
    battery.name = "battery";
    battery.node = "n1";
    battery.kind = AssetKind::storage_short;
    battery.carrier_in = battery.carrier_out = "elec";
    battery.unit_capacity = 2.0;
    battery.existing_units = 1.0;
    battery.eff_in = 0.95;
    battery.eff_out = 0.95;
    battery.storage_cap = 6.0;
    sys.assets.push_back(battery);

    if (options.seasonal_storage) {
        Asset hydro;
        hydro.name = "hydro";
        hydro.node = "n2";
        hydro.kind = AssetKind::storage_seasonal;
        hydro.carrier_in = hydro.carrier_out = "elec";
        hydro.unit_capacity = 4.0;
        hydro.existing_units = 1.0;
        hydro.eff_in = 0.9;
        hydro.eff_out = 0.9;
        hydro.storage_cap = 40.0 * D / 12.0;
        hydro.inflow_max = 2.0;
        hydro.spill_cost = 1.0;
        hydro.borrow_cost = 2000.0;
        hydro.initial_storage = 0.5 * hydro.storage_cap;
        sys.assets.push_back(hydro);
    }

    Asset electrolyzer;
    electrolyzer.name = "electrolyzer";
    electrolyzer.node = "n1";
    electrolyzer.kind = AssetKind::conversion;
    electrolyzer.carrier_in = "elec";
    electrolyzer.carrier_out = "h2";
    electrolyzer.unit_capacity = 3.0;
    electrolyzer.existing_units = 1.0;
    electrolyzer.eff_out = 0.7;
    sys.assets.push_back(electrolyzer);
    sys.assets.push_back(producer("smr", "n1", "h2", 4.0, 0.0, 110.0));

    std::sort(sys.assets.begin(), sys.assets.end(), [](const Asset& a, const Asset& b) { return a.name < b.name; });

    sys.lines.push_back({"l12", "n1", "n2", "elec", 5.0, 5.0});
    sys.lines.push_back({"l23", "n2", "n3", "elec", 4.0, 4.0});

    // Profiles. Seasonality uses the period index, the daily shape the hour.
    auto season = [&](int d) { return std::cos(two_pi * (d + 0.5) / D); };
    auto daily = [&](int h) { return std::sin(std::numbers::pi * (h + 0.5) / H); };

    for (std::size_t i = 0; i < sys.nodes.size(); ++i) {
        DemandSeries s{sys.nodes[i], "elec", peaks[i], PeriodProfile(D, H, 0.0)};
        for (int d = 0; d < D; ++d) {
            const double level = 0.65 + 0.12 * season(d) + uniform(-0.05, 0.05);
            for (int h = 0; h < H; ++h) {
                s.profile(d, h) = clamp01(level + 0.2 * daily(h) + uniform(-0.04, 0.04));
            }
        }
        sys.demands.push_back(std::move(s));
    }
    {
        DemandSeries s{"n1", "h2", 2.0, PeriodProfile(D, H, 0.0)};
        for (int d = 0; d < D; ++d) {
            for (int h = 0; h < H; ++h) s.profile(d, h) = uniform(0.6, 0.9);
        }
        sys.demands.push_back(std::move(s));
    }
    std::sort(sys.demands.begin(), sys.demands.end(), [](const DemandSeries& a, const DemandSeries& b) {
        return std::tie(a.node, a.carrier) < std::tie(b.node, b.carrier);
    });

    for (const auto& n : sys.nodes) {
        AssetSeries solar{"solar_" + n, PeriodProfile(D, H, 0.0)};
        AssetSeries wind{"wind_" + n, PeriodProfile(D, H, 0.0)};
        for (int d = 0; d < D; ++d) {
            const double sun = 0.55 - 0.3 * season(d) + uniform(-0.15, 0.15);
            double breeze = 0.45 + 0.2 * season(d) + uniform(-0.3, 0.3);
            for (int h = 0; h < H; ++h) {
                solar.profile(d, h) = clamp01(sun * daily(h) + uniform(0.0, 0.05));
                breeze = 0.7 * breeze + 0.3 * uniform(0.0, 1.0);
                wind.profile(d, h) = clamp01(breeze);
            }
        }
        sys.availability.push_back(std::move(solar));
        sys.availability.push_back(std::move(wind));
    }
    std::sort(sys.availability.begin(), sys.availability.end(),
              [](const AssetSeries& a, const AssetSeries& b) { return a.asset < b.asset; });

    if (options.seasonal_storage) {
        AssetSeries inflow{"hydro", PeriodProfile(D, H, 0.0)};
        for (int d = 0; d < D; ++d) {
            const double level = 0.5 + 0.4 * season(d) + uniform(-0.1, 0.1);
            for (int h = 0; h < H; ++h) inflow.profile(d, h) = clamp01(level + uniform(-0.05, 0.05));
        }
        sys.inflows.push_back(std::move(inflow));
        StorageBounds bounds{"hydro", std::vector<double>(static_cast<std::size_t>(D), 0.05),
                             std::vector<double>(static_cast<std::size_t>(D), 1.0)};
        sys.storage_bounds.push_back(std::move(bounds));
    }
    return sys;
}

} // namespace blendrp
