#include "blendrp/core_data.hpp"

#include "csv.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <set>
#include <sstream>

namespace blendrp {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string locate(const std::string& message, const std::string& file, std::size_t line)
{
    if (file.empty()) {
        return message;
    }
    const auto name = fs::path(file).filename().string();
    if (line == 0) {
        return name + ": " + message;
    }
    return name + ":" + std::to_string(line) + ": " + message;
}

} // namespace

DataError::DataError(const std::string& message, std::string file, std::size_t line)
    : std::runtime_error(locate(message, file, line)), file_(std::move(file)), line_(line)
{
}

std::string to_string(ModelMode mode)
{
    return mode == ModelMode::gep ? "gep" : "p2x";
}

ModelMode parse_mode(const std::string& text)
{
    if (text == "gep") {
        return ModelMode::gep;
    }
    if (text == "p2x") {
        return ModelMode::p2x;
    }
    throw DataError("unknown mode '" + text + "' (expected gep or p2x)");
}

double Horizon::operational_weight() const
{
    const double steps_per_year = hours_per_year / timestep_hours;
    return steps_per_year / static_cast<double>(num_steps());
}

std::string to_string(AssetKind kind)
{
    switch (kind) {
    case AssetKind::producer: return "producer";
    case AssetKind::storage_short: return "storage_short";
    case AssetKind::storage_seasonal: return "storage_seasonal";
    case AssetKind::conversion: return "conversion";
    }
    return "producer";
}

PeriodProfile::PeriodProfile(int periods, int hours, double fill)
    : periods_(periods), hours_(hours),
      values_(static_cast<std::size_t>(periods) * static_cast<std::size_t>(hours), fill)
{
}

const Asset* EnergySystem::find_asset(const std::string& name) const
{
    const auto it = std::find_if(assets.begin(), assets.end(), [&](const Asset& a) { return a.name == name; });
    return it == assets.end() ? nullptr : &*it;
}

const AssetSeries* EnergySystem::find_availability(const std::string& asset) const
{
    const auto it = std::find_if(availability.begin(), availability.end(),
                                 [&](const AssetSeries& s) { return s.asset == asset; });
    return it == availability.end() ? nullptr : &*it;
}

const AssetSeries* EnergySystem::find_inflow(const std::string& asset) const
{
    const auto it =
        std::find_if(inflows.begin(), inflows.end(), [&](const AssetSeries& s) { return s.asset == asset; });
    return it == inflows.end() ? nullptr : &*it;
}

const StorageBounds* EnergySystem::find_storage_bounds(const std::string& asset) const
{
    const auto it = std::find_if(storage_bounds.begin(), storage_bounds.end(),
                                 [&](const StorageBounds& s) { return s.asset == asset; });
    return it == storage_bounds.end() ? nullptr : &*it;
}

// ---------------------------------------------------------------------------
// Loading

namespace {

bool valid_name(const std::string& name)
{
    if (name.empty() || !std::isalpha(static_cast<unsigned char>(name.front()))) {
        return false;
    }
    return std::all_of(name.begin(), name.end(), [](char ch) {
        return std::isalnum(static_cast<unsigned char>(ch)) || ch == '_' || ch == '.';
    });
}

void check_name(const std::string& name, const std::string& what, const std::string& file, std::size_t line)
{
    if (!valid_name(name)) {
        throw DataError(what + " name '" + name + "' must start with a letter and contain only letters, digits, "
                                                 "'_' or '.'",
                        file, line);
    }
}

AssetKind parse_kind(const std::string& text, const std::string& file, std::size_t line)
{
    if (text == "producer") return AssetKind::producer;
    if (text == "storage_short") return AssetKind::storage_short;
    if (text == "storage_seasonal") return AssetKind::storage_seasonal;
    if (text == "conversion") return AssetKind::conversion;
    throw DataError("unknown asset kind '" + text + "'", file, line);
}

bool parse_flag(const std::string& text, const std::string& file, std::size_t line)
{
    if (text.empty() || text == "0" || text == "false" || text == "no") return false;
    if (text == "1" || text == "true" || text == "yes") return true;
    throw DataError("invalid boolean '" + text + "'", file, line);
}

template <typename T>
T json_field(const json& object, const char* key, const std::string& file)
{
    if (!object.contains(key)) {
        throw DataError(std::string("missing field '") + key + "'", file);
    }
    try {
        return object.at(key).get<T>();
    } catch (const json::exception& e) {
        throw DataError(std::string("field '") + key + "': " + e.what(), file);
    }
}

struct ConfigData {
    Horizon horizon;
    ModelMode mode = ModelMode::gep;
    std::vector<std::string> nodes;
    std::vector<std::string> carriers;
    std::vector<DemandSeries> demands;
};

ConfigData read_config(const fs::path& root)
{
    const auto path = root / "config.json";
    std::ifstream in(path);
    if (!in) {
        throw DataError("config.json not found", path.string());
    }
    const auto file = path.string();
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::parse_error& e) {
        throw DataError(std::string("invalid JSON: ") + e.what(), file);
    }

    ConfigData config;
    const auto horizon = json_field<json>(doc, "horizon", file);
    config.horizon.num_periods = json_field<int>(horizon, "num_periods", file);
    config.horizon.hours_per_period = json_field<int>(horizon, "hours_per_period", file);
    config.horizon.timestep_hours = json_field<double>(horizon, "timestep_hours", file);
    config.horizon.hours_per_year = json_field<double>(horizon, "hours_per_year", file);
    if (config.horizon.num_periods < 1 || config.horizon.hours_per_period < 1) {
        throw DataError("horizon needs num_periods >= 1 and hours_per_period >= 1", file);
    }
    if (!(config.horizon.timestep_hours > 0.0) || !(config.horizon.hours_per_year > 0.0)) {
        throw DataError("horizon needs timestep_hours > 0 and hours_per_year > 0", file);
    }
    config.mode = parse_mode(doc.value("mode", std::string("gep")));

    config.nodes = json_field<std::vector<std::string>>(doc, "nodes", file);
    config.carriers = json_field<std::vector<std::string>>(doc, "carriers", file);
    for (const auto& n : config.nodes) check_name(n, "node", file, 0);
    for (const auto& x : config.carriers) check_name(x, "carrier", file, 0);
    std::sort(config.nodes.begin(), config.nodes.end());
    std::sort(config.carriers.begin(), config.carriers.end());
    if (std::adjacent_find(config.nodes.begin(), config.nodes.end()) != config.nodes.end()) {
        throw DataError("duplicate node name", file);
    }
    if (std::adjacent_find(config.carriers.begin(), config.carriers.end()) != config.carriers.end()) {
        throw DataError("duplicate carrier name", file);
    }
    if (config.nodes.empty() || config.carriers.empty()) {
        throw DataError("at least one node and one carrier are required", file);
    }

    const auto peaks = doc.value("demand_peaks", json::array());
    if (!peaks.is_array()) {
        throw DataError("'demand_peaks' must be an array", file);
    }
    for (const auto& entry : peaks) {
        DemandSeries series;
        series.node = json_field<std::string>(entry, "node", file);
        series.carrier = json_field<std::string>(entry, "carrier", file);
        series.peak = json_field<double>(entry, "peak", file);
        if (!std::binary_search(config.nodes.begin(), config.nodes.end(), series.node)) {
            throw DataError("demand peak references unknown node '" + series.node + "'", file);
        }
        if (!std::binary_search(config.carriers.begin(), config.carriers.end(), series.carrier)) {
            throw DataError("demand peak references unknown carrier '" + series.carrier + "'", file);
        }
        if (!(series.peak >= 0.0)) {
            throw DataError("demand peak must be non-negative", file);
        }
        series.profile = PeriodProfile(config.horizon.num_periods, config.horizon.hours_per_period,
                                       std::numeric_limits<double>::quiet_NaN());
        config.demands.push_back(std::move(series));
    }
    std::sort(config.demands.begin(), config.demands.end(), [](const DemandSeries& a, const DemandSeries& b) {
        return std::tie(a.node, a.carrier) < std::tie(b.node, b.carrier);
    });
    for (std::size_t i = 1; i < config.demands.size(); ++i) {
        if (config.demands[i].node == config.demands[i - 1].node &&
            config.demands[i].carrier == config.demands[i - 1].carrier) {
            throw DataError("duplicate demand peak for " + config.demands[i].node + "/" + config.demands[i].carrier,
                            file);
        }
    }
    return config;
}

std::vector<Asset> read_assets(const fs::path& root, const ConfigData& config)
{
    const auto table = csv::Table::read(root / "assets.csv");
    const auto& file = table.file();
    const auto c_name = table.require("name");
    const auto c_node = table.require("node");
    const auto c_kind = table.require("kind");
    const auto opt = [&](const char* column) { return table.find(column); };
    const auto c_cin = opt("carrier_in");
    const auto c_cout = opt("carrier_out");
    const auto c_inv = opt("investable");

    auto value_or = [&](const csv::Row& row, std::optional<std::size_t> column, double fallback) {
        if (!column) return fallback;
        return table.optional_number(row, *column).value_or(fallback);
    };
    auto text_or = [&](const csv::Row& row, std::optional<std::size_t> column) {
        return column ? table.field(row, *column) : std::string{};
    };
    auto is_node = [&](const std::string& n) { return std::binary_search(config.nodes.begin(), config.nodes.end(), n); };
    auto is_carrier = [&](const std::string& x) {
        return std::binary_search(config.carriers.begin(), config.carriers.end(), x);
    };

    std::vector<Asset> assets;
    for (const auto& row : table.rows()) {
        Asset a;
        a.name = table.field(row, c_name);
        check_name(a.name, "asset", file, row.line);
        a.node = table.field(row, c_node);
        if (!is_node(a.node)) {
            throw DataError("asset '" + a.name + "' references unknown node '" + a.node + "'", file, row.line);
        }
        a.kind = parse_kind(table.field(row, c_kind), file, row.line);
        a.carrier_in = text_or(row, c_cin);
        a.carrier_out = text_or(row, c_cout);
        a.investable = c_inv ? parse_flag(table.field(row, *c_inv), file, row.line) : false;
        a.unit_capacity = value_or(row, opt("unit_capacity"), 0.0);
        a.existing_units = value_or(row, opt("existing_units"), 0.0);
        a.inv_cost = value_or(row, opt("inv_cost"), 0.0);
        a.var_cost = value_or(row, opt("var_cost"), 0.0);
        a.eff_in = value_or(row, opt("eff_in"), 1.0);
        a.eff_out = value_or(row, opt("eff_out"), 1.0);
        if (const auto c = opt("ramp")) {
            a.ramp = table.optional_number(row, *c);
        }
        a.storage_cap = value_or(row, opt("storage_cap"), 0.0);
        a.inflow_max = value_or(row, opt("inflow_max"), 0.0);
        a.spill_cost = value_or(row, opt("spill_cost"), 0.0);
        a.borrow_cost = value_or(row, opt("borrow_cost"), 0.0);
        a.initial_storage = value_or(row, opt("initial_storage"), 0.0);

        switch (a.kind) {
        case AssetKind::producer:
            if (!a.carrier_in.empty()) {
                throw DataError("producer '" + a.name + "' must not have carrier_in", file, row.line);
            }
            break;
        case AssetKind::storage_short:
        case AssetKind::storage_seasonal:
            if (a.carrier_out.empty()) a.carrier_out = a.carrier_in;
            if (a.carrier_in.empty()) a.carrier_in = a.carrier_out;
            if (a.carrier_in != a.carrier_out) {
                throw DataError("storage '" + a.name + "' must use one carrier", file, row.line);
            }
            break;
        case AssetKind::conversion:
            if (a.carrier_in.empty()) {
                throw DataError("conversion '" + a.name + "' needs carrier_in", file, row.line);
            }
            break;
        }
        if (a.carrier_out.empty()) {
            throw DataError("asset '" + a.name + "' needs carrier_out", file, row.line);
        }
        for (const auto& x : {a.carrier_in, a.carrier_out}) {
            if (!x.empty() && !is_carrier(x)) {
                throw DataError("asset '" + a.name + "' references unknown carrier '" + x + "'", file, row.line);
            }
        }
        if (a.investable && a.kind != AssetKind::producer) {
            throw DataError("asset '" + a.name + "': only producers may be investable", file, row.line);
        }
        if (!(a.eff_in > 0.0 && a.eff_in <= 1.0) || !(a.eff_out > 0.0 && a.eff_out <= 1.0)) {
            throw DataError("asset '" + a.name + "': efficiencies must lie in (0,1]", file, row.line);
        }
        for (const double v : {a.unit_capacity, a.existing_units, a.inv_cost, a.var_cost, a.storage_cap,
                               a.inflow_max, a.spill_cost, a.borrow_cost, a.initial_storage}) {
            if (v < 0.0) {
                throw DataError("asset '" + a.name + "': capacities, costs and units must be non-negative", file,
                                row.line);
            }
        }
        if (a.ramp && *a.ramp < 0.0) {
            throw DataError("asset '" + a.name + "': ramp must be non-negative", file, row.line);
        }
        const bool reservoir = a.kind == AssetKind::storage_seasonal && a.inflow_max > 0.0;
        if (!reservoir && (a.spill_cost != 0.0 || a.borrow_cost != 0.0)) {
            throw DataError("asset '" + a.name + "': spill/borrow costs apply only to seasonal storage with inflows",
                            file, row.line);
        }
        if (a.is_storage() && a.initial_storage > a.storage_cap) {
            throw DataError("asset '" + a.name + "': initial_storage exceeds storage_cap", file, row.line);
        }
        assets.push_back(std::move(a));
    }
    std::sort(assets.begin(), assets.end(), [](const Asset& a, const Asset& b) { return a.name < b.name; });
    for (std::size_t i = 1; i < assets.size(); ++i) {
        if (assets[i].name == assets[i - 1].name) {
            throw DataError("duplicate asset '" + assets[i].name + "'", file);
        }
    }
    return assets;
}

std::vector<Line> read_lines(const fs::path& root, const ConfigData& config)
{
    const auto path = root / "lines.csv";
    if (!fs::exists(path)) {
        return {};
    }
    const auto table = csv::Table::read(path);
    const auto& file = table.file();
    const auto c_name = table.require("name");
    const auto c_from = table.require("from_node");
    const auto c_to = table.require("to_node");
    const auto c_carrier = table.require("carrier");
    const auto c_imp = table.require("import_limit");
    const auto c_exp = table.require("export_limit");
    std::vector<Line> lines;
    for (const auto& row : table.rows()) {
        Line l;
        l.name = table.field(row, c_name);
        check_name(l.name, "line", file, row.line);
        l.from_node = table.field(row, c_from);
        l.to_node = table.field(row, c_to);
        l.carrier = table.field(row, c_carrier);
        for (const auto& n : {l.from_node, l.to_node}) {
            if (!std::binary_search(config.nodes.begin(), config.nodes.end(), n)) {
                throw DataError("line '" + l.name + "' references unknown node '" + n + "'", file, row.line);
            }
        }
        if (!std::binary_search(config.carriers.begin(), config.carriers.end(), l.carrier)) {
            throw DataError("line '" + l.name + "' references unknown carrier '" + l.carrier + "'", file, row.line);
        }
        l.import_limit = table.number(row, c_imp);
        l.export_limit = table.number(row, c_exp);
        if (l.import_limit < 0.0 || l.export_limit < 0.0) {
            throw DataError("line '" + l.name + "': limits must be non-negative", file, row.line);
        }
        lines.push_back(std::move(l));
    }
    std::sort(lines.begin(), lines.end(), [](const Line& a, const Line& b) { return a.name < b.name; });
    for (std::size_t i = 1; i < lines.size(); ++i) {
        if (lines[i].name == lines[i - 1].name) {
            throw DataError("duplicate line '" + lines[i].name + "'", file);
        }
    }
    return lines;
}

struct CellIndex {
    int period = 0;
    int hour = 0;
};

CellIndex read_cell(const csv::Table& table, const csv::Row& row, std::size_t c_period, std::size_t c_hour,
                    const Horizon& horizon)
{
    const int period = table.integer(row, c_period);
    const int hour = table.integer(row, c_hour);
    if (period < 1 || period > horizon.num_periods) {
        throw DataError("period " + std::to_string(period) + " outside 1.." + std::to_string(horizon.num_periods),
                        table.file(), row.line);
    }
    if (hour < 1 || hour > horizon.hours_per_period) {
        throw DataError("hour " + std::to_string(hour) + " outside 1.." + std::to_string(horizon.hours_per_period),
                        table.file(), row.line);
    }
    return {period - 1, hour - 1};
}

void store_cell(PeriodProfile& profile, CellIndex cell, double value, const csv::Table& table, const csv::Row& row)
{
    if (!std::isnan(profile(cell.period, cell.hour))) {
        throw DataError("duplicate entry for period " + std::to_string(cell.period + 1) + ", hour " +
                            std::to_string(cell.hour + 1),
                        table.file(), row.line);
    }
    profile(cell.period, cell.hour) = value;
}

void read_demand(const fs::path& root, const Horizon& horizon, std::vector<DemandSeries>& demands)
{
    const auto table = csv::Table::read(root / "demand.csv");
    const auto c_node = table.require("node");
    const auto c_carrier = table.require("carrier");
    const auto c_period = table.require("period");
    const auto c_hour = table.require("hour");
    const auto c_value = table.require("value");
    for (const auto& row : table.rows()) {
        const auto& node = table.field(row, c_node);
        const auto& carrier = table.field(row, c_carrier);
        const auto it = std::find_if(demands.begin(), demands.end(), [&](const DemandSeries& s) {
            return s.node == node && s.carrier == carrier;
        });
        if (it == demands.end()) {
            throw DataError("demand for " + node + "/" + carrier + " has no peak in config.json", table.file(),
                            row.line);
        }
        const auto cell = read_cell(table, row, c_period, c_hour, horizon);
        store_cell(it->profile, cell, table.number(row, c_value), table, row);
    }
}

std::vector<AssetSeries> read_asset_series(const fs::path& path, const Horizon& horizon,
                                           const std::vector<Asset>& assets, bool (*admissible)(const Asset&),
                                           const char* requirement)
{
    if (!fs::exists(path)) {
        return {};
    }
    const auto table = csv::Table::read(path);
    const auto c_asset = table.require("asset");
    const auto c_period = table.require("period");
    const auto c_hour = table.require("hour");
    const auto c_value = table.require("value");
    std::map<std::string, PeriodProfile> series;
    for (const auto& row : table.rows()) {
        const auto& name = table.field(row, c_asset);
        const auto it = std::find_if(assets.begin(), assets.end(), [&](const Asset& a) { return a.name == name; });
        if (it == assets.end()) {
            throw DataError("unknown asset '" + name + "'", table.file(), row.line);
        }
        if (!admissible(*it)) {
            throw DataError("asset '" + name + "' " + requirement, table.file(), row.line);
        }
        auto [entry, inserted] = series.try_emplace(
            name, horizon.num_periods, horizon.hours_per_period, std::numeric_limits<double>::quiet_NaN());
        (void)inserted;
        const auto cell = read_cell(table, row, c_period, c_hour, horizon);
        store_cell(entry->second, cell, table.number(row, c_value), table, row);
    }
    std::vector<AssetSeries> out;
    for (auto& [name, profile] : series) {
        out.push_back(AssetSeries{name, std::move(profile)});
    }
    return out;
}

std::vector<StorageBounds> read_storage_bounds(const fs::path& root, const Horizon& horizon,
                                               const std::vector<Asset>& assets)
{
    const auto path = root / "storage_bounds.csv";
    if (!fs::exists(path)) {
        return {};
    }
    const auto table = csv::Table::read(path);
    const auto c_asset = table.require("asset");
    const auto c_period = table.require("period");
    const auto c_min = table.require("min_frac");
    const auto c_max = table.require("max_frac");
    std::map<std::string, StorageBounds> bounds;
    std::set<std::pair<std::string, int>> seen;
    for (const auto& row : table.rows()) {
        const auto& name = table.field(row, c_asset);
        const auto* asset = [&]() -> const Asset* {
            for (const auto& a : assets) {
                if (a.name == name) return &a;
            }
            return nullptr;
        }();
        if (asset == nullptr) {
            throw DataError("unknown asset '" + name + "'", table.file(), row.line);
        }
        if (asset->kind != AssetKind::storage_seasonal) {
            throw DataError("storage bounds apply only to seasonal storage, not '" + name + "'", table.file(),
                            row.line);
        }
        const int period = table.integer(row, c_period);
        if (period < 1 || period > horizon.num_periods) {
            throw DataError("period " + std::to_string(period) + " outside 1.." +
                                std::to_string(horizon.num_periods),
                            table.file(), row.line);
        }
        if (!seen.emplace(name, period).second) {
            throw DataError("duplicate bounds for period " + std::to_string(period), table.file(), row.line);
        }
        auto [it, inserted] = bounds.try_emplace(name);
        if (inserted) {
            it->second.asset = name;
            it->second.min_frac.assign(static_cast<std::size_t>(horizon.num_periods), 0.0);
            it->second.max_frac.assign(static_cast<std::size_t>(horizon.num_periods), 1.0);
        }
        const auto d = static_cast<std::size_t>(period - 1);
        it->second.min_frac[d] = table.optional_number(row, c_min).value_or(0.0);
        it->second.max_frac[d] = table.optional_number(row, c_max).value_or(1.0);
    }
    std::vector<StorageBounds> out;
    for (auto& [name, b] : bounds) {
        out.push_back(std::move(b));
    }
    return out;
}

} // namespace

EnergySystem load_system(const fs::path& root)
{
    if (!fs::is_directory(root)) {
        throw DataError("data directory '" + root.string() + "' not found");
    }
    auto config = read_config(root);

    EnergySystem system;
    system.horizon = config.horizon;
    system.mode = config.mode;
    system.nodes = config.nodes;
    system.carriers = config.carriers;
    system.assets = read_assets(root, config);
    system.lines = read_lines(root, config);
    system.demands = std::move(config.demands);
    read_demand(root, system.horizon, system.demands);
    system.availability = read_asset_series(
        root / "availability.csv", system.horizon, system.assets,
        [](const Asset& a) { return a.kind == AssetKind::producer; }, "is not a producer");
    system.inflows = read_asset_series(
        root / "inflows.csv", system.horizon, system.assets,
        [](const Asset& a) { return a.kind == AssetKind::storage_seasonal; }, "is not seasonal storage");
    system.storage_bounds = read_storage_bounds(root, system.horizon, system.assets);
    return system;
}

// ---------------------------------------------------------------------------
// Writing

namespace {

std::ofstream open_for_write(const fs::path& path)
{
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw DataError("cannot write " + path.string(), path.string());
    }
    return out;
}

void write_series(std::ostream& out, const std::string& key, const PeriodProfile& profile)
{
    for (int d = 0; d < profile.periods(); ++d) {
        for (int h = 0; h < profile.hours(); ++h) {
            const double v = profile(d, h);
            if (!std::isnan(v)) {
                out << key << ',' << d + 1 << ',' << h + 1 << ',' << csv::format_double(v) << '\n';
            }
        }
    }
}

} // namespace

void write_system(const EnergySystem& system, const fs::path& root)
{
    using csv::format_double;
    fs::create_directories(root);

    json config;
    config["horizon"] = {{"num_periods", system.horizon.num_periods},
                         {"hours_per_period", system.horizon.hours_per_period},
                         {"timestep_hours", system.horizon.timestep_hours},
                         {"hours_per_year", system.horizon.hours_per_year}};
    config["mode"] = to_string(system.mode);
    config["nodes"] = system.nodes;
    config["carriers"] = system.carriers;
    config["demand_peaks"] = json::array();
    for (const auto& d : system.demands) {
        config["demand_peaks"].push_back({{"node", d.node}, {"carrier", d.carrier}, {"peak", d.peak}});
    }
    open_for_write(root / "config.json") << config.dump(2) << '\n';

    {
        auto out = open_for_write(root / "assets.csv");
        out << "name,node,kind,carrier_in,carrier_out,investable,unit_capacity,existing_units,inv_cost,var_cost,"
               "eff_in,eff_out,ramp,storage_cap,inflow_max,spill_cost,borrow_cost,initial_storage\n";
        for (const auto& a : system.assets) {
            out << a.name << ',' << a.node << ',' << to_string(a.kind) << ','
                << (a.kind == AssetKind::producer ? std::string{} : a.carrier_in) << ',' << a.carrier_out << ','
                << (a.investable ? 1 : 0) << ',' << format_double(a.unit_capacity) << ','
                << format_double(a.existing_units) << ',' << format_double(a.inv_cost) << ','
                << format_double(a.var_cost) << ',' << format_double(a.eff_in) << ',' << format_double(a.eff_out)
                << ',' << (a.ramp ? format_double(*a.ramp) : std::string{}) << ',' << format_double(a.storage_cap)
                << ',' << format_double(a.inflow_max) << ',' << format_double(a.spill_cost) << ','
                << format_double(a.borrow_cost) << ',' << format_double(a.initial_storage) << '\n';
        }
    }
    {
        auto out = open_for_write(root / "lines.csv");
        out << "name,from_node,to_node,carrier,import_limit,export_limit\n";
        for (const auto& l : system.lines) {
            out << l.name << ',' << l.from_node << ',' << l.to_node << ',' << l.carrier << ','
                << format_double(l.import_limit) << ',' << format_double(l.export_limit) << '\n';
        }
    }
    {
        auto out = open_for_write(root / "demand.csv");
        out << "node,carrier,period,hour,value\n";
        for (const auto& d : system.demands) {
            write_series(out, d.node + "," + d.carrier, d.profile);
        }
    }
    {
        auto out = open_for_write(root / "availability.csv");
        out << "asset,period,hour,value\n";
        for (const auto& s : system.availability) {
            write_series(out, s.asset, s.profile);
        }
    }
    {
        auto out = open_for_write(root / "inflows.csv");
        out << "asset,period,hour,value\n";
        for (const auto& s : system.inflows) {
            write_series(out, s.asset, s.profile);
        }
    }
    if (!system.storage_bounds.empty()) {
        auto out = open_for_write(root / "storage_bounds.csv");
        out << "asset,period,min_frac,max_frac\n";
        for (const auto& b : system.storage_bounds) {
            for (std::size_t d = 0; d < b.min_frac.size(); ++d) {
                out << b.asset << ',' << d + 1 << ',' << format_double(b.min_frac[d]) << ','
                    << format_double(b.max_frac[d]) << '\n';
            }
        }
    }
}

// ---------------------------------------------------------------------------
// Validation

std::string ProfileViolation::describe() const
{
    std::ostringstream out;
    out << profile << ' ' << entity << ": ";
    if (kind == Kind::missing) {
        out << "missing value";
    } else {
        out << "value " << value << " outside [0,1]";
    }
    out << " at period " << period + 1;
    if (hour >= 0) {
        out << ", hour " << hour + 1;
    }
    return out.str();
}

namespace {

void check_profile(const PeriodProfile& profile, const std::string& kind, const std::string& entity,
                   std::vector<ProfileViolation>& out)
{
    for (int d = 0; d < profile.periods(); ++d) {
        for (int h = 0; h < profile.hours(); ++h) {
            const double v = profile(d, h);
            if (std::isnan(v)) {
                out.push_back({ProfileViolation::Kind::missing, kind, entity, d, h, v});
            } else if (v < 0.0 || v > 1.0) {
                out.push_back({ProfileViolation::Kind::out_of_range, kind, entity, d, h, v});
            }
        }
    }
}

} // namespace

std::vector<ProfileViolation> validate_profiles(const EnergySystem& system)
{
    std::vector<ProfileViolation> violations;
    for (const auto& d : system.demands) {
        check_profile(d.profile, "demand", d.node + "/" + d.carrier, violations);
    }
    for (const auto& s : system.availability) {
        check_profile(s.profile, "availability", s.asset, violations);
    }
    for (const auto& s : system.inflows) {
        check_profile(s.profile, "inflow", s.asset, violations);
    }
    for (const auto& b : system.storage_bounds) {
        for (std::size_t d = 0; d < b.min_frac.size(); ++d) {
            for (const double v : {b.min_frac[d], b.max_frac[d]}) {
                if (v < 0.0 || v > 1.0) {
                    violations.push_back({ProfileViolation::Kind::out_of_range, "storage_bounds", b.asset,
                                          static_cast<int>(d), -1, v});
                }
            }
            if (b.min_frac[d] > b.max_frac[d]) {
                violations.push_back({ProfileViolation::Kind::out_of_range, "storage_bounds", b.asset,
                                      static_cast<int>(d), -1, b.min_frac[d]});
            }
        }
    }
    return violations;
}

// ---------------------------------------------------------------------------
// Clustering matrix

bool is_renewable(const EnergySystem& system, const Asset& asset)
{
    if (asset.kind != AssetKind::producer) {
        return false;
    }
    const auto* series = system.find_availability(asset.name);
    if (series == nullptr) {
        return false;
    }
    const auto& v = series->profile.values();
    return std::any_of(v.begin(), v.end(), [](double x) { return x < 1.0; });
}

ClusteringMatrix build_clustering_matrix(const EnergySystem& system)
{
    const int periods = system.horizon.num_periods;
    const int hours = system.horizon.hours_per_period;

    ClusteringMatrix cm;
    cm.hours_per_period = hours;
    std::vector<const PeriodProfile*> sources;

    for (const auto& d : system.demands) {
        cm.blocks.push_back({FeatureBlock::Kind::demand, d.node + "/" + d.carrier, d.node, d.carrier,
                             sources.size() * static_cast<std::size_t>(hours)});
        sources.push_back(&d.profile);
    }
    for (const auto& a : system.assets) {
        if (is_renewable(system, a)) {
            cm.blocks.push_back({FeatureBlock::Kind::availability, a.name, a.node, a.carrier_out,
                                 sources.size() * static_cast<std::size_t>(hours)});
            sources.push_back(&system.find_availability(a.name)->profile);
        }
    }
    for (const auto& a : system.assets) {
        if (const auto* inflow = system.find_inflow(a.name)) {
            cm.blocks.push_back({FeatureBlock::Kind::inflow, a.name, a.node, a.carrier_out,
                                 sources.size() * static_cast<std::size_t>(hours)});
            sources.push_back(&inflow->profile);
        }
    }

    const auto rows = static_cast<Eigen::Index>(sources.size()) * hours;
    cm.values.resize(rows, periods);
    for (std::size_t b = 0; b < sources.size(); ++b) {
        const char* prefix = cm.blocks[b].kind == FeatureBlock::Kind::demand         ? "demand"
                             : cm.blocks[b].kind == FeatureBlock::Kind::availability ? "availability"
                                                                                       : "inflow";
        for (int h = 0; h < hours; ++h) {
            const auto row = static_cast<Eigen::Index>(b) * hours + h;
            cm.row_labels.push_back(std::string(prefix) + ":" + cm.blocks[b].entity + ":h" + std::to_string(h + 1));
            for (int d = 0; d < periods; ++d) {
                cm.values(row, d) = (*sources[b])(d, h);
            }
        }
    }
    for (int d = 0; d < periods; ++d) {
        cm.period_ids.push_back(d + 1);
    }
    return cm;
}

} // namespace blendrp
