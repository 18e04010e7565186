#include "blendrp/harness.hpp"

#include "csv.hpp"

#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <sstream>

namespace blendrp {

namespace fs = std::filesystem;

double compute_regret(double cost_fixed, double cost_full)
{
    if (!std::isfinite(cost_fixed) || !std::isfinite(cost_full)) {
        throw RegretError("regret needs finite costs");
    }
    if (cost_full <= 0.0) {
        throw RegretError("regret needs a positive full-model cost, got " + csv::format_double(cost_full));
    }
    const double regret = 100.0 * (cost_fixed - cost_full) / cost_full;
    if (regret < regret_error_threshold) {
        throw RegretError("fixed model is cheaper than the full optimum (regret " + csv::format_double(regret) +
                          "%)");
    }
    return regret;
}

double compute_regret(const Solution& fixed, const Solution& full)
{
    if (!fixed.optimal()) {
        throw RegretError("decision-fixed model is " + to_string(fixed.status) + ": " + fixed.message);
    }
    if (!full.optimal()) {
        throw RegretError("full model is " + to_string(full.status) + ": " + full.message);
    }
    return compute_regret(fixed.objective, full.objective);
}

// ---------------------------------------------------------------------------

Reduction select_representatives(const ClusteringMatrix& layout, ClusterMethod method, WeightType type, int n_rp,
                                 std::uint64_t seed, const PgdParams& pgd)
{
    Reduction out;
    switch (method) {
    case ClusterMethod::kmeans:
    case ClusterMethod::kmedoids: {
        auto result = method == ClusterMethod::kmeans ? kmeans(layout.values, n_rp, seed)
                                                      : kmedoids(layout.values, n_rp, seed);
        out.selection = std::move(result.selection);
        out.assignment = std::move(result.assignment);
        break;
    }
    case ClusterMethod::hull: {
        HullOptions options;
        options.pgd = pgd;
        out.selection = greedy_hull(layout.values, n_rp, hull_for(type), {}, options);
        break;
    }
    }
    return out;
}

void fit_reduction(Reduction& reduction, const ClusteringMatrix& layout, WeightType type, const PgdParams& pgd)
{
    const std::vector<int>* assignment = reduction.assignment ? &reduction.assignment->assignment : nullptr;
    reduction.weights = fit_weights(reduction.selection.reps, layout.values, type, pgd, assignment);
}

Reduction reduce(const ClusteringMatrix& layout, ClusterMethod method, WeightType type, int n_rp, std::uint64_t seed,
                 const PgdParams& pgd)
{
    auto out = select_representatives(layout, method, type, n_rp, seed, pgd);
    fit_reduction(out, layout, type, pgd);
    return out;
}

// ---------------------------------------------------------------------------

std::string content_hash(const std::string& text)
{
    std::uint64_t h = 14695981039346656037ULL;
    for (const unsigned char c : text) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    static constexpr char digits[] = "0123456789abcdef";
    std::string out(16, '0');
    for (int i = 15; i >= 0; --i) {
        out[static_cast<std::size_t>(i)] = digits[h & 0xF];
        h >>= 4;
    }
    return out;
}

FullSolveCache::FullSolveCache(std::optional<fs::path> directory) : directory_(std::move(directory)) {}

int FullSolveCache::hits() const
{
    std::lock_guard lock(mutex_);
    return hits_;
}

int FullSolveCache::misses() const
{
    std::lock_guard lock(mutex_);
    return misses_;
}

Solution FullSolveCache::solve(const LpModel& model, const SolverHandle& handle)
{
    std::ostringstream settings;
    settings << handle.backend << ';' << csv::format_double(handle.tolerance) << ';'
             << (handle.time_limit_seconds ? csv::format_double(*handle.time_limit_seconds) : "none") << '\n';
    const std::string key = content_hash(settings.str() + lp_text(model));

    {
        std::lock_guard lock(mutex_);
        if (const auto it = memory_.find(key); it != memory_.end()) {
            ++hits_;
            return it->second;
        }
    }

    // Disk entries keep only the status and objective: that is all the regret
    // computation needs from the full model.
    const auto file = directory_ ? std::optional<fs::path>(*directory_ / ("full-" + key + ".json")) : std::nullopt;
    if (file && fs::exists(*file)) {
        std::ifstream in(*file);
        const auto doc = nlohmann::json::parse(in, nullptr, false);
        if (!doc.is_discarded() && doc.value("status", "") == "optimal" && doc.contains("objective")) {
            Solution cached;
            cached.status = SolveStatus::optimal;
            cached.objective = doc["objective"].get<double>();
            std::lock_guard lock(mutex_);
            ++hits_;
            memory_.emplace(key, cached);
            return cached;
        }
    }

    Solution solution = blendrp::solve(model, handle);
    if (solution.optimal() && file) {
        fs::create_directories(*directory_);
        nlohmann::json doc{{"status", "optimal"}, {"objective", solution.objective}};
        const auto tmp = file->string() + ".tmp";
        {
            std::ofstream out(tmp);
            out << doc.dump() << '\n';
        }
        std::error_code ec;
        fs::rename(tmp, *file, ec);
    }
    std::lock_guard lock(mutex_);
    ++misses_;
    if (solution.optimal()) memory_.emplace(key, solution);
    return solution;
}

// ---------------------------------------------------------------------------

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start)
{
    return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string describe_failure(const std::string& stage, const Solution& s)
{
    std::string out = stage + " " + to_string(s.status);
    if (s.failure != SolveFailure::none) out += " (" + to_string(s.failure) + ")";
    return out;
}

void run_seed(const ExperimentConfig& config, std::uint64_t seed, FullSolveCache& cache, ExperimentRecord& record)
{
    auto t = Clock::now();
    const auto system = load_system(config.data);
    const auto layout = build_clustering_matrix(system);
    record.times.read = seconds_since(t);

    t = Clock::now();
    auto reduction = select_representatives(layout, config.method, config.weight_type, config.n_rp, seed, config.pgd);
    record.times.cluster = seconds_since(t);

    t = Clock::now();
    fit_reduction(reduction, layout, config.weight_type, config.pgd);
    record.times.fit = seconds_since(t);
    record.projection_error_mean = reduction.weights.errors.mean();
    record.projection_error_max = reduction.weights.errors.maxCoeff();

    t = Clock::now();
    const auto reduced_model = build_model(system, make_rep_data(layout, reduction.selection.reps), reduction.weights,
                                           config.mode);
    record.times.build = seconds_since(t);

    t = Clock::now();
    const auto reduced = solve(reduced_model, config.solver);
    record.times.solve = seconds_since(t);
    if (!reduced.optimal()) {
        record.status = describe_failure("reduced model", reduced);
        return;
    }
    record.objective_reduced = reduced.objective;

    const auto full_model = build_full_model(system, config.mode);
    const auto full = cache.solve(full_model, config.solver);
    if (!full.optimal()) {
        record.status = describe_failure("full model", full);
        return;
    }
    record.objective_full = full.objective;

    const auto fixed = solve(fix_decisions(full_model, reduced, config.mode), config.solver);
    if (!fixed.optimal()) {
        record.status = describe_failure("fixed model", fixed);
        return;
    }
    record.objective_fixed = fixed.objective;
    record.regret_pct = compute_regret(fixed, full);
}

} // namespace

std::vector<ExperimentRecord> run_experiment(const ExperimentConfig& config, FullSolveCache* cache)
{
    if (config.n_rp < 1) {
        throw std::invalid_argument("n_rp must be at least 1");
    }
    if (config.seeds.empty()) {
        throw std::invalid_argument("at least one seed is required");
    }
    FullSolveCache local(config.cache_dir);
    FullSolveCache& shared = cache ? *cache : local;

    std::vector<ExperimentRecord> records;
    for (const auto seed : config.seeds) {
        ExperimentRecord record;
        record.case_name = config.case_name.empty() ? config.data.filename().string() : config.case_name;
        record.mode = config.mode;
        record.method = config.method;
        record.weight_type = config.weight_type;
        record.n_rp = config.n_rp;
        record.seed = seed;
        try {
            run_seed(config, seed, shared, record);
        } catch (const DataError& e) {
            record.status = std::string("data error: ") + e.what();
        } catch (const std::exception& e) {
            record.status = std::string("error: ") + e.what();
        }
        records.push_back(std::move(record));
    }
    return records;
}

// ---------------------------------------------------------------------------
// Result files

namespace {

const std::vector<std::string>& result_columns()
{
    static const std::vector<std::string> columns{
        "case",          "mode",         "method",       "weight_type",       "n_rp",
        "seed",          "status",       "time_read",    "time_cluster",      "time_fit",
        "time_build",    "time_solve",   "time_total",   "objective_reduced", "objective_fixed",
        "objective_full", "regret_pct",  "projection_error_mean", "projection_error_max"};
    return columns;
}

std::string sanitize(const std::string& text)
{
    std::string out = text;
    std::replace(out.begin(), out.end(), ',', ';');
    std::replace(out.begin(), out.end(), '\n', ' ');
    return out;
}

void write_results(const std::vector<ExperimentRecord>& records, const std::vector<std::size_t>& rows,
                   const fs::path& path)
{
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
    const auto& columns = result_columns();
    for (std::size_t i = 0; i < columns.size(); ++i) out << (i ? "," : "") << columns[i];
    out << '\n';
    for (const auto i : rows) {
        const auto& r = records[i];
        const auto num = [](double x) { return csv::format_double(x); };
        out << sanitize(r.case_name) << ',' << to_string(r.mode) << ',' << to_string(r.method) << ','
            << to_string(r.weight_type) << ',' << r.n_rp << ',' << r.seed << ',' << sanitize(r.status) << ','
            << num(r.times.read) << ',' << num(r.times.cluster) << ',' << num(r.times.fit) << ','
            << num(r.times.build) << ',' << num(r.times.solve) << ',' << num(r.times.total()) << ','
            << num(r.objective_reduced) << ',' << num(r.objective_fixed) << ',' << num(r.objective_full) << ','
            << num(r.regret_pct) << ',' << num(r.projection_error_mean) << ',' << num(r.projection_error_max)
            << '\n';
    }
    if (!out) throw std::runtime_error("failed writing " + path.string());
}

} // namespace

std::vector<std::size_t> pareto_front(const std::vector<ExperimentRecord>& records)
{
    std::vector<std::size_t> candidates;
    for (std::size_t i = 0; i < records.size(); ++i) {
        if (records[i].ok()) candidates.push_back(i);
    }
    std::vector<std::size_t> front;
    for (const auto i : candidates) {
        const double ti = records[i].times.total();
        const double ri = records[i].regret_pct;
        const bool dominated = std::any_of(candidates.begin(), candidates.end(), [&](std::size_t j) {
            const double tj = records[j].times.total();
            const double rj = records[j].regret_pct;
            return tj <= ti && rj <= ri && (tj < ti || rj < ri);
        });
        if (!dominated) front.push_back(i);
    }
    std::stable_sort(front.begin(), front.end(), [&](std::size_t a, std::size_t b) {
        return records[a].times.total() < records[b].times.total();
    });
    return front;
}

void emit_plot_data(const std::vector<ExperimentRecord>& records, const fs::path& out_dir)
{
    if (records.empty()) {
        throw std::invalid_argument("no records to emit");
    }
    fs::create_directories(out_dir);
    std::vector<std::size_t> all(records.size());
    for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
    write_results(records, all, out_dir / "results.csv");
    write_results(records, pareto_front(records), out_dir / "pareto.csv");
}

std::vector<ExperimentRecord> parse_results_csv(const fs::path& path)
{
    const auto table = csv::Table::read(path);
    std::vector<std::size_t> col;
    for (const auto& name : result_columns()) col.push_back(table.require(name));

    std::vector<ExperimentRecord> records;
    for (const auto& row : table.rows()) {
        ExperimentRecord r;
        std::size_t k = 0;
        const auto text = [&]() -> const std::string& { return table.field(row, col[k++]); };
        const auto number = [&]() { return table.number(row, col[k++]); };
        try {
            r.case_name = text();
            r.mode = parse_mode(text());
            r.method = parse_method(text());
            r.weight_type = parse_weight_type(text());
            r.n_rp = table.integer(row, col[k++]);
            r.seed = std::stoull(text());
        } catch (const DataError&) {
            throw;
        } catch (const std::exception& e) {
            throw DataError(e.what(), table.file(), row.line);
        }
        r.status = text();
        r.times.read = number();
        r.times.cluster = number();
        r.times.fit = number();
        r.times.build = number();
        r.times.solve = number();
        ++k; // total is derived
        r.objective_reduced = number();
        r.objective_fixed = number();
        r.objective_full = number();
        r.regret_pct = number();
        r.projection_error_mean = number();
        r.projection_error_max = number();
        records.push_back(std::move(r));
    }
    return records;
}

} // namespace blendrp
