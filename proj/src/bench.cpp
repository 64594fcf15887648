#include "igamg/bench.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <random>
#include <sstream>
#include <thread>

#include <json.hpp>

namespace igamg {

using ordered_json = nlohmann::ordered_json;

std::string to_string(CycleType c) {
    switch (c) {
        case CycleType::two_grid: return "twogrid";
        case CycleType::v_cycle: return "v";
        case CycleType::w_cycle: return "w";
    }
    return "?";
}

std::string to_string(SigmaMode m) {
    switch (m) {
        case SigmaMode::theory: return "theory";
        case SigmaMode::preset: return "preset";
        case SigmaMode::explicit_value: return "explicit";
    }
    return "?";
}

std::string to_string(SolverKind s) { return s == SolverKind::mg ? "mg" : "pcg"; }

namespace {

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

FlopCounts snapshot_flops() {
    FlopCounts f;
    f.setup = flops::bucket(flops::Phase::setup);
    f.smooth = flops::bucket(flops::Phase::smooth);
    f.residual = flops::bucket(flops::Phase::residual);
    f.transfer = flops::bucket(flops::Phase::transfer);
    f.coarse = flops::bucket(flops::Phase::coarse);
    f.other = flops::bucket(flops::Phase::other);
    return f;
}

}  // namespace

RunRecord run_single(const RunConfig& config) {
    RunRecord rec;
    rec.config = config;
    flops::reset();

    SolverConfig sc;
    sc.cycle = config.cycle;
    sc.nu_pre = config.nu_pre;
    sc.nu_post = config.nu_post;
    sc.tau = config.tau;
    sc.sigma_mode = config.sigma_mode;
    sc.sigma_scale = config.sigma_scale;
    sc.tol = config.tol;
    sc.max_iter = config.max_iter;

    const auto t0 = std::chrono::steady_clock::now();
    const int coarse = config.cycle == CycleType::two_grid
                           ? config.level - 1
                           : std::min(MultigridHierarchy::default_coarse_level(config.p), config.level);
    MultigridHierarchy hierarchy(config.d, config.p, config.level, coarse, config.sigma_mode,
                                 config.sigma_scale);
    const Vector f = assemble_rhs(hierarchy.level(config.level).space, config.d);
    rec.setup_seconds = seconds_since(t0);

    // Iteration counts are measured from a seeded random initial guess: a
    // zero start leaves only the smooth error components of the smooth
    // right-hand side, which undersells the asymptotic contraction rate.
    std::mt19937 gen(static_cast<std::uint32_t>(config.seed));
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    Vector u0(f.size());
    for (Index i = 0; i < u0.size(); ++i) u0[i] = dist(gen);

    const auto t1 = std::chrono::steady_clock::now();
    const SolveResult sr = config.solver == SolverKind::mg ? solve_mg(hierarchy, f, sc, &u0)
                                                           : solve_pcg(hierarchy, f, sc, &u0);
    rec.solve_seconds = seconds_since(t1);

    rec.iterations = sr.iterations;
    rec.converged = sr.converged;
    rec.failure = sr.failure;
    rec.final_relative_residual = sr.residual_history.empty() ? 0.0 : sr.residual_history.back();
    if (sr.iterations > 0 && rec.final_relative_residual > 0.0)
        rec.contraction_estimate = std::pow(rec.final_relative_residual, 1.0 / sr.iterations);
    rec.flops = snapshot_flops();
    return rec;
}

namespace {

ordered_json record_to_json(const RunRecord& rec) {
    ordered_json j;
    j["d"] = rec.config.d;
    j["p"] = rec.config.p;
    j["level"] = rec.config.level;
    j["cycle"] = to_string(rec.config.cycle);
    j["solver"] = to_string(rec.config.solver);
    j["sigma_mode"] = to_string(rec.config.sigma_mode);
    j["sigma_coefficient"] = effective_sigma_coefficient(rec.config.sigma_mode, rec.config.d,
                                                         rec.config.p, rec.config.sigma_scale);
    j["tau"] = rec.config.tau;
    j["nu_pre"] = rec.config.nu_pre;
    j["nu_post"] = rec.config.nu_post;
    j["tol"] = rec.config.tol;
    j["seed"] = rec.config.seed;
    j["iterations"] = rec.iterations;
    j["converged"] = rec.converged;
    j["final_relative_residual"] = rec.final_relative_residual;
    j["contraction_estimate"] = rec.contraction_estimate;
    j["setup_seconds"] = rec.setup_seconds;
    j["solve_seconds"] = rec.solve_seconds;
    j["flop_counts"] = ordered_json{{"setup", rec.flops.setup},       {"smooth", rec.flops.smooth},
                                    {"residual", rec.flops.residual}, {"transfer", rec.flops.transfer},
                                    {"coarse", rec.flops.coarse},     {"other", rec.flops.other},
                                    {"total", rec.flops.total()}};
    j["failure"] = rec.failure;
    return j;
}

}  // namespace

std::string record_json(const RunRecord& rec) { return record_to_json(rec).dump(2); }

std::string record_csv_header() {
    return "d,p,level,cycle,solver,sigma_mode,tau,nu_pre,nu_post,tol,iterations,converged,"
           "final_relative_residual,contraction_estimate,setup_seconds,solve_seconds,total_flops";
}

std::string record_csv_row(const RunRecord& rec) {
    std::ostringstream os;
    os << rec.config.d << ',' << rec.config.p << ',' << rec.config.level << ','
       << to_string(rec.config.cycle) << ',' << to_string(rec.config.solver) << ','
       << to_string(rec.config.sigma_mode) << ',' << rec.config.tau << ',' << rec.config.nu_pre << ','
       << rec.config.nu_post << ',' << rec.config.tol << ',' << rec.iterations << ','
       << (rec.converged ? 1 : 0) << ',' << rec.final_relative_residual << ','
       << rec.contraction_estimate << ',' << rec.setup_seconds << ',' << rec.solve_seconds << ','
       << rec.flops.total();
    return os.str();
}

TableResult run_table(const RunConfig& base, int level_lo, int level_hi, int degree_lo, int degree_hi) {
    TableResult table;
    for (int l = level_hi; l >= level_lo; --l) table.levels.push_back(l);
    for (int p = degree_lo; p <= degree_hi; ++p) table.degrees.push_back(p);
    const size_t rows = table.levels.size(), cols = table.degrees.size();
    table.iterations.assign(rows, std::vector<int>(cols, -1));
    table.records.resize(rows * cols);
    if (rows == 0 || cols == 0) {
        table.records.clear();
        return table;
    }

    unsigned workers = std::thread::hardware_concurrency();
    if (const char* env = std::getenv("IGAMG_THREADS")) {
        const long v = std::strtol(env, nullptr, 10);
        if (v >= 1) workers = static_cast<unsigned>(v);
    }
    workers = std::min<unsigned>(workers, static_cast<unsigned>(rows * cols));
    if (workers == 0) workers = 1;

    std::atomic<size_t> next{0};
    const auto worker = [&]() {
        for (size_t cell = next.fetch_add(1); cell < rows * cols; cell = next.fetch_add(1)) {
            const size_t i = cell / cols, j = cell % cols;
            RunConfig cfg = base;
            cfg.level = table.levels[i];
            cfg.p = table.degrees[j];
            RunRecord rec;
            try {
                rec = run_single(cfg);
                if (rec.converged) table.iterations[i][j] = rec.iterations;
            } catch (const std::exception& e) {
                rec.config = cfg;
                rec.failure = e.what();
            }
            table.records[cell] = std::move(rec);
        }
    };

    if (workers <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(workers);
        for (unsigned w = 0; w < workers; ++w) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }
    return table;
}

std::string table_csv(const TableResult& table) {
    std::ostringstream os;
    os << "level";
    for (int p : table.degrees) os << ",p" << p;
    os << '\n';
    for (size_t i = 0; i < table.levels.size(); ++i) {
        os << table.levels[i];
        for (size_t j = 0; j < table.degrees.size(); ++j) os << ',' << table.iterations[i][j];
        os << '\n';
    }
    return os.str();
}

std::string table_json(const TableResult& table) {
    ordered_json j;
    j["levels"] = table.levels;
    j["degrees"] = table.degrees;
    j["iterations"] = table.iterations;
    ordered_json recs = ordered_json::array();
    for (const RunRecord& r : table.records) recs.push_back(record_to_json(r));
    j["records"] = std::move(recs);
    return j.dump(2);
}

}  // namespace igamg
