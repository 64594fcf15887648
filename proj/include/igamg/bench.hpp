#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "igamg/multigrid.hpp"

namespace igamg {

enum class SolverKind { mg, pcg };

std::string to_string(CycleType c);
std::string to_string(SigmaMode m);
std::string to_string(SolverKind s);

struct RunConfig {
    int d = 2;
    int p = 2;
    int level = 5;
    CycleType cycle = CycleType::v_cycle;
    SolverKind solver = SolverKind::mg;
    SigmaMode sigma_mode = SigmaMode::preset;
    double sigma_scale = 0.0;
    double tau = 1.0;
    int nu_pre = 1;
    int nu_post = 1;
    double tol = 1e-8;
    int max_iter = 500;
    std::uint64_t seed = 1234;
};

struct FlopCounts {
    std::uint64_t setup = 0, smooth = 0, residual = 0, transfer = 0, coarse = 0, other = 0;
    std::uint64_t total() const { return setup + smooth + residual + transfer + coarse + other; }
};

struct RunRecord {
    RunConfig config;
    int iterations = 0;
    bool converged = false;
    double final_relative_residual = 0.0;
    double contraction_estimate = 0.0;
    double setup_seconds = 0.0;
    double solve_seconds = 0.0;
    FlopCounts flops;
    std::string failure;
};

RunRecord run_single(const RunConfig& config);

std::string record_json(const RunRecord& rec);
std::string record_csv_header();
std::string record_csv_row(const RunRecord& rec);

struct TableResult {
    std::vector<int> levels;   // descending
    std::vector<int> degrees;  // ascending
    std::vector<std::vector<int>> iterations;  // [level][degree], -1 on failure
    std::vector<RunRecord> records;
};

// Sweeps (level, degree) cells; cells run concurrently, capped by the
// IGAMG_THREADS environment variable.
TableResult run_table(const RunConfig& base, int level_lo, int level_hi, int degree_lo, int degree_hi);

std::string table_csv(const TableResult& table);
std::string table_json(const TableResult& table);

struct CheckOptions {
    int max_p = 14;
    int max_level = 6;
    std::uint64_t seed = 1234;
};

// Named invariant suites: splitting | smoother | kron | coarse-approx | all.
// Prints one line per invariant with measured values; returns 0 if all hold.
int run_check_suite(const std::string& suite, const CheckOptions& opts, std::ostream& out);

}  // namespace igamg
