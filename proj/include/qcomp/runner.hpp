#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "qcomp/config.hpp"
#include "qcomp/metrics.hpp"

namespace qcomp {

/// One (gamma, b, realization) sweep point.
struct Job {
    std::size_t sinr_index = 0;
    std::size_t bits_index = 0;
    int realization = 0;
};

/// Jobs in output order: gamma outermost, then b, then realization.
std::vector<Job> enumerate_jobs(const ExperimentSpec& spec);

/// Channel seed of a job, derived from the master seed and the job indices.
std::uint64_t job_seed(const ExperimentSpec& spec, const Job& job);

struct RunRecord {
    std::string algorithm;  // "pa" or "baseline"
    std::string status;     // "ok", "infeasible", "numerical_error", "negative_power"
    std::string stop;       // stop reason, "single_solve" for the baseline
    std::string message;    // error text when status != ok
    bool converged = false;
    double noise_variance_w = 0.0;
    double certified_gap_rel = 0.0;
    double sinr_rel_err = 0.0;  // max_k |Gamma_k / gamma_k - 1|
    SolveReport report;         // traces are dropped
};

struct JobResult {
    Job job;
    double target_sinr_db = 0.0;
    Bits bits;
    std::uint64_t seed = 0;
    RunRecord baseline;
    RunRecord pa;
};

/// Generates the job's channels and runs both algorithms on them.
JobResult run_job(const ExperimentSpec& spec, const Job& job);

/// Reference implementation: jobs one after another.
std::vector<JobResult> run_serial(const ExperimentSpec& spec, const std::vector<Job>& jobs);

/// Jobs spread over `threads` OpenMP threads (0: runtime default). Output is in
/// job order and identical to run_serial.
std::vector<JobResult> run_parallel(const ExperimentSpec& spec, const std::vector<Job>& jobs, int threads);

bool all_converged(const std::vector<JobResult>& results);

void write_runs_csv(std::ostream& out, const std::vector<JobResult>& results);
void write_aggregate_csv(std::ostream& out, const ExperimentSpec& spec, const std::vector<JobResult>& results);
void write_comparison_csv(std::ostream& out, const ExperimentSpec& spec, const std::vector<JobResult>& results);
void write_antenna_powers_csv(std::ostream& out, const ExperimentSpec& spec, const std::vector<JobResult>& results);
void write_antenna_cdf_csv(std::ostream& out, const ExperimentSpec& spec, const std::vector<JobResult>& results);
void write_papr_table_csv(std::ostream& out, const ExperimentSpec& spec, const std::vector<JobResult>& results);

/// Writes the preset's CSV files into `dir` (created if needed) and returns
/// their paths.
std::vector<std::string> write_outputs(const std::string& dir, const ExperimentSpec& spec,
                                       const std::vector<JobResult>& results);

/// Human-readable per-sweep-point summary for the console.
void print_summary(std::ostream& out, const ExperimentSpec& spec, const std::vector<JobResult>& results);

}  // namespace qcomp
