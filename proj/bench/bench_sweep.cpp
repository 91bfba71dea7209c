// Wall-clock comparison of the serial and OpenMP job runners on a small sweep.
// Usage: bench_sweep [threads] [realizations]
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <sstream>

#include <omp.h>

#include "qcomp/runner.hpp"

int main(int argc, char** argv) {
    const int threads = argc > 1 ? std::atoi(argv[1]) : omp_get_max_threads();
    const int realizations = argc > 2 ? std::atoi(argv[2]) : 4;

    std::istringstream in("preset = max_power_vs_sinr\nn_cells = 2\nn_users_per_cell = 2\nn_antennas = 8\n"
                          "target_sinr_db = [-3, 2]\nbits = [3, inf]\nseed = 7\n");
    qcomp::ExperimentSpec spec = qcomp::parse_config(in);
    spec.n_realizations = realizations;
    const auto jobs = qcomp::enumerate_jobs(spec);

    using clock = std::chrono::steady_clock;
    auto t0 = clock::now();
    const auto serial = qcomp::run_serial(spec, jobs);
    auto t1 = clock::now();
    const auto parallel = qcomp::run_parallel(spec, jobs, threads);
    auto t2 = clock::now();

    std::ostringstream a, b;
    qcomp::write_runs_csv(a, serial);
    qcomp::write_runs_csv(b, parallel);

    const double ts = std::chrono::duration<double>(t1 - t0).count();
    const double tp = std::chrono::duration<double>(t2 - t1).count();
    std::printf("jobs %zu  threads %d\n", jobs.size(), threads);
    std::printf("serial    %8.3f s\n", ts);
    std::printf("parallel  %8.3f s  speedup %.2fx\n", tp, ts / tp);
    std::printf("outputs %s\n", a.str() == b.str() ? "identical" : "DIFFER");
    return a.str() == b.str() ? 0 : 1;
}
