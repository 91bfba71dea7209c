#include <filesystem>
#include <fstream>
#include <optional>
#include <iostream>
#include <sstream>

#include <omp.h>

#include "CLI11.hpp"
#include "qcomp/config.hpp"
#include "qcomp/runner.hpp"
#include "qcomp/selftest.hpp"

namespace {

enum ExitCode { kOk = 0, kFailure = 1, kConfig = 2, kNotConverged = 3 };

int cmd_run(const std::string& path, const std::string& preset, const std::optional<std::uint64_t>& seed,
            const std::string& out_dir, const std::optional<int>& jobs, bool allow_nonconverged) {
    qcomp::ExperimentSpec spec = qcomp::load_config(path);
    if (!preset.empty()) spec.preset = qcomp::parse_preset(preset);
    if (seed) spec.network.seed = *seed;
    if (!out_dir.empty()) spec.output_dir = out_dir;
    if (jobs) spec.jobs = *jobs;
    qcomp::validate(spec);

    const auto job_list = qcomp::enumerate_jobs(spec);
    const int threads = spec.jobs > 0 ? spec.jobs : omp_get_max_threads();
    std::cerr << "running " << job_list.size() << " sweep points (" << qcomp::to_string(spec.preset) << ") on "
              << threads << " thread(s)\n";
    const auto results = qcomp::run_parallel(spec, job_list, threads);

    for (const auto& path_out : qcomp::write_outputs(spec.output_dir, spec, results)) {
        std::cerr << "wrote " << path_out << "\n";
    }
    {
        std::ofstream cfg_copy(std::filesystem::path(spec.output_dir) / "config.txt");
        qcomp::write_config(cfg_copy, spec);
    }
    qcomp::print_summary(std::cout, spec, results);

    int failed = 0;
    for (const auto& r : results) {
        for (const auto* rec : {&r.baseline, &r.pa}) {
            if (!rec->converged) {
                ++failed;
                std::cerr << "not converged: " << rec->algorithm << " gamma=" << r.target_sinr_db
                          << " bits=" << r.bits.to_string() << " realization=" << r.job.realization << " status="
                          << rec->status << " stop=" << rec->stop;
                if (!rec->message.empty()) std::cerr << " (" << rec->message << ")";
                std::cerr << "\n";
            }
        }
    }
    if (failed > 0 && !allow_nonconverged) {
        std::cerr << failed << " run(s) did not converge; pass --allow-nonconverged to accept\n";
        return kNotConverged;
    }
    return kOk;
}

int cmd_validate(const std::string& path) {
    const qcomp::ExperimentSpec spec = qcomp::load_config(path);
    qcomp::validate(spec);
    std::cout << "# " << path << ": ok, " << qcomp::enumerate_jobs(spec).size() << " sweep points\n";
    qcomp::write_config(std::cout, spec);
    return kOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Per-antenna power minimax CoMP beamforming with low-resolution DACs"};
    app.require_subcommand(1);

    std::string run_config, preset, out_dir;
    std::optional<std::uint64_t> seed;
    std::optional<int> jobs;
    bool allow_nonconverged = false;
    auto* run = app.add_subcommand("run", "Run an experiment and write CSV results");
    run->add_option("config", run_config, "Config file")->required()->check(CLI::ExistingFile);
    run->add_option("--preset", preset, "max_power_vs_sinr | antenna_cdf | papr_table | single_run");
    run->add_option("--seed", seed, "Master seed");
    run->add_option("--out", out_dir, "Output directory");
    run->add_option("--jobs", jobs, "Worker threads (0: all)")->check(CLI::NonNegativeNumber);
    run->add_flag("--allow-nonconverged", allow_nonconverged, "Exit 0 even if some runs did not converge");

    std::string validate_config;
    auto* validate = app.add_subcommand("validate", "Parse and check a config file, print the effective config");
    validate->add_option("config", validate_config, "Config file")->required()->check(CLI::ExistingFile);

    auto* selftest = app.add_subcommand("selftest", "Run the built-in worked-example checks");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*run) return cmd_run(run_config, preset, seed, out_dir, jobs, allow_nonconverged);
        if (*validate) return cmd_validate(validate_config);
        if (*selftest) return qcomp::run_selftest(std::cout) == 0 ? kOk : kFailure;
    } catch (const qcomp::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kConfig;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kFailure;
    }
    return kOk;
}
