#include "qcomp/runner.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <ostream>

#include <omp.h>

#include "qcomp/outer.hpp"

namespace qcomp {

std::vector<Job> enumerate_jobs(const ExperimentSpec& spec) {
    std::vector<Job> jobs;
    for (std::size_t g = 0; g < spec.target_sinr_db.size(); ++g) {
        for (std::size_t b = 0; b < spec.bits.size(); ++b) {
            for (int r = 0; r < spec.n_realizations; ++r) {
                jobs.push_back({g, b, r});
            }
        }
    }
    return jobs;
}

std::uint64_t job_seed(const ExperimentSpec& spec, const Job& job) {
    const auto r = static_cast<std::uint64_t>(job.realization);
    if (spec.share_channels_across_sweep) {
        return RngStream::derive(spec.network.seed, {r, 0, 0});
    }
    return RngStream::derive(spec.network.seed, {r, job.sinr_index, job.bits_index});
}

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

double dbm(double watts) { return linear_to_db(watts) + 30.0; }

template <class Solve>
RunRecord run_algorithm(const char* name, const ChannelSet& channels, const QuantModel& quant, const RVec& targets,
                        Solve solve) {
    RunRecord rec;
    rec.algorithm = name;
    rec.noise_variance_w = channels.noise_variance();
    rec.status = "ok";
    rec.report.max_antenna_power = kNaN;
    rec.report.total_power = kNaN;
    rec.report.dual_objective = kNaN;
    rec.report.duality_gap_rel = kNaN;
    rec.report.papr_db = kNaN;
    rec.report.operating_range_db = kNaN;
    rec.certified_gap_rel = kNaN;
    rec.sinr_rel_err = kNaN;
    rec.stop = "none";
    try {
        Solution sol = solve(channels, quant, targets);
        rec.report = std::move(sol.report);
        rec.report.dual_trace.clear();
        rec.report.best_dual_trace.clear();
        rec.report.max_power_trace.clear();
        rec.converged = rec.report.converged;
        rec.certified_gap_rel = sol.certified_gap_rel;
        rec.stop = std::string(name) == "baseline" ? "single_solve" : to_string(sol.stop);
        rec.sinr_rel_err = ((rec.report.achieved_sinr.array() / targets.array()) - 1.0).abs().maxCoeff();
    } catch (const InfeasibleTargetError& e) {
        rec.status = "infeasible";
        rec.message = e.what();
    } catch (const NegativePowerError& e) {
        rec.status = "negative_power";
        rec.message = e.what();
    } catch (const NumericalError& e) {
        rec.status = "numerical_error";
        rec.message = e.what();
    }
    return rec;
}

}  // namespace

JobResult run_job(const ExperimentSpec& spec, const Job& job) {
    JobResult out;
    out.job = job;
    out.target_sinr_db = spec.target_sinr_db[job.sinr_index];
    out.bits = spec.bits[job.bits_index];
    out.seed = job_seed(spec, job);

    NetworkConfig net = spec.network;
    net.target_sinr_db = out.target_sinr_db;
    net.bits = out.bits;
    const ChannelSet channels = make_realization(net, out.seed);
    const QuantModel quant = from_bits(out.bits);
    const RVec targets = uniform_targets(channels, out.target_sinr_db);
    const OuterConfig& solver = spec.solver;

    out.baseline = run_algorithm("baseline", channels, quant, targets, [&](const auto& ch, const auto& q, const auto& t) {
        Solution s = solve_baseline(ch, q, t, solver.inner, solver.papr_mode);
        s.certified_gap_rel = kNaN;
        return s;
    });
    out.pa = run_algorithm("pa", channels, quant, targets,
                           [&](const auto& ch, const auto& q, const auto& t) { return solve_pa(ch, q, t, solver); });
    return out;
}

std::vector<JobResult> run_serial(const ExperimentSpec& spec, const std::vector<Job>& jobs) {
    std::vector<JobResult> results;
    results.reserve(jobs.size());
    for (const Job& job : jobs) {
        results.push_back(run_job(spec, job));
    }
    return results;
}

std::vector<JobResult> run_parallel(const ExperimentSpec& spec, const std::vector<Job>& jobs, int threads) {
    std::vector<JobResult> results(jobs.size());
    const int n_threads = threads > 0 ? threads : omp_get_max_threads();
    const auto n = static_cast<long>(jobs.size());
    std::vector<std::string> errors(jobs.size());
#pragma omp parallel for schedule(dynamic, 1) num_threads(n_threads)
    for (long i = 0; i < n; ++i) {
        try {
            results[static_cast<std::size_t>(i)] = run_job(spec, jobs[static_cast<std::size_t>(i)]);
        } catch (const std::exception& e) {
            errors[static_cast<std::size_t>(i)] = e.what();
        }
    }
    for (const auto& e : errors) {
        if (!e.empty()) {
            throw Error(e);
        }
    }
    return results;
}

bool all_converged(const std::vector<JobResult>& results) {
    return std::all_of(results.begin(), results.end(),
                       [](const JobResult& r) { return r.baseline.converged && r.pa.converged; });
}

namespace {

std::string fmt(double v) {
    if (std::isnan(v)) {
        return "nan";
    }
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.10g", v);
    return buf;
}

// Linear interpolation between order statistics.
double percentile(std::vector<double> v, double q) {
    if (v.empty()) {
        return kNaN;
    }
    std::sort(v.begin(), v.end());
    const double pos = q * static_cast<double>(v.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const std::size_t hi = std::min(lo + 1, v.size() - 1);
    return v[lo] + (pos - static_cast<double>(lo)) * (v[hi] - v[lo]);
}

double mean(const std::vector<double>& v) {
    if (v.empty()) {
        return kNaN;
    }
    double s = 0.0;
    for (double x : v) s += x;
    return s / static_cast<double>(v.size());
}

// Results belonging to one sweep point, in realization order.
std::vector<const JobResult*> at_point(const std::vector<JobResult>& results, std::size_t g, std::size_t b) {
    std::vector<const JobResult*> out;
    for (const auto& r : results) {
        if (r.job.sinr_index == g && r.job.bits_index == b) {
            out.push_back(&r);
        }
    }
    return out;
}

}  // namespace

void write_runs_csv(std::ostream& out, const std::vector<JobResult>& results) {
    out << "algorithm,target_sinr_db,bits,realization,seed,status,converged,stop_reason,outer_iterations,"
           "inner_iterations,noise_variance_w,max_antenna_power_w,max_antenna_power_dbm,"
           "max_antenna_power_db_rel_noise,total_power_w,total_power_dbm,dual_objective_w,duality_gap_rel,"
           "certified_gap_rel,papr_db,operating_range_db,sinr_rel_err\n";
    for (const auto& r : results) {
        for (const RunRecord* rec : {&r.baseline, &r.pa}) {
            const SolveReport& rep = rec->report;
            out << rec->algorithm << ',' << fmt(r.target_sinr_db) << ',' << r.bits.to_string() << ','
                << r.job.realization << ',' << r.seed << ',' << rec->status << ',' << (rec->converged ? 1 : 0)
                << ',' << rec->stop << ',' << rep.outer_iterations << ',' << rep.inner_iterations << ','
                << fmt(rec->noise_variance_w) << ',' << fmt(rep.max_antenna_power) << ','
                << fmt(dbm(rep.max_antenna_power)) << ','
                << fmt(linear_to_db(rep.max_antenna_power / rec->noise_variance_w)) << ',' << fmt(rep.total_power)
                << ',' << fmt(dbm(rep.total_power)) << ',' << fmt(rep.dual_objective) << ','
                << fmt(rep.duality_gap_rel) << ',' << fmt(rec->certified_gap_rel) << ',' << fmt(rep.papr_db) << ','
                << fmt(rep.operating_range_db) << ',' << fmt(rec->sinr_rel_err) << '\n';
        }
    }
}

void write_aggregate_csv(std::ostream& out, const ExperimentSpec& spec, const std::vector<JobResult>& results) {
    out << "algorithm,target_sinr_db,bits,n_runs,n_ok,n_converged,max_antenna_power_dbm_mean,"
           "max_antenna_power_dbm_p10,max_antenna_power_dbm_p50,max_antenna_power_dbm_p90,"
           "max_antenna_power_db_rel_noise_mean,total_power_dbm_mean,papr_db_mean,operating_range_db_mean,"
           "duality_gap_rel_max\n";
    for (std::size_t g = 0; g < spec.target_sinr_db.size(); ++g) {
        for (std::size_t b = 0; b < spec.bits.size(); ++b) {
            const auto point = at_point(results, g, b);
            for (const bool pa : {false, true}) {
                std::vector<double> p0, p0_rel, total, papr, range;
                double gap_max = kNaN;
                int n_ok = 0, n_conv = 0;
                for (const JobResult* r : point) {
                    const RunRecord& rec = pa ? r->pa : r->baseline;
                    n_conv += rec.converged ? 1 : 0;
                    if (rec.status != "ok") continue;
                    ++n_ok;
                    const SolveReport& rep = rec.report;
                    p0.push_back(dbm(rep.max_antenna_power));
                    p0_rel.push_back(linear_to_db(rep.max_antenna_power / rec.noise_variance_w));
                    total.push_back(dbm(rep.total_power));
                    papr.push_back(rep.papr_db);
                    range.push_back(rep.operating_range_db);
                    if (std::isnan(gap_max) || rep.duality_gap_rel > gap_max) gap_max = rep.duality_gap_rel;
                }
                out << (pa ? "pa" : "baseline") << ',' << fmt(spec.target_sinr_db[g]) << ','
                    << spec.bits[b].to_string() << ',' << point.size() << ',' << n_ok << ',' << n_conv << ','
                    << fmt(mean(p0)) << ',' << fmt(percentile(p0, 0.1)) << ',' << fmt(percentile(p0, 0.5)) << ','
                    << fmt(percentile(p0, 0.9)) << ',' << fmt(mean(p0_rel)) << ',' << fmt(mean(total)) << ','
                    << fmt(mean(papr)) << ',' << fmt(mean(range)) << ',' << fmt(gap_max) << '\n';
            }
        }
    }
}

void write_comparison_csv(std::ostream& out, const ExperimentSpec& spec, const std::vector<JobResult>& results) {
    out << "target_sinr_db,bits,n_pairs,max_power_gain_db_mean,max_power_gain_db_min,max_power_gain_db_max,"
           "total_power_penalty_db_mean,papr_baseline_db_mean,papr_pa_db_mean,papr_reduction_db_mean,"
           "operating_range_baseline_db_mean,operating_range_pa_db_mean,max_power_violations,"
           "total_power_violations\n";
    constexpr double kRel = 1e-9;
    for (std::size_t g = 0; g < spec.target_sinr_db.size(); ++g) {
        for (std::size_t b = 0; b < spec.bits.size(); ++b) {
            std::vector<double> gain, penalty, papr_bl, papr_pa, range_bl, range_pa;
            int max_viol = 0, total_viol = 0;
            for (const JobResult* r : at_point(results, g, b)) {
                if (r->baseline.status != "ok" || r->pa.status != "ok") continue;
                const SolveReport& bl = r->baseline.report;
                const SolveReport& pa = r->pa.report;
                gain.push_back(linear_to_db(bl.max_antenna_power / pa.max_antenna_power));
                penalty.push_back(linear_to_db(pa.total_power / bl.total_power));
                papr_bl.push_back(bl.papr_db);
                papr_pa.push_back(pa.papr_db);
                range_bl.push_back(bl.operating_range_db);
                range_pa.push_back(pa.operating_range_db);
                max_viol += pa.max_antenna_power > bl.max_antenna_power * (1.0 + kRel) ? 1 : 0;
                total_viol += bl.total_power > pa.total_power * (1.0 + kRel) ? 1 : 0;
            }
            const auto [gmin, gmax] = gain.empty() ? std::pair{kNaN, kNaN}
                                                   : std::pair{*std::min_element(gain.begin(), gain.end()),
                                                               *std::max_element(gain.begin(), gain.end())};
            out << fmt(spec.target_sinr_db[g]) << ',' << spec.bits[b].to_string() << ',' << gain.size() << ','
                << fmt(mean(gain)) << ',' << fmt(gmin) << ',' << fmt(gmax) << ',' << fmt(mean(penalty)) << ','
                << fmt(mean(papr_bl)) << ',' << fmt(mean(papr_pa)) << ',' << fmt(mean(papr_bl) - mean(papr_pa))
                << ',' << fmt(mean(range_bl)) << ',' << fmt(mean(range_pa)) << ',' << max_viol << ','
                << total_viol << '\n';
        }
    }
}

void write_antenna_powers_csv(std::ostream& out, const ExperimentSpec& spec, const std::vector<JobResult>& results) {
    out << "algorithm,target_sinr_db,bits,realization,cell,antenna,power_w,power_dbm\n";
    const std::size_t nb = spec.network.n_antennas;
    for (const auto& r : results) {
        for (const RunRecord* rec : {&r.baseline, &r.pa}) {
            const RVec& p = rec->report.antenna_power;
            for (Eigen::Index m = 0; m < p.size(); ++m) {
                const auto idx = static_cast<std::size_t>(m);
                out << rec->algorithm << ',' << fmt(r.target_sinr_db) << ',' << r.bits.to_string() << ','
                    << r.job.realization << ',' << idx / nb << ',' << idx % nb << ',' << fmt(p(m)) << ','
                    << fmt(dbm(p(m))) << '\n';
            }
        }
    }
}

void write_antenna_cdf_csv(std::ostream& out, const ExperimentSpec& spec, const std::vector<JobResult>& results) {
    out << "algorithm,target_sinr_db,bits,antenna_power_dbm,probability\n";
    for (std::size_t g = 0; g < spec.target_sinr_db.size(); ++g) {
        for (std::size_t b = 0; b < spec.bits.size(); ++b) {
            const auto point = at_point(results, g, b);
            for (const bool pa : {false, true}) {
                std::vector<double> values;
                for (const JobResult* r : point) {
                    const RunRecord& rec = pa ? r->pa : r->baseline;
                    if (rec.status != "ok") continue;
                    for (Eigen::Index m = 0; m < rec.report.antenna_power.size(); ++m) {
                        values.push_back(dbm(std::max(rec.report.antenna_power(m), 1e-300)));
                    }
                }
                if (values.empty()) continue;
                for (const CdfStep& s : empirical_cdf(values)) {
                    out << (pa ? "pa" : "baseline") << ',' << fmt(spec.target_sinr_db[g]) << ','
                        << spec.bits[b].to_string() << ',' << fmt(s.value) << ',' << fmt(s.probability) << '\n';
                }
            }
        }
    }
}

void write_papr_table_csv(std::ostream& out, const ExperimentSpec& spec, const std::vector<JobResult>& results) {
    out << "target_sinr_db,bits,n_pairs,papr_baseline_db_mean,papr_pa_db_mean,papr_reduction_db_mean\n";
    for (std::size_t g = 0; g < spec.target_sinr_db.size(); ++g) {
        for (std::size_t b = 0; b < spec.bits.size(); ++b) {
            std::vector<double> bl, pa;
            for (const JobResult* r : at_point(results, g, b)) {
                if (r->baseline.status != "ok" || r->pa.status != "ok") continue;
                bl.push_back(r->baseline.report.papr_db);
                pa.push_back(r->pa.report.papr_db);
            }
            out << fmt(spec.target_sinr_db[g]) << ',' << spec.bits[b].to_string() << ',' << bl.size() << ','
                << fmt(mean(bl)) << ',' << fmt(mean(pa)) << ',' << fmt(mean(bl) - mean(pa)) << '\n';
        }
    }
}

std::vector<std::string> write_outputs(const std::string& dir, const ExperimentSpec& spec,
                                       const std::vector<JobResult>& results) {
    namespace fs = std::filesystem;
    fs::create_directories(dir);
    std::vector<std::string> written;
    auto emit = [&](const char* name, auto writer) {
        const std::string path = (fs::path(dir) / name).string();
        std::ofstream f(path, std::ios::binary);
        if (!f) {
            throw Error("cannot write '" + path + "'");
        }
        writer(f);
        if (!f) {
            throw Error("write failed for '" + path + "'");
        }
        written.push_back(path);
    };
    emit("runs.csv", [&](std::ostream& o) { write_runs_csv(o, results); });
    emit("aggregate.csv", [&](std::ostream& o) { write_aggregate_csv(o, spec, results); });
    emit("comparison.csv", [&](std::ostream& o) { write_comparison_csv(o, spec, results); });
    if (spec.preset == Preset::AntennaCdf || spec.preset == Preset::SingleRun) {
        emit("antenna_powers.csv", [&](std::ostream& o) { write_antenna_powers_csv(o, spec, results); });
        emit("antenna_cdf.csv", [&](std::ostream& o) { write_antenna_cdf_csv(o, spec, results); });
    }
    if (spec.preset == Preset::PaprTable) {
        emit("papr_table.csv", [&](std::ostream& o) { write_papr_table_csv(o, spec, results); });
    }
    return written;
}

void print_summary(std::ostream& out, const ExperimentSpec& spec, const std::vector<JobResult>& results) {
    char line[256];
    std::snprintf(line, sizeof line, "%-8s %-5s %5s %7s %14s %14s %9s %10s %10s\n", "gamma_dB", "bits", "runs",
                  "conv", "p0_base_dBm", "p0_pa_dBm", "gain_dB", "papr_base", "papr_pa");
    out << line;
    for (std::size_t g = 0; g < spec.target_sinr_db.size(); ++g) {
        for (std::size_t b = 0; b < spec.bits.size(); ++b) {
            std::vector<double> p_bl, p_pa, gain, papr_bl, papr_pa;
            int conv = 0;
            const auto point = at_point(results, g, b);
            for (const JobResult* r : point) {
                conv += r->pa.converged && r->baseline.converged ? 1 : 0;
                if (r->baseline.status != "ok" || r->pa.status != "ok") continue;
                p_bl.push_back(dbm(r->baseline.report.max_antenna_power));
                p_pa.push_back(dbm(r->pa.report.max_antenna_power));
                gain.push_back(p_bl.back() - p_pa.back());
                papr_bl.push_back(r->baseline.report.papr_db);
                papr_pa.push_back(r->pa.report.papr_db);
            }
            std::snprintf(line, sizeof line, "%-8.2f %-5s %5zu %7d %14.3f %14.3f %9.3f %10.3f %10.3f\n",
                          spec.target_sinr_db[g], spec.bits[b].to_string().c_str(), point.size(), conv, mean(p_bl),
                          mean(p_pa), mean(gain), mean(papr_bl), mean(papr_pa));
            out << line;
        }
    }
}

}  // namespace qcomp
