#include "qcomp/outer.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>

namespace qcomp {

RVec subgradient(const CMat& cell_precoders) { return cell_precoders.rowwise().squaredNorm(); }

RVec project_D(const RVec& d, double cap) {
    RVec clipped = d.cwiseMax(0.0);
    if (clipped.sum() <= cap) {
        return clipped;
    }
    std::vector<double> sorted(d.data(), d.data() + d.size());
    std::sort(sorted.begin(), sorted.end(), std::greater<>());
    double prefix = 0.0;
    double threshold = 0.0;
    for (std::size_t r = 0; r < sorted.size(); ++r) {
        prefix += sorted[r];
        const double candidate = (prefix - cap) / static_cast<double>(r + 1);
        if (sorted[r] - candidate > 0.0) {
            threshold = candidate;
        } else {
            break;
        }
    }
    return (d.array() - threshold).cwiseMax(0.0).matrix();
}

RVec project_D(const RVec& d, double cap, double floor) {
    if (floor <= 0.0) {
        return project_D(d, cap);
    }
    const double n = static_cast<double>(d.size());
    return (project_D((d.array() - floor).matrix(), cap - n * floor).array() + floor).matrix();
}

RVec project_noise(const RVec& noise, std::size_t n_cells, std::size_t n_antennas, TraceScope scope, double floor) {
    if (scope == TraceScope::Network) {
        return project_D(noise, static_cast<double>(n_cells * n_antennas), floor);
    }
    RVec out(noise.size());
    const auto n_ant = static_cast<Eigen::Index>(n_antennas);
    for (std::size_t c = 0; c < n_cells; ++c) {
        const auto offset = static_cast<Eigen::Index>(c) * n_ant;
        out.segment(offset, n_ant) = project_D(noise.segment(offset, n_ant), static_cast<double>(n_antennas), floor);
    }
    return out;
}

RVec uniform_targets(const ChannelSet& channels, double target_db) {
    return RVec::Constant(static_cast<Eigen::Index>(channels.n_users_total()), db_to_linear(target_db));
}

namespace {

BeamformerSet precoders_for(const ChannelSet& channels, const QuantModel& quant, const DualState& state,
                            const RVec& targets) {
    const RMat sigma = build_sigma(channels, quant, state.combiner, targets);
    return recover_precoders(sigma, state.combiner, channels.noise_variance(), channels.n_cells(),
                             channels.n_users());
}

}  // namespace

Solution solve_baseline(const ChannelSet& channels, const QuantModel& quant, const RVec& targets,
                        const InnerConfig& cfg, PaprMode papr_mode) {
    const RVec identity = RVec::Ones(static_cast<Eigen::Index>(channels.n_cells() * channels.n_antennas()));
    Solution sol;
    sol.dual = solve_dual(channels, quant, identity, targets, cfg);
    sol.beams = precoders_for(channels, quant, sol.dual, targets);
    SolveReport& report = sol.report;
    report.dual_objective = dual_objective(sol.dual.lambda, channels.noise_variance());
    report.inner_iterations = sol.dual.inner_iterations;
    report.outer_iterations = 0;
    report.converged = sol.dual.converged;
    report.dual_trace = {report.dual_objective};
    report.best_dual_trace = report.dual_trace;
    summarize(report, channels, quant, sol.beams, papr_mode);
    report.max_power_trace = {report.max_antenna_power};
    return sol;
}

double scoped_primal(const RVec& antenna_power, std::size_t n_cells, std::size_t n_antennas, TraceScope scope) {
    if (scope == TraceScope::Network) {
        return static_cast<double>(n_cells * n_antennas) * antenna_power.maxCoeff();
    }
    double sum = 0.0;
    const auto n_ant = static_cast<Eigen::Index>(n_antennas);
    for (std::size_t c = 0; c < n_cells; ++c) {
        sum += antenna_power.segment(static_cast<Eigen::Index>(c) * n_ant, n_ant).maxCoeff();
    }
    return static_cast<double>(n_antennas) * sum;
}

const char* to_string(StopReason reason) {
    switch (reason) {
        case StopReason::GapClosed: return "gap_closed";
        case StopReason::Stationary: return "stationary";
        case StopReason::Stalled: return "stalled";
        case StopReason::IterationLimit: return "iteration_limit";
    }
    return "unknown";
}

namespace {

// Entropic counterpart of project_noise: rescale each budget group to its cap.
RVec rescale_noise(RVec noise, std::size_t n_cells, std::size_t n_antennas, TraceScope scope, double floor) {
    noise = noise.cwiseMax(floor);
    if (scope == TraceScope::Network) {
        return noise * (static_cast<double>(n_cells * n_antennas) / noise.sum());
    }
    const auto n_ant = static_cast<Eigen::Index>(n_antennas);
    for (std::size_t c = 0; c < n_cells; ++c) {
        auto seg = noise.segment(static_cast<Eigen::Index>(c) * n_ant, n_ant);
        seg *= static_cast<double>(n_antennas) / seg.sum();
    }
    return noise;
}

}  // namespace

Solution solve_pa(const ChannelSet& channels, const QuantModel& quant, const RVec& targets, const OuterConfig& cfg) {
    const std::size_t n_cells = channels.n_cells();
    const std::size_t n_ant = channels.n_antennas();
    const double budget = static_cast<double>(n_cells * n_ant);
    const double noise_var = channels.noise_variance();

    RVec noise = RVec::Ones(static_cast<Eigen::Index>(n_cells * n_ant));
    Solution best;
    SolveReport& report = best.report;
    double best_dual = -std::numeric_limits<double>::infinity();
    double best_primal = std::numeric_limits<double>::infinity();
    int last_dual_gain = 1;
    int inner_total = 0;
    bool inner_ok = true;
    double eta0 = 0.0;
    RVec warm;

    for (int iter = 1; iter <= cfg.max_outer_iters; ++iter) {
        DualState state = solve_dual(channels, quant, noise, targets, cfg.inner, iter > 1 ? &warm : nullptr);
        inner_total += state.inner_iterations;
        inner_ok = inner_ok && state.converged;
        warm = state.lambda;

        BeamformerSet beams = precoders_for(channels, quant, state, targets);
        const RVec powers = antenna_powers(quant, beams.precoder, n_cells, channels.n_users());
        const double primal = scoped_primal(powers, n_cells, n_ant, cfg.trace_scope);
        const double dual = dual_objective(state.lambda, noise_var);

        report.dual_trace.push_back(dual);
        report.max_power_trace.push_back(powers.maxCoeff());
        if (dual > best_dual) {
            if (dual > best_dual + cfg.stall_rel_tol * std::abs(best_dual)) {
                last_dual_gain = iter;
            }
            best_dual = dual;
            best.best_noise = noise;
        }
        report.best_dual_trace.push_back(best_dual);

        RVec step(noise.size());
        for (std::size_t c = 0; c < n_cells; ++c) {
            step.segment(static_cast<Eigen::Index>(c * n_ant), static_cast<Eigen::Index>(n_ant)) =
                subgradient(beams.cell_matrix(c));
        }
        if (primal < best_primal) {
            best_primal = primal;
            best.beams = std::move(beams);
            best.dual = std::move(state);
        }
        report.outer_iterations = iter;

        best.certified_gap_rel = (best_primal - best_dual) / best_dual;
        if (best.certified_gap_rel <= cfg.gap_tol) {
            best.stop = StopReason::GapClosed;
            break;
        }
        if (cfg.stall_iters > 0 && iter - last_dual_gain >= cfg.stall_iters) {
            best.stop = StopReason::Stalled;
            break;
        }

        RVec next;
        const double decay = cfg.step_rule == StepRule::Diminishing ? 1.0 / std::sqrt(static_cast<double>(iter)) : 1.0;
        if (cfg.ascent == AscentRule::Euclidean) {
            if (iter == 1) {
                eta0 = cfg.step_scale * budget / step.lpNorm<1>();
            }
            next = project_noise(noise + eta0 * decay * step, n_cells, n_ant, cfg.trace_scope, cfg.noise_floor);
        } else {
            const double eta = cfg.multiplicative_step * decay / step.maxCoeff();
            next = (noise.array() * (eta * step.array()).exp()).matrix();
            next = rescale_noise(std::move(next), n_cells, n_ant, cfg.trace_scope, cfg.noise_floor);
        }
        const double change = (next - noise).lpNorm<Eigen::Infinity>() / noise.lpNorm<Eigen::Infinity>();
        noise = std::move(next);
        if (change <= cfg.outer_tol) {
            best.stop = StopReason::Stationary;
            break;
        }
    }

    report.dual_objective = best_dual;
    report.inner_iterations = inner_total;
    report.converged = best.stop != StopReason::IterationLimit && inner_ok;
    summarize(report, channels, quant, best.beams, cfg.papr_mode);
    return best;
}

}  // namespace qcomp
