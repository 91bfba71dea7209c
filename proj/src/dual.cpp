#include "qcomp/dual.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace qcomp {

namespace {

std::string describe(UserIndex id) {
    return "cell " + std::to_string(id.cell) + ", user " + std::to_string(id.user);
}

// sum_k lambda_k |h_{i,k}|^2, elementwise over antennas.
RVec weighted_channel_power(const CMat& stacked, const RVec& lambda) {
    return stacked.cwiseAbs2() * lambda;
}

// Interference-free power scale used to bound the fixed point.
double power_scale(const ChannelSet& channels, const QuantModel& quant, const RVec& noise, const RVec& targets) {
    const double mean_noise = noise.mean();
    double scale = 0.0;
    for (std::size_t k = 0; k < channels.n_users_total(); ++k) {
        const double gain = channels.own(k).squaredNorm();
        scale = std::max(scale, targets[static_cast<Eigen::Index>(k)] * mean_noise / (quant.alpha * gain));
    }
    return scale;
}

}  // namespace

CMat hermitize(const CMat& a) { return 0.5 * (a + a.adjoint()); }

CMat build_K(const ChannelSet& channels, const QuantModel& quant, const RVec& lambda, const RVec& cell_noise,
             std::size_t cell) {
    const CMat& stacked = channels.from_bs(cell);
    CMat k = quant.alpha * (stacked * lambda.asDiagonal() * stacked.adjoint());
    k.diagonal() += (cell_noise + quant.beta * weighted_channel_power(stacked, lambda)).cast<cdouble>();
    return hermitize(k);
}

CMat build_Z(const ChannelSet& channels, const QuantModel& quant, const RVec& lambda, const RVec& cell_noise,
             std::size_t user) {
    const std::size_t cell = user / channels.n_users();
    const CMat& stacked = channels.from_bs(cell);
    RVec others = lambda;
    others[static_cast<Eigen::Index>(user)] = 0.0;
    const double a2 = quant.alpha * quant.alpha;
    const double ab = quant.alpha * quant.beta;
    CMat z = a2 * (stacked * others.asDiagonal() * stacked.adjoint());
    z.diagonal() += (a2 * cell_noise + ab * (weighted_channel_power(stacked, lambda) + cell_noise)).cast<cdouble>();
    return hermitize(z);
}

CVec mmse_combiner(const CMat& z, const CVec& h, std::optional<UserIndex> user) {
    Eigen::LLT<CMat> llt(hermitize(z));
    if (llt.info() != Eigen::Success) {
        throw NumericalError("MMSE combiner: covariance not positive definite" +
                             (user ? " (" + describe(*user) + ")" : std::string()));
    }
    return llt.solve(h);
}

double ul_sinr(double lambda, const CVec& f, const CMat& z, const CVec& h, const QuantModel& quant) {
    const double signal = quant.alpha * quant.alpha * lambda * std::norm(f.dot(h));
    const double interference = f.dot(z * f).real();
    return signal / interference;
}

FixedPointResult fixed_point_lambda(const ChannelSet& channels, const QuantModel& quant, const RVec& noise,
                                    const RVec& targets, const InnerConfig& cfg, const RVec* warm_start,
                                    std::vector<RVec>* trace) {
    const std::size_t n_cells = channels.n_cells();
    const std::size_t n_users = channels.n_users();
    const std::size_t n_ant = channels.n_antennas();
    const std::size_t n_total = channels.n_users_total();

    FixedPointResult result;
    result.lambda = warm_start ? *warm_start : RVec::Constant(static_cast<Eigen::Index>(n_total), cfg.lambda_init);
    RVec& lambda = result.lambda;
    const double cap = cfg.lambda_cap_factor * power_scale(channels, quant, noise, targets);

    std::vector<CMat> k_mats(n_cells);
    Eigen::LLT<CMat> llt(static_cast<Eigen::Index>(n_ant));
    for (int sweep = 1; sweep <= cfg.max_iter; ++sweep) {
        for (std::size_t c = 0; c < n_cells; ++c) {
            k_mats[c] = build_K(channels, quant, lambda, noise.segment(static_cast<Eigen::Index>(c * n_ant),
                                                                       static_cast<Eigen::Index>(n_ant)),
                                c);
        }
        double change = 0.0;
        for (std::size_t k = 0; k < n_total; ++k) {
            const std::size_t cell = k / n_users;
            const auto kk = static_cast<Eigen::Index>(k);
            llt.compute(k_mats[cell]);
            if (llt.info() != Eigen::Success) {
                throw NumericalError("fixed point: K not positive definite (" + describe(user_of(k, n_users)) + ")");
            }
            const CVec h = channels.own(k);
            const double quad = llt.matrixL().solve(h).squaredNorm();
            const double gamma = targets[kk];
            const double updated = 1.0 / (quant.alpha * (1.0 + 1.0 / gamma) * quad);
            if (!std::isfinite(updated) || updated > cap) {
                throw InfeasibleTargetError("fixed point: power of " + describe(user_of(k, n_users)) +
                                                " exceeds the cap; SINR targets are infeasible",
                                            lambda);
            }
            const double delta = updated - lambda[kk];
            change = std::max(change, std::abs(delta) / updated);
            lambda[kk] = updated;
            if (delta != 0.0) {
                for (std::size_t c = 0; c < n_cells; ++c) {
                    const auto g = channels.h(c, k);
                    k_mats[c].noalias() += (delta * quant.alpha) * g * g.adjoint();
                    k_mats[c].diagonal() += (delta * quant.beta * g.cwiseAbs2()).cast<cdouble>();
                }
            }
        }
        if (trace) {
            trace->push_back(lambda);
        }
        result.iterations = sweep;
        result.residual = change;
        if (change <= cfg.tol) {
            result.converged = true;
            break;
        }
    }
    return result;
}

DualState solve_dual(const ChannelSet& channels, const QuantModel& quant, const RVec& noise, const RVec& targets,
                     const InnerConfig& cfg, const RVec* warm_start) {
    const std::size_t n_ant = channels.n_antennas();
    FixedPointResult fp = fixed_point_lambda(channels, quant, noise, targets, cfg, warm_start);
    DualState state;
    state.lambda = std::move(fp.lambda);
    state.noise = noise;
    state.inner_iterations = fp.iterations;
    state.converged = fp.converged;
    state.residual = fp.residual;
    state.K.reserve(channels.n_cells());
    for (std::size_t c = 0; c < channels.n_cells(); ++c) {
        state.K.push_back(build_K(channels, quant, state.lambda, state.cell_noise(c, n_ant), c));
    }
    state.combiner.reserve(channels.n_users_total());
    for (std::size_t k = 0; k < channels.n_users_total(); ++k) {
        const std::size_t cell = k / channels.n_users();
        const CMat z = build_Z(channels, quant, state.lambda, state.cell_noise(cell, n_ant), k);
        state.combiner.push_back(mmse_combiner(z, channels.own(k), user_of(k, channels.n_users())));
    }
    return state;
}

double dual_objective(const RVec& lambda, double noise_variance) { return lambda.sum() * noise_variance; }

}  // namespace qcomp
