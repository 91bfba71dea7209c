#include "qcomp/primal.hpp"

#include <cmath>

namespace qcomp {

CMat BeamformerSet::cell_matrix(std::size_t cell) const {
    const auto n_ant = precoder.empty() ? Eigen::Index{0} : precoder.front().size();
    CMat w(n_ant, static_cast<Eigen::Index>(n_users));
    for (std::size_t u = 0; u < n_users; ++u) {
        w.col(static_cast<Eigen::Index>(u)) = precoder[cell * n_users + u];
    }
    return w;
}

RMat build_sigma(const ChannelSet& channels, const QuantModel& quant, const std::vector<CVec>& combiners,
                 const RVec& targets) {
    const std::size_t n_total = channels.n_users_total();
    const std::size_t n_users = channels.n_users();
    const double a2 = quant.alpha * quant.alpha;
    const double ab = quant.alpha * quant.beta;
    RMat sigma(static_cast<Eigen::Index>(n_total), static_cast<Eigen::Index>(n_total));
    for (std::size_t victim = 0; victim < n_total; ++victim) {
        for (std::size_t source = 0; source < n_total; ++source) {
            const auto g = channels.h(source / n_users, victim);
            const CVec& f = combiners[source];
            const double coherent = std::norm(g.dot(f));
            const double distortion = (g.cwiseAbs2().array() * f.cwiseAbs2().array()).sum();
            double entry = -ab * distortion;
            if (victim == source) {
                entry += a2 / targets[static_cast<Eigen::Index>(victim)] * coherent;
            } else {
                entry -= a2 * coherent;
            }
            sigma(static_cast<Eigen::Index>(victim), static_cast<Eigen::Index>(source)) = entry;
        }
    }
    return sigma;
}

BeamformerSet recover_precoders(const RMat& sigma, const std::vector<CVec>& combiners, double noise_variance,
                                std::size_t n_cells, std::size_t n_users) {
    // Each column carries the arbitrary scale of its combiner, which can span
    // many decades under pathloss. Normalize by the diagonal before judging
    // the conditioning.
    const RVec scale = sigma.diagonal().cwiseAbs();
    if (!scale.allFinite() || (scale.array() == 0.0).any()) {
        throw NumericalError("precoder recovery: power system is singular");
    }
    Eigen::PartialPivLU<RMat> lu(sigma * scale.cwiseInverse().asDiagonal());
    if (!std::isfinite(lu.rcond()) || lu.rcond() < 1e-15) {
        throw NumericalError("precoder recovery: power system is singular");
    }
    RVec tau = lu.solve(RVec::Constant(sigma.rows(), noise_variance)).cwiseQuotient(scale);
    if (!tau.allFinite()) {
        throw NumericalError("precoder recovery: non-finite powers");
    }
    const double floor = -kNegativeTauTolerance * tau.cwiseAbs().maxCoeff();
    for (Eigen::Index k = 0; k < tau.size(); ++k) {
        if (tau[k] < floor) {
            throw NegativePowerError("precoder recovery: negative power for user " + std::to_string(k), tau);
        }
        tau[k] = std::max(tau[k], 0.0);
    }

    BeamformerSet beams;
    beams.n_cells = n_cells;
    beams.n_users = n_users;
    beams.tau = tau;
    beams.combiner = combiners;
    beams.precoder.reserve(combiners.size());
    for (std::size_t k = 0; k < combiners.size(); ++k) {
        beams.precoder.push_back(std::sqrt(tau[static_cast<Eigen::Index>(k)]) * combiners[k]);
    }
    return beams;
}

}  // namespace qcomp
