#include "qcomp/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace qcomp {

namespace {

RVec per_bs_quant_noise(const QuantModel& quant, const std::vector<CVec>& precoders, std::size_t bs,
                        std::size_t n_users) {
    RVec diag = RVec::Zero(precoders[bs * n_users].size());
    for (std::size_t u = 0; u < n_users; ++u) {
        diag += precoders[bs * n_users + u].cwiseAbs2();
    }
    return quant.alpha * quant.beta * diag;
}

}  // namespace

RVec quant_noise_terms(const ChannelSet& channels, const QuantModel& quant, const std::vector<CVec>& precoders) {
    const std::size_t n_total = channels.n_users_total();
    RVec q = RVec::Zero(static_cast<Eigen::Index>(n_total));
    for (std::size_t bs = 0; bs < channels.n_cells(); ++bs) {
        const RVec cov = per_bs_quant_noise(quant, precoders, bs, channels.n_users());
        for (std::size_t k = 0; k < n_total; ++k) {
            q[static_cast<Eigen::Index>(k)] += channels.h(bs, k).cwiseAbs2().dot(cov);
        }
    }
    return q;
}

RVec quant_noise_terms_by_precoder(const ChannelSet& channels, const QuantModel& quant,
                                   const std::vector<CVec>& precoders) {
    const std::size_t n_total = channels.n_users_total();
    RVec q = RVec::Zero(static_cast<Eigen::Index>(n_total));
    for (std::size_t k = 0; k < n_total; ++k) {
        double sum = 0.0;
        for (std::size_t l = 0; l < n_total; ++l) {
            const auto g = channels.h(l / channels.n_users(), k);
            sum += (g.cwiseAbs2().array() * precoders[l].cwiseAbs2().array()).sum();
        }
        q[static_cast<Eigen::Index>(k)] = quant.alpha * quant.beta * sum;
    }
    return q;
}

RVec dl_sinr(const ChannelSet& channels, const QuantModel& quant, const std::vector<CVec>& precoders) {
    const std::size_t n_total = channels.n_users_total();
    const std::size_t n_users = channels.n_users();
    const double a2 = quant.alpha * quant.alpha;
    const RVec q = quant_noise_terms(channels, quant, precoders);
    RVec sinr(static_cast<Eigen::Index>(n_total));
    for (std::size_t k = 0; k < n_total; ++k) {
        double signal = 0.0;
        double interference = 0.0;
        for (std::size_t l = 0; l < n_total; ++l) {
            const double coupling = std::norm(channels.h(l / n_users, k).dot(precoders[l]));
            (l == k ? signal : interference) += a2 * coupling;
        }
        sinr[static_cast<Eigen::Index>(k)] =
            signal / (interference + q[static_cast<Eigen::Index>(k)] + channels.noise_variance());
    }
    return sinr;
}

RVec antenna_powers(const QuantModel& quant, const std::vector<CVec>& precoders, std::size_t n_cells,
                    std::size_t n_users) {
    const Eigen::Index n_ant = precoders.front().size();
    RVec powers = RVec::Zero(static_cast<Eigen::Index>(n_cells) * n_ant);
    for (std::size_t k = 0; k < precoders.size(); ++k) {
        powers.segment(static_cast<Eigen::Index>(k / n_users) * n_ant, n_ant) += precoders[k].cwiseAbs2();
    }
    return quant.alpha * powers;
}

double papr_db(std::span<const double> powers) {
    if (powers.empty()) {
        throw std::domain_error("PAPR of an empty power set");
    }
    const double peak = *std::max_element(powers.begin(), powers.end());
    if (!(peak > 0.0)) {
        throw std::domain_error("PAPR undefined: no antenna carries power");
    }
    const double mean = std::accumulate(powers.begin(), powers.end(), 0.0) / static_cast<double>(powers.size());
    return linear_to_db(peak / mean);
}

double papr_per_bs_db(std::span<const double> powers, std::size_t n_antennas) {
    if (n_antennas == 0 || powers.size() % n_antennas != 0) {
        throw std::invalid_argument("per-BS PAPR: power count is not a multiple of the antenna count");
    }
    const std::size_t n_bs = powers.size() / n_antennas;
    double sum = 0.0;
    for (std::size_t b = 0; b < n_bs; ++b) {
        sum += papr_db(powers.subspan(b * n_antennas, n_antennas));
    }
    return sum / static_cast<double>(n_bs);
}

double papr_db(const RVec& powers, std::size_t n_antennas, PaprMode mode) {
    std::span<const double> view(powers.data(), static_cast<std::size_t>(powers.size()));
    return mode == PaprMode::Network ? papr_db(view) : papr_per_bs_db(view, n_antennas);
}

double operating_range_db(std::span<const double> powers) {
    if (powers.empty()) {
        throw std::domain_error("operating range of an empty power set");
    }
    const auto [lo, hi] = std::minmax_element(powers.begin(), powers.end());
    if (!(*hi > 0.0)) {
        throw std::domain_error("operating range undefined: no antenna carries power");
    }
    return linear_to_db(*hi / std::max(*lo, 1e-12 * *hi));
}

std::vector<CdfStep> empirical_cdf(std::span<const double> values) {
    if (values.empty()) {
        throw std::invalid_argument("empirical CDF of an empty sample");
    }
    std::vector<double> sorted(values.begin(), values.end());
    std::stable_sort(sorted.begin(), sorted.end());
    const auto n = static_cast<double>(sorted.size());
    std::vector<CdfStep> steps;
    for (std::size_t i = 0; i < sorted.size(); ++i) {
        if (i + 1 < sorted.size() && sorted[i + 1] == sorted[i]) {
            continue;
        }
        steps.push_back({sorted[i], static_cast<double>(i + 1) / n});
    }
    return steps;
}

double duality_gap_rel(std::size_t n_cells, std::size_t n_antennas, double max_antenna_power, double dual) {
    const double primal = static_cast<double>(n_cells * n_antennas) * max_antenna_power;
    return std::abs(primal - dual) / dual;
}

void summarize(SolveReport& report, const ChannelSet& channels, const QuantModel& quant, const BeamformerSet& beams,
               PaprMode papr_mode) {
    report.achieved_sinr = dl_sinr(channels, quant, beams.precoder);
    report.antenna_power = antenna_powers(quant, beams.precoder, channels.n_cells(), channels.n_users());
    report.max_antenna_power = report.antenna_power.maxCoeff();
    report.total_power = report.antenna_power.sum();
    report.papr_db = papr_db(report.antenna_power, channels.n_antennas(), papr_mode);
    report.operating_range_db = operating_range_db(
        std::span<const double>(report.antenna_power.data(), static_cast<std::size_t>(report.antenna_power.size())));
    report.duality_gap_rel =
        duality_gap_rel(channels.n_cells(), channels.n_antennas(), report.max_antenna_power, report.dual_objective);
}

}  // namespace qcomp
