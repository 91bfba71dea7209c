#pragma once

#include <span>
#include <vector>

#include "qcomp/netgen.hpp"
#include "qcomp/primal.hpp"
#include "qcomp/quant.hpp"
#include "qcomp/types.hpp"

namespace qcomp {

/// Downlink SINR per user including the quantization-noise term.
RVec dl_sinr(const ChannelSet& channels, const QuantModel& quant, const std::vector<CVec>& precoders);

/// Q_k = sum_j h_{j,k}^H C_qq,j h_{j,k}, evaluated from the per-BS covariance.
RVec quant_noise_terms(const ChannelSet& channels, const QuantModel& quant, const std::vector<CVec>& precoders);

/// Same quantity as sum over precoders alpha beta w_l^H diag(h_{j,k} h_{j,k}^H) w_l.
RVec quant_noise_terms_by_precoder(const ChannelSet& channels, const QuantModel& quant,
                                   const std::vector<CVec>& precoders);

/// alpha diag(W_i W_i^H) for every BS, cell-major (N_c N_b entries).
RVec antenna_powers(const QuantModel& quant, const std::vector<CVec>& precoders, std::size_t n_cells,
                    std::size_t n_users);

enum class PaprMode { Network, PerBs };

/// 10 log10(max / mean) over all antennas. Throws std::domain_error when no
/// power is positive.
double papr_db(std::span<const double> powers);

/// Average over BSs of each BS's own PAPR in dB.
double papr_per_bs_db(std::span<const double> powers, std::size_t n_antennas);

double papr_db(const RVec& powers, std::size_t n_antennas, PaprMode mode);

/// 10 log10(max / min) with min floored at 1e-12 max.
double operating_range_db(std::span<const double> powers);

struct CdfStep {
    double value = 0.0;
    double probability = 0.0;
};

/// One step per distinct value; probability = fraction of samples <= value.
/// Throws std::invalid_argument on empty input.
std::vector<CdfStep> empirical_cdf(std::span<const double> values);

/// |N_c N_b p0 - dual| / dual
double duality_gap_rel(std::size_t n_cells, std::size_t n_antennas, double max_antenna_power, double dual);

struct SolveReport {
    RVec achieved_sinr;
    RVec antenna_power;  // cell-major, linear watts
    double max_antenna_power = 0.0;
    double total_power = 0.0;
    double dual_objective = 0.0;  // best sum lambda sigma^2 seen
    double duality_gap_rel = 0.0;
    double papr_db = 0.0;
    double operating_range_db = 0.0;
    int inner_iterations = 0;
    int outer_iterations = 0;
    bool converged = false;
    std::vector<double> dual_trace;       // per outer iteration
    std::vector<double> best_dual_trace;  // running maximum of dual_trace
    std::vector<double> max_power_trace;  // p0 of each iterate's precoders
};

/// Fills the power, SINR and PAPR fields from a precoder set. Leaves the dual
/// and iteration fields untouched apart from the gap, which uses
/// report.dual_objective.
void summarize(SolveReport& report, const ChannelSet& channels, const QuantModel& quant, const BeamformerSet& beams,
               PaprMode papr_mode = PaprMode::Network);

}  // namespace qcomp
