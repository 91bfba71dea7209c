#pragma once

#include "qcomp/dual.hpp"
#include "qcomp/metrics.hpp"
#include "qcomp/netgen.hpp"
#include "qcomp/primal.hpp"
#include "qcomp/quant.hpp"

namespace qcomp {

enum class StepRule { Diminishing, Fixed };

/// How a subgradient step moves the noise covariances. Euclidean takes
/// D + eta g followed by the exact projection onto the trace-capped orthant;
/// Multiplicative takes D * exp(eta g / max g) followed by rescaling onto the
/// trace budget (the entropic projection).
enum class AscentRule { Euclidean, Multiplicative };

/// Which trace budget the noise covariances share: one budget of N_c N_b over
/// the whole network, or N_b per cell.
enum class TraceScope { Network, PerCell };

enum class StopReason { GapClosed, Stationary, Stalled, IterationLimit };

struct OuterConfig {
    AscentRule ascent = AscentRule::Multiplicative;
    StepRule step_rule = StepRule::Diminishing;
    double step_scale = 0.1;           // Euclidean: eta_0 = step_scale * trace budget / ||g_1||_1
    double multiplicative_step = 1.0;  // Multiplicative: eta_0
    double outer_tol = 1e-5;  // relative inf-norm change of D
    double gap_tol = 1e-3;    // certified relative duality gap
    int stall_iters = 25;
    double stall_rel_tol = 1e-9;
    int max_outer_iters = 2000;
    TraceScope trace_scope = TraceScope::Network;
    double noise_floor = 1e-6;  // lower bound on every D entry
    PaprMode papr_mode = PaprMode::Network;
    InnerConfig inner;
    bool operator==(const OuterConfig&) const = default;
};

struct Solution {
    BeamformerSet beams;
    DualState dual;
    SolveReport report;
    StopReason stop = StopReason::IterationLimit;
    double certified_gap_rel = 0.0;  // primal/dual gap of the objective the trace scope optimizes
    RVec best_noise;                 // D of the best dual iterate
};

/// Objective whose dual the trace scope describes, scaled like the dual:
/// N_c N_b max_m p_m for Network, N_b sum_i max_m p_{i,m} for PerCell.
double scoped_primal(const RVec& antenna_power, std::size_t n_cells, std::size_t n_antennas, TraceScope scope);

const char* to_string(StopReason reason);

/// diag(sum_u w_u w_u^H) of one BS: sum_u |w_{u,m}|^2 per antenna.
RVec subgradient(const CMat& cell_precoders);

/// Euclidean projection onto {x >= 0, sum x <= cap}.
RVec project_D(const RVec& d, double cap);

/// Euclidean projection onto {x >= floor, sum x <= cap}; requires cap >= n floor.
RVec project_D(const RVec& d, double cap, double floor);

/// Projects the concatenated noise diagonals according to the trace scope.
RVec project_noise(const RVec& noise, std::size_t n_cells, std::size_t n_antennas, TraceScope scope, double floor);

/// Per-antenna minimax beamforming: projected subgradient ascent on the noise
/// covariances around the inner fixed point. The first iterate uses D = I and
/// therefore coincides with the total-power baseline. The returned beamformers
/// are those of the iterate with the lowest scoped primal objective; the
/// report's dual objective is the best one seen.
Solution solve_pa(const ChannelSet& channels, const QuantModel& quant, const RVec& targets, const OuterConfig& cfg);

/// Total-power minimization: one inner solve with D_i = I.
Solution solve_baseline(const ChannelSet& channels, const QuantModel& quant, const RVec& targets,
                        const InnerConfig& cfg, PaprMode papr_mode = PaprMode::Network);

/// Uniform linear targets for every user.
RVec uniform_targets(const ChannelSet& channels, double target_db);

}  // namespace qcomp
