#pragma once

#include <optional>
#include <vector>

#include "qcomp/netgen.hpp"
#include "qcomp/quant.hpp"
#include "qcomp/types.hpp"

namespace qcomp {

struct InnerConfig {
    double tol = 1e-9;          // max relative change of lambda between sweeps
    int max_iter = 10000;       // sweeps
    double lambda_init = 1e-3;  // cold-start value for every user
    // Iterates above cap_factor * (interference-free power scale) are declared infeasible.
    double lambda_cap_factor = 1e12;
    bool operator==(const InnerConfig&) const = default;
};

/// Virtual-uplink state for one noise covariance. `noise` holds the diagonals
/// of D_1..D_Nc back to back (cell-major, N_c * N_b entries).
struct DualState {
    RVec lambda;
    RVec noise;
    std::vector<CMat> K;         // one per cell
    std::vector<CVec> combiner;  // one per user (flat index)
    int inner_iterations = 0;
    bool converged = false;
    double residual = 0.0;

    auto cell_noise(std::size_t cell, std::size_t n_antennas) const {
        return noise.segment(static_cast<Eigen::Index>(cell * n_antennas), static_cast<Eigen::Index>(n_antennas));
    }
};

/// (A + A^H) / 2
CMat hermitize(const CMat& a);

/// K_i = D_i + alpha sum_k lambda_k h_{i,k} h_{i,k}^H + beta diag(H_i Lambda H_i^H)
CMat build_K(const ChannelSet& channels, const QuantModel& quant, const RVec& lambda, const RVec& cell_noise,
             std::size_t cell);

/// Z_k = alpha^2 sum_{l != k} lambda_l h_{i,l} h_{i,l}^H + alpha^2 D_i + alpha beta diag(H_i Lambda H_i^H + D_i)
/// for user k served by cell i.
CMat build_Z(const ChannelSet& channels, const QuantModel& quant, const RVec& lambda, const RVec& cell_noise,
             std::size_t user);

/// Solves Z f = h through a Cholesky factorization. Throws NumericalError when
/// Z is not positive definite; `user` tags the message when given.
CVec mmse_combiner(const CMat& z, const CVec& h, std::optional<UserIndex> user = std::nullopt);

/// alpha^2 lambda |f^H h|^2 / (f^H Z f)
double ul_sinr(double lambda, const CVec& f, const CMat& z, const CVec& h, const QuantModel& quant);

struct FixedPointResult {
    RVec lambda;
    int iterations = 0;
    double residual = 0.0;
    bool converged = false;
};

/// Gauss-Seidel iteration of lambda_k <- 1 / (alpha (1 + 1/gamma_k) h^H K_i^{-1} h)
/// in flat user order, with K refreshed after every single update.
/// `targets` are linear SINRs per user. Non-convergence is reported through the
/// result; exceeding the power cap throws InfeasibleTargetError. When `trace`
/// is given, the iterate after every sweep is appended to it.
FixedPointResult fixed_point_lambda(const ChannelSet& channels, const QuantModel& quant, const RVec& noise,
                                    const RVec& targets, const InnerConfig& cfg,
                                    const RVec* warm_start = nullptr, std::vector<RVec>* trace = nullptr);

/// Fixed point followed by K and MMSE combiners at the converged powers.
DualState solve_dual(const ChannelSet& channels, const QuantModel& quant, const RVec& noise, const RVec& targets,
                     const InnerConfig& cfg, const RVec* warm_start = nullptr);

/// Dual objective sum_k lambda_k sigma^2.
double dual_objective(const RVec& lambda, double noise_variance);

}  // namespace qcomp
