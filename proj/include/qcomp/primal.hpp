#pragma once

#include <vector>

#include "qcomp/netgen.hpp"
#include "qcomp/quant.hpp"
#include "qcomp/types.hpp"

namespace qcomp {

/// Downlink precoders w_k = sqrt(tau_k) f_k, one per user in flat order.
struct BeamformerSet {
    std::size_t n_cells = 0;
    std::size_t n_users = 0;
    std::vector<CVec> precoder;
    std::vector<CVec> combiner;
    RVec tau;

    /// N_b x N_u precoder matrix W_i of one BS.
    CMat cell_matrix(std::size_t cell) const;
};

/// Real (N_c N_u) x (N_c N_u) system whose solution gives the precoder powers.
/// Row = victim user k, column = source user l:
///   k == l : (alpha^2 / gamma_k) |h_{i,k}^H f_k|^2 - alpha beta f_k^H diag(h_{i,k} h_{i,k}^H) f_k
///   k != l : -alpha^2 |h_{j,k}^H f_l|^2 - alpha beta f_l^H diag(h_{j,k} h_{j,k}^H) f_l
/// with i the serving cell of k and j the serving cell of l.
RMat build_sigma(const ChannelSet& channels, const QuantModel& quant, const std::vector<CVec>& combiners,
                 const RVec& targets);

/// Relative tolerance under which slightly negative powers are clamped to zero.
inline constexpr double kNegativeTauTolerance = 1e-10;

/// Solves Sigma tau = sigma^2 1 by partial-pivot LU and scales the combiners.
/// Throws NumericalError for a singular system and NegativePowerError if any
/// tau falls below -1e-10 max|tau|.
BeamformerSet recover_precoders(const RMat& sigma, const std::vector<CVec>& combiners, double noise_variance,
                                std::size_t n_cells, std::size_t n_users);

}  // namespace qcomp
