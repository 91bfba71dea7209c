#pragma once

#include <optional>
#include <string>
#include <string_view>

#include "qcomp/types.hpp"

namespace qcomp {

/// DAC resolution: a positive bit count or infinite resolution.
class Bits {
public:
    Bits() = default;
    static Bits infinite() { return Bits{}; }
    static Bits of(int count);

    /// Accepts "inf", "infinite", "∞" or a positive integer.
    static Bits parse(std::string_view text);

    bool is_infinite() const { return !count_.has_value(); }
    int count() const;
    std::string to_string() const;

    friend bool operator==(const Bits&, const Bits&) = default;

private:
    explicit Bits(int count) : count_(count) {}
    std::optional<int> count_;
};

/// Additive quantization noise model of a b-bit MMSE scalar quantizer:
/// x_q = alpha * x + q with alpha = 1 - beta.
struct QuantModel {
    Bits bits;
    double beta = 0.0;
    double alpha = 1.0;
};

/// Tabulated distortion factors for b <= 5 (Gaussian input, Lloyd-Max quantizer);
/// (pi * sqrt(3) / 2) * 2^(-2b) above that; zero for infinite resolution.
/// Throws std::domain_error for b <= 0.
QuantModel from_bits(Bits bits);

/// alpha * beta * diag(W W^H), returned as the diagonal.
RVec quant_noise_cov(const QuantModel& model, const CMat& precoders);

}  // namespace qcomp
