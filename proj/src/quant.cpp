#include "qcomp/quant.hpp"

#include <array>
#include <charconv>
#include <numbers>
#include <stdexcept>

namespace qcomp {

namespace {

// Mean-squared error of the optimal non-uniform quantizer for a unit-variance
// Gaussian source, b = 1..5. The commonly quoted 0.03454, 0.009497, 0.002499
// for b = 3..5 are off in the fourth digit; these are the converged values.
constexpr std::array<double, 5> kBetaTable = {0.3634, 0.1175, 0.03455, 0.009501, 0.002505};

}  // namespace

Bits Bits::of(int count) {
    if (count <= 0) {
        throw std::domain_error("quantizer bit count must be positive, got " + std::to_string(count));
    }
    return Bits(count);
}

Bits Bits::parse(std::string_view text) {
    if (text == "inf" || text == "infinite" || text == "Inf" || text == "INF" || text == "∞") {
        return infinite();
    }
    int value = 0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc{} || ptr != text.data() + text.size()) {
        throw std::invalid_argument("not a bit count: '" + std::string(text) + "'");
    }
    return of(value);
}

int Bits::count() const {
    if (!count_) {
        throw std::logic_error("infinite resolution has no bit count");
    }
    return *count_;
}

std::string Bits::to_string() const { return count_ ? std::to_string(*count_) : std::string("inf"); }

QuantModel from_bits(Bits bits) {
    QuantModel model;
    model.bits = bits;
    if (bits.is_infinite()) {
        model.beta = 0.0;
    } else {
        const int b = bits.count();
        if (b <= static_cast<int>(kBetaTable.size())) {
            model.beta = kBetaTable[static_cast<std::size_t>(b - 1)];
        } else {
            model.beta = std::numbers::pi * std::sqrt(3.0) / 2.0 * std::pow(2.0, -2.0 * b);
        }
    }
    model.alpha = 1.0 - model.beta;
    return model;
}

RVec quant_noise_cov(const QuantModel& model, const CMat& precoders) {
    return model.alpha * model.beta * precoders.rowwise().squaredNorm();
}

}  // namespace qcomp
