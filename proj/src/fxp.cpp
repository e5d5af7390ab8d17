// SPDX-FileCopyrightText: 2026 spikecore contributors
//
// SPDX-License-Identifier: Apache-2.0

#include "spikecore/fxp.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace spikecore::fxp {

QFormat::QFormat(int bits) : bits_(bits) {
    if (bits < kMinBits || bits > kMaxBits) {
        fail(ErrorCategory::value,
             "fixed-point width " + std::to_string(bits) + " outside [" + std::to_string(kMinBits) + ", " +
                 std::to_string(kMaxBits) + "]");
    }
}

QWord::QWord(int64_t value, QFormat format) : value_(value), format_(format) {
    if (!format.contains(value)) {
        fail(ErrorCategory::value,
             "value " + std::to_string(value) + " not representable in " + std::to_string(format.bits()) + " bits");
    }
}

int64_t round_half_away(double x) {
    return static_cast<int64_t>(std::round(x)); // std::round already rounds halves away from zero
}

namespace {

void check_finite(std::span<const double> weights) {
    for (std::size_t i = 0; i < weights.size(); ++i) {
        if (!std::isfinite(weights[i])) {
            fail(ErrorCategory::value, "weight #" + std::to_string(i) + " is not finite");
        }
    }
}

int64_t clamp_round(double x, QFormat fmt) {
    // Clamp in floating point first so huge ratios cannot overflow the cast.
    const double lo = static_cast<double>(fmt.min());
    const double hi = static_cast<double>(fmt.max());
    const double r = std::round(x);
    return static_cast<int64_t>(std::clamp(r, lo, hi));
}

} // namespace

QuantizedWeights quantize_weights(std::span<const double> weights, QFormat fmt) {
    if (weights.empty()) {
        fail(ErrorCategory::value, "cannot quantize an empty weight vector");
    }
    check_finite(weights);

    double max_abs = 0.0;
    for (double w : weights) {
        max_abs = std::max(max_abs, std::abs(w));
    }

    QuantizedWeights out;
    out.values.reserve(weights.size());
    if (max_abs == 0.0) {
        out.weight_scale = 1.0;
        out.values.assign(weights.size(), QWord::zero(fmt));
        return out;
    }

    const double qmax = static_cast<double>(fmt.max());
    for (double w : weights) {
        out.values.emplace_back(clamp_round(w * qmax / max_abs, fmt), fmt);
    }
    out.weight_scale = max_abs / qmax;
    return out;
}

std::vector<QWord> quantize_with_scale(std::span<const double> weights, QFormat fmt, double weight_scale) {
    if (!(weight_scale > 0.0) || !std::isfinite(weight_scale)) {
        fail(ErrorCategory::value, "weight scale must be positive and finite");
    }
    check_finite(weights);
    std::vector<QWord> out;
    out.reserve(weights.size());
    for (double w : weights) {
        out.emplace_back(clamp_round(w / weight_scale, fmt), fmt);
    }
    return out;
}

QWord quantize_threshold(double threshold, double weight_scale, QFormat potential) {
    if (!std::isfinite(threshold) || threshold <= 0.0) {
        fail(ErrorCategory::value, "threshold must be positive and finite");
    }
    if (!(weight_scale > 0.0) || !std::isfinite(weight_scale)) {
        fail(ErrorCategory::value, "weight scale must be positive and finite");
    }
    const int64_t q = clamp_round(threshold / weight_scale, potential);
    return QWord(std::max<int64_t>(q, 1), potential);
}

LayerQuantization make_layer_quantization(double threshold, double weight_scale, QFormat potential,
                                          ResetPolicy reset) {
    return LayerQuantization{weight_scale, quantize_threshold(threshold, weight_scale, potential), reset};
}

QWord sat_add(const QWord& a, const QWord& b) {
    if (a.format() != b.format()) {
        fail(ErrorCategory::format, "sat_add operands differ in format (" + std::to_string(a.format().bits()) +
                                        " vs " + std::to_string(b.format().bits()) + " bits)");
    }
    return QWord::saturating(a.value() + b.value(), a.format());
}

uint64_t to_field(int64_t value, int bits) {
    const uint64_t mask = bits >= 64 ? ~uint64_t{0} : ((uint64_t{1} << bits) - 1);
    return static_cast<uint64_t>(value) & mask;
}

int64_t from_field(uint64_t field, int bits) {
    const uint64_t sign = uint64_t{1} << (bits - 1);
    const uint64_t mask = (uint64_t{1} << bits) - 1;
    field &= mask;
    return (field & sign) ? static_cast<int64_t>(field) - static_cast<int64_t>(uint64_t{1} << bits)
                          : static_cast<int64_t>(field);
}

} // namespace spikecore::fxp
