// SPDX-FileCopyrightText: 2026 spikecore contributors
//
// SPDX-License-Identifier: Apache-2.0

// Signed fixed-point words and the per-layer symmetric quantizer.
//
// All arithmetic saturates at the format bounds; nothing ever wraps.

#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "spikecore/error.hpp"

namespace spikecore::fxp {

inline constexpr int kMinBits = 2;
inline constexpr int kMaxBits = 32;

// Total signed bit-width of a two's-complement field.
class QFormat {
public:
    constexpr QFormat() = default;
    explicit QFormat(int bits);

    constexpr int bits() const { return bits_; }
    constexpr int64_t min() const { return -(int64_t{1} << (bits_ - 1)); }
    constexpr int64_t max() const { return (int64_t{1} << (bits_ - 1)) - 1; }
    constexpr bool contains(int64_t v) const { return v >= min() && v <= max(); }
    constexpr int64_t saturate(int64_t v) const { return v < min() ? min() : (v > max() ? max() : v); }

    friend constexpr bool operator==(QFormat, QFormat) = default;

private:
    int bits_ = 8;
};

class QWord {
public:
    QWord() = default;
    // Throws ErrorCategory::value if `value` does not fit `format`.
    QWord(int64_t value, QFormat format);

    static QWord saturating(int64_t value, QFormat format) { return QWord(format.saturate(value), format); }
    static QWord zero(QFormat format) { return QWord(0, format); }

    int64_t value() const { return value_; }
    QFormat format() const { return format_; }

    friend bool operator==(const QWord&, const QWord&) = default;

private:
    int64_t value_ = 0;
    QFormat format_;
};

enum class ResetPolicy : uint8_t { ResetToZero = 0, ResetBySubtract = 1 };

struct LayerQuantization {
    double weight_scale = 1.0; // float units per integer LSB
    QWord threshold_q;         // in the membrane-potential format
    ResetPolicy reset_policy = ResetPolicy::ResetToZero;
};

struct QuantizedWeights {
    std::vector<QWord> values;
    double weight_scale = 1.0;
};

// Round half away from zero.
int64_t round_half_away(double x);

// Symmetric max-abs quantization: q = clamp(round(w * qmax / max|w|)).
QuantizedWeights quantize_weights(std::span<const double> weights, QFormat fmt);

// Quantize onto an existing LSB grid, saturating at the format bounds.
std::vector<QWord> quantize_with_scale(std::span<const double> weights, QFormat fmt, double weight_scale);

// threshold_q = clamp(round(threshold / weight_scale)) with a floor of 1 LSB so
// that a resting neuron never fires spontaneously.
QWord quantize_threshold(double threshold, double weight_scale, QFormat potential);

LayerQuantization make_layer_quantization(double threshold, double weight_scale, QFormat potential,
                                          ResetPolicy reset);

QWord sat_add(const QWord& a, const QWord& b);

// Adds a raw integer to an accumulator word, saturating in the accumulator's format.
inline QWord accumulate(const QWord& acc, int64_t delta) {
    return QWord::saturating(acc.value() + delta, acc.format());
}

// Two's-complement field packing helpers used by the memory images.
uint64_t to_field(int64_t value, int bits);
int64_t from_field(uint64_t field, int bits);

} // namespace spikecore::fxp
