// SPDX-FileCopyrightText: 2026 spikecore contributors
//
// SPDX-License-Identifier: Apache-2.0

#include "spikecore/cg.hpp"

#include <cmath>
#include <string>

namespace spikecore::cg {

DecayRate::DecayRate(uint16_t raw) : raw_(raw) {
    if (raw > 0x1FF) {
        fail(ErrorCategory::value, "DecayRate word " + std::to_string(raw) + " exceeds 9 bits");
    }
}

DecayRate DecayRate::from_k(unsigned k) {
    if (k > 255) {
        fail(ErrorCategory::value, "decay numerator " + std::to_string(k) + " outside [0, 255]");
    }
    return DecayRate(static_cast<uint16_t>(k));
}

SelectionUnits::SelectionUnits(uint8_t mask) : mask_(mask) {
    if (mask > 0xF) {
        fail(ErrorCategory::value, "SelectionUnits mask exceeds 4 bits");
    }
}

SelectionUnits SelectionUnits::for_leak_bits(int leak_bits) {
    if (leak_bits < 1 || leak_bits > 8) {
        fail(ErrorCategory::value, "leak precision " + std::to_string(leak_bits) + " outside [1, 8]");
    }
    const int units = (leak_bits + 1) / 2;
    return SelectionUnits(static_cast<uint8_t>((1U << units) - 1U));
}

bool SelectionUnits::can_represent(DecayRate rate) const {
    if (rate.is_bypass()) {
        return true;
    }
    for (int unit = 0; unit < 4; ++unit) {
        const unsigned pair_bits = (0xC0U >> (2 * unit)) & 0xFFU;
        if ((rate.k() & pair_bits) != 0 && !enabled(unit)) {
            return false;
        }
    }
    return true;
}

DecayRate encode_decay(double factor, int leak_bits) {
    if (!(factor >= 0.0 && factor <= 1.0)) {
        fail(ErrorCategory::value, "decay factor must lie in [0, 1]");
    }
    if (leak_bits < 1 || leak_bits > 8) {
        fail(ErrorCategory::value, "leak precision " + std::to_string(leak_bits) + " outside [1, 8]");
    }
    const auto k = static_cast<unsigned>(std::floor(factor * 256.0 + 0.5));
    if (k >= 256) {
        return DecayRate::bypass();
    }
    const unsigned keep = (0xFFU << (8 - leak_bits)) & 0xFFU;
    return DecayRate::from_k(k & keep);
}

int64_t apply_decay(int64_t x, DecayRate rate, SelectionUnits units) {
    if (!units.can_represent(rate)) {
        fail(ErrorCategory::config, "DecayRate " + std::to_string(rate.raw()) +
                                        " uses a shift pair that is not synthesized (units mask " +
                                        std::to_string(units.mask()) + ")");
    }
    if (rate.is_bypass()) {
        return x;
    }
    const uint64_t magnitude = x < 0 ? uint64_t{0} - static_cast<uint64_t>(x) : static_cast<uint64_t>(x);
    uint64_t sum = 0;
    for (int shift = 1; shift <= 8; ++shift) {
        if ((rate.k() >> (8 - shift)) & 1U) {
            sum += magnitude >> shift;
        }
    }
    const auto result = static_cast<int64_t>(sum);
    return x < 0 ? -result : result;
}

fxp::QWord apply_decay(const fxp::QWord& x, DecayRate rate, SelectionUnits units) {
    // |result| <= |x| * 255/256 < |min|, so the negation always fits.
    return fxp::QWord(apply_decay(x.value(), rate, units), x.format());
}

} // namespace spikecore::cg
