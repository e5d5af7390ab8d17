// SPDX-FileCopyrightText: 2026 spikecore contributors
//
// SPDX-License-Identifier: Apache-2.0

// Coefficient generator: multiplier-free leak by a bank of eight right shifts
// (1..8) grouped into four two-shift selection units plus a bypass path.
//
// DecayRate layout (9 bits):
//   bit 8      bypass, output = input
//   bits 7..0  shift enables, bit 7 -> >>1, bit 6 -> >>2, ..., bit 0 -> >>8
//
// With bypass clear the word encodes the factor k/256 where k = bits 7..0.
// Shifting happens on the magnitude and the sign is reapplied afterwards, so
// decay(-x) == -decay(x) for every x.

#pragma once

#include <cstdint>

#include "spikecore/fxp.hpp"

namespace spikecore::cg {

inline constexpr uint16_t kBypassBit = 0x100;

class DecayRate {
public:
    constexpr DecayRate() = default;
    // Throws ErrorCategory::value if raw > 511.
    explicit DecayRate(uint16_t raw);

    static constexpr DecayRate bypass() { return DecayRate(Raw{kBypassBit}); }
    static DecayRate from_k(unsigned k);

    constexpr uint16_t raw() const { return raw_; }
    constexpr bool is_bypass() const { return (raw_ & kBypassBit) != 0; }
    constexpr uint8_t k() const { return static_cast<uint8_t>(raw_ & 0xFF); }
    double factor() const { return is_bypass() ? 1.0 : k() / 256.0; }

    friend constexpr bool operator==(DecayRate, DecayRate) = default;

private:
    struct Raw {
        uint16_t v;
    };
    constexpr explicit DecayRate(Raw r) : raw_(r.v) {}
    uint16_t raw_ = 0;
};

// Which of the four shift-pair units were synthesized. Unit i carries shifts
// (2i+1, 2i+2), i.e. DecayRate bits (7-2i, 6-2i).
class SelectionUnits {
public:
    constexpr SelectionUnits() = default;
    explicit SelectionUnits(uint8_t mask);

    static constexpr SelectionUnits all() { return SelectionUnits(Mask{0xF}); }
    // Smallest set of units able to hold every rate truncated to `leak_bits`.
    static SelectionUnits for_leak_bits(int leak_bits);

    constexpr uint8_t mask() const { return mask_; }
    bool enabled(int unit) const { return (mask_ >> unit) & 1U; }
    bool can_represent(DecayRate rate) const;

    friend constexpr bool operator==(SelectionUnits, SelectionUnits) = default;

private:
    struct Mask {
        uint8_t v;
    };
    constexpr explicit SelectionUnits(Mask m) : mask_(m.v) {}
    uint8_t mask_ = 0xF;
};

// factor in [0,1]. k = round-half-up(factor * 256); k == 256 selects the
// bypass path. Otherwise the low (8 - leak_bits) bits of k are cleared.
DecayRate encode_decay(double factor, int leak_bits);

// Raw integer form, also valid outside any QFormat.
int64_t apply_decay(int64_t x, DecayRate rate, SelectionUnits units = SelectionUnits::all());

// Throws ErrorCategory::config if the rate needs a unit that is not present.
fxp::QWord apply_decay(const fxp::QWord& x, DecayRate rate, SelectionUnits units = SelectionUnits::all());

} // namespace spikecore::cg
