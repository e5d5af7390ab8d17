// SPDX-FileCopyrightText: 2026 spikecore contributors
//
// SPDX-License-Identifier: Apache-2.0

#include "spikecore/neuron.hpp"

#include <string>

namespace spikecore::neuron {

const char* to_string(NeuronModelKind kind) {
    switch (kind) {
    case NeuronModelKind::IF: return "IF";
    case NeuronModelKind::LIF: return "LIF";
    case NeuronModelKind::Synaptic: return "Synaptic";
    }
    return "?";
}

NeuronState NeuronState::zero(fxp::QFormat potential, std::optional<fxp::QFormat> current) {
    NeuronState s;
    s.membrane = fxp::QWord::zero(potential);
    if (current) {
        s.syn_current = fxp::QWord::zero(*current);
    }
    return s;
}

int next_pow2(int n) {
    int p = 1;
    while (p < n) {
        p <<= 1;
    }
    return p;
}

int ceil_log2(int n) {
    int bits = 0;
    while ((1 << bits) < n) {
        ++bits;
    }
    return bits;
}

namespace {

void check_count(const char* what, int n) {
    if (n < 1) {
        fail(ErrorCategory::value, std::string(what) + " must be at least 1");
    }
    if (n > kMaxNeuronsPerCore) {
        fail(ErrorCategory::capacity, std::string(what) + " = " + std::to_string(n) +
                                          " exceeds the per-core limit of " + std::to_string(kMaxNeuronsPerCore));
    }
}

} // namespace

SynapticMemoryGeometry size_synaptic_memory(int source_neurons, int dest_neurons, int weight_bits) {
    check_count("source neuron count", source_neurons);
    check_count("destination neuron count", dest_neurons);
    const fxp::QFormat fmt(weight_bits); // validates the width

    SynapticMemoryGeometry g;
    g.blocks = next_pow2(source_neurons);
    g.rows_per_block = next_pow2((dest_neurons + kWeightsPerRow - 1) / kWeightsPerRow);
    g.row_bits = kWeightsPerRow * fmt.bits();
    g.block_addr_bits = ceil_log2(g.blocks);
    g.row_addr_bits = ceil_log2(g.rows_per_block);
    return g;
}

StateMemoryGeometry size_state_memory(int neuron_count, int potential_bits, std::optional<int> current_bits) {
    check_count("neuron count", neuron_count);
    if (potential_bits <= 0) {
        fail(ErrorCategory::value, "membrane potential field must have a non-zero width");
    }
    const int total = potential_bits + current_bits.value_or(0);
    return StateMemoryGeometry{(total + 7) / 8 * 8, next_pow2(neuron_count)};
}

NeuronState integrate(const NeuronState& state, const fxp::QWord& weight) {
    NeuronState next = state;
    if (state.syn_current) {
        next.syn_current = fxp::accumulate(*state.syn_current, weight.value());
    } else {
        next.membrane = fxp::accumulate(state.membrane, weight.value());
    }
    return next;
}

std::pair<NeuronState, bool> leak_and_fire(const NeuronState& state, const LeakFireConfig& cfg) {
    if (cfg.threshold.format() != state.membrane.format()) {
        fail(ErrorCategory::format, "threshold must be expressed in the membrane-potential format");
    }
    NeuronState next = state;
    fxp::QWord membrane = state.membrane;
    if (state.syn_current) {
        if (!cfg.alpha) {
            fail(ErrorCategory::config, "Synaptic neuron requires a synaptic decay rate (alpha)");
        }
        membrane = fxp::accumulate(cg::apply_decay(membrane, cfg.beta, cfg.units), state.syn_current->value());
        next.syn_current = cg::apply_decay(*state.syn_current, *cfg.alpha, cfg.units);
    }

    const bool fired = membrane.value() >= cfg.threshold.value();
    if (fired) {
        membrane = cfg.reset == fxp::ResetPolicy::ResetToZero
                       ? fxp::QWord::zero(membrane.format())
                       : fxp::accumulate(membrane, -cfg.threshold.value());
    } else if (!state.syn_current) {
        membrane = cg::apply_decay(membrane, cfg.beta, cfg.units);
    }
    next.membrane = membrane;
    next.fired = fired;
    return {next, fired};
}

NeuronState lazy_reset(const NeuronState& state) {
    NeuronState next;
    next.membrane = fxp::QWord::zero(state.membrane.format());
    if (state.syn_current) {
        next.syn_current = fxp::QWord::zero(state.syn_current->format());
    }
    next.fired = false;
    return next;
}

// --- SynapticMemory ---------------------------------------------------------

SynapticMemory::SynapticMemory(SynapticMemoryGeometry geometry, int weight_bits)
    : geometry_(geometry), weight_bits_(weight_bits),
      bytes_(static_cast<std::size_t>(geometry.rows()) * geometry.row_bytes(), 0) {
    if (geometry.row_bits != kWeightsPerRow * weight_bits) {
        fail(ErrorCategory::config, "synaptic row width does not match the weight width");
    }
}

bool SynapticMemory::valid_address(int row, int byte) const {
    return row >= 0 && row < geometry_.rows() && byte >= 0 && byte < geometry_.row_bytes();
}

uint8_t SynapticMemory::read_byte(int row, int byte) const {
    if (!valid_address(row, byte)) {
        fail(ErrorCategory::address, "synaptic memory address (row " + std::to_string(row) + ", byte " +
                                         std::to_string(byte) + ") out of range");
    }
    return bytes_[static_cast<std::size_t>(row) * geometry_.row_bytes() + byte];
}

void SynapticMemory::write_byte(int row, int byte, uint8_t value) {
    if (!valid_address(row, byte)) {
        fail(ErrorCategory::address, "synaptic memory address (row " + std::to_string(row) + ", byte " +
                                         std::to_string(byte) + ") out of range");
    }
    bytes_[static_cast<std::size_t>(row) * geometry_.row_bytes() + byte] = value;
}

std::size_t SynapticMemory::bit_offset(int source, int dest) const {
    if (source < 0 || source >= geometry_.blocks || dest < 0 || dest >= geometry_.rows_per_block * kWeightsPerRow) {
        fail(ErrorCategory::address,
             "synapse (" + std::to_string(source) + ", " + std::to_string(dest) + ") outside the memory geometry");
    }
    const std::size_t row = static_cast<std::size_t>(source) * geometry_.rows_per_block + dest / kWeightsPerRow;
    const std::size_t slot = static_cast<std::size_t>(dest % kWeightsPerRow);
    return row * geometry_.row_bits + slot * weight_bits_;
}

int64_t SynapticMemory::weight(int source, int dest) const {
    const std::size_t bit = bit_offset(source, dest);
    uint64_t field = 0;
    for (int i = 0; i < weight_bits_; ++i) {
        const std::size_t b = bit + i;
        field |= uint64_t{(bytes_[b / 8] >> (b % 8)) & 1U} << i;
    }
    return fxp::from_field(field, weight_bits_);
}

void SynapticMemory::set_weight(int source, int dest, int64_t value) {
    const fxp::QFormat fmt(weight_bits_);
    if (!fmt.contains(value)) {
        fail(ErrorCategory::value, "weight " + std::to_string(value) + " does not fit " +
                                       std::to_string(weight_bits_) + " bits");
    }
    const std::size_t bit = bit_offset(source, dest);
    const uint64_t field = fxp::to_field(value, weight_bits_);
    for (int i = 0; i < weight_bits_; ++i) {
        const std::size_t b = bit + i;
        const auto mask = static_cast<uint8_t>(1U << (b % 8));
        if ((field >> i) & 1U) {
            bytes_[b / 8] |= mask;
        } else {
            bytes_[b / 8] &= static_cast<uint8_t>(~mask);
        }
    }
}

// --- StateMemory ------------------------------------------------------------

StateMemory::StateMemory(int neuron_count, fxp::QFormat potential, std::optional<fxp::QFormat> current)
    : geometry_(size_state_memory(neuron_count, potential.bits(),
                                  current ? std::optional<int>(current->bits()) : std::nullopt)),
      potential_(potential), current_(current),
      bytes_(static_cast<std::size_t>(geometry_.rows) * geometry_.row_bytes(), 0) {}

bool StateMemory::valid_address(int row, int byte) const {
    return row >= 0 && row < geometry_.rows && byte >= 0 && byte < geometry_.row_bytes();
}

uint8_t StateMemory::read_byte(int row, int byte) const {
    if (!valid_address(row, byte)) {
        fail(ErrorCategory::address, "state memory address (row " + std::to_string(row) + ", byte " +
                                         std::to_string(byte) + ") out of range");
    }
    return bytes_[static_cast<std::size_t>(row) * geometry_.row_bytes() + byte];
}

void StateMemory::write_byte(int row, int byte, uint8_t value) {
    if (!valid_address(row, byte)) {
        fail(ErrorCategory::address, "state memory address (row " + std::to_string(row) + ", byte " +
                                         std::to_string(byte) + ") out of range");
    }
    bytes_[static_cast<std::size_t>(row) * geometry_.row_bytes() + byte] = value;
}

uint64_t StateMemory::read_row(int row) const {
    uint64_t bits = 0;
    const std::size_t base = static_cast<std::size_t>(row) * geometry_.row_bytes();
    for (int b = 0; b < geometry_.row_bytes(); ++b) {
        bits |= uint64_t{bytes_[base + b]} << (8 * b);
    }
    return bits;
}

void StateMemory::write_row(int row, uint64_t bits) {
    const std::size_t base = static_cast<std::size_t>(row) * geometry_.row_bytes();
    for (int b = 0; b < geometry_.row_bytes(); ++b) {
        bytes_[base + b] = static_cast<uint8_t>(bits >> (8 * b));
    }
}

NeuronState StateMemory::load(int neuron) const {
    if (neuron < 0 || neuron >= geometry_.rows) {
        fail(ErrorCategory::address, "neuron " + std::to_string(neuron) + " outside the state memory");
    }
    const uint64_t row = read_row(neuron);
    NeuronState s;
    s.membrane = fxp::QWord(fxp::from_field(row, potential_.bits()), potential_);
    if (current_) {
        s.syn_current = fxp::QWord(fxp::from_field(row >> potential_.bits(), current_->bits()), *current_);
    }
    return s;
}

void StateMemory::store(int neuron, const NeuronState& state) {
    if (neuron < 0 || neuron >= geometry_.rows) {
        fail(ErrorCategory::address, "neuron " + std::to_string(neuron) + " outside the state memory");
    }
    if (state.membrane.format() != potential_ || state.syn_current.has_value() != current_.has_value() ||
        (current_ && state.syn_current->format() != *current_)) {
        fail(ErrorCategory::format, "neuron state does not match the state memory layout");
    }
    uint64_t row = fxp::to_field(state.membrane.value(), potential_.bits());
    if (current_) {
        row |= fxp::to_field(state.syn_current->value(), current_->bits()) << potential_.bits();
    }
    write_row(neuron, row);
}

} // namespace spikecore::neuron
