// SPDX-FileCopyrightText: 2026 spikecore contributors
//
// SPDX-License-Identifier: Apache-2.0

// Configurable neuron unit: memory geometry, byte-addressable synaptic and
// state memories, and the fixed-point IF / LIF / Synaptic update rules.

#pragma once

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "spikecore/cg.hpp"
#include "spikecore/fxp.hpp"

namespace spikecore::neuron {

inline constexpr int kMaxNeuronsPerCore = 256;
inline constexpr int kWeightsPerRow = 8;

enum class NeuronModelKind : uint8_t { IF = 0, LIF = 1, Synaptic = 2 };

const char* to_string(NeuronModelKind kind);

struct NeuronState {
    fxp::QWord membrane;
    std::optional<fxp::QWord> syn_current; // Synaptic model only
    bool fired = false;

    static NeuronState zero(fxp::QFormat potential, std::optional<fxp::QFormat> current);
    friend bool operator==(const NeuronState&, const NeuronState&) = default;
};

struct SynapticMemoryGeometry {
    int blocks = 0;
    int rows_per_block = 0;
    int row_bits = 0;
    int block_addr_bits = 0;
    int row_addr_bits = 0;

    int rows() const { return blocks * rows_per_block; }
    int row_bytes() const { return row_bits / 8; }
    int64_t total_bits() const { return int64_t{rows()} * row_bits; }

    friend bool operator==(const SynapticMemoryGeometry&, const SynapticMemoryGeometry&) = default;
};

struct StateMemoryGeometry {
    int row_bits = 0;
    int rows = 0;

    int row_bytes() const { return row_bits / 8; }
    int64_t total_bits() const { return int64_t{rows} * row_bits; }

    friend bool operator==(const StateMemoryGeometry&, const StateMemoryGeometry&) = default;
};

int next_pow2(int n);
int ceil_log2(int n);

SynapticMemoryGeometry size_synaptic_memory(int source_neurons, int dest_neurons, int weight_bits);
StateMemoryGeometry size_state_memory(int neuron_count, int potential_bits, std::optional<int> current_bits);

struct LeakFireConfig {
    fxp::QWord threshold;
    cg::DecayRate beta;
    std::optional<cg::DecayRate> alpha; // required for the Synaptic model
    fxp::ResetPolicy reset = fxp::ResetPolicy::ResetToZero;
    cg::SelectionUnits units = cg::SelectionUnits::all();
};

// IF/LIF accumulate into the membrane, Synaptic into the synaptic current.
NeuronState integrate(const NeuronState& state, const fxp::QWord& weight);

// Leak/spike-generation phase for one neuron. Returns the new state and
// whether the neuron fired.
std::pair<NeuronState, bool> leak_and_fire(const NeuronState& state, const LeakFireConfig& cfg);

NeuronState lazy_reset(const NeuronState& state);

// Synaptic memory: `blocks` blocks (one per source neuron) of
// `rows_per_block` rows, 8 weights per row. Weight (src, dst) lives in row
// src * rows_per_block + dst / 8, slot dst % 8, occupying row bits
// [slot * w, slot * w + w) as a little-endian two's-complement field.
class SynapticMemory {
public:
    SynapticMemory(SynapticMemoryGeometry geometry, int weight_bits);

    const SynapticMemoryGeometry& geometry() const { return geometry_; }
    int weight_bits() const { return weight_bits_; }
    std::size_t byte_count() const { return bytes_.size(); }

    bool valid_address(int row, int byte) const;
    uint8_t read_byte(int row, int byte) const;
    void write_byte(int row, int byte, uint8_t value);

    int64_t weight(int source, int dest) const;
    void set_weight(int source, int dest, int64_t value);

private:
    std::size_t bit_offset(int source, int dest) const;

    SynapticMemoryGeometry geometry_;
    int weight_bits_;
    std::vector<uint8_t> bytes_;
};

// Neuron state memory: one byte-aligned row per neuron, potential field in
// the low bits followed by the synaptic-current field.
class StateMemory {
public:
    StateMemory(int neuron_count, fxp::QFormat potential, std::optional<fxp::QFormat> current);

    const StateMemoryGeometry& geometry() const { return geometry_; }
    fxp::QFormat potential_format() const { return potential_; }
    std::optional<fxp::QFormat> current_format() const { return current_; }

    bool valid_address(int row, int byte) const;
    uint8_t read_byte(int row, int byte) const;
    void write_byte(int row, int byte, uint8_t value);

    NeuronState load(int neuron) const;
    void store(int neuron, const NeuronState& state);

private:
    uint64_t read_row(int row) const;
    void write_row(int row, uint64_t bits);

    StateMemoryGeometry geometry_;
    fxp::QFormat potential_;
    std::optional<fxp::QFormat> current_;
    std::vector<uint8_t> bytes_;
};

} // namespace spikecore::neuron
