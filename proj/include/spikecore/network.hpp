// SPDX-FileCopyrightText: 2026 spikecore contributors
//
// SPDX-License-Identifier: Apache-2.0

// Network description shared by the simulator, the loader, the cost model and
// the file formats.

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "spikecore/cg.hpp"
#include "spikecore/fxp.hpp"
#include "spikecore/neuron.hpp"

namespace spikecore::sys {

// FF: feedforward only. ATA_F: each neuron also feeds back onto itself.
// ATA_T: all-to-all recurrence within the layer.
enum class Topology : uint8_t { FF = 0, ATA_F = 1, ATA_T = 2 };

const char* to_string(Topology t);

// One core = one hidden or output layer. Structural fields are fixed when
// the core is built; threshold, decay rates and reset policy are programmed
// through the configuration registers.
struct CoreConfig {
    uint8_t core_id = 0;
    Topology topology = Topology::FF;
    neuron::NeuronModelKind model = neuron::NeuronModelKind::LIF;
    int neuron_count = 1;
    int source_count = 1;
    int weight_bits = 8;
    int rec_bits = 8;       // ignored for FF
    int potential_bits = 10;
    int current_bits = 0;   // Synaptic model only
    cg::SelectionUnits units = cg::SelectionUnits::all();

    int64_t threshold = 1;
    cg::DecayRate beta = cg::DecayRate::bypass();
    cg::DecayRate alpha = cg::DecayRate::bypass();
    fxp::ResetPolicy reset = fxp::ResetPolicy::ResetToZero;

    std::size_t ff_queue_capacity = 16;
    std::size_t rec_queue_capacity = 0; // 0 selects max(16, next_pow2(neuron_count))

    bool is_recurrent() const { return topology != Topology::FF; }
    // Full recurrent synaptic memory exists only for ATA_T; ATA_F keeps a
    // small self-weight store instead.
    bool has_recurrent_memory() const { return topology == Topology::ATA_T; }
    bool has_self_weights() const { return topology == Topology::ATA_F; }
    bool is_synaptic() const { return model == neuron::NeuronModelKind::Synaptic; }

    fxp::QFormat weight_format() const { return fxp::QFormat(weight_bits); }
    fxp::QFormat rec_format() const { return fxp::QFormat(rec_bits); }
    fxp::QFormat potential_format() const { return fxp::QFormat(potential_bits); }
    std::optional<fxp::QFormat> current_format() const;

    // The IF model runs on the LIF datapath with the membrane decay bypassed.
    cg::DecayRate effective_beta() const;
    std::size_t effective_rec_queue_capacity() const;

    neuron::SynapticMemoryGeometry ff_geometry() const;
    // ATA_T: source = destination = this layer. ATA_F: one self-weight per
    // neuron, stored as a single block.
    std::optional<neuron::SynapticMemoryGeometry> rec_geometry() const;
    neuron::StateMemoryGeometry state_geometry() const;

    // Throws ErrorCategory::config / capacity / value on the first violation.
    void validate() const;

    friend bool operator==(const CoreConfig&, const CoreConfig&) = default;
};

struct NetworkConfig {
    std::vector<CoreConfig> cores;
    int input_channels = 1;
    int timesteps = 1;
    std::size_t output_queue_capacity = 16;

    void validate() const;

    friend bool operator==(const NetworkConfig&, const NetworkConfig&) = default;
};

// Integer weights in the layout the loader writes over SPI.
struct LayerWeights {
    std::vector<int64_t> ff;  // [source * neuron_count + neuron]
    std::vector<int64_t> rec; // ATA_T: [source * neuron_count + neuron]; ATA_F: [neuron]; FF: empty
    double ff_scale = 1.0;    // float units per LSB, shared by the recurrent weights

    friend bool operator==(const LayerWeights&, const LayerWeights&) = default;
};

struct QuantizedNetwork {
    NetworkConfig config;
    std::vector<LayerWeights> layers;

    void validate() const;

    friend bool operator==(const QuantizedNetwork&, const QuantizedNetwork&) = default;
};

struct EventSample {
    std::vector<std::vector<uint16_t>> steps; // input channel addresses per time step
    int label = 0;

    friend bool operator==(const EventSample&, const EventSample&) = default;
};

void validate_sample(const EventSample& sample, const NetworkConfig& net);

} // namespace spikecore::sys
