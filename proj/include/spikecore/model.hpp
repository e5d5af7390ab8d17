// SPDX-FileCopyrightText: 2026 spikecore contributors
//
// SPDX-License-Identifier: Apache-2.0

// Float parameters produced by an external training run, the three precision
// knobs, and the quantizer that turns one into a loadable network.

#pragma once

#include <compare>
#include <optional>
#include <string>
#include <vector>

#include "spikecore/network.hpp"

namespace spikecore::dse {

struct TrainedLayer {
    sys::Topology topology = sys::Topology::FF;
    neuron::NeuronModelKind model = neuron::NeuronModelKind::LIF;
    int neuron_count = 1;
    std::vector<double> ff;  // [source * neuron_count + neuron]
    std::vector<double> rec; // ATA_T: [source * neuron_count + neuron]; ATA_F: [neuron]
    double threshold = 1.0;
    double beta = 1.0;  // membrane leak factor, ignored for IF
    double alpha = 1.0; // synaptic-current leak factor, Synaptic only
    fxp::ResetPolicy reset = fxp::ResetPolicy::ResetToZero;
    // Extra bits of the membrane / current accumulator over the ff weight
    // width; fall back to the model-wide defaults when unset.
    std::optional<int> potential_headroom;
    std::optional<int> current_headroom;
    std::size_t ff_queue_capacity = 16;
    std::size_t rec_queue_capacity = 0;

    friend bool operator==(const TrainedLayer&, const TrainedLayer&) = default;
};

struct TrainedModel {
    int input_channels = 1;
    int timesteps = 1;
    int potential_headroom = 4;
    int current_headroom = 2;
    std::size_t output_queue_capacity = 16;
    std::vector<TrainedLayer> layers;

    bool any_recurrent() const;
    // Shape and value checks that do not depend on a precision choice.
    void validate() const;

    friend bool operator==(const TrainedModel&, const TrainedModel&) = default;
};

struct CandidateConfig {
    int ff_bits = 8;
    int rec_bits = 0; // 0 when no layer is recurrent
    int leak_bits = 8;

    friend auto operator<=>(const CandidateConfig&, const CandidateConfig&) = default;
};

std::string to_string(const CandidateConfig& c);

// Weights: symmetric max-abs per layer at ff_bits. Recurrent weights sit on
// the same LSB grid as the layer's ff weights and saturate at rec_bits.
// Thresholds use that grid too. Leak factors go through encode_decay with
// leak_bits and the matching selection units are synthesized.
// Throws ErrorCategory::config / value when the candidate cannot be built.
sys::QuantizedNetwork quantize_model(const TrainedModel& model, const CandidateConfig& cfg);

} // namespace spikecore::dse
