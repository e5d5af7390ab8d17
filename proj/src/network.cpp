// SPDX-FileCopyrightText: 2026 spikecore contributors
//
// SPDX-License-Identifier: Apache-2.0

#include "spikecore/network.hpp"

#include <algorithm>

namespace spikecore::sys {

const char* to_string(Topology t) {
    switch (t) {
    case Topology::FF: return "FF";
    case Topology::ATA_F: return "ATA_F";
    case Topology::ATA_T: return "ATA_T";
    }
    return "?";
}

std::optional<fxp::QFormat> CoreConfig::current_format() const {
    if (!is_synaptic()) {
        return std::nullopt;
    }
    return fxp::QFormat(current_bits);
}

cg::DecayRate CoreConfig::effective_beta() const {
    return model == neuron::NeuronModelKind::IF ? cg::DecayRate::bypass() : beta;
}

std::size_t CoreConfig::effective_rec_queue_capacity() const {
    if (rec_queue_capacity != 0) {
        return rec_queue_capacity;
    }
    return std::max<std::size_t>(16, static_cast<std::size_t>(neuron::next_pow2(neuron_count)));
}

neuron::SynapticMemoryGeometry CoreConfig::ff_geometry() const {
    return neuron::size_synaptic_memory(source_count, neuron_count, weight_bits);
}

std::optional<neuron::SynapticMemoryGeometry> CoreConfig::rec_geometry() const {
    switch (topology) {
    case Topology::FF: return std::nullopt;
    case Topology::ATA_F: return neuron::size_synaptic_memory(1, neuron_count, rec_bits);
    case Topology::ATA_T: return neuron::size_synaptic_memory(neuron_count, neuron_count, rec_bits);
    }
    return std::nullopt;
}

neuron::StateMemoryGeometry CoreConfig::state_geometry() const {
    return neuron::size_state_memory(neuron_count, potential_bits,
                                     is_synaptic() ? std::optional<int>(current_bits) : std::nullopt);
}

void CoreConfig::validate() const {
    const std::string where = "core " + std::to_string(core_id) + ": ";
    try {
        (void)ff_geometry();
        (void)rec_geometry();
        (void)state_geometry();
        (void)potential_format();
        if (is_synaptic()) {
            (void)current_format();
        }
    } catch (const Error& e) {
        throw Error(e.category(), where + e.what());
    }
    if (!is_synaptic() && current_bits != 0) {
        fail(ErrorCategory::config, where + "synaptic-current width given for a non-Synaptic model");
    }
    if (threshold < 1 || !potential_format().contains(threshold)) {
        fail(ErrorCategory::config, where + "threshold " + std::to_string(threshold) +
                                        " must be positive and fit the membrane-potential format");
    }
    if (!units.can_represent(effective_beta())) {
        fail(ErrorCategory::config, where + "membrane decay rate needs a shift unit that is not synthesized");
    }
    if (is_synaptic() && !units.can_represent(alpha)) {
        fail(ErrorCategory::config, where + "synaptic decay rate needs a shift unit that is not synthesized");
    }
    if (ff_queue_capacity == 0) {
        fail(ErrorCategory::config, where + "feedforward queue capacity must be at least 1");
    }
    if (is_recurrent() && effective_rec_queue_capacity() < static_cast<std::size_t>(neuron_count)) {
        fail(ErrorCategory::config, where + "recurrent queue cannot hold one spike per neuron");
    }
}

void NetworkConfig::validate() const {
    if (cores.empty()) {
        fail(ErrorCategory::config, "network has no layers");
    }
    if (input_channels < 1 || input_channels > neuron::kMaxNeuronsPerCore) {
        fail(ErrorCategory::capacity, "input channel count " + std::to_string(input_channels) +
                                          " outside [1, " + std::to_string(neuron::kMaxNeuronsPerCore) + "]");
    }
    if (timesteps < 1) {
        fail(ErrorCategory::config, "timesteps per sample must be at least 1");
    }
    if (output_queue_capacity == 0) {
        fail(ErrorCategory::config, "output queue capacity must be at least 1");
    }
    int previous = input_channels;
    for (std::size_t i = 0; i < cores.size(); ++i) {
        const CoreConfig& c = cores[i];
        if (c.core_id != i) {
            fail(ErrorCategory::config, "core " + std::to_string(i) + " carries id " + std::to_string(c.core_id));
        }
        if (c.source_count != previous) {
            fail(ErrorCategory::config, "core " + std::to_string(i) + " expects " + std::to_string(c.source_count) +
                                            " sources but the previous layer has " + std::to_string(previous));
        }
        c.validate();
        previous = c.neuron_count;
    }
}

void QuantizedNetwork::validate() const {
    config.validate();
    if (layers.size() != config.cores.size()) {
        fail(ErrorCategory::config, "weight set count does not match the layer count");
    }
    for (std::size_t i = 0; i < layers.size(); ++i) {
        const CoreConfig& c = config.cores[i];
        const LayerWeights& w = layers[i];
        const std::string where = "layer " + std::to_string(i) + ": ";
        const auto n_ff = static_cast<std::size_t>(c.source_count) * c.neuron_count;
        if (w.ff.size() != n_ff) {
            fail(ErrorCategory::config, where + "expected " + std::to_string(n_ff) + " feedforward weights, got " +
                                            std::to_string(w.ff.size()));
        }
        std::size_t n_rec = 0;
        if (c.topology == Topology::ATA_T) {
            n_rec = static_cast<std::size_t>(c.neuron_count) * c.neuron_count;
        } else if (c.topology == Topology::ATA_F) {
            n_rec = static_cast<std::size_t>(c.neuron_count);
        }
        if (w.rec.size() != n_rec) {
            fail(ErrorCategory::config, where + "expected " + std::to_string(n_rec) + " recurrent weights, got " +
                                            std::to_string(w.rec.size()));
        }
        const fxp::QFormat wf = c.weight_format();
        if (!std::all_of(w.ff.begin(), w.ff.end(), [&](int64_t v) { return wf.contains(v); })) {
            fail(ErrorCategory::config, where + "feedforward weight outside the weight format");
        }
        if (c.is_recurrent()) {
            const fxp::QFormat rf = c.rec_format();
            if (!std::all_of(w.rec.begin(), w.rec.end(), [&](int64_t v) { return rf.contains(v); })) {
                fail(ErrorCategory::config, where + "recurrent weight outside the recurrent format");
            }
        }
    }
}

void validate_sample(const EventSample& sample, const NetworkConfig& net) {
    if (sample.steps.size() > static_cast<std::size_t>(net.timesteps)) {
        fail(ErrorCategory::config, "sample has " + std::to_string(sample.steps.size()) +
                                        " time steps, network runs " + std::to_string(net.timesteps));
    }
    for (const auto& step : sample.steps) {
        for (uint16_t a : step) {
            if (a >= net.input_channels) {
                fail(ErrorCategory::address, "input address " + std::to_string(a) + " >= channel count " +
                                                 std::to_string(net.input_channels));
            }
        }
    }
}

} // namespace spikecore::sys
