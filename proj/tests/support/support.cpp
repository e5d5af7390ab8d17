// SPDX-FileCopyrightText: 2026 spikecore contributors
//
// SPDX-License-Identifier: Apache-2.0

#include "support.hpp"

#include <algorithm>

namespace spikecore::testing {

std::optional<ErrorCategory> error_of(const std::function<void()>& fn) {
    try {
        fn();
    } catch (const Error& e) {
        return e.category();
    }
    return std::nullopt;
}

int uniform_int(std::mt19937_64& rng, int lo, int hi) {
    return std::uniform_int_distribution<int>(lo, hi)(rng);
}

namespace {

cg::DecayRate random_rate(std::mt19937_64& rng, cg::SelectionUnits units) {
    if (uniform_int(rng, 0, 5) == 0) {
        return cg::DecayRate::bypass();
    }
    unsigned k = 0;
    for (int shift = 1; shift <= 8; ++shift) {
        const int unit = (shift - 1) / 2;
        if (units.enabled(unit) && uniform_int(rng, 0, 1) == 1) {
            k |= 1U << (8 - shift);
        }
    }
    // Mostly slow leaks so activity survives a few steps.
    if (uniform_int(rng, 0, 2) != 0 && units.enabled(0)) {
        k |= 0xC0;
    }
    return cg::DecayRate::from_k(k);
}

} // namespace

sys::QuantizedNetwork random_network(std::mt19937_64& rng, const RandomNetOptions& opts) {
    sys::QuantizedNetwork q;
    q.config.input_channels = uniform_int(rng, 1, opts.max_channels);
    q.config.timesteps = uniform_int(rng, 1, opts.max_timesteps);
    q.config.output_queue_capacity = static_cast<std::size_t>(uniform_int(rng, 1, 4));
    const int layers = uniform_int(rng, 1, opts.max_layers);
    int sources = q.config.input_channels;
    for (int l = 0; l < layers; ++l) {
        sys::CoreConfig c;
        c.core_id = static_cast<uint8_t>(l);
        c.topology = static_cast<sys::Topology>(uniform_int(rng, 0, 2));
        c.model = static_cast<neuron::NeuronModelKind>(uniform_int(rng, 0, 2));
        c.neuron_count = uniform_int(rng, 1, opts.max_neurons);
        c.source_count = sources;
        c.weight_bits = opts.weight_bits[static_cast<std::size_t>(
            uniform_int(rng, 0, static_cast<int>(opts.weight_bits.size()) - 1))];
        c.rec_bits = c.is_recurrent() ? opts.weight_bits[static_cast<std::size_t>(uniform_int(
                                            rng, 0, static_cast<int>(opts.weight_bits.size()) - 1))]
                                      : 8;
        c.potential_bits = c.weight_bits + uniform_int(rng, 1, 5);
        c.current_bits = c.is_synaptic() ? c.weight_bits + uniform_int(rng, 0, 3) : 0;
        c.units = uniform_int(rng, 0, 3) == 0 ? cg::SelectionUnits(static_cast<uint8_t>(uniform_int(rng, 1, 15)))
                                              : cg::SelectionUnits::all();
        c.beta = c.model == neuron::NeuronModelKind::IF ? cg::DecayRate::bypass() : random_rate(rng, c.units);
        c.alpha = c.is_synaptic() ? random_rate(rng, c.units) : cg::DecayRate::bypass();
        const int64_t wmax = c.weight_format().max();
        c.threshold = std::clamp<int64_t>(uniform_int(rng, 1, static_cast<int>(2 * wmax)), 1,
                                          c.potential_format().max());
        c.reset = uniform_int(rng, 0, 1) == 0 ? fxp::ResetPolicy::ResetToZero : fxp::ResetPolicy::ResetBySubtract;
        c.ff_queue_capacity = static_cast<std::size_t>(uniform_int(rng, 1, static_cast<int>(opts.max_ff_queue)));
        c.rec_queue_capacity =
            uniform_int(rng, 0, 1) == 0 ? 0 : static_cast<std::size_t>(c.neuron_count + uniform_int(rng, 0, 4));

        sys::LayerWeights w;
        w.ff_scale = 1.0 / static_cast<double>(wmax);
        const auto wf = c.weight_format();
        for (int i = 0; i < sources * c.neuron_count; ++i) {
            // Skewed positive so layers past the first still see activity.
            w.ff.push_back(std::clamp<int64_t>(uniform_int(rng, static_cast<int>(wf.min() / 2), static_cast<int>(wf.max())),
                                               wf.min(), wf.max()));
        }
        if (c.is_recurrent()) {
            const auto rf = c.rec_format();
            const int n = c.topology == sys::Topology::ATA_T ? c.neuron_count * c.neuron_count : c.neuron_count;
            for (int i = 0; i < n; ++i) {
                w.rec.push_back(uniform_int(rng, static_cast<int>(rf.min()), static_cast<int>(rf.max())));
            }
        }
        q.config.cores.push_back(c);
        q.layers.push_back(std::move(w));
        sources = c.neuron_count;
    }
    q.validate();
    return q;
}

sys::EventSample random_sample(std::mt19937_64& rng, const sys::NetworkConfig& net, double density) {
    sys::EventSample s;
    s.label = 0;
    const int steps = uniform_int(rng, 1, net.timesteps);
    std::bernoulli_distribution on(density);
    for (int t = 0; t < steps; ++t) {
        std::vector<uint16_t> step;
        for (int c = 0; c < net.input_channels; ++c) {
            if (on(rng)) {
                step.push_back(static_cast<uint16_t>(c));
            }
        }
        if (!step.empty() && uniform_int(rng, 0, 7) == 0) {
            step.push_back(step.front());
        }
        std::shuffle(step.begin(), step.end(), rng);
        s.steps.push_back(std::move(step));
    }
    return s;
}

sys::QuantizedNetwork if_as_bypass_lif(const sys::QuantizedNetwork& q) {
    sys::QuantizedNetwork out = q;
    for (sys::CoreConfig& c : out.config.cores) {
        if (c.model == neuron::NeuronModelKind::IF) {
            c.model = neuron::NeuronModelKind::LIF;
            c.beta = cg::DecayRate::bypass();
        }
    }
    return out;
}

} // namespace spikecore::testing
