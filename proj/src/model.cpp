// SPDX-FileCopyrightText: 2026 spikecore contributors
//
// SPDX-License-Identifier: Apache-2.0

#include "spikecore/model.hpp"

#include <cmath>

namespace spikecore::dse {

bool TrainedModel::any_recurrent() const {
    for (const TrainedLayer& l : layers) {
        if (l.topology != sys::Topology::FF) {
            return true;
        }
    }
    return false;
}

void TrainedModel::validate() const {
    if (layers.empty()) {
        fail(ErrorCategory::config, "model has no layers");
    }
    if (input_channels < 1 || input_channels > neuron::kMaxNeuronsPerCore) {
        fail(ErrorCategory::capacity, "input channel count " + std::to_string(input_channels) + " outside [1, " +
                                          std::to_string(neuron::kMaxNeuronsPerCore) + "]");
    }
    if (timesteps < 1) {
        fail(ErrorCategory::config, "timesteps must be at least 1");
    }
    if (potential_headroom < 0 || current_headroom < 0) {
        fail(ErrorCategory::config, "accumulator headroom must be non-negative");
    }
    int sources = input_channels;
    for (std::size_t i = 0; i < layers.size(); ++i) {
        const TrainedLayer& l = layers[i];
        const std::string where = "layer " + std::to_string(i) + ": ";
        if (l.neuron_count < 1 || l.neuron_count > neuron::kMaxNeuronsPerCore) {
            fail(ErrorCategory::capacity, where + "neuron count " + std::to_string(l.neuron_count) +
                                              " outside [1, " + std::to_string(neuron::kMaxNeuronsPerCore) + "]");
        }
        const auto n_ff = static_cast<std::size_t>(sources) * l.neuron_count;
        if (l.ff.size() != n_ff) {
            fail(ErrorCategory::config, where + "expected " + std::to_string(n_ff) + " feedforward weights, got " +
                                            std::to_string(l.ff.size()));
        }
        std::size_t n_rec = 0;
        if (l.topology == sys::Topology::ATA_T) {
            n_rec = static_cast<std::size_t>(l.neuron_count) * l.neuron_count;
        } else if (l.topology == sys::Topology::ATA_F) {
            n_rec = static_cast<std::size_t>(l.neuron_count);
        }
        if (l.rec.size() != n_rec) {
            fail(ErrorCategory::config, where + "expected " + std::to_string(n_rec) + " recurrent weights, got " +
                                            std::to_string(l.rec.size()));
        }
        if (!(l.threshold > 0) || !std::isfinite(l.threshold)) {
            fail(ErrorCategory::value, where + "threshold must be positive and finite");
        }
        auto unit = [&](double f, const char* name) {
            if (!(f >= 0.0 && f <= 1.0)) {
                fail(ErrorCategory::value, where + name + " must lie in [0, 1]");
            }
        };
        unit(l.beta, "beta");
        if (l.model == neuron::NeuronModelKind::Synaptic) {
            unit(l.alpha, "alpha");
        }
        if ((l.potential_headroom && *l.potential_headroom < 0) || (l.current_headroom && *l.current_headroom < 0)) {
            fail(ErrorCategory::config, where + "accumulator headroom must be non-negative");
        }
        sources = l.neuron_count;
    }
}

std::string to_string(const CandidateConfig& c) {
    return "ff=" + std::to_string(c.ff_bits) + " rec=" + std::to_string(c.rec_bits) +
           " leak=" + std::to_string(c.leak_bits);
}

sys::QuantizedNetwork quantize_model(const TrainedModel& model, const CandidateConfig& cfg) {
    model.validate();
    if (cfg.leak_bits < 1 || cfg.leak_bits > 8) {
        fail(ErrorCategory::config, "leak precision " + std::to_string(cfg.leak_bits) + " outside [1, 8]");
    }
    const fxp::QFormat wf(cfg.ff_bits);
    if (model.any_recurrent()) {
        (void)fxp::QFormat(cfg.rec_bits);
    }

    sys::QuantizedNetwork q;
    q.config.input_channels = model.input_channels;
    q.config.timesteps = model.timesteps;
    q.config.output_queue_capacity = model.output_queue_capacity;

    int sources = model.input_channels;
    for (std::size_t i = 0; i < model.layers.size(); ++i) {
        const TrainedLayer& l = model.layers[i];
        sys::CoreConfig c;
        c.core_id = static_cast<uint8_t>(i);
        c.topology = l.topology;
        c.model = l.model;
        c.neuron_count = l.neuron_count;
        c.source_count = sources;
        c.weight_bits = cfg.ff_bits;
        c.rec_bits = l.topology == sys::Topology::FF ? 0 : cfg.rec_bits;
        c.potential_bits = cfg.ff_bits + l.potential_headroom.value_or(model.potential_headroom);
        c.current_bits = l.model == neuron::NeuronModelKind::Synaptic
                             ? cfg.ff_bits + l.current_headroom.value_or(model.current_headroom)
                             : 0;
        if (c.potential_bits > fxp::kMaxBits || c.current_bits > fxp::kMaxBits) {
            fail(ErrorCategory::config, "layer " + std::to_string(i) + ": accumulator width exceeds " +
                                            std::to_string(fxp::kMaxBits) + " bits at " + to_string(cfg));
        }
        c.units = cg::SelectionUnits::for_leak_bits(cfg.leak_bits);
        c.beta = l.model == neuron::NeuronModelKind::IF ? cg::DecayRate::bypass()
                                                         : cg::encode_decay(l.beta, cfg.leak_bits);
        c.alpha = l.model == neuron::NeuronModelKind::Synaptic ? cg::encode_decay(l.alpha, cfg.leak_bits)
                                                                : cg::DecayRate::bypass();
        c.reset = l.reset;
        c.ff_queue_capacity = l.ff_queue_capacity;
        c.rec_queue_capacity = l.rec_queue_capacity;

        const fxp::QuantizedWeights qw = fxp::quantize_weights(l.ff, wf);
        sys::LayerWeights w;
        w.ff_scale = qw.weight_scale;
        for (const fxp::QWord& v : qw.values) {
            w.ff.push_back(v.value());
        }
        if (c.is_recurrent()) {
            for (const fxp::QWord& v : fxp::quantize_with_scale(l.rec, c.rec_format(), w.ff_scale)) {
                w.rec.push_back(v.value());
            }
        }
        c.threshold = fxp::quantize_threshold(l.threshold, w.ff_scale, c.potential_format()).value();

        q.config.cores.push_back(c);
        q.layers.push_back(std::move(w));
        sources = l.neuron_count;
    }
    q.validate();
    return q;
}

} // namespace spikecore::dse
