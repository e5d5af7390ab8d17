// SPDX-FileCopyrightText: 2026 spikecore contributors
//
// SPDX-License-Identifier: Apache-2.0

#include "spikecore/cost.hpp"

#include <algorithm>
#include <cmath>

namespace spikecore::cost {

CoreMemoryBits core_memory_bits(const sys::CoreConfig& core) {
    CoreMemoryBits b;
    b.ff = core.ff_geometry().total_bits();
    b.state = core.state_geometry().total_bits();
    if (core.has_recurrent_memory()) {
        b.rec = core.rec_geometry()->total_bits();
    }
    return b;
}

int64_t primitives_for(int64_t bits, int64_t primitive_bits) {
    if (primitive_bits < 1) {
        fail(ErrorCategory::value, "block RAM primitive size must be positive");
    }
    if (bits <= 0) {
        return 0;
    }
    return (bits + primitive_bits - 1) / primitive_bits;
}

double estimate_core_bram(const sys::CoreConfig& core, int64_t primitive_bits) {
    const CoreMemoryBits b = core_memory_bits(core);
    return static_cast<double>(primitives_for(b.ff, primitive_bits) + primitives_for(b.state, primitive_bits) +
                               primitives_for(b.rec, primitive_bits));
}

double estimate_bram(const sys::NetworkConfig& net, int64_t primitive_bits) {
    double total = 0;
    for (const sys::CoreConfig& c : net.cores) {
        total += estimate_core_bram(c, primitive_bits);
    }
    return total;
}

// --- calibration ------------------------------------------------------------

neuron::NeuronModelKind CalibrationTable::key_model(neuron::NeuronModelKind m) {
    return m == neuron::NeuronModelKind::IF ? neuron::NeuronModelKind::LIF : m;
}

CalibrationTable CalibrationTable::placeholder() {
    CalibrationTable t;
    using neuron::NeuronModelKind;
    using sys::Topology;
    // Hand-picked round numbers. Synaptic pays for a second accumulator,
    // recurrent topologies for the extra queue and integration path.
    const double lut_base[3] = {120, 150, 170};
    const double ff_base[3] = {90, 115, 130};
    for (int topo = 0; topo < 3; ++topo) {
        const auto tp = static_cast<Topology>(topo);
        const double rec_lut = tp == Topology::FF ? 0 : (tp == Topology::ATA_F ? 6 : 9);
        const double rec_ff = tp == Topology::FF ? 0 : (tp == Topology::ATA_F ? 3 : 5);
        t.set(tp, NeuronModelKind::LIF,
              {{lut_base[topo], 14, rec_lut}, {ff_base[topo], 6, rec_ff}});
        t.set(tp, NeuronModelKind::Synaptic,
              {{lut_base[topo] + 40, 22, rec_lut}, {ff_base[topo] + 30, 9, rec_ff}});
    }
    t.label_ = "placeholder (non-physical)";
    t.placeholder_ = true;
    return t;
}

void CalibrationTable::set(sys::Topology topology, neuron::NeuronModelKind model, const CalibrationEntry& entry) {
    for (const LinearFit& f : {entry.luts, entry.flipflops}) {
        if (!std::isfinite(f.intercept) || !std::isfinite(f.per_ff_bit) || !std::isfinite(f.per_rec_bit)) {
            fail(ErrorCategory::calibration, "calibration coefficients must be finite");
        }
    }
    entries_[{topology, key_model(model)}] = entry;
    placeholder_ = false;
}

bool CalibrationTable::contains(sys::Topology topology, neuron::NeuronModelKind model) const {
    return entries_.count({topology, key_model(model)}) != 0;
}

const CalibrationEntry& CalibrationTable::at(sys::Topology topology, neuron::NeuronModelKind model) const {
    auto it = entries_.find({topology, key_model(model)});
    if (it == entries_.end()) {
        fail(ErrorCategory::calibration, std::string("no calibration entry for ") + sys::to_string(topology) + " / " +
                                             neuron::to_string(model));
    }
    return it->second;
}

LogicEstimate estimate_core_logic(sys::Topology topology, neuron::NeuronModelKind model, int ff_bits, int rec_bits,
                                  const CalibrationTable& table) {
    const CalibrationEntry& e = table.at(topology, model);
    LogicEstimate r;
    if (ff_bits < 1) {
        r.warnings.push_back("feedforward width " + std::to_string(ff_bits) +
                             " is outside the calibrated domain; only the intercept applies");
        ff_bits = 0;
    }
    if (topology == sys::Topology::FF) {
        rec_bits = 0;
    }
    r.luts = std::max(0.0, e.luts.eval(ff_bits, rec_bits));
    r.flipflops = std::max(0.0, e.flipflops.eval(ff_bits, rec_bits));
    return r;
}

LogicEstimate estimate_logic(const sys::NetworkConfig& net, const CalibrationTable& table) {
    LogicEstimate total;
    for (const sys::CoreConfig& c : net.cores) {
        LogicEstimate e = estimate_core_logic(c.topology, c.model, c.weight_bits, c.is_recurrent() ? c.rec_bits : 0,
                                              table);
        total.luts += e.luts;
        total.flipflops += e.flipflops;
        total.warnings.insert(total.warnings.end(), e.warnings.begin(), e.warnings.end());
    }
    return total;
}

ResourceEstimate estimate_resources(const sys::NetworkConfig& net, const CalibrationTable& table,
                                    int64_t primitive_bits) {
    const LogicEstimate logic = estimate_logic(net, table);
    return {logic.luts, logic.flipflops, estimate_bram(net, primitive_bits)};
}

// --- objective --------------------------------------------------------------

void CostWeights::validate() const {
    constexpr double tol = 1e-9;
    for (double v : {c_h, c_a, c_lut, c_ff, c_bram}) {
        if (!(v >= 0.0 && v <= 1.0)) {
            fail(ErrorCategory::value, "cost weights must each lie in [0, 1]");
        }
    }
    if (std::abs(c_h + c_a - 1.0) > tol) {
        fail(ErrorCategory::value, "hardware and accuracy weights must sum to 1");
    }
    if (std::abs(c_lut + c_ff + c_bram - 1.0) > tol) {
        fail(ErrorCategory::value, "LUT, flip-flop and BRAM weights must sum to 1");
    }
}

Norms candidate_max_norms(std::span<const ResourceEstimate> estimates) {
    Norms n{0, 0, 0};
    for (const ResourceEstimate& e : estimates) {
        n.max_luts = std::max(n.max_luts, e.luts);
        n.max_flipflops = std::max(n.max_flipflops, e.flipflops);
        n.max_brams = std::max(n.max_brams, e.brams);
    }
    for (double* v : {&n.max_luts, &n.max_flipflops, &n.max_brams}) {
        if (*v <= 0) {
            *v = 1;
        }
    }
    return n;
}

NormalizedResources normalize(const ResourceEstimate& hw, const Norms& norms) {
    if (!(norms.max_luts > 0 && norms.max_flipflops > 0 && norms.max_brams > 0)) {
        fail(ErrorCategory::value, "normalization denominators must be positive");
    }
    if (hw.luts < 0 || hw.flipflops < 0 || hw.brams < 0) {
        fail(ErrorCategory::value, "resource estimates must be non-negative");
    }
    return {hw.luts / norms.max_luts, hw.flipflops / norms.max_flipflops, hw.brams / norms.max_brams};
}

double hw_cost(const NormalizedResources& n, const CostWeights& w) {
    return w.c_h * (w.c_lut * n.lut + w.c_ff * n.ff + w.c_bram * n.bram);
}

double acc_cost(double accuracy, const CostWeights& w) {
    if (!(accuracy >= 0.0 && accuracy <= 1.0)) {
        fail(ErrorCategory::value, "accuracy must lie in [0, 1]");
    }
    return w.c_a * (1.0 - accuracy);
}

double total_cost(const NormalizedResources& n, double accuracy, const CostWeights& w) {
    w.validate();
    return hw_cost(n, w) + acc_cost(accuracy, w);
}

double total_cost(const ResourceEstimate& hw, double accuracy, const CostWeights& w, const Norms& norms) {
    return total_cost(normalize(hw, norms), accuracy, w);
}

} // namespace spikecore::cost
