// SPDX-FileCopyrightText: 2026 spikecore contributors
//
// SPDX-License-Identifier: Apache-2.0

// Hardware cost: parametric BRAM count, per-core linear LUT / flip-flop
// regression, and the weighted hardware-plus-accuracy objective.

#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "spikecore/network.hpp"

namespace spikecore::cost {

inline constexpr int64_t kDefaultBramBits = 36 * 1024; // one 36 Kb block RAM primitive

struct ResourceEstimate {
    double luts = 0;
    double flipflops = 0;
    double brams = 0;

    friend bool operator==(const ResourceEstimate&, const ResourceEstimate&) = default;
};

// Memories that map onto block RAM: feedforward synapses, neuron state and,
// for ATA_T only, recurrent synapses. ATA_F self-weights are a handful of
// registers and are not counted.
struct CoreMemoryBits {
    int64_t ff = 0;
    int64_t state = 0;
    int64_t rec = 0;
};

CoreMemoryBits core_memory_bits(const sys::CoreConfig& core);
int64_t primitives_for(int64_t bits, int64_t primitive_bits = kDefaultBramBits);
double estimate_core_bram(const sys::CoreConfig& core, int64_t primitive_bits = kDefaultBramBits);
double estimate_bram(const sys::NetworkConfig& net, int64_t primitive_bits = kDefaultBramBits);

struct LinearFit {
    double intercept = 0;
    double per_ff_bit = 0;
    double per_rec_bit = 0;

    double eval(int ff_bits, int rec_bits) const {
        return intercept + per_ff_bit * ff_bits + per_rec_bit * rec_bits;
    }
    friend bool operator==(const LinearFit&, const LinearFit&) = default;
};

struct CalibrationEntry {
    LinearFit luts;
    LinearFit flipflops;
    friend bool operator==(const CalibrationEntry&, const CalibrationEntry&) = default;
};

// Keyed by (topology, model). IF shares the LIF datapath and therefore its
// entry.
class CalibrationTable {
public:
    // Non-physical placeholder coefficients: monotone in both bit-widths and
    // good enough to exercise the search, not fitted to any synthesis run.
    static CalibrationTable placeholder();

    void set(sys::Topology topology, neuron::NeuronModelKind model, const CalibrationEntry& entry);
    // Throws ErrorCategory::calibration when the pair is missing.
    const CalibrationEntry& at(sys::Topology topology, neuron::NeuronModelKind model) const;
    bool contains(sys::Topology topology, neuron::NeuronModelKind model) const;

    const std::string& label() const { return label_; }
    void set_label(std::string label) { label_ = std::move(label); }
    bool is_placeholder() const { return placeholder_; }
    void set_placeholder(bool on) { placeholder_ = on; }

    const std::map<std::pair<sys::Topology, neuron::NeuronModelKind>, CalibrationEntry>& entries() const {
        return entries_;
    }

    friend bool operator==(const CalibrationTable&, const CalibrationTable&) = default;

private:
    static neuron::NeuronModelKind key_model(neuron::NeuronModelKind m);

    std::map<std::pair<sys::Topology, neuron::NeuronModelKind>, CalibrationEntry> entries_;
    std::string label_ = "custom";
    bool placeholder_ = false;
};

struct LogicEstimate {
    double luts = 0;
    double flipflops = 0;
    std::vector<std::string> warnings;
};

// One core. ff_bits < 1 evaluates to the intercept and records an
// out-of-domain warning.
LogicEstimate estimate_core_logic(sys::Topology topology, neuron::NeuronModelKind model, int ff_bits, int rec_bits,
                                  const CalibrationTable& table);
// Sum over cores; FF cores contribute no recurrent bits.
LogicEstimate estimate_logic(const sys::NetworkConfig& net, const CalibrationTable& table);

ResourceEstimate estimate_resources(const sys::NetworkConfig& net, const CalibrationTable& table,
                                    int64_t primitive_bits = kDefaultBramBits);

struct CostWeights {
    double c_h = 0.5;
    double c_a = 0.5;
    double c_lut = 0.33;
    double c_ff = 0.33;
    double c_bram = 0.34;

    // c_h + c_a = 1 and c_lut + c_ff + c_bram = 1 within 1e-9, each in [0, 1].
    // Throws ErrorCategory::value.
    void validate() const;
};

struct Norms {
    double max_luts = 1;
    double max_flipflops = 1;
    double max_brams = 1;
};

struct NormalizedResources {
    double lut = 0;
    double ff = 0;
    double bram = 0;
};

// Per-resource maximum over the estimates; a zero maximum becomes 1 so the
// normalized value stays 0.
Norms candidate_max_norms(std::span<const ResourceEstimate> estimates);

NormalizedResources normalize(const ResourceEstimate& hw, const Norms& norms);

double hw_cost(const NormalizedResources& n, const CostWeights& w);
double acc_cost(double accuracy, const CostWeights& w);
double total_cost(const NormalizedResources& n, double accuracy, const CostWeights& w);
double total_cost(const ResourceEstimate& hw, double accuracy, const CostWeights& w, const Norms& norms);

} // namespace spikecore::cost
