// SPDX-FileCopyrightText: 2026 spikecore contributors
//
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <random>

#include "spikecore/error.hpp"
#include "spikecore/network.hpp"

namespace spikecore::testing {

// Category of the spikecore::Error thrown by fn, or nullopt if none.
std::optional<ErrorCategory> error_of(const std::function<void()>& fn);

struct RandomNetOptions {
    int max_layers = 3;
    int max_neurons = 16;
    int max_channels = 16;
    int max_timesteps = 8;
    std::vector<int> weight_bits{4, 6, 8};
    // Small queues exercise back-pressure.
    std::size_t max_ff_queue = 6;
};

// Random topology, model, precisions, decay rates, reset policy and weights.
// Thresholds are drawn low enough that most networks spike.
sys::QuantizedNetwork random_network(std::mt19937_64& rng, const RandomNetOptions& opts = {});

// Random event sample for `net`: between 1 and net.timesteps steps, each with
// a random subset of channels (possibly repeated addresses).
sys::EventSample random_sample(std::mt19937_64& rng, const sys::NetworkConfig& net, double density = 0.4);

// Same network with every IF core rewritten as LIF with the decay bypassed.
sys::QuantizedNetwork if_as_bypass_lif(const sys::QuantizedNetwork& q);

int uniform_int(std::mt19937_64& rng, int lo, int hi);

} // namespace spikecore::testing
