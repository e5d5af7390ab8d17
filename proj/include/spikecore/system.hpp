// SPDX-FileCopyrightText: 2026 spikecore contributors
//
// SPDX-License-Identifier: Apache-2.0

// Core controller, multi-core pipeline, host driver and the dense reference
// simulator.
//
// Per time step a core runs: FF-Integ for every inbound ASPL in arrival
// order; on EOTS/EOIN, REC-Integ over the ASCL buffered in the previous step;
// the leak/spike sweep over neurons 0..N-1; then the terminator is forwarded.
// EOIN additionally zeroes every neuron and drops pending ASCL.

#pragma once

#include <cstdint>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "spikecore/aer.hpp"
#include "spikecore/network.hpp"
#include "spikecore/neuron.hpp"
#include "spikecore/spi.hpp"

namespace spikecore::sys {

inline constexpr int kHostSource = -1;

struct TraceRecord {
    int step = 0;
    int source = kHostSource; // core id, or kHostSource for injected inputs
    uint64_t seq = 0;         // per-source emission order
    aer::AerPacket packet;

    friend bool operator==(const TraceRecord&, const TraceRecord&) = default;
};

// Membrane and synaptic-current values of every neuron after the leak sweep,
// before any lazy reset.
struct StateSnapshot {
    std::vector<int64_t> membrane;
    std::vector<int64_t> syn_current; // empty unless Synaptic

    friend bool operator==(const StateSnapshot&, const StateSnapshot&) = default;
};

struct StepRecord {
    std::vector<uint16_t> spikes; // ascending neuron index
    std::optional<StateSnapshot> state;
};

// Values decoded from the configuration registers. Refreshed whenever the
// register file changes.
struct RuntimeParams {
    neuron::NeuronModelKind model = neuron::NeuronModelKind::LIF;
    int active_neurons = 0;
    neuron::LeakFireConfig leak;
    bool recurrence = false;
    int timesteps = 0;
};

enum class Blocking : uint8_t { No, Yes };

class Core final : public spi::SpiSlave {
public:
    explicit Core(const CoreConfig& design);

    const CoreConfig& design() const { return design_; }

    // Structural view, fixed at construction.
    bool has_recurrent_queue() const { return rec_queue_.has_value(); }
    bool has_recurrent_memory() const { return rec_mem_.has_value(); }
    bool has_self_weights() const { return self_mem_.has_value(); }

    // SpiSlave
    uint8_t core_id() const override { return design_.core_id; }
    spi::ConfigRegisterFile& registers() override { return registers_; }
    const spi::ConfigRegisterFile& registers() const override { return registers_; }
    uint8_t read_memory(spi::Target target, int row, int byte) const override;
    void write_memory(spi::Target target, int row, int byte, uint8_t value) override;
    std::mutex& frame_mutex() const override { return frame_mutex_; }

    // One scheduling quantum of the controller. With Blocking::No it never
    // waits: it consumes at most one inbound packet, then advances the
    // leak sweep until a send is refused (the packet is held) or the step is
    // done. With Blocking::Yes it waits on both channels. Returns false when
    // nothing happened (no input, or still held; or `in` closed when
    // blocking).
    bool tick(aer::HandshakeChannel& in, aer::HandshakeChannel& out, Blocking mode);

    // True between a terminator and its successful forwarding.
    bool mid_step() const { return phase_ != Phase::Integrate; }
    int completed_samples() const { return completed_samples_; }
    // Drops any half-finished step (after an aborted run). Neuron state is
    // left as is.
    void restart();

    // Decodes and validates the registers. Throws ErrorCategory::config.
    const RuntimeParams& params();

    void set_recording(bool states, bool trace);
    void clear_records();
    const std::vector<StepRecord>& steps() const { return records_; }
    const std::vector<TraceRecord>& trace() const { return trace_; }

    neuron::NeuronState neuron_state(int n) const { return state_mem_.load(n); }

private:
    enum class Phase : uint8_t { Integrate, Sweep, Forward };

    void ff_integrate(uint16_t source);
    void rec_integrate();
    void begin_step_end(const aer::AerPacket& terminator);
    bool emit(aer::HandshakeChannel& out, const aer::AerPacket& p, Blocking mode);
    void note(const aer::AerPacket& p);
    void integrate_neuron(int n, int64_t weight);

    CoreConfig design_;
    spi::ConfigRegisterFile registers_;
    mutable std::mutex frame_mutex_;

    neuron::SynapticMemory ff_mem_;
    std::optional<neuron::SynapticMemory> rec_mem_;  // ATA_T
    std::optional<neuron::SynapticMemory> self_mem_; // ATA_F
    neuron::StateMemory state_mem_;
    std::optional<aer::BoundedQueue<uint16_t>> rec_queue_;

    RuntimeParams params_;
    uint64_t params_version_ = ~uint64_t{0};

    Phase phase_ = Phase::Integrate;
    aer::AerPacket terminator_;
    int sweep_next_ = 0;
    std::optional<aer::AerPacket> held_;
    int step_ = 0;
    int completed_samples_ = 0;

    bool record_states_ = false;
    bool record_trace_ = false;
    std::vector<StepRecord> records_;
    std::vector<TraceRecord> trace_;
    uint64_t seq_ = 0;
};

enum class Schedule : uint8_t { RoundRobin, Threaded };

struct RunOptions {
    Schedule schedule = Schedule::RoundRobin;
    bool record_states = false;
    bool record_trace = false;
    // Round-robin only: consecutive scheduling rounds without progress
    // before the run is declared deadlocked.
    int watchdog_rounds = 64;
};

struct InferenceResult {
    int predicted = 0;
    std::vector<uint32_t> spike_counts;                   // per output neuron
    std::vector<std::vector<std::vector<uint16_t>>> spikes; // [layer][step]
    std::optional<std::vector<std::vector<StateSnapshot>>> states; // [layer][step]
    std::vector<TraceRecord> trace; // sorted by (step, source, seq)

    friend bool operator==(const InferenceResult&, const InferenceResult&) = default;
};

// Stable text rendering, used for byte comparisons between runs.
std::string serialize(const InferenceResult& r, bool include_trace = true);

// Argmax with ties going to the lowest index; 0 for an all-zero vector.
int argmax_lowest(const std::vector<uint32_t>& counts);

// A chain of cores joined by handshake channels plus the shared SPI bus.
// driver -> core 0 -> ... -> core L-1 -> collector.
class Network {
public:
    explicit Network(const NetworkConfig& config);

    Network(const Network&) = delete;
    Network& operator=(const Network&) = delete;

    const NetworkConfig& config() const { return config_; }
    std::size_t size() const { return cores_.size(); }
    Core& core(std::size_t i) { return *cores_.at(i); }
    const Core& core(std::size_t i) const { return *cores_.at(i); }
    spi::SpiBus& bus() { return *bus_; }

    InferenceResult run(const EventSample& sample, const RunOptions& options = {});

    // Stall counters of each link, driver link first.
    std::vector<std::size_t> stalled_sends() const;

private:
    void reset_links();
    void run_round_robin(const std::vector<aer::AerPacket>& inputs, std::vector<uint32_t>& counts,
                         int watchdog_rounds);
    void run_threaded(const std::vector<aer::AerPacket>& inputs, std::vector<uint32_t>& counts);

    NetworkConfig config_;
    std::vector<std::unique_ptr<Core>> cores_;
    std::vector<std::unique_ptr<aer::HandshakeChannel>> links_; // size() + 1
    std::unique_ptr<spi::SpiBus> bus_;
};

// Packet stream the host injects for one sample: each step's addresses as
// ASPL followed by EOTS, padded with empty steps to the network's timestep
// count, the last terminator being EOIN.
std::vector<aer::AerPacket> input_packets(const EventSample& sample, const NetworkConfig& net);

// Programs every core through SPI frames only: registers, feedforward and
// recurrent weight bytes, and zeroed neuron state. Geometry is checked for
// every core before the first frame goes out.
void load_model_over_spi(const QuantizedNetwork& model, Network& net);

// Reads a whole memory image of one core back over SPI.
std::vector<uint8_t> read_memory_image(Network& net, std::size_t core, spi::Target target);

// Convenience: build a network and load it.
std::unique_ptr<Network> build_network(const QuantizedNetwork& model);

InferenceResult run_inference(Network& net, const EventSample& sample, const RunOptions& options = {});

// Straight nested-loop simulator over the integer weights. Shares no
// arithmetic code with the cores; used as the equivalence oracle.
InferenceResult dense_reference(const QuantizedNetwork& model, const EventSample& sample, bool record_states = false);

} // namespace spikecore::sys
