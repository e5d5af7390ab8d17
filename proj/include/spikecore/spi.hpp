// SPDX-FileCopyrightText: 2026 spikecore contributors
//
// SPDX-License-Identifier: Apache-2.0

// SPI slave interface of a core: the 23-bit address word codec, the
// configuration register file and atomic 46-cycle frames.
//
// Address word:
//   bit 22      mode: 1 = memory access, 0 = configuration write
//   bit 21      R/W: 1 = write, 0 = read (memory access only)
//   bits 20:19  target: 00 neuron state, 01 feedforward synapses, 10 recurrent synapses
//   bits 18:0   payload
//     neuron state   [7:0] row, [18:8] byte offset
//     synaptic       [12:0] row, [18:13] byte offset
//     config write   [18:15] register index, [14:0] value bits 14..0
//
// A configuration write may carry a data word; its 23 bits supply value bits
// 37..15. Memory writes commit the low 8 bits of the data word.

#pragma once

#include <array>
#include <cstdint>
#include <mutex>
#include <optional>
#include <vector>

#include "spikecore/error.hpp"

namespace spikecore::spi {

inline constexpr int kFrameCycles = 46;
inline constexpr uint32_t kWordMask = (1U << 23) - 1;

enum class Mode : uint8_t { ConfigWrite = 0, MemoryAccess = 1 };
enum class Rw : uint8_t { Read = 0, Write = 1 };
enum class Target : uint8_t { NeuronState = 0, FeedforwardSyn = 1, RecurrentSyn = 2 };

enum class Register : uint8_t {
    core_select = 0,
    neuron_model = 1,
    active_neuron_count = 2,
    threshold = 3,
    decay_beta = 4,
    decay_alpha = 5,
    reset_policy = 6,
    timestep_count = 7,
    recurrent_mode = 8,
    spi_state = 9,
    ctrl_coord_a = 10,
    ctrl_coord_b = 11,
};
inline constexpr int kRegisterCount = 12;

const char* to_string(Register r);

struct SpiCommand {
    Mode mode = Mode::ConfigWrite;
    Rw rw = Rw::Read;
    Target target = Target::NeuronState;
    uint32_t payload = 0; // 19 bits

    static SpiCommand memory(Rw rw, Target target, int row, int byte_offset);
    static SpiCommand config(Register reg, uint32_t value_low15);

    int row() const;
    int byte_offset() const;
    Register reg() const;
    uint32_t config_value_low() const { return payload & 0x7FFF; }

    friend bool operator==(const SpiCommand&, const SpiCommand&) = default;
};

uint32_t encode_address_word(const SpiCommand& cmd);
// Configuration words ignore bits 21:19, which decode as Read / NeuronState.
SpiCommand decode_address_word(uint32_t word);

// Write-only from the bus; the controller reads them internally.
class ConfigRegisterFile {
public:
    uint64_t get(Register r) const { return values_[static_cast<std::size_t>(r)]; }
    void set(Register r, uint64_t v) {
        values_[static_cast<std::size_t>(r)] = v;
        ++version_;
    }
    // Increments on every write; lets the controller cache decoded values.
    uint64_t version() const { return version_; }

private:
    std::array<uint64_t, kRegisterCount> values_{};
    uint64_t version_ = 0;
};

class SpiSlave {
public:
    virtual ~SpiSlave() = default;

    virtual uint8_t core_id() const = 0;
    virtual ConfigRegisterFile& registers() = 0;
    virtual const ConfigRegisterFile& registers() const = 0;
    // Throw ErrorCategory::address for addresses outside the geometry.
    virtual uint8_t read_memory(Target target, int row, int byte) const = 0;
    virtual void write_memory(Target target, int row, int byte, uint8_t value) = 0;
    // Held for the duration of a frame; the controller takes it around every
    // compute phase so nothing interleaves with an SPI access.
    virtual std::mutex& frame_mutex() const = 0;

    bool selected() const { return registers().get(Register::core_select) == core_id(); }
};

// One complete address + data frame against one slave. Returns the MISO byte
// for a memory read by the selected core, nullopt otherwise.
std::optional<uint8_t> run_frame(uint32_t address_word, std::optional<uint32_t> data_word, SpiSlave& slave);

struct FrameRecord {
    uint32_t address_word = 0;
    std::optional<uint32_t> data_word;
    std::optional<uint8_t> miso;
};

// Single master driving every slave on a shared bus. Each frame is seen by
// all slaves; only the selected one responds.
class SpiBus {
public:
    explicit SpiBus(std::vector<SpiSlave*> slaves);

    std::optional<uint8_t> transfer(uint32_t address_word, std::optional<uint32_t> data_word);

    void select_core(uint8_t id);
    void write_register(Register reg, uint64_t value);
    void write_memory(Target target, int row, int byte, uint8_t value);
    uint8_t read_memory(Target target, int row, int byte);

    std::size_t frame_count() const { return frames_; }
    void set_logging(bool on) { logging_ = on; }
    const std::vector<FrameRecord>& log() const { return log_; }

private:
    std::vector<SpiSlave*> slaves_;
    std::size_t frames_ = 0;
    bool logging_ = false;
    std::vector<FrameRecord> log_;
};

} // namespace spikecore::spi
