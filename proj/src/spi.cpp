// SPDX-FileCopyrightText: 2026 spikecore contributors
//
// SPDX-License-Identifier: Apache-2.0

#include "spikecore/spi.hpp"

#include <string>

namespace spikecore::spi {

const char* to_string(Register r) {
    switch (r) {
    case Register::core_select: return "core_select";
    case Register::neuron_model: return "neuron_model";
    case Register::active_neuron_count: return "active_neuron_count";
    case Register::threshold: return "threshold";
    case Register::decay_beta: return "decay_beta";
    case Register::decay_alpha: return "decay_alpha";
    case Register::reset_policy: return "reset_policy";
    case Register::timestep_count: return "timestep_count";
    case Register::recurrent_mode: return "recurrent_mode";
    case Register::spi_state: return "spi_state";
    case Register::ctrl_coord_a: return "ctrl_coord_a";
    case Register::ctrl_coord_b: return "ctrl_coord_b";
    }
    return "?";
}

SpiCommand SpiCommand::memory(Rw rw, Target target, int row, int byte_offset) {
    SpiCommand c;
    c.mode = Mode::MemoryAccess;
    c.rw = rw;
    c.target = target;
    if (target == Target::NeuronState) {
        if (row < 0 || row > 0xFF || byte_offset < 0 || byte_offset > 0x7FF) {
            fail(ErrorCategory::address, "neuron-state address does not fit the SPI payload");
        }
        c.payload = static_cast<uint32_t>(row) | (static_cast<uint32_t>(byte_offset) << 8);
    } else {
        if (row < 0 || row > 0x1FFF || byte_offset < 0 || byte_offset > 0x3F) {
            fail(ErrorCategory::address, "synaptic address does not fit the SPI payload");
        }
        c.payload = static_cast<uint32_t>(row) | (static_cast<uint32_t>(byte_offset) << 13);
    }
    return c;
}

SpiCommand SpiCommand::config(Register reg, uint32_t value_low15) {
    SpiCommand c;
    c.mode = Mode::ConfigWrite;
    c.payload = (static_cast<uint32_t>(reg) << 15) | (value_low15 & 0x7FFF);
    return c;
}

int SpiCommand::row() const {
    return static_cast<int>(target == Target::NeuronState ? (payload & 0xFF) : (payload & 0x1FFF));
}

int SpiCommand::byte_offset() const {
    return static_cast<int>(target == Target::NeuronState ? (payload >> 8) & 0x7FF : (payload >> 13) & 0x3F);
}

Register SpiCommand::reg() const {
    const uint32_t index = (payload >> 15) & 0xF;
    if (index >= kRegisterCount) {
        fail(ErrorCategory::protocol, "configuration register index " + std::to_string(index) + " does not exist");
    }
    return static_cast<Register>(index);
}

uint32_t encode_address_word(const SpiCommand& cmd) {
    if (cmd.payload > 0x7FFFF) {
        fail(ErrorCategory::protocol, "SPI payload exceeds 19 bits");
    }
    if (cmd.mode == Mode::ConfigWrite) {
        return cmd.payload;
    }
    const auto target = static_cast<uint32_t>(cmd.target);
    if (target > 2) {
        fail(ErrorCategory::protocol, "invalid SPI memory target");
    }
    return (1U << 22) | (static_cast<uint32_t>(cmd.rw) << 21) | (target << 19) | cmd.payload;
}

SpiCommand decode_address_word(uint32_t word) {
    if (word > kWordMask) {
        fail(ErrorCategory::protocol, "SPI address word exceeds 23 bits");
    }
    SpiCommand c;
    c.payload = word & 0x7FFFF;
    if (((word >> 22) & 1U) == 0) {
        c.mode = Mode::ConfigWrite;
        return c;
    }
    c.mode = Mode::MemoryAccess;
    c.rw = static_cast<Rw>((word >> 21) & 1U);
    const uint32_t target = (word >> 19) & 3U;
    if (target == 3) {
        fail(ErrorCategory::protocol, "SPI target 11 is not a memory");
    }
    c.target = static_cast<Target>(target);
    return c;
}

std::optional<uint8_t> run_frame(uint32_t address_word, std::optional<uint32_t> data_word, SpiSlave& slave) {
    const SpiCommand cmd = decode_address_word(address_word);
    if (data_word && *data_word > kWordMask) {
        fail(ErrorCategory::protocol, "SPI data word exceeds 23 bits");
    }

    std::lock_guard frame(slave.frame_mutex());

    if (cmd.mode == Mode::ConfigWrite) {
        const Register reg = cmd.reg();
        // core_select is latched by every core so the master can broadcast it.
        if (reg != Register::core_select && !slave.selected()) {
            return std::nullopt;
        }
        const uint64_t value = uint64_t{cmd.config_value_low()} | (uint64_t{data_word.value_or(0)} << 15);
        slave.registers().set(reg, value);
        return std::nullopt;
    }

    if (!slave.selected()) {
        return std::nullopt;
    }
    if (cmd.rw == Rw::Write) {
        if (!data_word) {
            fail(ErrorCategory::protocol, "memory write frame without a data word");
        }
        slave.write_memory(cmd.target, cmd.row(), cmd.byte_offset(), static_cast<uint8_t>(*data_word & 0xFF));
        return std::nullopt;
    }
    return slave.read_memory(cmd.target, cmd.row(), cmd.byte_offset());
}

SpiBus::SpiBus(std::vector<SpiSlave*> slaves) : slaves_(std::move(slaves)) {
    for (std::size_t i = 0; i < slaves_.size(); ++i) {
        for (std::size_t j = i + 1; j < slaves_.size(); ++j) {
            if (slaves_[i]->core_id() == slaves_[j]->core_id()) {
                fail(ErrorCategory::config, "two cores share SPI id " + std::to_string(slaves_[i]->core_id()));
            }
        }
    }
}

std::optional<uint8_t> SpiBus::transfer(uint32_t address_word, std::optional<uint32_t> data_word) {
    std::optional<uint8_t> miso;
    for (SpiSlave* slave : slaves_) {
        if (auto byte = run_frame(address_word, data_word, *slave)) {
            miso = byte;
        }
    }
    ++frames_;
    if (logging_) {
        log_.push_back({address_word, data_word, miso});
    }
    return miso;
}

void SpiBus::select_core(uint8_t id) {
    write_register(Register::core_select, id);
}

void SpiBus::write_register(Register reg, uint64_t value) {
    if (value >> 38) {
        fail(ErrorCategory::config, std::string("value for register ") + to_string(reg) + " exceeds 38 bits");
    }
    const auto low = static_cast<uint32_t>(value & 0x7FFF);
    const auto high = static_cast<uint32_t>(value >> 15);
    transfer(encode_address_word(SpiCommand::config(reg, low)), high ? std::optional<uint32_t>(high) : std::nullopt);
}

void SpiBus::write_memory(Target target, int row, int byte, uint8_t value) {
    transfer(encode_address_word(SpiCommand::memory(Rw::Write, target, row, byte)), value);
}

uint8_t SpiBus::read_memory(Target target, int row, int byte) {
    const auto miso = transfer(encode_address_word(SpiCommand::memory(Rw::Read, target, row, byte)), std::nullopt);
    if (!miso) {
        fail(ErrorCategory::protocol, "no core drove MISO for the read frame");
    }
    return *miso;
}

} // namespace spikecore::spi
