// SPDX-FileCopyrightText: 2026 spikecore contributors
//
// SPDX-License-Identifier: Apache-2.0

// Address-event packets and the transport between cores.
//
// Wire format (9 bits):
//   bit 8      control flag, set for EOTS / EOIN
//   bits 7..0  source neuron address for ASPL / ASCL, sentinel otherwise
//              (0 = EOTS, 1 = EOIN)

#pragma once

#include <chrono>
#include <condition_variable>
#include <cstddef>
#include <cstdint>
#include <deque>
#include <mutex>
#include <optional>
#include <string>

#include "spikecore/error.hpp"

namespace spikecore::aer {

enum class PacketKind : uint8_t { ASPL, ASCL, EOTS, EOIN };

const char* to_string(PacketKind kind);

struct AerPacket {
    PacketKind kind = PacketKind::ASPL;
    uint16_t address = 0;

    static AerPacket aspl(uint16_t a) { return {PacketKind::ASPL, a}; }
    static AerPacket ascl(uint16_t a) { return {PacketKind::ASCL, a}; }
    static AerPacket eots() { return {PacketKind::EOTS, 0}; }
    static AerPacket eoin() { return {PacketKind::EOIN, 0}; }

    bool is_terminator() const { return kind == PacketKind::EOTS || kind == PacketKind::EOIN; }

    friend bool operator==(const AerPacket&, const AerPacket&) = default;
};

inline constexpr uint16_t kControlBit = 0x100;
inline constexpr uint16_t kEotsSentinel = 0;
inline constexpr uint16_t kEoinSentinel = 1;
inline constexpr std::size_t kDefaultQueueCapacity = 16;

// Which receiver the word is addressed to: data words on the recurrent path
// decode as ASCL, everything else as ASPL.
enum class DecodeContext : uint8_t { InterCore, Recurrent };

uint16_t encode_packet(const AerPacket& p);
AerPacket decode_packet(uint16_t word, DecodeContext context = DecodeContext::InterCore);

// Plain FIFO with a hard capacity; single owner, no locking.
template <typename T>
class BoundedQueue {
public:
    explicit BoundedQueue(std::size_t capacity) : capacity_(capacity) {
        if (capacity == 0) {
            fail(ErrorCategory::config, "queue capacity must be at least 1");
        }
    }

    std::size_t capacity() const { return capacity_; }
    std::size_t size() const { return items_.size(); }
    bool empty() const { return items_.empty(); }
    bool full() const { return items_.size() >= capacity_; }

    bool try_push(const T& item) {
        if (full()) {
            return false;
        }
        items_.push_back(item);
        return true;
    }

    std::optional<T> try_pop() {
        if (items_.empty()) {
            return std::nullopt;
        }
        T item = items_.front();
        items_.pop_front();
        return item;
    }

    void clear() { items_.clear(); }

private:
    std::size_t capacity_;
    std::deque<T> items_;
};

// Handshake link into a receiver's feedforward queue. A sender is held while
// the queue is full; packets are never dropped. Safe for one producer and one
// consumer thread, and equally usable from a single-threaded scheduler through
// the try_* calls.
class HandshakeChannel {
public:
    explicit HandshakeChannel(std::size_t capacity = kDefaultQueueCapacity);

    HandshakeChannel(const HandshakeChannel&) = delete;
    HandshakeChannel& operator=(const HandshakeChannel&) = delete;

    std::size_t capacity() const { return capacity_; }
    std::size_t size() const;

    // Non-blocking handshake: false while the receiver queue is full.
    bool try_send(const AerPacket& p);
    // Blocks until accepted. Throws ErrorCategory::shutdown if closed.
    void send(const AerPacket& p);
    // Blocks up to `timeout`; false if still full.
    bool send_for(const AerPacket& p, std::chrono::milliseconds timeout);

    std::optional<AerPacket> try_recv();
    // Blocks until a packet arrives; nullopt once closed.
    std::optional<AerPacket> recv();

    // Closes the link and wakes every waiter. Throws ErrorCategory::shutdown
    // if packets were still queued (they are discarded).
    void close();
    // Error path: closes and discards without throwing.
    void abort() noexcept;
    bool closed() const;

    // Number of send attempts that found the queue full.
    std::size_t stalled_sends() const;
    std::size_t total_sent() const;

private:
    std::size_t capacity_;
    mutable std::mutex mutex_;
    std::condition_variable not_full_;
    std::condition_variable not_empty_;
    std::deque<AerPacket> queue_;
    bool closed_ = false;
    std::size_t stalled_ = 0;
    std::size_t sent_ = 0;
};

} // namespace spikecore::aer
