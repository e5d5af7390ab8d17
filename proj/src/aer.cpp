// SPDX-FileCopyrightText: 2026 spikecore contributors
//
// SPDX-License-Identifier: Apache-2.0

#include "spikecore/aer.hpp"

namespace spikecore::aer {

const char* to_string(PacketKind kind) {
    switch (kind) {
    case PacketKind::ASPL: return "ASPL";
    case PacketKind::ASCL: return "ASCL";
    case PacketKind::EOTS: return "EOTS";
    case PacketKind::EOIN: return "EOIN";
    }
    return "?";
}

uint16_t encode_packet(const AerPacket& p) {
    switch (p.kind) {
    case PacketKind::ASPL:
    case PacketKind::ASCL:
        if (p.address > 0xFF) {
            fail(ErrorCategory::protocol, "AER address " + std::to_string(p.address) + " exceeds 8 bits");
        }
        return p.address;
    case PacketKind::EOTS: return kControlBit | kEotsSentinel;
    case PacketKind::EOIN: return kControlBit | kEoinSentinel;
    }
    fail(ErrorCategory::protocol, "unknown packet kind");
}

AerPacket decode_packet(uint16_t word, DecodeContext context) {
    if (word > 0x1FF) {
        fail(ErrorCategory::protocol, "AER word " + std::to_string(word) + " exceeds 9 bits");
    }
    if (word & kControlBit) {
        switch (word & 0xFF) {
        case kEotsSentinel: return AerPacket::eots();
        case kEoinSentinel: return AerPacket::eoin();
        default:
            fail(ErrorCategory::protocol, "control word with unknown sentinel " + std::to_string(word & 0xFF));
        }
    }
    const auto address = static_cast<uint16_t>(word & 0xFF);
    return context == DecodeContext::Recurrent ? AerPacket::ascl(address) : AerPacket::aspl(address);
}

HandshakeChannel::HandshakeChannel(std::size_t capacity) : capacity_(capacity) {
    if (capacity == 0) {
        fail(ErrorCategory::config, "channel capacity must be at least 1");
    }
}

std::size_t HandshakeChannel::size() const {
    std::lock_guard lock(mutex_);
    return queue_.size();
}

bool HandshakeChannel::try_send(const AerPacket& p) {
    {
        std::lock_guard lock(mutex_);
        if (closed_) {
            fail(ErrorCategory::shutdown, "send on a closed AER channel");
        }
        if (queue_.size() >= capacity_) {
            ++stalled_;
            return false;
        }
        queue_.push_back(p);
        ++sent_;
    }
    not_empty_.notify_one();
    return true;
}

void HandshakeChannel::send(const AerPacket& p) {
    {
        std::unique_lock lock(mutex_);
        if (!closed_ && queue_.size() >= capacity_) {
            ++stalled_;
        }
        not_full_.wait(lock, [&] { return closed_ || queue_.size() < capacity_; });
        if (closed_) {
            fail(ErrorCategory::shutdown, "AER channel closed while a sender was waiting");
        }
        queue_.push_back(p);
        ++sent_;
    }
    not_empty_.notify_one();
}

bool HandshakeChannel::send_for(const AerPacket& p, std::chrono::milliseconds timeout) {
    {
        std::unique_lock lock(mutex_);
        if (!closed_ && queue_.size() >= capacity_) {
            ++stalled_;
        }
        if (!not_full_.wait_for(lock, timeout, [&] { return closed_ || queue_.size() < capacity_; })) {
            return false;
        }
        if (closed_) {
            fail(ErrorCategory::shutdown, "AER channel closed while a sender was waiting");
        }
        queue_.push_back(p);
        ++sent_;
    }
    not_empty_.notify_one();
    return true;
}

std::optional<AerPacket> HandshakeChannel::try_recv() {
    std::optional<AerPacket> p;
    {
        std::lock_guard lock(mutex_);
        if (queue_.empty()) {
            return std::nullopt;
        }
        p = queue_.front();
        queue_.pop_front();
    }
    not_full_.notify_one();
    return p;
}

std::optional<AerPacket> HandshakeChannel::recv() {
    std::optional<AerPacket> p;
    {
        std::unique_lock lock(mutex_);
        not_empty_.wait(lock, [&] { return closed_ || !queue_.empty(); });
        if (queue_.empty()) {
            return std::nullopt;
        }
        p = queue_.front();
        queue_.pop_front();
    }
    not_full_.notify_one();
    return p;
}

void HandshakeChannel::close() {
    std::size_t pending = 0;
    {
        std::lock_guard lock(mutex_);
        closed_ = true;
        pending = queue_.size();
        queue_.clear();
    }
    not_full_.notify_all();
    not_empty_.notify_all();
    if (pending != 0) {
        fail(ErrorCategory::shutdown,
             "AER channel closed with " + std::to_string(pending) + " undelivered packet(s)");
    }
}

void HandshakeChannel::abort() noexcept {
    {
        std::lock_guard lock(mutex_);
        closed_ = true;
        queue_.clear();
    }
    not_full_.notify_all();
    not_empty_.notify_all();
}

bool HandshakeChannel::closed() const {
    std::lock_guard lock(mutex_);
    return closed_;
}

std::size_t HandshakeChannel::stalled_sends() const {
    std::lock_guard lock(mutex_);
    return stalled_;
}

std::size_t HandshakeChannel::total_sent() const {
    std::lock_guard lock(mutex_);
    return sent_;
}

} // namespace spikecore::aer
