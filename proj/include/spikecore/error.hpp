// SPDX-FileCopyrightText: 2026 spikecore contributors
//
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace spikecore {

// Machine-readable error categories. The CLI maps each one to a distinct exit
// code and prints the name in its diagnostics.
enum class ErrorCategory {
    value,       // argument outside its mathematical domain
    format,      // fixed-point format mismatch
    config,      // invalid or inconsistent configuration
    capacity,    // per-core hardware limit exceeded
    address,     // memory or neuron address out of range
    protocol,    // malformed AER packet stream or SPI command
    shutdown,    // channel closed with packets still in flight
    deadlock,    // pipeline watchdog fired
    calibration, // missing or bad cost-model calibration
    parse,       // malformed input file
    io,          // file system failure
};

std::string_view category_name(ErrorCategory category);
int exit_code(ErrorCategory category);

class Error : public std::runtime_error {
public:
    Error(ErrorCategory category, const std::string& what)
        : std::runtime_error(what), category_(category) {}

    ErrorCategory category() const noexcept { return category_; }

private:
    ErrorCategory category_;
};

[[noreturn]] inline void fail(ErrorCategory category, const std::string& what) {
    throw Error(category, what);
}

} // namespace spikecore
