// SPDX-FileCopyrightText: 2026 spikecore contributors
//
// SPDX-License-Identifier: Apache-2.0

#include "spikecore/error.hpp"

namespace spikecore {

std::string_view category_name(ErrorCategory category) {
    switch (category) {
    case ErrorCategory::value: return "value";
    case ErrorCategory::format: return "format";
    case ErrorCategory::config: return "config";
    case ErrorCategory::capacity: return "capacity";
    case ErrorCategory::address: return "address";
    case ErrorCategory::protocol: return "protocol";
    case ErrorCategory::shutdown: return "shutdown";
    case ErrorCategory::deadlock: return "deadlock";
    case ErrorCategory::calibration: return "calibration";
    case ErrorCategory::parse: return "parse";
    case ErrorCategory::io: return "io";
    }
    return "unknown";
}

int exit_code(ErrorCategory category) {
    // 1 is reserved for unexpected failures, 2 for usage errors.
    return 10 + static_cast<int>(category);
}

} // namespace spikecore
