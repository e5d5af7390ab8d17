// SPDX-FileCopyrightText: 2026 spikecore contributors
//
// SPDX-License-Identifier: Apache-2.0

// Writes the constructed 3-class task: project.json, model.json and
// intensities.csv.

#include <iostream>
#include <string>

#include "spikecore/demo.hpp"

int main(int argc, char** argv) {
    if (argc != 2) {
        std::cerr << "usage: gen_demo <directory>\n";
        return 2;
    }
    try {
        spikecore::demo::write_files(argv[1]);
    } catch (const spikecore::Error& e) {
        std::cerr << "error[" << spikecore::category_name(e.category()) << "]: " << e.what() << "\n";
        return spikecore::exit_code(e.category());
    }
    return 0;
}
