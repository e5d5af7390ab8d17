// SPDX-FileCopyrightText: 2026 spikecore contributors
//
// SPDX-License-Identifier: Apache-2.0

// A small constructed 3-class task with known answers.
//
// Thirteen input channels: three groups of four, plus channel 12 which never
// spikes but carries the largest weight, so it sets the quantization scale.
// Each sample drives its own class's group hard and the others weakly. The
// hidden layer (3 LIF neurons, ATA_F) only reaches threshold through slow
// leaky integration of the strong group; the output layer copies the hidden
// spikes one to one.
//
// At low weight precision the informative weights round to zero, and with a
// coarse leak factor the hidden neurons never reach threshold. Either way
// every output stays silent and only class 0 is predicted correctly.

#pragma once

#include <cstdint>
#include <vector>

#include "spikecore/io.hpp"

namespace spikecore::demo {

inline constexpr int kClasses = 3;
inline constexpr int kGroupSize = 4;
inline constexpr int kChannels = kClasses * kGroupSize + 1;
inline constexpr int kTimesteps = 20;

dse::TrainedModel model();

// `per_class` rows per class, interleaved by class, label first.
std::vector<io::IntensityRow> intensities(int per_class, uint64_t seed);
std::string intensities_csv(const std::vector<io::IntensityRow>& rows);

// Rate-coded samples of intensities(per_class, seed).
std::vector<sys::EventSample> samples(int per_class, uint64_t seed);

// ff {4,8,12,16} x rec {4,8,12,16} x leak {3,8}, equal hardware/accuracy
// weights. Paths are relative to the project file.
io::ProjectConfig project();

// Writes project.json, model.json and intensities.csv into `dir`.
void write_files(const io::fs::path& dir, int per_class = 10, uint64_t seed = 7);

} // namespace spikecore::demo
