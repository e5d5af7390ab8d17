// SPDX-FileCopyrightText: 2026 spikecore contributors
//
// SPDX-License-Identifier: Apache-2.0

#include "spikecore/demo.hpp"

#include <cstdio>

namespace spikecore::demo {

namespace {

constexpr double kInformative = 0.06;
constexpr double kOutlier = 1.0;

} // namespace

dse::TrainedModel model() {
    dse::TrainedModel m;
    m.input_channels = kChannels;
    m.timesteps = kTimesteps;

    dse::TrainedLayer hidden;
    hidden.topology = sys::Topology::ATA_F;
    hidden.model = neuron::NeuronModelKind::LIF;
    hidden.neuron_count = kClasses;
    hidden.ff.assign(static_cast<std::size_t>(kChannels) * kClasses, 0.0);
    for (int c = 0; c < kClasses; ++c) {
        for (int k = 0; k < kGroupSize; ++k) {
            hidden.ff[static_cast<std::size_t>((c * kGroupSize + k) * kClasses + c)] = kInformative;
        }
    }
    hidden.ff[static_cast<std::size_t>((kChannels - 1) * kClasses)] = kOutlier;
    hidden.rec.assign(kClasses, 0.25);
    hidden.threshold = 2.36;
    hidden.beta = 0.96;
    hidden.reset = fxp::ResetPolicy::ResetToZero;

    dse::TrainedLayer out;
    out.topology = sys::Topology::FF;
    out.model = neuron::NeuronModelKind::IF;
    out.neuron_count = kClasses;
    out.ff.assign(static_cast<std::size_t>(kClasses) * kClasses, 0.0);
    for (int c = 0; c < kClasses; ++c) {
        out.ff[static_cast<std::size_t>(c * kClasses + c)] = 1.0;
    }
    out.threshold = 0.5;

    m.layers = {hidden, out};
    m.validate();
    return m;
}

std::vector<io::IntensityRow> intensities(int per_class, uint64_t seed) {
    dse::Rng rng(seed);
    std::vector<io::IntensityRow> rows;
    for (int i = 0; i < per_class; ++i) {
        for (int label = 0; label < kClasses; ++label) {
            io::IntensityRow row;
            row.label = label;
            row.values.assign(kChannels, 0.0);
            for (int ch = 0; ch < kClasses * kGroupSize; ++ch) {
                // Multiples of 0.05 so the CSV text is exact.
                const bool own = ch / kGroupSize == label;
                const int steps = own ? 17 + static_cast<int>(rng.uniform_index(4))
                                      : static_cast<int>(rng.uniform_index(7));
                row.values[static_cast<std::size_t>(ch)] = steps * 0.05;
            }
            rows.push_back(std::move(row));
        }
    }
    return rows;
}

std::string intensities_csv(const std::vector<io::IntensityRow>& rows) {
    std::string out = "# label, channel intensities in [0, 1]\n";
    char buf[32];
    for (const io::IntensityRow& r : rows) {
        out += std::to_string(r.label);
        for (double v : r.values) {
            std::snprintf(buf, sizeof buf, ",%.2f", v);
            out += buf;
        }
        out += '\n';
    }
    return out;
}

std::vector<sys::EventSample> samples(int per_class, uint64_t seed) {
    // Encode from the CSV text so callers see exactly what `encode` produces.
    std::vector<sys::EventSample> out;
    for (const io::IntensityRow& r : io::parse_intensity_csv(intensities_csv(intensities(per_class, seed)), "demo")) {
        out.push_back(io::rate_encode(r.values, kTimesteps, r.label));
    }
    return out;
}

io::ProjectConfig project() {
    io::ProjectConfig p;
    p.input_channels = kChannels;
    p.timesteps = kTimesteps;
    p.layers = {{sys::Topology::ATA_F, neuron::NeuronModelKind::LIF, kClasses},
                {sys::Topology::FF, neuron::NeuronModelKind::IF, kClasses}};
    p.explore.ranges = {{4, 8, 12, 16}, {4, 8, 12, 16}, {3, 8}};
    p.candidate = dse::CandidateConfig{8, 8, 8};
    p.model = "model.json";
    p.dataset = "dataset.scev";
    p.seed = 1;
    p.explore.search.seed = 1;
    return p;
}

void write_files(const io::fs::path& dir, int per_class, uint64_t seed) {
    io::fs::create_directories(dir);
    io::write_text(dir / "project.json", io::dump(io::project_to_json(project())));
    io::write_model(dir / "model.json", model());
    io::write_text(dir / "intensities.csv", intensities_csv(intensities(per_class, seed)));
}

} // namespace spikecore::demo
