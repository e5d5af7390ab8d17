// SPDX-FileCopyrightText: 2026 spikecore contributors
//
// SPDX-License-Identifier: Apache-2.0

// File formats and input encoders.
//
//   project / model / calibration / manifest   JSON with a "schema" field
//   quantized weights   "SCWT", u32 version, u32 header length, JSON header,
//                       then int32 little-endian values (per layer: ff, rec)
//   event dataset       "SCEV", u32 version, u32 channels, u32 timesteps,
//                       u32 count; per sample u32 label, u32 steps; per step
//                       u32 n followed by n u16 addresses. All little-endian.
//   trace               text, "# step source kind address word" columns

#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "spikecore/cost.hpp"
#include "spikecore/dse.hpp"
#include "spikecore/model.hpp"
#include "spikecore/network.hpp"
#include "spikecore/system.hpp"

namespace spikecore::io {

using json = nlohmann::ordered_json;
namespace fs = std::filesystem;

inline constexpr const char* kProjectSchema = "spikecore.project/1";
inline constexpr const char* kModelSchema = "spikecore.model/1";
inline constexpr const char* kCalibrationSchema = "spikecore.calibration/1";
inline constexpr const char* kManifestSchema = "spikecore.manifest/1";
inline constexpr uint32_t kWeightsVersion = 1;
inline constexpr uint32_t kDatasetVersion = 1;

// --- plain files ---
std::string read_text(const fs::path& path);
void write_text(const fs::path& path, const std::string& text);
std::vector<uint8_t> read_bytes(const fs::path& path);
void write_bytes(const fs::path& path, std::span<const uint8_t> bytes);

// Stable rendering: two-space indent, trailing newline.
std::string dump(const json& j);
// Throws ErrorCategory::parse, prefixed with `origin`.
json parse_json(const std::string& text, const std::string& origin);

// --- enums ---
sys::Topology parse_topology(const std::string& s);
neuron::NeuronModelKind parse_model_kind(const std::string& s);
fxp::ResetPolicy parse_reset(const std::string& s);
const char* reset_name(fxp::ResetPolicy r);

// --- trained model ---
json model_to_json(const dse::TrainedModel& m);
dse::TrainedModel model_from_json(const json& j, const std::string& origin = "model");
dse::TrainedModel read_model(const fs::path& path);
void write_model(const fs::path& path, const dse::TrainedModel& m);

// --- network description ---
json network_to_json(const sys::NetworkConfig& n, bool with_geometry);
sys::NetworkConfig network_from_json(const json& j, const std::string& origin);

// --- calibration ---
json calibration_to_json(const cost::CalibrationTable& t);
cost::CalibrationTable calibration_from_json(const json& j, const std::string& origin = "calibration");
cost::CalibrationTable read_calibration(const fs::path& path);

// --- project ---
struct LayerSpec {
    sys::Topology topology = sys::Topology::FF;
    neuron::NeuronModelKind model = neuron::NeuronModelKind::LIF;
    int neurons = 1;
};

struct ProjectConfig {
    int input_channels = 1;
    int timesteps = 1;
    std::vector<LayerSpec> layers;
    dse::ExploreSettings explore;
    std::optional<dse::CandidateConfig> candidate; // precision used by `simulate`
    std::optional<fs::path> calibration;
    std::optional<fs::path> model;   // resolved against the project directory
    std::optional<fs::path> dataset; // resolved against the project directory
    uint64_t seed = 1;
};

json project_to_json(const ProjectConfig& p);
ProjectConfig project_from_json(const json& j, const fs::path& base_dir, const std::string& origin = "project");
ProjectConfig read_project(const fs::path& path);
// Throws ErrorCategory::config when layer shapes disagree.
void check_project_model(const ProjectConfig& p, const dse::TrainedModel& m);

// --- quantized weights ---
std::vector<uint8_t> encode_weights(const sys::QuantizedNetwork& q);
sys::QuantizedNetwork decode_weights(std::span<const uint8_t> bytes, const std::string& origin = "weights");
void write_weights(const fs::path& path, const sys::QuantizedNetwork& q);
sys::QuantizedNetwork read_weights(const fs::path& path);

// --- event dataset ---
struct Dataset {
    int channels = 1;
    int timesteps = 1;
    std::vector<sys::EventSample> samples;

    friend bool operator==(const Dataset&, const Dataset&) = default;
};

std::vector<uint8_t> encode_dataset(const Dataset& d);
Dataset decode_dataset(std::span<const uint8_t> bytes, const std::string& origin = "dataset");
void write_dataset(const fs::path& path, const Dataset& d);
Dataset read_dataset(const fs::path& path);

// --- manifest ---
struct Manifest {
    dse::CandidateConfig candidate;
    sys::QuantizedNetwork network;
    fs::path weights_file; // as written in the manifest
    fs::path dataset_file;
    std::optional<double> accuracy;
};

// Describes every design-time parameter of `q` and references the weights
// and dataset files by name (relative to the manifest).
json manifest_to_json(const dse::CandidateConfig& c, const sys::QuantizedNetwork& q, const std::string& weights_file,
                      const std::string& dataset_file, std::optional<double> accuracy);
// Writes <dir>/<stem>.json and <dir>/<stem>.scwt.
void emit_manifest(const fs::path& manifest_path, const dse::CandidateConfig& c, const sys::QuantizedNetwork& q,
                   const std::string& dataset_file, std::optional<double> accuracy);
// Loads the weights it names and cross-checks every recorded parameter and
// geometry against them. Throws ErrorCategory::config on any mismatch.
Manifest load_manifest(const fs::path& path);

// --- encoders ---
// Evenly spread rate code: spike at step t iff floor((t+1)p) > floor(t p).
sys::EventSample rate_encode(std::span<const double> intensities, int timesteps, int label);
// Independent spike with probability p per step, drawn channel by channel.
sys::EventSample bernoulli_encode(std::span<const double> intensities, int timesteps, int label, dse::Rng& rng);
// Average pooling of a row-major image `width` pixels wide by `factor`.
std::vector<double> downscale(std::span<const double> image, int width, int factor);

// "label,v0,v1,..." per line; blank lines and lines starting with '#' skipped.
struct IntensityRow {
    int label = 0;
    std::vector<double> values;
};
std::vector<IntensityRow> parse_intensity_csv(const std::string& text, const std::string& origin);

// --- trace ---
std::string format_trace(const std::vector<sys::TraceRecord>& trace);

} // namespace spikecore::io
