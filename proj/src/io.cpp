// SPDX-FileCopyrightText: 2026 spikecore contributors
//
// SPDX-License-Identifier: Apache-2.0

#include "spikecore/io.hpp"

#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>
#include <sstream>

namespace spikecore::io {

namespace {

[[noreturn]] void parse_fail(const std::string& origin, const std::string& msg) {
    fail(ErrorCategory::parse, origin + ": " + msg);
}

const json& field(const json& j, const char* key, const std::string& origin) {
    if (!j.is_object()) {
        parse_fail(origin, "expected an object");
    }
    auto it = j.find(key);
    if (it == j.end()) {
        parse_fail(origin, std::string("missing field '") + key + "'");
    }
    return *it;
}

template <typename T>
T as(const json& v, const std::string& origin, const char* what) {
    try {
        if constexpr (std::is_same_v<T, double>) {
            if (!v.is_number()) {
                parse_fail(origin, std::string("'") + what + "' must be a number");
            }
        } else if constexpr (std::is_same_v<T, bool>) {
            if (!v.is_boolean()) {
                parse_fail(origin, std::string("'") + what + "' must be true or false");
            }
        } else if constexpr (std::is_integral_v<T>) {
            if (!v.is_number_integer()) {
                parse_fail(origin, std::string("'") + what + "' must be an integer");
            }
        } else if constexpr (std::is_same_v<T, std::string>) {
            if (!v.is_string()) {
                parse_fail(origin, std::string("'") + what + "' must be a string");
            }
        }
        return v.get<T>();
    } catch (const json::exception& e) {
        parse_fail(origin, std::string("'") + what + "': " + e.what());
    }
}

template <typename T>
T get(const json& j, const char* key, const std::string& origin) {
    return as<T>(field(j, key, origin), origin, key);
}

template <typename T>
T get_or(const json& j, const char* key, T fallback, const std::string& origin) {
    if (!j.is_object()) {
        parse_fail(origin, "expected an object");
    }
    auto it = j.find(key);
    if (it == j.end() || it->is_null()) {
        return fallback;
    }
    return as<T>(*it, origin, key);
}

template <typename T>
std::vector<T> get_vector(const json& j, const char* key, const std::string& origin) {
    const json& v = field(j, key, origin);
    if (!v.is_array()) {
        parse_fail(origin, std::string("'") + key + "' must be an array");
    }
    std::vector<T> out;
    out.reserve(v.size());
    for (const json& e : v) {
        out.push_back(as<T>(e, origin, key));
    }
    return out;
}

void check_schema(const json& j, const char* expected, const std::string& origin) {
    const std::string got = get<std::string>(j, "schema", origin);
    if (got != expected) {
        parse_fail(origin, "schema '" + got + "', expected '" + expected + "'");
    }
}

// Little-endian byte writer / reader.
struct Writer {
    std::vector<uint8_t> out;
    void u16(uint16_t v) {
        out.push_back(static_cast<uint8_t>(v));
        out.push_back(static_cast<uint8_t>(v >> 8));
    }
    void u32(uint32_t v) {
        for (int i = 0; i < 4; ++i) {
            out.push_back(static_cast<uint8_t>(v >> (8 * i)));
        }
    }
    void raw(const void* p, std::size_t n) {
        const auto* b = static_cast<const uint8_t*>(p);
        out.insert(out.end(), b, b + n);
    }
};

struct Reader {
    std::span<const uint8_t> in;
    std::size_t pos = 0;
    std::string origin;

    void need(std::size_t n) {
        if (in.size() - pos < n) {
            parse_fail(origin, "truncated at byte " + std::to_string(pos));
        }
    }
    uint16_t u16() {
        need(2);
        const auto v = static_cast<uint16_t>(in[pos] | (in[pos + 1] << 8));
        pos += 2;
        return v;
    }
    uint32_t u32() {
        need(4);
        uint32_t v = 0;
        for (int i = 0; i < 4; ++i) {
            v |= static_cast<uint32_t>(in[pos + i]) << (8 * i);
        }
        pos += 4;
        return v;
    }
    std::string str(std::size_t n) {
        need(n);
        std::string s(reinterpret_cast<const char*>(in.data() + pos), n);
        pos += n;
        return s;
    }
    void magic(const char* m) {
        if (str(4) != m) {
            parse_fail(origin, std::string("bad magic, expected '") + m + "'");
        }
    }
    void done() {
        if (pos != in.size()) {
            parse_fail(origin, std::to_string(in.size() - pos) + " trailing bytes");
        }
    }
};

json candidate_to_json(const dse::CandidateConfig& c) {
    return json{{"ff_bits", c.ff_bits}, {"rec_bits", c.rec_bits}, {"leak_bits", c.leak_bits}};
}

dse::CandidateConfig candidate_from_json(const json& j, const std::string& origin) {
    return {get<int>(j, "ff_bits", origin), get_or<int>(j, "rec_bits", 0, origin), get<int>(j, "leak_bits", origin)};
}

json fit_to_json(const cost::LinearFit& f) {
    return json{{"intercept", f.intercept}, {"per_ff_bit", f.per_ff_bit}, {"per_rec_bit", f.per_rec_bit}};
}

cost::LinearFit fit_from_json(const json& j, const std::string& origin) {
    return {get<double>(j, "intercept", origin), get<double>(j, "per_ff_bit", origin),
            get<double>(j, "per_rec_bit", origin)};
}

json synaptic_geometry_json(const neuron::SynapticMemoryGeometry& g) {
    return json{{"blocks", g.blocks},
                {"rows_per_block", g.rows_per_block},
                {"row_bits", g.row_bits},
                {"block_addr_bits", g.block_addr_bits},
                {"row_addr_bits", g.row_addr_bits}};
}

json core_to_json(const sys::CoreConfig& c, bool with_geometry) {
    json j{{"core_id", c.core_id},
           {"topology", sys::to_string(c.topology)},
           {"model", neuron::to_string(c.model)},
           {"neuron_count", c.neuron_count},
           {"source_count", c.source_count},
           {"weight_bits", c.weight_bits},
           {"rec_bits", c.rec_bits},
           {"potential_bits", c.potential_bits},
           {"current_bits", c.current_bits},
           {"selection_units", c.units.mask()},
           {"threshold", c.threshold},
           {"decay_beta", c.beta.raw()},
           {"decay_alpha", c.alpha.raw()},
           {"reset", reset_name(c.reset)},
           {"ff_queue_capacity", c.ff_queue_capacity},
           {"rec_queue_capacity", c.rec_queue_capacity}};
    if (with_geometry) {
        json g;
        g["ff"] = synaptic_geometry_json(c.ff_geometry());
        if (auto rg = c.rec_geometry()) {
            g["rec"] = synaptic_geometry_json(*rg);
        }
        const auto sg = c.state_geometry();
        g["state"] = json{{"row_bits", sg.row_bits}, {"rows", sg.rows}};
        j["geometry"] = std::move(g);
    }
    return j;
}

sys::CoreConfig core_from_json(const json& j, const std::string& origin) {
    sys::CoreConfig c;
    const int id = get<int>(j, "core_id", origin);
    if (id < 0 || id > 255) {
        parse_fail(origin, "core_id outside [0, 255]");
    }
    c.core_id = static_cast<uint8_t>(id);
    c.topology = parse_topology(get<std::string>(j, "topology", origin));
    c.model = parse_model_kind(get<std::string>(j, "model", origin));
    c.neuron_count = get<int>(j, "neuron_count", origin);
    c.source_count = get<int>(j, "source_count", origin);
    c.weight_bits = get<int>(j, "weight_bits", origin);
    c.rec_bits = get<int>(j, "rec_bits", origin);
    c.potential_bits = get<int>(j, "potential_bits", origin);
    c.current_bits = get<int>(j, "current_bits", origin);
    const int units = get<int>(j, "selection_units", origin);
    const int beta = get<int>(j, "decay_beta", origin);
    const int alpha = get<int>(j, "decay_alpha", origin);
    if (units < 0 || units > 0xF || beta < 0 || beta > 0x1FF || alpha < 0 || alpha > 0x1FF) {
        parse_fail(origin, "selection_units or decay rate out of range");
    }
    c.units = cg::SelectionUnits(static_cast<uint8_t>(units));
    c.beta = cg::DecayRate(static_cast<uint16_t>(beta));
    c.alpha = cg::DecayRate(static_cast<uint16_t>(alpha));
    c.threshold = get<int64_t>(j, "threshold", origin);
    c.reset = parse_reset(get<std::string>(j, "reset", origin));
    c.ff_queue_capacity = get<std::size_t>(j, "ff_queue_capacity", origin);
    c.rec_queue_capacity = get<std::size_t>(j, "rec_queue_capacity", origin);

    if (auto it = j.find("geometry"); it != j.end()) {
        c.validate();
        json expect;
        expect["ff"] = synaptic_geometry_json(c.ff_geometry());
        if (auto rg = c.rec_geometry()) {
            expect["rec"] = synaptic_geometry_json(*rg);
        }
        const auto sg = c.state_geometry();
        expect["state"] = json{{"row_bits", sg.row_bits}, {"rows", sg.rows}};
        if (*it != expect) {
            fail(ErrorCategory::config, origin + ": recorded memory geometry " + it->dump() +
                                            " does not match the parameters, which give " + expect.dump());
        }
    }
    return c;
}

fs::path resolve(const fs::path& base, const std::string& p) {
    const fs::path path(p);
    return path.is_absolute() ? path : base / path;
}

} // namespace

// --- plain files ------------------------------------------------------------

std::string read_text(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        fail(ErrorCategory::io, "cannot open " + path.string());
    }
    return std::string(std::istreambuf_iterator<char>(in), {});
}

void write_text(const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out || !out.write(text.data(), static_cast<std::streamsize>(text.size()))) {
        fail(ErrorCategory::io, "cannot write " + path.string());
    }
}

std::vector<uint8_t> read_bytes(const fs::path& path) {
    const std::string s = read_text(path);
    return std::vector<uint8_t>(s.begin(), s.end());
}

void write_bytes(const fs::path& path, std::span<const uint8_t> bytes) {
    write_text(path, std::string(bytes.begin(), bytes.end()));
}

std::string dump(const json& j) {
    return j.dump(2) + "\n";
}

json parse_json(const std::string& text, const std::string& origin) {
    try {
        return json::parse(text);
    } catch (const json::exception& e) {
        parse_fail(origin, e.what());
    }
}

// --- enums ------------------------------------------------------------------

sys::Topology parse_topology(const std::string& s) {
    if (s == "FF") {
        return sys::Topology::FF;
    }
    if (s == "ATA_F" || s == "ATA-F") {
        return sys::Topology::ATA_F;
    }
    if (s == "ATA_T" || s == "ATA-T") {
        return sys::Topology::ATA_T;
    }
    fail(ErrorCategory::parse, "unknown topology '" + s + "' (FF, ATA_F, ATA_T)");
}

neuron::NeuronModelKind parse_model_kind(const std::string& s) {
    if (s == "IF") {
        return neuron::NeuronModelKind::IF;
    }
    if (s == "LIF") {
        return neuron::NeuronModelKind::LIF;
    }
    if (s == "Synaptic") {
        return neuron::NeuronModelKind::Synaptic;
    }
    fail(ErrorCategory::parse, "unknown neuron model '" + s + "' (IF, LIF, Synaptic)");
}

fxp::ResetPolicy parse_reset(const std::string& s) {
    if (s == "zero") {
        return fxp::ResetPolicy::ResetToZero;
    }
    if (s == "subtract") {
        return fxp::ResetPolicy::ResetBySubtract;
    }
    fail(ErrorCategory::parse, "unknown reset policy '" + s + "' (zero, subtract)");
}

const char* reset_name(fxp::ResetPolicy r) {
    return r == fxp::ResetPolicy::ResetToZero ? "zero" : "subtract";
}

// --- trained model ----------------------------------------------------------

json model_to_json(const dse::TrainedModel& m) {
    json layers = json::array();
    for (const dse::TrainedLayer& l : m.layers) {
        json j{{"topology", sys::to_string(l.topology)},
               {"model", neuron::to_string(l.model)},
               {"neurons", l.neuron_count},
               {"threshold", l.threshold},
               {"beta", l.beta},
               {"alpha", l.alpha},
               {"reset", reset_name(l.reset)}};
        if (l.potential_headroom) {
            j["potential_headroom"] = *l.potential_headroom;
        }
        if (l.current_headroom) {
            j["current_headroom"] = *l.current_headroom;
        }
        j["ff_queue_capacity"] = l.ff_queue_capacity;
        j["rec_queue_capacity"] = l.rec_queue_capacity;
        j["ff"] = l.ff;
        j["rec"] = l.rec;
        layers.push_back(std::move(j));
    }
    return json{{"schema", kModelSchema},
                {"input_channels", m.input_channels},
                {"timesteps", m.timesteps},
                {"potential_headroom", m.potential_headroom},
                {"current_headroom", m.current_headroom},
                {"output_queue_capacity", m.output_queue_capacity},
                {"layers", std::move(layers)}};
}

dse::TrainedModel model_from_json(const json& j, const std::string& origin) {
    check_schema(j, kModelSchema, origin);
    dse::TrainedModel m;
    m.input_channels = get<int>(j, "input_channels", origin);
    m.timesteps = get<int>(j, "timesteps", origin);
    m.potential_headroom = get_or<int>(j, "potential_headroom", 4, origin);
    m.current_headroom = get_or<int>(j, "current_headroom", 2, origin);
    m.output_queue_capacity = get_or<std::size_t>(j, "output_queue_capacity", 16, origin);
    const json& layers = field(j, "layers", origin);
    if (!layers.is_array()) {
        parse_fail(origin, "'layers' must be an array");
    }
    for (std::size_t i = 0; i < layers.size(); ++i) {
        const json& lj = layers[i];
        const std::string where = origin + " layer " + std::to_string(i);
        dse::TrainedLayer l;
        l.topology = parse_topology(get<std::string>(lj, "topology", where));
        l.model = parse_model_kind(get<std::string>(lj, "model", where));
        l.neuron_count = get<int>(lj, "neurons", where);
        l.threshold = get<double>(lj, "threshold", where);
        l.beta = get_or<double>(lj, "beta", 1.0, where);
        l.alpha = get_or<double>(lj, "alpha", 1.0, where);
        l.reset = parse_reset(get_or<std::string>(lj, "reset", "zero", where));
        if (lj.contains("potential_headroom")) {
            l.potential_headroom = get<int>(lj, "potential_headroom", where);
        }
        if (lj.contains("current_headroom")) {
            l.current_headroom = get<int>(lj, "current_headroom", where);
        }
        l.ff_queue_capacity = get_or<std::size_t>(lj, "ff_queue_capacity", 16, where);
        l.rec_queue_capacity = get_or<std::size_t>(lj, "rec_queue_capacity", 0, where);
        l.ff = get_vector<double>(lj, "ff", where);
        l.rec = lj.contains("rec") ? get_vector<double>(lj, "rec", where) : std::vector<double>{};
        m.layers.push_back(std::move(l));
    }
    m.validate();
    return m;
}

dse::TrainedModel read_model(const fs::path& path) {
    return model_from_json(parse_json(read_text(path), path.string()), path.string());
}

void write_model(const fs::path& path, const dse::TrainedModel& m) {
    write_text(path, dump(model_to_json(m)));
}

// --- network ----------------------------------------------------------------

json network_to_json(const sys::NetworkConfig& n, bool with_geometry) {
    json cores = json::array();
    for (const sys::CoreConfig& c : n.cores) {
        cores.push_back(core_to_json(c, with_geometry));
    }
    return json{{"input_channels", n.input_channels},
                {"timesteps", n.timesteps},
                {"output_queue_capacity", n.output_queue_capacity},
                {"cores", std::move(cores)}};
}

sys::NetworkConfig network_from_json(const json& j, const std::string& origin) {
    sys::NetworkConfig n;
    n.input_channels = get<int>(j, "input_channels", origin);
    n.timesteps = get<int>(j, "timesteps", origin);
    n.output_queue_capacity = get<std::size_t>(j, "output_queue_capacity", origin);
    const json& cores = field(j, "cores", origin);
    if (!cores.is_array()) {
        parse_fail(origin, "'cores' must be an array");
    }
    for (std::size_t i = 0; i < cores.size(); ++i) {
        n.cores.push_back(core_from_json(cores[i], origin + " core " + std::to_string(i)));
    }
    n.validate();
    return n;
}

// --- calibration ------------------------------------------------------------

json calibration_to_json(const cost::CalibrationTable& t) {
    json entries = json::array();
    for (const auto& [key, e] : t.entries()) {
        entries.push_back(json{{"topology", sys::to_string(key.first)},
                               {"model", neuron::to_string(key.second)},
                               {"luts", fit_to_json(e.luts)},
                               {"flipflops", fit_to_json(e.flipflops)}});
    }
    return json{{"schema", kCalibrationSchema},
                {"label", t.label()},
                {"placeholder", t.is_placeholder()},
                {"entries", std::move(entries)}};
}

cost::CalibrationTable calibration_from_json(const json& j, const std::string& origin) {
    check_schema(j, kCalibrationSchema, origin);
    cost::CalibrationTable t;
    const json& entries = field(j, "entries", origin);
    if (!entries.is_array()) {
        parse_fail(origin, "'entries' must be an array");
    }
    for (const json& e : entries) {
        t.set(parse_topology(get<std::string>(e, "topology", origin)),
              parse_model_kind(get<std::string>(e, "model", origin)),
              {fit_from_json(field(e, "luts", origin), origin), fit_from_json(field(e, "flipflops", origin), origin)});
    }
    t.set_label(get_or<std::string>(j, "label", "custom", origin));
    t.set_placeholder(get_or<bool>(j, "placeholder", false, origin));
    return t;
}

cost::CalibrationTable read_calibration(const fs::path& path) {
    return calibration_from_json(parse_json(read_text(path), path.string()), path.string());
}

// --- project ----------------------------------------------------------------

json project_to_json(const ProjectConfig& p) {
    json layers = json::array();
    for (const LayerSpec& l : p.layers) {
        layers.push_back(json{{"topology", sys::to_string(l.topology)},
                              {"model", neuron::to_string(l.model)},
                              {"neurons", l.neurons}});
    }
    const dse::ExploreSettings& e = p.explore;
    json j{{"schema", kProjectSchema},
           {"network", json{{"input_channels", p.input_channels}, {"timesteps", p.timesteps}, {"layers", layers}}},
           {"knobs", json{{"ff_bits", e.ranges.ff}, {"rec_bits", e.ranges.rec}, {"leak_bits", e.ranges.leak}}},
           {"cost",
            json{{"c_h", e.weights.c_h},
                 {"c_a", e.weights.c_a},
                 {"c_lut", e.weights.c_lut},
                 {"c_ff", e.weights.c_ff},
                 {"c_bram", e.weights.c_bram},
                 {"normalization", e.normalization == dse::Normalization::CandidateMax ? "candidate_max" : "device"},
                 {"device", json{{"luts", e.device.luts}, {"flipflops", e.device.flipflops}, {"brams", e.device.brams}}},
                 {"bram_primitive_bits", e.bram_primitive_bits},
                 {"calibration", p.calibration ? json(p.calibration->generic_string()) : json(nullptr)}}},
           {"search",
            json{{"t_start", e.search.t_start},
                 {"t_min", e.search.t_min},
                 {"alpha", e.search.alpha},
                 {"k_divisor", e.search.k_divisor}}},
           {"seed", p.seed}};
    if (p.candidate) {
        j["candidate"] = candidate_to_json(*p.candidate);
    }
    j["model"] = p.model ? json(p.model->generic_string()) : json(nullptr);
    j["dataset"] = p.dataset ? json(p.dataset->generic_string()) : json(nullptr);
    return j;
}

ProjectConfig project_from_json(const json& j, const fs::path& base_dir, const std::string& origin) {
    check_schema(j, kProjectSchema, origin);
    ProjectConfig p;
    const json& net = field(j, "network", origin);
    p.input_channels = get<int>(net, "input_channels", origin);
    p.timesteps = get<int>(net, "timesteps", origin);
    const json& layers = field(net, "layers", origin);
    if (!layers.is_array() || layers.empty()) {
        parse_fail(origin, "'network.layers' must be a non-empty array");
    }
    for (const json& l : layers) {
        p.layers.push_back({parse_topology(get<std::string>(l, "topology", origin)),
                            parse_model_kind(get<std::string>(l, "model", origin)), get<int>(l, "neurons", origin)});
    }

    dse::ExploreSettings& e = p.explore;
    const json& knobs = field(j, "knobs", origin);
    e.ranges.ff = get_vector<int>(knobs, "ff_bits", origin);
    e.ranges.rec = knobs.contains("rec_bits") ? get_vector<int>(knobs, "rec_bits", origin) : std::vector<int>{};
    e.ranges.leak = get_vector<int>(knobs, "leak_bits", origin);

    if (j.contains("cost")) {
        const json& c = j["cost"];
        e.weights.c_h = get_or<double>(c, "c_h", e.weights.c_h, origin);
        e.weights.c_a = get_or<double>(c, "c_a", e.weights.c_a, origin);
        e.weights.c_lut = get_or<double>(c, "c_lut", e.weights.c_lut, origin);
        e.weights.c_ff = get_or<double>(c, "c_ff", e.weights.c_ff, origin);
        e.weights.c_bram = get_or<double>(c, "c_bram", e.weights.c_bram, origin);
        const std::string norm = get_or<std::string>(c, "normalization", "candidate_max", origin);
        if (norm == "candidate_max") {
            e.normalization = dse::Normalization::CandidateMax;
        } else if (norm == "device") {
            e.normalization = dse::Normalization::Device;
        } else {
            parse_fail(origin, "normalization must be 'candidate_max' or 'device'");
        }
        if (c.contains("device")) {
            const json& d = c["device"];
            e.device = {get<double>(d, "luts", origin), get<double>(d, "flipflops", origin),
                        get<double>(d, "brams", origin)};
        }
        e.bram_primitive_bits = get_or<int64_t>(c, "bram_primitive_bits", cost::kDefaultBramBits, origin);
        if (c.contains("calibration") && !c["calibration"].is_null()) {
            p.calibration = resolve(base_dir, get<std::string>(c, "calibration", origin));
        }
    }
    if (j.contains("search")) {
        const json& s = j["search"];
        e.search.t_start = get_or<double>(s, "t_start", e.search.t_start, origin);
        e.search.t_min = get_or<double>(s, "t_min", e.search.t_min, origin);
        e.search.alpha = get_or<double>(s, "alpha", e.search.alpha, origin);
        e.search.k_divisor = get_or<int>(s, "k_divisor", e.search.k_divisor, origin);
    }
    p.seed = get_or<uint64_t>(j, "seed", 1, origin);
    e.search.seed = p.seed;
    if (j.contains("candidate") && !j["candidate"].is_null()) {
        p.candidate = candidate_from_json(j["candidate"], origin);
    }
    if (j.contains("model") && !j["model"].is_null()) {
        p.model = resolve(base_dir, get<std::string>(j, "model", origin));
    }
    if (j.contains("dataset") && !j["dataset"].is_null()) {
        p.dataset = resolve(base_dir, get<std::string>(j, "dataset", origin));
    }
    return p;
}

ProjectConfig read_project(const fs::path& path) {
    ProjectConfig p = project_from_json(parse_json(read_text(path), path.string()), path.parent_path(), path.string());
    if (p.calibration) {
        p.explore.calibration = read_calibration(*p.calibration);
    }
    return p;
}

void check_project_model(const ProjectConfig& p, const dse::TrainedModel& m) {
    bool same = p.input_channels == m.input_channels && p.timesteps == m.timesteps && p.layers.size() == m.layers.size();
    for (std::size_t i = 0; same && i < p.layers.size(); ++i) {
        same = p.layers[i].topology == m.layers[i].topology && p.layers[i].model == m.layers[i].model &&
               p.layers[i].neurons == m.layers[i].neuron_count;
    }
    if (!same) {
        fail(ErrorCategory::config, "project network description does not match the model file");
    }
}

// --- weights ----------------------------------------------------------------

std::vector<uint8_t> encode_weights(const sys::QuantizedNetwork& q) {
    q.validate();
    json layers = json::array();
    for (const sys::LayerWeights& l : q.layers) {
        layers.push_back(json{{"ff_count", l.ff.size()}, {"rec_count", l.rec.size()}, {"ff_scale", l.ff_scale}});
    }
    const std::string header = json{{"network", network_to_json(q.config, false)}, {"layers", layers}}.dump();
    Writer w;
    w.raw("SCWT", 4);
    w.u32(kWeightsVersion);
    w.u32(static_cast<uint32_t>(header.size()));
    w.raw(header.data(), header.size());
    for (const sys::LayerWeights& l : q.layers) {
        for (const auto* vec : {&l.ff, &l.rec}) {
            for (int64_t v : *vec) {
                w.u32(static_cast<uint32_t>(static_cast<int32_t>(v)));
            }
        }
    }
    return std::move(w.out);
}

sys::QuantizedNetwork decode_weights(std::span<const uint8_t> bytes, const std::string& origin) {
    Reader r{bytes, 0, origin};
    r.magic("SCWT");
    const uint32_t version = r.u32();
    if (version != kWeightsVersion) {
        parse_fail(origin, "unsupported weights version " + std::to_string(version));
    }
    const uint32_t header_len = r.u32();
    const json header = parse_json(r.str(header_len), origin + " header");
    sys::QuantizedNetwork q;
    q.config = network_from_json(field(header, "network", origin), origin);
    const json& layers = field(header, "layers", origin);
    if (!layers.is_array() || layers.size() != q.config.cores.size()) {
        parse_fail(origin, "layer table does not match the network");
    }
    for (const json& lj : layers) {
        sys::LayerWeights l;
        l.ff_scale = get<double>(lj, "ff_scale", origin);
        const auto n_ff = get<std::size_t>(lj, "ff_count", origin);
        const auto n_rec = get<std::size_t>(lj, "rec_count", origin);
        if (n_ff + n_rec > (bytes.size() - r.pos) / 4) {
            parse_fail(origin, "weight counts exceed the file size");
        }
        for (std::size_t i = 0; i < n_ff; ++i) {
            l.ff.push_back(static_cast<int32_t>(r.u32()));
        }
        for (std::size_t i = 0; i < n_rec; ++i) {
            l.rec.push_back(static_cast<int32_t>(r.u32()));
        }
        q.layers.push_back(std::move(l));
    }
    r.done();
    try {
        q.validate();
    } catch (const Error& e) {
        parse_fail(origin, e.what());
    }
    return q;
}

void write_weights(const fs::path& path, const sys::QuantizedNetwork& q) {
    write_bytes(path, encode_weights(q));
}

sys::QuantizedNetwork read_weights(const fs::path& path) {
    return decode_weights(read_bytes(path), path.string());
}

// --- dataset ----------------------------------------------------------------

std::vector<uint8_t> encode_dataset(const Dataset& d) {
    sys::NetworkConfig shape;
    shape.input_channels = d.channels;
    shape.timesteps = d.timesteps;
    Writer w;
    w.raw("SCEV", 4);
    w.u32(kDatasetVersion);
    w.u32(static_cast<uint32_t>(d.channels));
    w.u32(static_cast<uint32_t>(d.timesteps));
    w.u32(static_cast<uint32_t>(d.samples.size()));
    for (const sys::EventSample& s : d.samples) {
        sys::validate_sample(s, shape);
        if (s.label < 0) {
            fail(ErrorCategory::value, "sample label must be non-negative");
        }
        w.u32(static_cast<uint32_t>(s.label));
        w.u32(static_cast<uint32_t>(s.steps.size()));
        for (const auto& step : s.steps) {
            w.u32(static_cast<uint32_t>(step.size()));
            for (uint16_t a : step) {
                w.u16(a);
            }
        }
    }
    return std::move(w.out);
}

Dataset decode_dataset(std::span<const uint8_t> bytes, const std::string& origin) {
    Reader r{bytes, 0, origin};
    r.magic("SCEV");
    const uint32_t version = r.u32();
    if (version != kDatasetVersion) {
        parse_fail(origin, "unsupported dataset version " + std::to_string(version));
    }
    Dataset d;
    const uint32_t channels = r.u32();
    const uint32_t timesteps = r.u32();
    if (channels < 1 || channels > static_cast<uint32_t>(neuron::kMaxNeuronsPerCore) || timesteps < 1 ||
        timesteps > (1U << 20)) {
        parse_fail(origin, "channel or timestep count out of range");
    }
    d.channels = static_cast<int>(channels);
    d.timesteps = static_cast<int>(timesteps);
    const uint32_t count = r.u32();
    sys::NetworkConfig shape;
    shape.input_channels = d.channels;
    shape.timesteps = d.timesteps;
    for (uint32_t i = 0; i < count; ++i) {
        sys::EventSample s;
        s.label = static_cast<int>(r.u32());
        const uint32_t steps = r.u32();
        if (steps > timesteps) {
            parse_fail(origin, "sample " + std::to_string(i) + " has more steps than the dataset");
        }
        for (uint32_t t = 0; t < steps; ++t) {
            const uint32_t n = r.u32();
            r.need(static_cast<std::size_t>(n) * 2);
            std::vector<uint16_t> step;
            for (uint32_t k = 0; k < n; ++k) {
                step.push_back(r.u16());
            }
            s.steps.push_back(std::move(step));
        }
        try {
            sys::validate_sample(s, shape);
        } catch (const Error& e) {
            parse_fail(origin, "sample " + std::to_string(i) + ": " + e.what());
        }
        d.samples.push_back(std::move(s));
    }
    r.done();
    return d;
}

void write_dataset(const fs::path& path, const Dataset& d) {
    write_bytes(path, encode_dataset(d));
}

Dataset read_dataset(const fs::path& path) {
    return decode_dataset(read_bytes(path), path.string());
}

// --- manifest ---------------------------------------------------------------

json manifest_to_json(const dse::CandidateConfig& c, const sys::QuantizedNetwork& q, const std::string& weights_file,
                      const std::string& dataset_file, std::optional<double> accuracy) {
    json scales = json::array();
    for (const sys::LayerWeights& l : q.layers) {
        scales.push_back(l.ff_scale);
    }
    return json{{"schema", kManifestSchema},
                {"candidate", candidate_to_json(c)},
                {"network", network_to_json(q.config, true)},
                {"weight_scales", scales},
                {"weights", weights_file},
                {"dataset", dataset_file},
                {"accuracy", accuracy ? json(*accuracy) : json(nullptr)}};
}

void emit_manifest(const fs::path& manifest_path, const dse::CandidateConfig& c, const sys::QuantizedNetwork& q,
                   const std::string& dataset_file, std::optional<double> accuracy) {
    const fs::path weights = fs::path(manifest_path).replace_extension(".scwt");
    write_weights(weights, q);
    write_text(manifest_path, dump(manifest_to_json(c, q, weights.filename().string(), dataset_file, accuracy)));
}

Manifest load_manifest(const fs::path& path) {
    const std::string origin = path.string();
    const json j = parse_json(read_text(path), origin);
    check_schema(j, kManifestSchema, origin);
    Manifest m;
    m.candidate = candidate_from_json(field(j, "candidate", origin), origin);
    const sys::NetworkConfig recorded = network_from_json(field(j, "network", origin), origin);
    m.weights_file = get<std::string>(j, "weights", origin);
    m.dataset_file = get<std::string>(j, "dataset", origin);
    if (j.contains("accuracy") && !j["accuracy"].is_null()) {
        m.accuracy = get<double>(j, "accuracy", origin);
    }
    m.network = read_weights(resolve(path.parent_path(), m.weights_file.string()));
    if (!(m.network.config == recorded)) {
        fail(ErrorCategory::config, origin + ": network parameters differ from those in " + m.weights_file.string());
    }
    const auto scales = get_vector<double>(j, "weight_scales", origin);
    if (scales.size() != m.network.layers.size()) {
        fail(ErrorCategory::config, origin + ": weight scale count does not match the layers");
    }
    for (std::size_t i = 0; i < scales.size(); ++i) {
        if (scales[i] != m.network.layers[i].ff_scale) {
            fail(ErrorCategory::config, origin + ": weight scale of layer " + std::to_string(i) +
                                            " differs from the weights file");
        }
    }
    const auto& cores = recorded.cores;
    for (const sys::CoreConfig& c : cores) {
        if (c.weight_bits != m.candidate.ff_bits || (c.is_recurrent() && c.rec_bits != m.candidate.rec_bits)) {
            fail(ErrorCategory::config, origin + ": core " + std::to_string(c.core_id) +
                                            " bit-widths do not match the recorded candidate");
        }
    }
    return m;
}

// --- encoders ---------------------------------------------------------------

namespace {

void check_intensities(std::span<const double> p, int timesteps) {
    if (p.empty() || p.size() > static_cast<std::size_t>(neuron::kMaxNeuronsPerCore)) {
        fail(ErrorCategory::capacity, std::to_string(p.size()) + " input channels; a core accepts 1.." +
                                          std::to_string(neuron::kMaxNeuronsPerCore) +
                                          " (downscale the input)");
    }
    if (timesteps < 1) {
        fail(ErrorCategory::value, "timesteps must be at least 1");
    }
    for (double v : p) {
        if (!(v >= 0.0 && v <= 1.0)) {
            fail(ErrorCategory::value, "intensity outside [0, 1]");
        }
    }
}

} // namespace

sys::EventSample rate_encode(std::span<const double> intensities, int timesteps, int label) {
    check_intensities(intensities, timesteps);
    sys::EventSample s;
    s.label = label;
    s.steps.resize(static_cast<std::size_t>(timesteps));
    for (int t = 0; t < timesteps; ++t) {
        for (std::size_t c = 0; c < intensities.size(); ++c) {
            const double p = intensities[c];
            if (std::floor((t + 1) * p) > std::floor(t * p)) {
                s.steps[static_cast<std::size_t>(t)].push_back(static_cast<uint16_t>(c));
            }
        }
    }
    return s;
}

sys::EventSample bernoulli_encode(std::span<const double> intensities, int timesteps, int label, dse::Rng& rng) {
    check_intensities(intensities, timesteps);
    sys::EventSample s;
    s.label = label;
    s.steps.resize(static_cast<std::size_t>(timesteps));
    for (int t = 0; t < timesteps; ++t) {
        for (std::size_t c = 0; c < intensities.size(); ++c) {
            if (rng.uniform01() < intensities[c]) {
                s.steps[static_cast<std::size_t>(t)].push_back(static_cast<uint16_t>(c));
            }
        }
    }
    return s;
}

std::vector<double> downscale(std::span<const double> image, int width, int factor) {
    if (width < 1 || factor < 1 || image.size() % static_cast<std::size_t>(width) != 0) {
        fail(ErrorCategory::value, "image size is not a multiple of the width, or factor < 1");
    }
    const int height = static_cast<int>(image.size() / static_cast<std::size_t>(width));
    const int ow = (width + factor - 1) / factor;
    const int oh = (height + factor - 1) / factor;
    std::vector<double> out;
    out.reserve(static_cast<std::size_t>(ow) * oh);
    for (int y = 0; y < oh; ++y) {
        for (int x = 0; x < ow; ++x) {
            double sum = 0;
            int n = 0;
            for (int dy = 0; dy < factor && y * factor + dy < height; ++dy) {
                for (int dx = 0; dx < factor && x * factor + dx < width; ++dx) {
                    sum += image[static_cast<std::size_t>((y * factor + dy) * width + x * factor + dx)];
                    ++n;
                }
            }
            out.push_back(sum / n);
        }
    }
    return out;
}

std::vector<IntensityRow> parse_intensity_csv(const std::string& text, const std::string& origin) {
    std::vector<IntensityRow> rows;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') {
            line.pop_back();
        }
        if (line.empty() || line[0] == '#') {
            continue;
        }
        IntensityRow row;
        std::istringstream ls(line);
        std::string cell;
        bool first = true;
        while (std::getline(ls, cell, ',')) {
            try {
                std::size_t used = 0;
                if (first) {
                    row.label = std::stoi(cell, &used);
                } else {
                    row.values.push_back(std::stod(cell, &used));
                }
                if (cell.find_first_not_of(" \t", used) != std::string::npos) {
                    throw std::invalid_argument(cell);
                }
            } catch (const std::exception&) {
                parse_fail(origin + ":" + std::to_string(lineno), "bad number '" + cell + "'");
            }
            first = false;
        }
        if (row.values.empty()) {
            parse_fail(origin + ":" + std::to_string(lineno), "row has no intensities");
        }
        if (!rows.empty() && rows.front().values.size() != row.values.size()) {
            parse_fail(origin + ":" + std::to_string(lineno), "row width differs from the first row");
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

// --- trace ------------------------------------------------------------------

std::string format_trace(const std::vector<sys::TraceRecord>& trace) {
    std::ostringstream os;
    os << "# step source kind address word\n";
    for (const sys::TraceRecord& t : trace) {
        os << t.step << ' ' << (t.source == sys::kHostSource ? std::string("host") : std::to_string(t.source)) << ' '
           << aer::to_string(t.packet.kind) << ' ' << t.packet.address << ' ' << aer::encode_packet(t.packet) << '\n';
    }
    return os.str();
}

} // namespace spikecore::io
