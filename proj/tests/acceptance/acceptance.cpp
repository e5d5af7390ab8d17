// SPDX-FileCopyrightText: 2026 spikecore contributors
//
// SPDX-License-Identifier: Apache-2.0

// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fail.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "spikecore/cg.hpp"
#include "spikecore/cost.hpp"
#include "spikecore/demo.hpp"
#include "spikecore/dse.hpp"
#include "spikecore/io.hpp"
#include "spikecore/neuron.hpp"
#include "spikecore/spi.hpp"
#include "spikecore/system.hpp"
#include "support.hpp"

using namespace spikecore;
namespace fs = std::filesystem;

namespace {

// Tolerances and limits.
constexpr double kCgErrorBound = 1.0 / 512;
constexpr int64_t kCgTruncationBound = 8;
constexpr double kCostTolerance = 1e-12;
constexpr int kSaRequiredHits = 95;
constexpr double kLimit1 = 10, kLimit3 = 30, kLimit4 = 300, kLimit6 = 10, kLimit8 = 120, kLimit10 = 180;

struct Outcome {
    bool pass = false;
    std::string detail;
};

int failures = 0;

void report(int id, const char* name, double limit_s, const std::function<Outcome()>& body) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
        o = body();
    } catch (const std::exception& e) {
        o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (limit_s > 0 && secs > limit_s) {
        o.pass = false;
        o.detail += "; over time limit";
    }
    char timing[64];
    std::snprintf(timing, sizeof timing, "%.2fs", secs);
    std::cout << "criterion " << id << ' ' << (o.pass ? "PASS" : "FAIL") << ' ' << name << " [" << o.detail << "; "
              << timing;
    if (limit_s > 0) {
        std::cout << " / " << limit_s << "s";
    }
    std::cout << "]\n" << std::flush;
    failures += o.pass ? 0 : 1;
}

// --- 1 ----------------------------------------------------------------------

Outcome cg_exactness() {
    int64_t worst = 0;
    for (unsigned k = 0; k < 256; ++k) {
        const cg::DecayRate r = cg::DecayRate::from_k(k);
        for (int64_t x = -32768; x <= 32768; x += 7) {
            const int64_t y = cg::apply_decay(x, r);
            if (cg::apply_decay(-x, r) != -y) {
                return {false, "sign asymmetry at k=" + std::to_string(k) + " x=" + std::to_string(x)};
            }
            // Exact |x| k / 256 in integers: 256 * (ideal - |y|) in [0, 8 * 256).
            const int64_t gap = std::llabs(x) * k - 256 * std::llabs(y);
            if (gap < 0 || gap >= kCgTruncationBound * 256) {
                return {false, "bound violated at k=" + std::to_string(k) + " x=" + std::to_string(x)};
            }
            worst = std::max(worst, gap);
        }
    }
    std::mt19937_64 rng(2026);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    double max_err = 0;
    for (int i = 0; i < 10000; ++i) {
        const double f = u(rng);
        max_err = std::max(max_err, std::abs(cg::encode_decay(f, 8).factor() - f));
    }
    const int64_t example = cg::apply_decay(256, cg::DecayRate::from_k(153));
    std::ostringstream d;
    d << "max truncation " << worst / 256.0 << " LSB, max encode error " << max_err << ", 153/256*256 -> " << example;
    return {max_err <= kCgErrorBound && example == 153, d.str()};
}

// --- 2 ----------------------------------------------------------------------

Outcome memory_sizing() {
    const auto a = neuron::size_synaptic_memory(110, 8, 8);
    const auto b = neuron::size_synaptic_memory(8, 90, 8);
    const auto s = neuron::size_state_memory(10, 9, 8);
    const bool ok = a.blocks == 128 && a.block_addr_bits == 7 && b.rows_per_block == 16 && b.row_addr_bits == 4 &&
                    s.row_bits == 24;
    std::ostringstream d;
    d << "110 sources -> " << a.blocks << " blocks/" << a.block_addr_bits << " bits; 90 dests -> "
      << b.rows_per_block << " rows/" << b.row_addr_bits << " bits; 9+8 -> " << s.row_bits << " bits";
    return {ok, d.str()};
}

// --- 3 ----------------------------------------------------------------------

Outcome spi_codec() {
    std::mt19937_64 rng(3);
    for (int i = 0; i < 100000; ++i) {
        spi::SpiCommand c;
        if (rng() % 3 == 0) {
            c = spi::SpiCommand::config(static_cast<spi::Register>(rng() % spi::kRegisterCount),
                                        static_cast<uint32_t>(rng() % 0x8000));
        } else {
            const auto t = static_cast<spi::Target>(rng() % 3);
            const auto rw = static_cast<spi::Rw>(rng() % 2);
            c = t == spi::Target::NeuronState
                    ? spi::SpiCommand::memory(rw, t, static_cast<int>(rng() % 256), static_cast<int>(rng() % 2048))
                    : spi::SpiCommand::memory(rw, t, static_cast<int>(rng() % 8192), static_cast<int>(rng() % 64));
        }
        if (spi::decode_address_word(spi::encode_address_word(c)) != c) {
            return {false, "codec mismatch on command " + std::to_string(i)};
        }
    }

    // Two-core network with every memory kind.
    sys::QuantizedNetwork q;
    q.config.input_channels = 20;
    q.config.timesteps = 2;
    sys::CoreConfig c0;
    c0.topology = sys::Topology::ATA_T;
    c0.model = neuron::NeuronModelKind::Synaptic;
    c0.neuron_count = 12;
    c0.source_count = 20;
    c0.weight_bits = 6;
    c0.rec_bits = 5;
    c0.potential_bits = 10;
    c0.current_bits = 8;
    sys::CoreConfig c1;
    c1.core_id = 1;
    c1.topology = sys::Topology::FF;
    c1.neuron_count = 5;
    c1.source_count = 12;
    c1.weight_bits = 8;
    c1.potential_bits = 12;
    q.config.cores = {c0, c1};
    q.layers = {sys::LayerWeights{std::vector<int64_t>(240, 1), std::vector<int64_t>(144, -1), 1.0},
                sys::LayerWeights{std::vector<int64_t>(60, 2), {}, 1.0}};
    auto net = sys::build_network(q);

    std::size_t bytes = 0;
    for (std::size_t core = 0; core < 2; ++core) {
        const sys::CoreConfig& cc = q.config.cores[core];
        std::vector<std::pair<spi::Target, std::pair<int, int>>> mems{
            {spi::Target::FeedforwardSyn, {cc.ff_geometry().rows(), cc.ff_geometry().row_bytes()}},
            {spi::Target::NeuronState, {cc.state_geometry().rows, cc.state_geometry().row_bytes()}}};
        if (auto g = cc.rec_geometry(); g && cc.has_recurrent_memory()) {
            mems.push_back({spi::Target::RecurrentSyn, {g->rows(), g->row_bytes()}});
        }
        const std::size_t other = 1 - core;
        for (const auto& [target, shape] : mems) {
            std::vector<uint8_t> written;
            net->bus().select_core(static_cast<uint8_t>(core));
            for (int r = 0; r < shape.first; ++r) {
                for (int b = 0; b < shape.second; ++b) {
                    const auto v = static_cast<uint8_t>(rng());
                    net->bus().write_memory(target, r, b, v);
                    written.push_back(v);
                }
            }
            if (sys::read_memory_image(*net, core, target) != written) {
                return {false, "read-back mismatch on core " + std::to_string(core)};
            }
            bytes += written.size();
            // Writes addressed to the other core leave this one untouched.
            const std::size_t before = net->bus().frame_count();
            net->bus().select_core(static_cast<uint8_t>(other));
            for (int r = 0; r < std::min(shape.first, 4); ++r) {
                net->bus().write_memory(spi::Target::NeuronState, 0, 0, 0xA5);
            }
            if (net->bus().frame_count() == before || sys::read_memory_image(*net, core, target) != written) {
                return {false, "unselected core " + std::to_string(core) + " changed"};
            }
        }
    }
    return {true, "100000 commands, " + std::to_string(bytes) + " memory bytes read back"};
}

// --- 4, 5, 7 ----------------------------------------------------------------

struct Case {
    sys::QuantizedNetwork net;
    std::vector<sys::EventSample> samples;
};

std::vector<Case> equivalence_suite(int count, uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::vector<Case> out;
    for (int i = 0; i < count; ++i) {
        Case c;
        c.net = spikecore::testing::random_network(rng);
        for (int k = 0; k < 2; ++k) {
            c.samples.push_back(spikecore::testing::random_sample(rng, c.net.config));
        }
        out.push_back(std::move(c));
    }
    return out;
}

// Serialized results of the whole suite, cases split across `threads`
// workers in contiguous chunks.
std::string run_suite(const std::vector<Case>& suite, sys::Schedule schedule, int threads) {
    std::vector<std::string> parts(suite.size());
    auto work = [&](std::size_t lo, std::size_t hi) {
        for (std::size_t i = lo; i < hi; ++i) {
            auto net = sys::build_network(suite[i].net);
            sys::RunOptions opts;
            opts.schedule = schedule;
            opts.record_states = true;
            opts.record_trace = true;
            for (const auto& s : suite[i].samples) {
                parts[i] += sys::serialize(sys::run_inference(*net, s, opts));
            }
        }
    };
    std::vector<std::thread> pool;
    const std::size_t chunk = (suite.size() + threads - 1) / threads;
    for (int t = 0; t < threads; ++t) {
        pool.emplace_back(work, std::min(suite.size(), t * chunk), std::min(suite.size(), (t + 1) * chunk));
    }
    for (auto& t : pool) {
        t.join();
    }
    std::string all;
    for (const auto& p : parts) {
        all += p;
    }
    return all;
}

Outcome dense_equivalence(const std::vector<Case>& suite) {
    int topo[3] = {0, 0, 0};
    int model[3] = {0, 0, 0};
    std::size_t samples = 0;
    for (std::size_t i = 0; i < suite.size(); ++i) {
        auto net = sys::build_network(suite[i].net);
        for (const sys::CoreConfig& c : suite[i].net.config.cores) {
            ++topo[static_cast<int>(c.topology)];
            ++model[static_cast<int>(c.model)];
        }
        for (const auto& s : suite[i].samples) {
            sys::RunOptions opts;
            opts.record_states = true;
            const auto a = sys::run_inference(*net, s, opts);
            const auto b = sys::dense_reference(suite[i].net, s, true);
            if (a.spikes != b.spikes || a.states != b.states || a.spike_counts != b.spike_counts ||
                a.predicted != b.predicted) {
                return {false, "network " + std::to_string(i) + " diverges from the dense simulator"};
            }
            ++samples;
        }
    }
    std::ostringstream d;
    d << suite.size() << " networks, " << samples << " samples; cores FF/ATA_F/ATA_T " << topo[0] << '/' << topo[1]
      << '/' << topo[2] << ", LIF/IF/Syn " << model[0] << '/' << model[1] << '/' << model[2];
    const bool covered = std::all_of(std::begin(topo), std::end(topo), [](int v) { return v > 0; }) &&
                         std::all_of(std::begin(model), std::end(model), [](int v) { return v > 0; });
    return {covered, d.str()};
}

Outcome bypass_equivalence() {
    std::mt19937_64 rng(5);
    int if_cores = 0;
    for (int i = 0; i < 100; ++i) {
        const auto q = spikecore::testing::random_network(rng);
        const auto l = spikecore::testing::if_as_bypass_lif(q);
        for (const auto& c : q.config.cores) {
            if_cores += c.model == neuron::NeuronModelKind::IF ? 1 : 0;
        }
        auto a = sys::build_network(q);
        auto b = sys::build_network(l);
        sys::RunOptions opts;
        opts.record_states = true;
        for (int k = 0; k < 2; ++k) {
            const auto s = spikecore::testing::random_sample(rng, q.config);
            if (sys::serialize(sys::run_inference(*a, s, opts), false) !=
                sys::serialize(sys::run_inference(*b, s, opts), false)) {
                return {false, "network " + std::to_string(i) + " differs"};
            }
        }
    }
    return {if_cores > 0, "100 networks, " + std::to_string(if_cores) + " IF cores rewritten"};
}

Outcome concurrency(const std::vector<Case>& suite) {
    const std::string single = run_suite(suite, sys::Schedule::RoundRobin, 1);
    const std::string multi = run_suite(suite, sys::Schedule::RoundRobin, 4);
    const std::string threaded = run_suite(suite, sys::Schedule::Threaded, 2);
    const bool ok = single == multi && single == threaded;
    return {ok, std::to_string(single.size()) + " bytes; 1 worker, 4 workers, thread-per-core schedule"};
}

// --- 6 ----------------------------------------------------------------------

Outcome aer_stress() {
    constexpr int n = 10000;
    std::mt19937_64 rng(6);
    std::vector<aer::AerPacket> sent;
    int terminators = 0;
    for (int i = 0; i < n; ++i) {
        if (rng() % 10 == 0) {
            sent.push_back(rng() % 5 == 0 ? aer::AerPacket::eoin() : aer::AerPacket::eots());
            ++terminators;
        } else {
            sent.push_back(aer::AerPacket::aspl(static_cast<uint16_t>(rng() % 256)));
        }
    }
    // Three capacity-4 hops; every stage stalls at random.
    aer::HandshakeChannel a(4), b(4), c(4);
    std::size_t next = 0;
    std::optional<aer::AerPacket> hold1, hold2;
    std::vector<aer::AerPacket> got;
    while (got.size() < sent.size()) {
        if (next < sent.size() && rng() % 3 != 0 && a.try_send(sent[next])) {
            ++next;
        }
        if (!hold1 && rng() % 2 == 0) {
            hold1 = a.try_recv();
        }
        if (hold1 && rng() % 3 != 0 && b.try_send(*hold1)) {
            hold1.reset();
        }
        if (!hold2 && rng() % 2 == 0) {
            hold2 = b.try_recv();
        }
        if (hold2 && rng() % 4 != 0 && c.try_send(*hold2)) {
            hold2.reset();
        }
        if (rng() % 5 < 2) {
            if (auto p = c.try_recv()) {
                got.push_back(*p);
            }
        }
    }
    int seen_terminators = 0;
    for (const auto& p : got) {
        seen_terminators += p.is_terminator() ? 1 : 0;
    }
    const std::size_t stalls = a.stalled_sends() + b.stalled_sends() + c.stalled_sends();

    // Same stream through real threads with a blocking sender.
    aer::HandshakeChannel t(4);
    std::thread producer([&] {
        for (const auto& p : sent) {
            t.send(p);
        }
    });
    std::vector<aer::AerPacket> got_threaded;
    while (got_threaded.size() < sent.size()) {
        if (auto p = t.recv()) {
            got_threaded.push_back(*p);
        }
    }
    producer.join();

    const bool ok = got == sent && got_threaded == sent && seen_terminators == terminators && stalls > 0;
    std::ostringstream d;
    d << n << " packets, " << terminators << " terminators, " << stalls << " refused sends, 0 lost";
    return {ok, d.str()};
}

// --- 8 ----------------------------------------------------------------------

Outcome sa_optimality() {
    const io::ProjectConfig project = demo::project();
    const dse::CandidateSpace space(project.explore.ranges, true);
    if (space.size() != 32) {
        return {false, "space has " + std::to_string(space.size()) + " candidates"};
    }
    // Brute force: every candidate's accuracy and resources.
    dse::AccuracyEvaluator eval(demo::model(), demo::samples(10, 7));
    std::vector<cost::ResourceEstimate> hw;
    std::vector<double> acc;
    for (const auto& c : space.candidates()) {
        const auto q = dse::quantize_model(demo::model(), c);
        hw.push_back(cost::estimate_resources(q.config, project.explore.calibration));
        acc.push_back(eval.evaluate(c).accuracy);
    }
    const cost::Norms norms = cost::candidate_max_norms(hw);
    std::vector<double> total;
    for (std::size_t i = 0; i < hw.size(); ++i) {
        total.push_back(cost::total_cost(hw[i], acc[i], project.explore.weights, norms));
    }
    const double best = *std::min_element(total.begin(), total.end());

    int hits = 0;
    bool monotone = true;
    for (uint64_t seed = 1; seed <= 100; ++seed) {
        dse::SearchParams p = project.explore.search;
        p.seed = seed;
        const auto r = dse::simulated_annealing(space, [&](std::size_t i) { return total[i]; }, p);
        hits += r.best_cost == best ? 1 : 0;
        double prev = std::numeric_limits<double>::infinity();
        for (const auto& h : r.history) {
            monotone = monotone && h.best_cost <= prev;
            prev = h.best_cost;
        }
    }
    std::ostringstream d;
    const auto opt = space.candidates()[static_cast<std::size_t>(std::min_element(total.begin(), total.end()) -
                                                                 total.begin())];
    d << hits << "/100 runs reach the optimum " << dse::to_string(opt) << " (cost " << best << ")"
      << (monotone ? "" : "; best cost increased in a history");
    return {hits >= kSaRequiredHits && monotone, d.str()};
}

// --- 9 ----------------------------------------------------------------------

Outcome cost_arithmetic() {
    const cost::CostWeights w{0.5, 0.5, 0.33, 0.33, 0.34};
    const double t = cost::total_cost(cost::NormalizedResources{0.5, 0.5, 0.5}, 0.9, w);
    int rejected = 0;
    for (const cost::CostWeights& bad : {cost::CostWeights{0.6, 0.5, 0.33, 0.33, 0.34},
                                         cost::CostWeights{0.5, 0.5, 0.4, 0.33, 0.34},
                                         cost::CostWeights{1.2, -0.2, 0.33, 0.33, 0.34}}) {
        try {
            bad.validate();
        } catch (const Error& e) {
            rejected += e.category() == ErrorCategory::value ? 1 : 0;
        }
    }
    std::ostringstream d;
    d.precision(17);
    d << "total " << t << ", " << rejected << "/3 invalid weight sets rejected";
    return {std::abs(t - 0.30) <= kCostTolerance && rejected == 3, d.str()};
}

// --- 10 ---------------------------------------------------------------------

int sh(const fs::path& dir, const std::string& args, const std::string& log) {
    const std::string cmd =
        "cd '" + dir.string() + "' && '" + SPIKECORE_CLI + "' " + args + " > " + log + " 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

Outcome end_to_end() {
    const fs::path root = fs::temp_directory_path() / "spikecore_acceptance";
    fs::remove_all(root);
    const std::vector<std::string> outputs{"dataset.scev", "encode.log",   "explore.log",  "out/report.txt",
                                           "out/best.json", "out/best.scwt", "check.log",   "simulate.log",
                                           "trace.txt"};
    std::vector<std::vector<std::vector<uint8_t>>> runs;
    std::string summary;
    for (int run = 0; run < 2; ++run) {
        const fs::path dir = root / ("run" + std::to_string(run));
        fs::create_directories(dir);
        demo::write_files(dir);
        const std::vector<std::pair<std::string, std::string>> steps{
            {"encode --config project.json --input intensities.csv --out dataset.scev", "encode.log"},
            {"explore --config project.json --out out", "explore.log"},
            {"manifest-check --manifest out/best.json", "check.log"},
            {"simulate --manifest out/best.json --trace trace.txt", "simulate.log"}};
        for (const auto& [args, log] : steps) {
            if (const int code = sh(dir, args, log); code != 0) {
                return {false, "'" + args + "' exited with " + std::to_string(code)};
            }
        }
        const io::Manifest m = io::load_manifest(dir / "out" / "best.json");
        const std::string sim = io::read_text(dir / "simulate.log");
        if (m.candidate.ff_bits != 8 || sim.find("\naccuracy 1 ") == std::string::npos) {
            return {false, "best " + dse::to_string(m.candidate) + ", simulate: " + sim.substr(0, 80)};
        }
        summary = "best " + dse::to_string(m.candidate) + ", accuracy 1";
        std::vector<std::vector<uint8_t>> files;
        for (const auto& f : outputs) {
            files.push_back(io::read_bytes(dir / f));
        }
        runs.push_back(std::move(files));
    }
    for (std::size_t i = 0; i < outputs.size(); ++i) {
        if (runs[0][i] != runs[1][i]) {
            return {false, outputs[i] + " differs between runs"};
        }
    }
    fs::remove_all(root);
    return {true, summary + ", " + std::to_string(outputs.size()) + " output files byte-identical across 2 runs"};
}

} // namespace

int main() {
    report(1, "CG exactness and bound", kLimit1, cg_exactness);
    report(2, "memory sizing", 0, memory_sizing);
    report(3, "SPI codec and read-back", kLimit3, spi_codec);
    const std::vector<Case> suite = equivalence_suite(1000, 4);
    report(4, "event-driven equals dense simulator", kLimit4, [&] { return dense_equivalence(suite); });
    report(5, "IF equals bypassed LIF", 0, bypass_equivalence);
    report(6, "AER losslessness", kLimit6, aer_stress);
    report(7, "determinism under concurrency", 0, [&] { return concurrency(suite); });
    report(8, "SA optimality", kLimit8, sa_optimality);
    report(9, "cost arithmetic", 0, cost_arithmetic);
    report(10, "end to end", kLimit10, end_to_end);
    std::cout << (failures == 0 ? "all criteria pass" : std::to_string(failures) + " criteria fail") << "\n";
    return failures == 0 ? 0 : 1;
}
