// SPDX-FileCopyrightText: 2026 spikecore contributors
//
// SPDX-License-Identifier: Apache-2.0

// spikecore: encode / simulate / explore / estimate / manifest-check.
//
// Failures print "error[<category>]: <message>" on stderr and exit with the
// category's code (see spikecore/error.hpp).

#include <cstdio>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "spikecore/cost.hpp"
#include "spikecore/dse.hpp"
#include "spikecore/io.hpp"
#include "spikecore/system.hpp"

namespace {

using namespace spikecore;
namespace fs = io::fs;

struct Options {
    std::string config;
    std::string model;
    std::string dataset;
    std::string manifest;
    std::string input;
    std::string out;
    std::string trace;
    std::string schedule = "round-robin";
    std::vector<int> candidate;
    std::optional<uint64_t> seed;
    int threads = 0;
    int timesteps = 0;
    bool bernoulli = false;
    int width = 0;
    int factor = 1;
};

int thread_count(const Options& o) {
    if (o.threads > 0) {
        return o.threads;
    }
    return std::max(1U, std::thread::hardware_concurrency());
}

sys::Schedule schedule_of(const Options& o) {
    if (o.schedule == "round-robin") {
        return sys::Schedule::RoundRobin;
    }
    if (o.schedule == "threaded") {
        return sys::Schedule::Threaded;
    }
    fail(ErrorCategory::config, "unknown schedule '" + o.schedule + "' (round-robin, threaded)");
}

void emit(const Options& o, const std::string& text) {
    if (o.out.empty()) {
        std::cout << text;
    } else {
        io::write_text(o.out, text);
    }
}

std::string num(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.10g", v);
    return buf;
}

std::optional<io::ProjectConfig> project_of(const Options& o) {
    if (o.config.empty()) {
        return std::nullopt;
    }
    io::ProjectConfig p = io::read_project(o.config);
    if (o.seed) {
        p.seed = *o.seed;
        p.explore.search.seed = *o.seed;
    }
    p.explore.threads = thread_count(o);
    return p;
}

fs::path model_path(const Options& o, const io::ProjectConfig& p) {
    if (!o.model.empty()) {
        return o.model;
    }
    if (!p.model) {
        fail(ErrorCategory::config, "no model file: pass --model or set \"model\" in the project");
    }
    return *p.model;
}

fs::path dataset_path(const Options& o, const std::optional<io::ProjectConfig>& p) {
    if (!o.dataset.empty()) {
        return o.dataset;
    }
    if (!p || !p->dataset) {
        fail(ErrorCategory::config, "no dataset: pass --dataset or set \"dataset\" in the project");
    }
    return *p->dataset;
}

dse::CandidateConfig candidate_of(const Options& o, const io::ProjectConfig& p) {
    if (!o.candidate.empty()) {
        return {o.candidate[0], o.candidate[1], o.candidate[2]};
    }
    if (!p.candidate) {
        fail(ErrorCategory::config, "no candidate precision: pass --candidate or set \"candidate\" in the project");
    }
    return *p.candidate;
}

io::Dataset load_dataset_for(const fs::path& path, const sys::NetworkConfig& net) {
    io::Dataset d = io::read_dataset(path);
    if (d.channels != net.input_channels) {
        fail(ErrorCategory::config, path.string() + ": " + std::to_string(d.channels) +
                                        " channels, the network expects " + std::to_string(net.input_channels));
    }
    for (const sys::EventSample& s : d.samples) {
        sys::validate_sample(s, net);
    }
    return d;
}

// --- encode -----------------------------------------------------------------

int cmd_encode(const Options& o) {
    const auto project = project_of(o);
    int timesteps = o.timesteps;
    if (timesteps == 0 && project) {
        timesteps = project->timesteps;
    }
    if (timesteps < 1) {
        fail(ErrorCategory::config, "timesteps unknown: pass --timesteps or --config");
    }
    if (o.bernoulli && !o.seed) {
        fail(ErrorCategory::config, "--bernoulli requires --seed");
    }
    const auto rows = io::parse_intensity_csv(io::read_text(o.input), o.input);
    if (rows.empty()) {
        fail(ErrorCategory::parse, o.input + ": no samples");
    }
    io::Dataset d;
    d.timesteps = timesteps;
    dse::Rng rng(o.seed.value_or(0));
    for (const io::IntensityRow& r : rows) {
        std::vector<double> values = r.values;
        if (o.width > 0) {
            values = io::downscale(values, o.width, o.factor);
        }
        d.samples.push_back(o.bernoulli ? io::bernoulli_encode(values, timesteps, r.label, rng)
                                        : io::rate_encode(values, timesteps, r.label));
        d.channels = static_cast<int>(values.size());
    }
    if (project && d.channels != project->input_channels) {
        fail(ErrorCategory::config, "encoded " + std::to_string(d.channels) + " channels, the project expects " +
                                        std::to_string(project->input_channels));
    }
    if (o.out.empty()) {
        fail(ErrorCategory::config, "encode needs --out");
    }
    io::write_dataset(o.out, d);
    std::cout << "encoded " << d.samples.size() << " samples, " << d.channels << " channels, " << d.timesteps
              << " steps -> " << o.out << "\n";
    return 0;
}

// --- simulate ---------------------------------------------------------------

int cmd_simulate(const Options& o) {
    const auto project = project_of(o);
    sys::QuantizedNetwork q;
    fs::path dataset;
    std::string label;
    if (!o.manifest.empty()) {
        io::Manifest m = io::load_manifest(o.manifest);
        q = std::move(m.network);
        dataset = o.dataset.empty() ? fs::path(o.manifest).parent_path() / m.dataset_file : fs::path(o.dataset);
        label = dse::to_string(m.candidate);
    } else {
        if (!project) {
            fail(ErrorCategory::config, "simulate needs --config or --manifest");
        }
        const dse::TrainedModel model = io::read_model(model_path(o, *project));
        io::check_project_model(*project, model);
        const dse::CandidateConfig c = candidate_of(o, *project);
        q = dse::quantize_model(model, c);
        dataset = dataset_path(o, project);
        label = dse::to_string(c);
    }
    const io::Dataset d = load_dataset_for(dataset, q.config);
    const sys::Schedule schedule = schedule_of(o);

    std::ostringstream report;
    std::ostringstream trace;
    std::size_t correct = 0;
    std::vector<int> predictions;
    if (o.trace.empty()) {
        predictions = dse::evaluate_network(q, d.samples, thread_count(o), schedule).predictions;
    } else {
        const auto net = sys::build_network(q);
        sys::RunOptions opts;
        opts.schedule = schedule;
        opts.record_trace = true;
        for (std::size_t i = 0; i < d.samples.size(); ++i) {
            const sys::InferenceResult r = sys::run_inference(*net, d.samples[i], opts);
            predictions.push_back(r.predicted);
            trace << "# sample " << i << "\n" << io::format_trace(r.trace);
        }
        io::write_text(o.trace, trace.str());
    }
    for (std::size_t i = 0; i < d.samples.size(); ++i) {
        correct += predictions[i] == d.samples[i].label ? 1 : 0;
    }
    const double accuracy = d.samples.empty() ? 0.0 : static_cast<double>(correct) / d.samples.size();
    report << "# candidate " << label << "\n";
    report << "accuracy " << num(accuracy) << " (" << correct << "/" << d.samples.size() << ")\n";
    report << "# sample label predicted\n";
    for (std::size_t i = 0; i < d.samples.size(); ++i) {
        report << i << ' ' << d.samples[i].label << ' ' << predictions[i] << '\n';
    }
    emit(o, report.str());
    return 0;
}

// --- explore ----------------------------------------------------------------

int cmd_explore(const Options& o) {
    const auto project = project_of(o);
    if (!project) {
        fail(ErrorCategory::config, "explore needs --config");
    }
    if (o.out.empty()) {
        fail(ErrorCategory::config, "explore needs --out <directory>");
    }
    const dse::TrainedModel model = io::read_model(model_path(o, *project));
    io::check_project_model(*project, model);
    const fs::path dataset = dataset_path(o, project);
    const io::Dataset d = io::read_dataset(dataset);

    const dse::ExploreReport report = dse::explore(model, d.samples, project->explore);

    const fs::path dir = o.out;
    fs::create_directories(dir);
    io::write_text(dir / "report.txt", dse::format_report(report));

    const dse::CandidateConfig best = report.anneal.best;
    std::optional<double> accuracy;
    for (const dse::CandidateRow& row : report.rows) {
        if (row.cfg == best) {
            accuracy = row.accuracy;
        }
    }
    const sys::QuantizedNetwork q = dse::quantize_model(model, best);
    const fs::path rel = fs::absolute(dataset).lexically_relative(fs::absolute(dir));
    io::emit_manifest(dir / "best.json", best, q, rel.empty() ? dataset.string() : rel.generic_string(), accuracy);

    std::cout << "candidates " << report.rows.size() << "\n"
              << "best " << dse::to_string(best) << " cost " << num(report.anneal.best_cost) << " accuracy "
              << (accuracy ? num(*accuracy) : std::string("-")) << "\n"
              << "simulations " << report.simulations << " cache_hits " << report.cache_hits << "\n"
              << "manifest " << (dir / "best.json").string() << "\n";
    for (const std::string& w : report.warnings) {
        std::cerr << "warning: " << w << "\n";
    }
    return 0;
}

// --- estimate ---------------------------------------------------------------

int cmd_estimate(const Options& o) {
    const auto project = project_of(o);
    sys::NetworkConfig net;
    cost::CalibrationTable table = cost::CalibrationTable::placeholder();
    int64_t primitive_bits = cost::kDefaultBramBits;
    std::string label;
    if (!o.manifest.empty()) {
        const io::Manifest m = io::load_manifest(o.manifest);
        net = m.network.config;
        label = dse::to_string(m.candidate);
        if (project) {
            table = project->explore.calibration;
            primitive_bits = project->explore.bram_primitive_bits;
        }
    } else {
        if (!project) {
            fail(ErrorCategory::config, "estimate needs --config or --manifest");
        }
        const dse::CandidateConfig c = candidate_of(o, *project);
        table = project->explore.calibration;
        primitive_bits = project->explore.bram_primitive_bits;
        label = dse::to_string(c);
        if (project->model || !o.model.empty()) {
            net = dse::quantize_model(io::read_model(model_path(o, *project)), c).config;
        } else {
            // Structure only: geometry and logic do not depend on weight values.
            dse::TrainedModel shape;
            shape.input_channels = project->input_channels;
            shape.timesteps = project->timesteps;
            int sources = project->input_channels;
            for (const io::LayerSpec& l : project->layers) {
                dse::TrainedLayer t;
                t.topology = l.topology;
                t.model = l.model;
                t.neuron_count = l.neurons;
                t.ff.assign(static_cast<std::size_t>(sources) * l.neurons, 1.0);
                if (l.topology == sys::Topology::ATA_T) {
                    t.rec.assign(static_cast<std::size_t>(l.neurons) * l.neurons, 0.0);
                } else if (l.topology == sys::Topology::ATA_F) {
                    t.rec.assign(static_cast<std::size_t>(l.neurons), 0.0);
                }
                shape.layers.push_back(std::move(t));
                sources = l.neurons;
            }
            net = dse::quantize_model(shape, c).config;
        }
    }

    std::ostringstream os;
    os << "# candidate " << label << "\n";
    os << "# calibration " << table.label() << "\n";
    os << "# core topology model neurons ff_bits rec_bits ff_mem_bits state_bits rec_mem_bits brams luts flipflops\n";
    for (const sys::CoreConfig& c : net.cores) {
        const cost::CoreMemoryBits bits = cost::core_memory_bits(c);
        const cost::LogicEstimate logic = cost::estimate_core_logic(c.topology, c.model, c.weight_bits,
                                                                    c.is_recurrent() ? c.rec_bits : 0, table);
        os << static_cast<int>(c.core_id) << ' ' << sys::to_string(c.topology) << ' ' << neuron::to_string(c.model)
           << ' ' << c.neuron_count << ' ' << c.weight_bits << ' ' << c.rec_bits << ' ' << bits.ff << ' '
           << bits.state << ' ' << bits.rec << ' ' << num(cost::estimate_core_bram(c, primitive_bits)) << ' '
           << num(logic.luts) << ' ' << num(logic.flipflops) << '\n';
    }
    const cost::ResourceEstimate total = cost::estimate_resources(net, table, primitive_bits);
    os << "total luts " << num(total.luts) << " flipflops " << num(total.flipflops) << " brams " << num(total.brams)
       << "\n";
    emit(o, os.str());
    return 0;
}

// --- manifest-check -----------------------------------------------------------

int cmd_manifest_check(const Options& o) {
    if (o.manifest.empty()) {
        fail(ErrorCategory::config, "manifest-check needs --manifest");
    }
    const io::Manifest m = io::load_manifest(o.manifest);
    std::ostringstream os;
    os << "manifest " << o.manifest << " ok\n";
    os << "candidate " << dse::to_string(m.candidate) << "\n";
    os << "cores " << m.network.config.cores.size() << "\n";

    const fs::path dataset = o.dataset.empty() ? fs::path(o.manifest).parent_path() / m.dataset_file
                                               : fs::path(o.dataset);
    if (fs::exists(dataset)) {
        const io::Dataset d = load_dataset_for(dataset, m.network.config);
        const dse::AccuracyOutcome r = dse::evaluate_network(m.network, d.samples, thread_count(o), schedule_of(o));
        os << "accuracy " << num(r.accuracy) << "\n";
        if (m.accuracy && *m.accuracy != r.accuracy) {
            fail(ErrorCategory::config, o.manifest + ": recorded accuracy " + num(*m.accuracy) +
                                            " differs from the reloaded network's " + num(r.accuracy));
        }
    } else if (!o.dataset.empty() || m.accuracy) {
        fail(ErrorCategory::io, "dataset " + dataset.string() + " not found");
    }
    emit(o, os.str());
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"spikecore: fixed-point SNN core simulator and precision explorer"};
    app.require_subcommand(1);
    Options o;

    auto common = [&](CLI::App* s) {
        s->add_option("--config", o.config, "Project file (JSON)");
        s->add_option("--threads", o.threads, "Worker threads (default: hardware concurrency)");
        s->add_option("--seed", o.seed, "Random seed");
        s->add_option("--out", o.out, "Output path");
    };

    auto* encode = app.add_subcommand("encode", "Rate-encode an intensity CSV into an event dataset");
    common(encode);
    encode->add_option("--input", o.input, "CSV: label,intensity,... per line")->required();
    encode->add_option("--timesteps", o.timesteps, "Inference window (default: from --config)");
    encode->add_flag("--bernoulli", o.bernoulli, "Seeded Bernoulli spikes instead of evenly spread ones");
    encode->add_option("--width", o.width, "Image width for --factor downscaling");
    encode->add_option("--factor", o.factor, "Average-pool factor")->check(CLI::PositiveNumber);

    auto* simulate = app.add_subcommand("simulate", "Bit-exact inference over a dataset");
    common(simulate);
    simulate->add_option("--model", o.model, "Trained model (JSON)");
    simulate->add_option("--dataset", o.dataset, "Event dataset");
    simulate->add_option("--manifest", o.manifest, "Run a manifest instead of quantizing the model");
    simulate->add_option("--candidate", o.candidate, "ff,rec,leak bit-widths")->expected(3)->delimiter(',');
    simulate->add_option("--trace", o.trace, "Write the AER packet trace here");
    simulate->add_option("--schedule", o.schedule, "round-robin or threaded");

    auto* explore = app.add_subcommand("explore", "Simulated-annealing precision search");
    common(explore);
    explore->add_option("--model", o.model, "Trained model (JSON)");
    explore->add_option("--dataset", o.dataset, "Event dataset");

    auto* estimate = app.add_subcommand("estimate", "Resource estimate of a candidate or manifest");
    common(estimate);
    estimate->add_option("--model", o.model, "Trained model (JSON)");
    estimate->add_option("--manifest", o.manifest, "Manifest to estimate");
    estimate->add_option("--candidate", o.candidate, "ff,rec,leak bit-widths")->expected(3)->delimiter(',');

    auto* check = app.add_subcommand("manifest-check", "Validate a manifest and re-run its dataset");
    common(check);
    check->add_option("--manifest", o.manifest, "Manifest (JSON)")->required();
    check->add_option("--dataset", o.dataset, "Event dataset (default: the one it names)");
    check->add_option("--schedule", o.schedule, "round-robin or threaded");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    }

    try {
        if (*encode) {
            return cmd_encode(o);
        }
        if (*simulate) {
            return cmd_simulate(o);
        }
        if (*explore) {
            return cmd_explore(o);
        }
        if (*estimate) {
            return cmd_estimate(o);
        }
        return cmd_manifest_check(o);
    } catch (const Error& e) {
        std::cerr << "error[" << category_name(e.category()) << "]: " << e.what() << "\n";
        return exit_code(e.category());
    } catch (const std::exception& e) {
        std::cerr << "error[internal]: " << e.what() << "\n";
        return 1;
    }
}
