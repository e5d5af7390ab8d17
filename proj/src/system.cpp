// SPDX-FileCopyrightText: 2026 spikecore contributors
//
// SPDX-License-Identifier: Apache-2.0

#include "spikecore/system.hpp"

#include <algorithm>
#include <exception>
#include <sstream>
#include <thread>

namespace spikecore::sys {

namespace {

neuron::SynapticMemory make_ff_memory(const CoreConfig& c) {
    return neuron::SynapticMemory(c.ff_geometry(), c.weight_bits);
}

std::optional<neuron::SynapticMemory> make_rec_memory(const CoreConfig& c, Topology which) {
    if (c.topology != which) {
        return std::nullopt;
    }
    return neuron::SynapticMemory(*c.rec_geometry(), c.rec_bits);
}

std::optional<aer::BoundedQueue<uint16_t>> make_rec_queue(const CoreConfig& c) {
    if (!c.is_recurrent()) {
        return std::nullopt;
    }
    return aer::BoundedQueue<uint16_t>(c.effective_rec_queue_capacity());
}

std::string core_tag(const CoreConfig& c) {
    return "core " + std::to_string(c.core_id) + ": ";
}

} // namespace

// --- Core -------------------------------------------------------------------

Core::Core(const CoreConfig& design)
    : design_((design.validate(), design)), ff_mem_(make_ff_memory(design)),
      rec_mem_(make_rec_memory(design, Topology::ATA_T)), self_mem_(make_rec_memory(design, Topology::ATA_F)),
      state_mem_(design.neuron_count, design.potential_format(), design.current_format()),
      rec_queue_(make_rec_queue(design)) {}

uint8_t Core::read_memory(spi::Target target, int row, int byte) const {
    switch (target) {
    case spi::Target::NeuronState: return state_mem_.read_byte(row, byte);
    case spi::Target::FeedforwardSyn: return ff_mem_.read_byte(row, byte);
    case spi::Target::RecurrentSyn:
        if (rec_mem_) {
            return rec_mem_->read_byte(row, byte);
        }
        if (self_mem_) {
            return self_mem_->read_byte(row, byte);
        }
        break;
    }
    fail(ErrorCategory::address, core_tag(design_) + "no recurrent synaptic memory in a feedforward core");
}

void Core::write_memory(spi::Target target, int row, int byte, uint8_t value) {
    switch (target) {
    case spi::Target::NeuronState: state_mem_.write_byte(row, byte, value); return;
    case spi::Target::FeedforwardSyn: ff_mem_.write_byte(row, byte, value); return;
    case spi::Target::RecurrentSyn:
        if (rec_mem_) {
            rec_mem_->write_byte(row, byte, value);
            return;
        }
        if (self_mem_) {
            self_mem_->write_byte(row, byte, value);
            return;
        }
        break;
    }
    fail(ErrorCategory::address, core_tag(design_) + "no recurrent synaptic memory in a feedforward core");
}

const RuntimeParams& Core::params() {
    if (registers_.version() == params_version_) {
        return params_;
    }
    using spi::Register;
    const std::string where = core_tag(design_);
    auto reg = [&](Register r) { return registers_.get(r); };

    RuntimeParams p;
    const uint64_t model_raw = reg(Register::neuron_model);
    if (model_raw > 2) {
        fail(ErrorCategory::config, where + "neuron_model register holds " + std::to_string(model_raw));
    }
    p.model = static_cast<neuron::NeuronModelKind>(model_raw);
    if ((p.model == neuron::NeuronModelKind::Synaptic) != design_.is_synaptic()) {
        fail(ErrorCategory::config, where + "neuron_model " + neuron::to_string(p.model) +
                                        " is not supported by a core built for " + neuron::to_string(design_.model));
    }

    const uint64_t active = reg(Register::active_neuron_count);
    if (active < 1 || active > static_cast<uint64_t>(design_.neuron_count)) {
        fail(ErrorCategory::config, where + "active_neuron_count " + std::to_string(active) + " outside [1, " +
                                        std::to_string(design_.neuron_count) + "]");
    }
    p.active_neurons = static_cast<int>(active);

    const fxp::QFormat pf = design_.potential_format();
    const uint64_t thr = reg(Register::threshold);
    if (thr < 1 || thr > static_cast<uint64_t>(pf.max())) {
        fail(ErrorCategory::config, where + "threshold register " + std::to_string(thr) +
                                        " outside [1, " + std::to_string(pf.max()) + "]");
    }
    p.leak.threshold = fxp::QWord(static_cast<int64_t>(thr), pf);

    auto rate = [&](Register r) {
        const uint64_t raw = reg(r);
        if (raw > 0x1FF) {
            fail(ErrorCategory::config, where + spi::to_string(r) + " exceeds 9 bits");
        }
        const cg::DecayRate d(static_cast<uint16_t>(raw));
        if (!design_.units.can_represent(d)) {
            fail(ErrorCategory::config, where + spi::to_string(r) + " needs a shift unit that is not synthesized");
        }
        return d;
    };
    p.leak.beta = p.model == neuron::NeuronModelKind::IF ? cg::DecayRate::bypass() : rate(Register::decay_beta);
    if (design_.is_synaptic()) {
        p.leak.alpha = rate(Register::decay_alpha);
    }
    const uint64_t reset = reg(Register::reset_policy);
    if (reset > 1) {
        fail(ErrorCategory::config, where + "reset_policy register holds " + std::to_string(reset));
    }
    p.leak.reset = static_cast<fxp::ResetPolicy>(reset);
    p.leak.units = design_.units;

    const uint64_t mode = reg(Register::recurrent_mode);
    if (mode != 0 && (!design_.is_recurrent() || mode != static_cast<uint64_t>(design_.topology))) {
        fail(ErrorCategory::config, where + "recurrent_mode " + std::to_string(mode) +
                                        " was not synthesized (core topology " + to_string(design_.topology) + ")");
    }
    p.recurrence = mode != 0;

    const uint64_t steps = reg(Register::timestep_count);
    if (steps < 1) {
        fail(ErrorCategory::config, where + "timestep_count register is zero");
    }
    p.timesteps = static_cast<int>(std::min<uint64_t>(steps, 1U << 30));

    params_ = p;
    params_version_ = registers_.version();
    return params_;
}

void Core::set_recording(bool states, bool trace) {
    record_states_ = states;
    record_trace_ = trace;
}

void Core::clear_records() {
    records_.clear();
    trace_.clear();
    seq_ = 0;
}

void Core::restart() {
    phase_ = Phase::Integrate;
    held_.reset();
    sweep_next_ = 0;
    step_ = 0;
    if (rec_queue_) {
        rec_queue_->clear();
    }
}

void Core::note(const aer::AerPacket& p) {
    if (record_trace_) {
        trace_.push_back({step_, design_.core_id, seq_++, p});
    }
}

void Core::integrate_neuron(int n, int64_t weight) {
    state_mem_.store(n, neuron::integrate(state_mem_.load(n), fxp::QWord(weight, fxp::QFormat(fxp::kMaxBits))));
}

void Core::ff_integrate(uint16_t source) {
    if (source >= design_.source_count) {
        fail(ErrorCategory::address, core_tag(design_) + "ASPL from source " + std::to_string(source) +
                                         " but the layer has " + std::to_string(design_.source_count) + " sources");
    }
    for (int n = 0; n < params_.active_neurons; ++n) {
        integrate_neuron(n, ff_mem_.weight(source, n));
    }
}

void Core::rec_integrate() {
    while (auto a = rec_queue_->try_pop()) {
        if (rec_mem_) {
            for (int n = 0; n < params_.active_neurons; ++n) {
                integrate_neuron(n, rec_mem_->weight(*a, n));
            }
        } else {
            integrate_neuron(*a, self_mem_->weight(0, *a));
        }
    }
}

void Core::begin_step_end(const aer::AerPacket& terminator) {
    params();
    if (rec_queue_) {
        if (params_.recurrence) {
            rec_integrate();
        } else {
            rec_queue_->clear();
        }
    }
    records_.emplace_back();
    terminator_ = terminator;
    sweep_next_ = 0;
    phase_ = Phase::Sweep;
}

bool Core::emit(aer::HandshakeChannel& out, const aer::AerPacket& p, Blocking mode) {
    if (mode == Blocking::Yes) {
        out.send(p);
    } else if (!out.try_send(p)) {
        return false;
    }
    note(p);
    return true;
}

bool Core::tick(aer::HandshakeChannel& in, aer::HandshakeChannel& out, Blocking mode) {
    bool progress = false;
    std::optional<aer::AerPacket> inbound;
    if (phase_ == Phase::Integrate) {
        inbound = mode == Blocking::Yes ? in.recv() : in.try_recv();
        if (!inbound) {
            return false;
        }
        progress = true;
    }

    std::lock_guard frame(frame_mutex_);
    if (inbound) {
        if (inbound->kind == aer::PacketKind::ASPL) {
            params();
            ff_integrate(inbound->address);
            return true;
        }
        if (!inbound->is_terminator()) {
            fail(ErrorCategory::protocol, core_tag(design_) + "ASCL packet arrived on an inter-core link");
        }
        begin_step_end(*inbound);
    }

    for (;;) {
        if (held_) {
            // Wait-Trans: the packet stays here until the next queue has room.
            if (!emit(out, *held_, mode)) {
                return progress;
            }
            progress = true;
            held_.reset();
            if (phase_ == Phase::Forward) {
                phase_ = Phase::Integrate;
                if (terminator_.kind == aer::PacketKind::EOIN) {
                    step_ = 0;
                    ++completed_samples_;
                } else {
                    ++step_;
                }
                return true;
            }
        }

        if (sweep_next_ < params_.active_neurons) {
            const int n = sweep_next_++;
            auto [next, fired] = neuron::leak_and_fire(state_mem_.load(n), params_.leak);
            state_mem_.store(n, next);
            if (fired) {
                const auto addr = static_cast<uint16_t>(n);
                records_.back().spikes.push_back(addr);
                if (rec_queue_ && params_.recurrence) {
                    if (!rec_queue_->try_push(addr)) {
                        fail(ErrorCategory::protocol, core_tag(design_) + "recurrent queue overflow");
                    }
                    note(aer::AerPacket::ascl(addr));
                }
                held_ = aer::AerPacket::aspl(addr);
            }
            continue;
        }

        if (record_states_) {
            StateSnapshot snap;
            for (int n = 0; n < params_.active_neurons; ++n) {
                const neuron::NeuronState s = state_mem_.load(n);
                snap.membrane.push_back(s.membrane.value());
                if (s.syn_current) {
                    snap.syn_current.push_back(s.syn_current->value());
                }
            }
            records_.back().state = std::move(snap);
        }
        if (terminator_.kind == aer::PacketKind::EOIN) {
            for (int n = 0; n < design_.neuron_count; ++n) {
                state_mem_.store(n, neuron::lazy_reset(state_mem_.load(n)));
            }
            if (rec_queue_) {
                rec_queue_->clear();
            }
        }
        held_ = terminator_;
        phase_ = Phase::Forward;
    }
}

// --- Network ----------------------------------------------------------------

Network::Network(const NetworkConfig& config) : config_(config) {
    config_.validate();
    std::vector<spi::SpiSlave*> slaves;
    for (const CoreConfig& c : config_.cores) {
        cores_.push_back(std::make_unique<Core>(c));
        slaves.push_back(cores_.back().get());
    }
    bus_ = std::make_unique<spi::SpiBus>(std::move(slaves));
    reset_links();
}

void Network::reset_links() {
    links_.clear();
    for (const CoreConfig& c : config_.cores) {
        links_.push_back(std::make_unique<aer::HandshakeChannel>(c.ff_queue_capacity));
    }
    links_.push_back(std::make_unique<aer::HandshakeChannel>(config_.output_queue_capacity));
}

std::vector<std::size_t> Network::stalled_sends() const {
    std::vector<std::size_t> out;
    for (const auto& l : links_) {
        out.push_back(l->stalled_sends());
    }
    return out;
}

namespace {

void collect(const aer::AerPacket& p, std::vector<uint32_t>& counts) {
    if (p.kind == aer::PacketKind::ASPL) {
        if (p.address >= counts.size()) {
            fail(ErrorCategory::protocol, "output spike from neuron " + std::to_string(p.address) +
                                              " beyond the output layer");
        }
        ++counts[p.address];
    } else if (!p.is_terminator()) {
        fail(ErrorCategory::protocol, "ASCL packet reached the host");
    }
}

} // namespace

void Network::run_round_robin(const std::vector<aer::AerPacket>& inputs, std::vector<uint32_t>& counts,
                              int watchdog_rounds) {
    std::size_t next_in = 0;
    int idle_rounds = 0;
    for (;;) {
        bool progress = false;
        while (next_in < inputs.size() && links_.front()->try_send(inputs[next_in])) {
            ++next_in;
            progress = true;
        }
        for (std::size_t i = 0; i < cores_.size(); ++i) {
            progress |= cores_[i]->tick(*links_[i], *links_[i + 1], Blocking::No);
        }
        while (auto p = links_.back()->try_recv()) {
            progress = true;
            collect(*p, counts);
            if (p->kind == aer::PacketKind::EOIN) {
                return;
            }
        }
        if (progress) {
            idle_rounds = 0;
        } else if (++idle_rounds >= watchdog_rounds) {
            fail(ErrorCategory::deadlock, "no core made progress for " + std::to_string(watchdog_rounds) +
                                              " scheduling rounds");
        }
    }
}

void Network::run_threaded(const std::vector<aer::AerPacket>& inputs, std::vector<uint32_t>& counts) {
    std::mutex error_mutex;
    std::exception_ptr first_error;
    auto on_error = [&] {
        {
            std::lock_guard lock(error_mutex);
            if (!first_error) {
                first_error = std::current_exception();
            }
        }
        for (auto& l : links_) {
            l->abort();
        }
    };

    std::vector<std::thread> threads;
    threads.emplace_back([&] {
        try {
            for (const aer::AerPacket& p : inputs) {
                links_.front()->send(p);
            }
        } catch (...) {
            on_error();
        }
    });
    for (std::size_t i = 0; i < cores_.size(); ++i) {
        threads.emplace_back([&, i] {
            try {
                Core& core = *cores_[i];
                const int target = core.completed_samples() + 1;
                while (core.completed_samples() < target) {
                    if (!core.tick(*links_[i], *links_[i + 1], Blocking::Yes)) {
                        return; // inbound link aborted
                    }
                }
            } catch (...) {
                on_error();
            }
        });
    }
    try {
        while (auto p = links_.back()->recv()) {
            collect(*p, counts);
            if (p->kind == aer::PacketKind::EOIN) {
                break;
            }
        }
    } catch (...) {
        on_error();
    }
    for (auto& t : threads) {
        t.join();
    }
    if (first_error) {
        std::rethrow_exception(first_error);
    }
}

InferenceResult Network::run(const EventSample& sample, const RunOptions& options) {
    const std::vector<aer::AerPacket> inputs = input_packets(sample, config_);
    reset_links();
    for (auto& c : cores_) {
        c->restart();
        c->clear_records();
        c->set_recording(options.record_states, options.record_trace);
    }

    InferenceResult r;
    std::vector<uint32_t> counts(static_cast<std::size_t>(config_.cores.back().neuron_count), 0);
    try {
        if (options.schedule == Schedule::Threaded) {
            run_threaded(inputs, counts);
        } else {
            run_round_robin(inputs, counts, std::max(1, options.watchdog_rounds));
        }
    } catch (...) {
        for (auto& c : cores_) {
            c->restart();
        }
        throw;
    }

    r.spike_counts = counts;
    r.predicted = argmax_lowest(counts);
    if (options.record_states) {
        r.states.emplace();
    }
    for (const auto& c : cores_) {
        const auto& steps = c->steps();
        if (steps.size() != static_cast<std::size_t>(config_.timesteps)) {
            fail(ErrorCategory::protocol, core_tag(c->design()) + "completed " + std::to_string(steps.size()) +
                                              " steps, expected " + std::to_string(config_.timesteps));
        }
        auto& layer_spikes = r.spikes.emplace_back();
        std::vector<StateSnapshot>* layer_states = r.states ? &r.states->emplace_back() : nullptr;
        for (const StepRecord& s : steps) {
            layer_spikes.push_back(s.spikes);
            if (layer_states) {
                layer_states->push_back(s.state.value_or(StateSnapshot{}));
            }
        }
    }

    if (options.record_trace) {
        int step = 0;
        uint64_t seq = 0;
        for (const aer::AerPacket& p : inputs) {
            r.trace.push_back({step, kHostSource, seq++, p});
            if (p.is_terminator()) {
                ++step;
            }
        }
        for (const auto& c : cores_) {
            r.trace.insert(r.trace.end(), c->trace().begin(), c->trace().end());
        }
        std::stable_sort(r.trace.begin(), r.trace.end(), [](const TraceRecord& a, const TraceRecord& b) {
            if (a.step != b.step) {
                return a.step < b.step;
            }
            if (a.source != b.source) {
                return a.source < b.source;
            }
            return a.seq < b.seq;
        });
    }
    return r;
}

int argmax_lowest(const std::vector<uint32_t>& counts) {
    int best = 0;
    for (std::size_t i = 1; i < counts.size(); ++i) {
        if (counts[i] > counts[static_cast<std::size_t>(best)]) {
            best = static_cast<int>(i);
        }
    }
    return best;
}

std::vector<aer::AerPacket> input_packets(const EventSample& sample, const NetworkConfig& net) {
    validate_sample(sample, net);
    std::vector<aer::AerPacket> out;
    for (int t = 0; t < net.timesteps; ++t) {
        if (static_cast<std::size_t>(t) < sample.steps.size()) {
            for (uint16_t a : sample.steps[static_cast<std::size_t>(t)]) {
                out.push_back(aer::AerPacket::aspl(a));
            }
        }
        out.push_back(t + 1 == net.timesteps ? aer::AerPacket::eoin() : aer::AerPacket::eots());
    }
    return out;
}

std::string serialize(const InferenceResult& r, bool include_trace) {
    std::ostringstream os;
    os << "predicted " << r.predicted << "\ncounts";
    for (uint32_t c : r.spike_counts) {
        os << ' ' << c;
    }
    os << '\n';
    for (std::size_t l = 0; l < r.spikes.size(); ++l) {
        for (std::size_t t = 0; t < r.spikes[l].size(); ++t) {
            os << "spikes " << l << ' ' << t << ':';
            for (uint16_t a : r.spikes[l][t]) {
                os << ' ' << a;
            }
            os << '\n';
            if (r.states) {
                const StateSnapshot& s = (*r.states)[l][t];
                os << "membrane " << l << ' ' << t << ':';
                for (int64_t v : s.membrane) {
                    os << ' ' << v;
                }
                os << '\n';
                if (!s.syn_current.empty()) {
                    os << "current " << l << ' ' << t << ':';
                    for (int64_t v : s.syn_current) {
                        os << ' ' << v;
                    }
                    os << '\n';
                }
            }
        }
    }
    if (include_trace) {
        for (const TraceRecord& t : r.trace) {
            os << "trace " << t.step << ' ' << t.source << ' ' << aer::to_string(t.packet.kind) << ' '
               << t.packet.address << '\n';
        }
    }
    return os.str();
}

// --- Loader -----------------------------------------------------------------

namespace {

void check_structure(const CoreConfig& want, const CoreConfig& have) {
    const bool same = want.topology == have.topology && want.model == have.model &&
                      want.neuron_count == have.neuron_count && want.source_count == have.source_count &&
                      want.weight_bits == have.weight_bits && want.potential_bits == have.potential_bits &&
                      want.current_bits == have.current_bits && want.units == have.units &&
                      (!want.is_recurrent() || want.rec_bits == have.rec_bits);
    if (!same) {
        fail(ErrorCategory::config, core_tag(have) + "model geometry does not match the core's design-time parameters");
    }
}

void write_image(spi::SpiBus& bus, spi::Target target, const neuron::SynapticMemory& img) {
    const auto& g = img.geometry();
    for (int row = 0; row < g.rows(); ++row) {
        for (int b = 0; b < g.row_bytes(); ++b) {
            bus.write_memory(target, row, b, img.read_byte(row, b));
        }
    }
}

} // namespace

void load_model_over_spi(const QuantizedNetwork& model, Network& net) {
    model.validate();
    if (model.config.cores.size() != net.size() || model.config.input_channels != net.config().input_channels) {
        fail(ErrorCategory::config, "model layer structure does not match the network");
    }
    for (std::size_t i = 0; i < net.size(); ++i) {
        check_structure(model.config.cores[i], net.core(i).design());
    }

    spi::SpiBus& bus = net.bus();
    for (std::size_t i = 0; i < net.size(); ++i) {
        const CoreConfig& c = model.config.cores[i];
        const LayerWeights& w = model.layers[i];
        bus.select_core(c.core_id);

        using spi::Register;
        bus.write_register(Register::neuron_model, static_cast<uint64_t>(c.model));
        bus.write_register(Register::active_neuron_count, static_cast<uint64_t>(c.neuron_count));
        bus.write_register(Register::threshold, static_cast<uint64_t>(c.threshold));
        bus.write_register(Register::decay_beta, c.effective_beta().raw());
        bus.write_register(Register::decay_alpha, c.is_synaptic() ? c.alpha.raw() : 0);
        bus.write_register(Register::reset_policy, static_cast<uint64_t>(c.reset));
        bus.write_register(Register::timestep_count, static_cast<uint64_t>(model.config.timesteps));
        bus.write_register(Register::recurrent_mode, static_cast<uint64_t>(c.topology));
        bus.write_register(Register::spi_state, 0);
        bus.write_register(Register::ctrl_coord_a, i);
        bus.write_register(Register::ctrl_coord_b, net.size());

        neuron::SynapticMemory ff(c.ff_geometry(), c.weight_bits);
        for (int s = 0; s < c.source_count; ++s) {
            for (int n = 0; n < c.neuron_count; ++n) {
                ff.set_weight(s, n, w.ff[static_cast<std::size_t>(s) * c.neuron_count + n]);
            }
        }
        write_image(bus, spi::Target::FeedforwardSyn, ff);

        if (c.is_recurrent()) {
            neuron::SynapticMemory rec(*c.rec_geometry(), c.rec_bits);
            if (c.topology == Topology::ATA_T) {
                for (int s = 0; s < c.neuron_count; ++s) {
                    for (int n = 0; n < c.neuron_count; ++n) {
                        rec.set_weight(s, n, w.rec[static_cast<std::size_t>(s) * c.neuron_count + n]);
                    }
                }
            } else {
                for (int n = 0; n < c.neuron_count; ++n) {
                    rec.set_weight(0, n, w.rec[static_cast<std::size_t>(n)]);
                }
            }
            write_image(bus, spi::Target::RecurrentSyn, rec);
        }

        const neuron::StateMemoryGeometry sg = c.state_geometry();
        for (int row = 0; row < sg.rows; ++row) {
            for (int b = 0; b < sg.row_bytes(); ++b) {
                bus.write_memory(spi::Target::NeuronState, row, b, 0);
            }
        }
    }
}

std::vector<uint8_t> read_memory_image(Network& net, std::size_t core, spi::Target target) {
    const CoreConfig& c = net.core(core).design();
    int rows = 0;
    int row_bytes = 0;
    if (target == spi::Target::NeuronState) {
        rows = c.state_geometry().rows;
        row_bytes = c.state_geometry().row_bytes();
    } else {
        const auto g = target == spi::Target::FeedforwardSyn ? std::optional(c.ff_geometry()) : c.rec_geometry();
        if (!g) {
            fail(ErrorCategory::address, core_tag(c) + "no recurrent synaptic memory in a feedforward core");
        }
        rows = g->rows();
        row_bytes = g->row_bytes();
    }
    net.bus().select_core(c.core_id);
    std::vector<uint8_t> out;
    out.reserve(static_cast<std::size_t>(rows) * row_bytes);
    for (int row = 0; row < rows; ++row) {
        for (int b = 0; b < row_bytes; ++b) {
            out.push_back(net.bus().read_memory(target, row, b));
        }
    }
    return out;
}

std::unique_ptr<Network> build_network(const QuantizedNetwork& model) {
    model.validate();
    auto net = std::make_unique<Network>(model.config);
    load_model_over_spi(model, *net);
    return net;
}

InferenceResult run_inference(Network& net, const EventSample& sample, const RunOptions& options) {
    return net.run(sample, options);
}

// --- Dense reference --------------------------------------------------------

namespace {

int64_t clamp_bits(int64_t v, int bits) {
    const int64_t hi = (int64_t{1} << (bits - 1)) - 1;
    const int64_t lo = -hi - 1;
    return std::clamp(v, lo, hi);
}

int64_t shift_add(int64_t x, uint16_t raw) {
    if (raw & 0x100) {
        return x;
    }
    const int64_t mag = x < 0 ? -x : x;
    int64_t acc = 0;
    for (int s = 1; s <= 8; ++s) {
        if (raw & (1U << (8 - s))) {
            acc += mag >> s;
        }
    }
    return x < 0 ? -acc : acc;
}

} // namespace

InferenceResult dense_reference(const QuantizedNetwork& model, const EventSample& sample, bool record_states) {
    model.validate();
    const NetworkConfig& net = model.config;
    validate_sample(sample, net);
    const std::size_t L = net.cores.size();

    std::vector<std::vector<int64_t>> u(L), i_syn(L);
    std::vector<std::vector<int>> prev_fired(L);
    for (std::size_t l = 0; l < L; ++l) {
        u[l].assign(static_cast<std::size_t>(net.cores[l].neuron_count), 0);
        i_syn[l].assign(static_cast<std::size_t>(net.cores[l].neuron_count), 0);
    }

    InferenceResult r;
    r.spikes.assign(L, {});
    if (record_states) {
        r.states.emplace(L);
    }
    r.spike_counts.assign(static_cast<std::size_t>(net.cores.back().neuron_count), 0);

    for (int t = 0; t < net.timesteps; ++t) {
        std::vector<int> in;
        if (static_cast<std::size_t>(t) < sample.steps.size()) {
            for (uint16_t a : sample.steps[static_cast<std::size_t>(t)]) {
                in.push_back(a);
            }
        }
        const bool last = t + 1 == net.timesteps;
        for (std::size_t l = 0; l < L; ++l) {
            const CoreConfig& c = net.cores[l];
            const LayerWeights& w = model.layers[l];
            const int N = c.neuron_count;
            const bool syn = c.is_synaptic();
            auto& U = u[l];
            auto& I = i_syn[l];
            auto add = [&](int n, int64_t weight) {
                if (syn) {
                    I[n] = clamp_bits(I[n] + weight, c.current_bits);
                } else {
                    U[n] = clamp_bits(U[n] + weight, c.potential_bits);
                }
            };

            for (int src : in) {
                for (int n = 0; n < N; ++n) {
                    add(n, w.ff[static_cast<std::size_t>(src) * N + n]);
                }
            }
            for (int src : prev_fired[l]) {
                if (c.topology == Topology::ATA_T) {
                    for (int n = 0; n < N; ++n) {
                        add(n, w.rec[static_cast<std::size_t>(src) * N + n]);
                    }
                } else if (c.topology == Topology::ATA_F) {
                    add(src, w.rec[static_cast<std::size_t>(src)]);
                }
            }

            const uint16_t beta = c.model == neuron::NeuronModelKind::IF ? 0x100 : c.beta.raw();
            std::vector<int> out;
            for (int n = 0; n < N; ++n) {
                if (syn) {
                    U[n] = clamp_bits(shift_add(U[n], beta) + I[n], c.potential_bits);
                    I[n] = shift_add(I[n], c.alpha.raw());
                }
                if (U[n] >= c.threshold) {
                    U[n] = c.reset == fxp::ResetPolicy::ResetToZero ? 0 : clamp_bits(U[n] - c.threshold, c.potential_bits);
                    out.push_back(n);
                } else if (!syn) {
                    U[n] = shift_add(U[n], beta);
                }
            }
            if (record_states) {
                StateSnapshot s;
                s.membrane = U;
                if (syn) {
                    s.syn_current = I;
                }
                (*r.states)[l].push_back(std::move(s));
            }
            prev_fired[l] = c.is_recurrent() ? out : std::vector<int>{};
            if (last) {
                std::fill(U.begin(), U.end(), 0);
                std::fill(I.begin(), I.end(), 0);
                prev_fired[l].clear();
            }
            r.spikes[l].emplace_back(out.begin(), out.end());
            in = std::move(out);
        }
        for (int a : in) {
            ++r.spike_counts[static_cast<std::size_t>(a)];
        }
    }
    r.predicted = argmax_lowest(r.spike_counts);
    return r;
}

} // namespace spikecore::sys
