// SPDX-FileCopyrightText: 2026 spikecore contributors
//
// SPDX-License-Identifier: Apache-2.0

#include "spikecore/dse.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <exception>
#include <limits>
#include <sstream>
#include <thread>

namespace spikecore::dse {

namespace {

std::vector<int> sorted_unique(std::vector<int> v, const char* name) {
    if (v.empty()) {
        fail(ErrorCategory::config, std::string(name) + " range is empty");
    }
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
    return v;
}

std::string num(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.10g", v);
    return buf;
}

std::string knobs(const CandidateConfig& c) {
    return std::to_string(c.ff_bits) + "/" + std::to_string(c.rec_bits) + "/" + std::to_string(c.leak_bits);
}

} // namespace

// --- candidates -------------------------------------------------------------

CandidateSpace::CandidateSpace(const KnobRanges& ranges, bool recurrent)
    : ff_(sorted_unique(ranges.ff, "ff_bits")),
      rec_(recurrent ? sorted_unique(ranges.rec, "rec_bits") : std::vector<int>{0}),
      leak_(sorted_unique(ranges.leak, "leak_bits")) {
    for (int f : ff_) {
        for (int r : rec_) {
            for (int l : leak_) {
                cfgs_.push_back({f, r, l});
            }
        }
    }
}

std::size_t CandidateSpace::index_of(const CandidateConfig& c) const {
    auto it = std::lower_bound(cfgs_.begin(), cfgs_.end(), c);
    if (it == cfgs_.end() || *it != c) {
        fail(ErrorCategory::value, "configuration " + to_string(c) + " is not in the candidate space");
    }
    return static_cast<std::size_t>(it - cfgs_.begin());
}

std::vector<CandidateConfig> enumerate_candidates(const KnobRanges& ranges, bool recurrent) {
    return CandidateSpace(ranges, recurrent).candidates();
}

// --- rng --------------------------------------------------------------------

std::size_t Rng::uniform_index(std::size_t n) {
    if (n == 0) {
        fail(ErrorCategory::value, "uniform_index needs a non-empty range");
    }
    const uint64_t range = n;
    const uint64_t limit = std::numeric_limits<uint64_t>::max() - std::numeric_limits<uint64_t>::max() % range;
    uint64_t x = 0;
    do {
        x = engine_();
    } while (x >= limit);
    return static_cast<std::size_t>(x % range);
}

double Rng::uniform01() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

CandidateConfig neighbor(const CandidateConfig& cfg, const CandidateSpace& space, Rng& rng) {
    struct Knob {
        const std::vector<int>* values;
        int CandidateConfig::*field;
    };
    std::vector<Knob> movable;
    for (Knob k : {Knob{&space.ff(), &CandidateConfig::ff_bits}, Knob{&space.rec(), &CandidateConfig::rec_bits},
                   Knob{&space.leak(), &CandidateConfig::leak_bits}}) {
        if (k.values->size() >= 2) {
            movable.push_back(k);
        }
    }
    if (movable.empty()) {
        fail(ErrorCategory::value, "neighbor needs a knob with at least two values");
    }
    const Knob& k = movable[rng.uniform_index(movable.size())];
    const std::vector<int>& vals = *k.values;
    auto it = std::find(vals.begin(), vals.end(), cfg.*k.field);
    if (it == vals.end()) {
        fail(ErrorCategory::value, "configuration " + to_string(cfg) + " is not in the candidate space");
    }
    const auto pos = static_cast<std::size_t>(it - vals.begin());
    std::size_t next = 0;
    if (pos == 0) {
        next = 1;
    } else if (pos + 1 == vals.size()) {
        next = pos - 1;
    } else {
        next = rng.uniform_index(2) == 0 ? pos - 1 : pos + 1;
    }
    CandidateConfig out = cfg;
    out.*k.field = vals[next];
    return out;
}

// --- annealing --------------------------------------------------------------

void SearchParams::validate() const {
    if (!(alpha > 0 && alpha < 1)) {
        fail(ErrorCategory::config, "cooling factor alpha must lie in (0, 1)");
    }
    if (!(t_min > 0 && t_min < t_start) || !std::isfinite(t_start)) {
        fail(ErrorCategory::config, "temperatures must satisfy 0 < t_min < t_start");
    }
    if (k_divisor < 1) {
        fail(ErrorCategory::config, "k_divisor must be at least 1");
    }
}

bool metropolis_accepts(double delta, double temperature, std::optional<double> draw) {
    if (delta <= 0) {
        return true;
    }
    return draw && *draw < std::exp(-delta / temperature);
}

AnnealResult simulated_annealing(const CandidateSpace& space, const CostFn& cost, const SearchParams& params) {
    params.validate();
    Rng rng(params.seed);
    const auto& cfgs = space.candidates();

    AnnealResult r;
    std::size_t cur = rng.uniform_index(cfgs.size());
    double cur_cost = cost(cur);
    r.initial = cfgs[cur];
    r.best = cfgs[cur];
    r.best_cost = cur_cost;
    if (cfgs.size() < 2) {
        return r;
    }

    const std::size_t per_temp = std::max<std::size_t>(1, cfgs.size() / static_cast<std::size_t>(params.k_divisor));
    double t = params.t_start;
    int step = 0;
    while (t > params.t_min) {
        for (std::size_t j = 0; j < per_temp; ++j) {
            HistoryEntry h;
            h.temperature_step = step;
            h.temperature = t;
            h.current = cfgs[cur];
            h.current_cost = cur_cost;
            const std::size_t prop = space.index_of(neighbor(cfgs[cur], space, rng));
            h.proposal = cfgs[prop];
            h.proposal_cost = cost(prop);
            h.delta = h.proposal_cost - cur_cost;
            if (h.delta > 0) {
                h.draw = rng.uniform01();
            }
            h.accepted = metropolis_accepts(h.delta, t, h.draw);
            if (h.accepted) {
                cur = prop;
                cur_cost = h.proposal_cost;
                if (cur_cost < r.best_cost) {
                    r.best = cfgs[cur];
                    r.best_cost = cur_cost;
                }
            }
            h.best = r.best;
            h.best_cost = r.best_cost;
            r.history.push_back(h);
        }
        t *= params.alpha;
        ++step;
    }
    return r;
}

// --- accuracy ---------------------------------------------------------------

AccuracyOutcome evaluate_network(const sys::QuantizedNetwork& q, const std::vector<sys::EventSample>& samples,
                                 int threads, sys::Schedule schedule) {
    if (samples.empty()) {
        fail(ErrorCategory::config, "evaluation set is empty");
    }
    const std::size_t workers = std::clamp<std::size_t>(static_cast<std::size_t>(std::max(1, threads)), 1,
                                                        samples.size());
    AccuracyOutcome out;
    out.predictions.assign(samples.size(), 0);
    sys::RunOptions opts;
    opts.schedule = schedule;

    auto work = [&](std::size_t w) {
        auto net = sys::build_network(q);
        for (std::size_t i = w; i < samples.size(); i += workers) {
            out.predictions[i] = net->run(samples[i], opts).predicted;
        }
    };
    if (workers == 1) {
        work(0);
    } else {
        std::vector<std::exception_ptr> errors(workers);
        std::vector<std::thread> pool;
        for (std::size_t w = 0; w < workers; ++w) {
            pool.emplace_back([&, w] {
                try {
                    work(w);
                } catch (...) {
                    errors[w] = std::current_exception();
                }
            });
        }
        for (auto& t : pool) {
            t.join();
        }
        for (auto& e : errors) {
            if (e) {
                std::rethrow_exception(e);
            }
        }
    }
    std::size_t correct = 0;
    for (std::size_t i = 0; i < samples.size(); ++i) {
        correct += out.predictions[i] == samples[i].label ? 1 : 0;
    }
    out.accuracy = static_cast<double>(correct) / static_cast<double>(samples.size());
    return out;
}

AccuracyEvaluator::AccuracyEvaluator(TrainedModel model, std::vector<sys::EventSample> samples, int threads,
                                     sys::Schedule schedule)
    : model_(std::move(model)), samples_(std::move(samples)), threads_(std::max(1, threads)), schedule_(schedule) {
    model_.validate();
    if (samples_.empty()) {
        fail(ErrorCategory::config, "evaluation set is empty");
    }
}

AccuracyOutcome AccuracyEvaluator::compute(const CandidateConfig& cfg) const {
    sys::QuantizedNetwork q;
    try {
        q = quantize_model(model_, cfg);
    } catch (const Error& e) {
        if (e.category() == ErrorCategory::calibration) {
            throw;
        }
        AccuracyOutcome bad;
        bad.feasible = false;
        bad.diagnostic = std::string(category_name(e.category())) + ": " + e.what();
        return bad;
    }
    return evaluate_network(q, samples_, threads_, schedule_);
}

const AccuracyOutcome& AccuracyEvaluator::evaluate(const CandidateConfig& cfg) {
    std::lock_guard lock(mutex_);
    auto it = cache_.find(cfg);
    if (it != cache_.end()) {
        ++hits_;
        return it->second;
    }
    AccuracyOutcome o = compute(cfg);
    ++simulations_;
    return cache_.emplace(cfg, std::move(o)).first->second;
}

std::size_t AccuracyEvaluator::simulations() const {
    std::lock_guard lock(mutex_);
    return simulations_;
}

std::size_t AccuracyEvaluator::cache_hits() const {
    std::lock_guard lock(mutex_);
    return hits_;
}

// --- exploration ------------------------------------------------------------

ExploreReport explore(const TrainedModel& model, const std::vector<sys::EventSample>& samples,
                      const ExploreSettings& settings) {
    settings.weights.validate();
    settings.search.validate();
    model.validate();
    const CandidateSpace space(settings.ranges, model.any_recurrent());

    ExploreReport report;
    if (settings.calibration.is_placeholder()) {
        report.warnings.push_back("calibration table '" + settings.calibration.label() +
                                  "' is a placeholder; LUT and flip-flop figures are not physical");
    }
    std::vector<cost::ResourceEstimate> feasible_hw;
    for (const CandidateConfig& cfg : space.candidates()) {
        CandidateRow row;
        row.cfg = cfg;
        try {
            const sys::QuantizedNetwork q = quantize_model(model, cfg);
            const cost::LogicEstimate logic = cost::estimate_logic(q.config, settings.calibration);
            row.hw = {logic.luts, logic.flipflops, cost::estimate_bram(q.config, settings.bram_primitive_bits)};
            for (const std::string& w : logic.warnings) {
                report.warnings.push_back(to_string(cfg) + ": " + w);
            }
            feasible_hw.push_back(row.hw);
        } catch (const Error& e) {
            if (e.category() == ErrorCategory::calibration) {
                throw;
            }
            row.feasible = false;
            row.diagnostic = std::string(category_name(e.category())) + ": " + e.what();
            row.accuracy = 0.0;
        }
        report.rows.push_back(row);
    }

    const cost::Norms norms = settings.normalization == Normalization::CandidateMax
                                  ? cost::candidate_max_norms(feasible_hw)
                                  : cost::Norms{settings.device.luts, settings.device.flipflops, settings.device.brams};
    for (CandidateRow& row : report.rows) {
        row.normalized = row.feasible ? cost::normalize(row.hw, norms) : cost::NormalizedResources{1, 1, 1};
        row.hw_cost = cost::hw_cost(row.normalized, settings.weights);
    }

    AccuracyEvaluator evaluator(model, samples, settings.threads);
    const CostFn cost_of = [&](std::size_t i) {
        CandidateRow& row = report.rows[i];
        if (!row.total) {
            if (row.feasible) {
                row.accuracy = evaluator.evaluate(row.cfg).accuracy;
            }
            row.total = row.hw_cost + cost::acc_cost(*row.accuracy, settings.weights);
        }
        return *row.total;
    };
    report.anneal = simulated_annealing(space, cost_of, settings.search);
    report.simulations = evaluator.simulations();
    report.cache_hits = evaluator.cache_hits();
    return report;
}

std::string format_history(const AnnealResult& r) {
    std::ostringstream os;
    os << "# initial " << knobs(r.initial) << "\n";
    os << "# step temperature current current_cost proposal proposal_cost delta draw accepted best best_cost\n";
    for (const HistoryEntry& h : r.history) {
        os << h.temperature_step << ' ' << num(h.temperature) << ' ' << knobs(h.current) << ' '
           << num(h.current_cost) << ' ' << knobs(h.proposal) << ' ' << num(h.proposal_cost) << ' '
           << num(h.delta) << ' ' << (h.draw ? num(*h.draw) : std::string("-")) << ' ' << (h.accepted ? 1 : 0)
           << ' ' << knobs(h.best) << ' ' << num(h.best_cost) << '\n';
    }
    os << "# best " << knobs(r.best) << ' ' << num(r.best_cost) << '\n';
    return os.str();
}

std::string format_report(const ExploreReport& r) {
    std::ostringstream os;
    os << "# candidates " << r.rows.size() << "\n";
    os << "# ff/rec/leak feasible luts flipflops brams lut_n ff_n bram_n hw_cost accuracy total\n";
    for (const CandidateRow& row : r.rows) {
        os << knobs(row.cfg) << ' ' << (row.feasible ? 1 : 0) << ' ' << num(row.hw.luts) << ' '
           << num(row.hw.flipflops) << ' ' << num(row.hw.brams) << ' ' << num(row.normalized.lut) << ' '
           << num(row.normalized.ff) << ' ' << num(row.normalized.bram) << ' ' << num(row.hw_cost) << ' '
           << (row.accuracy ? num(*row.accuracy) : std::string("-")) << ' '
           << (row.total ? num(*row.total) : std::string("-"));
        if (!row.feasible) {
            os << "  # " << row.diagnostic;
        }
        os << '\n';
    }
    os << "# simulations " << r.simulations << " cache_hits " << r.cache_hits << "\n";
    for (const std::string& w : r.warnings) {
        os << "# warning: " << w << '\n';
    }
    os << format_history(r.anneal);
    return os.str();
}

} // namespace spikecore::dse
