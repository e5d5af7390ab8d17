// SPDX-FileCopyrightText: 2026 spikecore contributors
//
// SPDX-License-Identifier: Apache-2.0

// Precision search: candidate enumeration, cached bit-exact accuracy
// evaluation and simulated annealing over the precomputed hardware costs.

#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <mutex>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "spikecore/cost.hpp"
#include "spikecore/model.hpp"
#include "spikecore/system.hpp"

namespace spikecore::dse {

struct KnobRanges {
    std::vector<int> ff;
    std::vector<int> rec;
    std::vector<int> leak;
};

// Sorted, de-duplicated knob values. When no layer is recurrent the rec
// dimension collapses to the single value 0.
class CandidateSpace {
public:
    CandidateSpace(const KnobRanges& ranges, bool recurrent);

    const std::vector<int>& ff() const { return ff_; }
    const std::vector<int>& rec() const { return rec_; }
    const std::vector<int>& leak() const { return leak_; }
    // Lexicographic (ff, rec, leak).
    const std::vector<CandidateConfig>& candidates() const { return cfgs_; }
    std::size_t size() const { return cfgs_.size(); }
    // Throws ErrorCategory::value for a configuration outside the space.
    std::size_t index_of(const CandidateConfig& c) const;

private:
    std::vector<int> ff_, rec_, leak_;
    std::vector<CandidateConfig> cfgs_;
};

std::vector<CandidateConfig> enumerate_candidates(const KnobRanges& ranges, bool recurrent);

// mt19937_64 with explicitly defined draws, so sequences are identical on
// every standard library.
class Rng {
public:
    explicit Rng(uint64_t seed) : engine_(seed) {}
    uint64_t next() { return engine_(); }
    // Uniform in [0, n) by rejection sampling. n >= 1.
    std::size_t uniform_index(std::size_t n);
    // Uniform in [0, 1) with 53 random bits.
    double uniform01();

private:
    std::mt19937_64 engine_;
};

// Changes exactly one knob, chosen uniformly among knobs with at least two
// values, to an adjacent value of its range. At either end of the range only
// the inward move exists.
CandidateConfig neighbor(const CandidateConfig& cfg, const CandidateSpace& space, Rng& rng);

struct SearchParams {
    double t_start = 1.0;
    double t_min = 1e-3;
    double alpha = 0.95;
    int k_divisor = 1; // proposals per temperature = max(1, |candidates| / k_divisor)
    uint64_t seed = 1;

    void validate() const;
};

struct HistoryEntry {
    int temperature_step = 0;
    double temperature = 0;
    CandidateConfig current;
    double current_cost = 0;
    CandidateConfig proposal;
    double proposal_cost = 0;
    double delta = 0;
    std::optional<double> draw; // drawn only when delta > 0
    bool accepted = false;
    CandidateConfig best;
    double best_cost = 0;
};

struct AnnealResult {
    CandidateConfig initial;
    CandidateConfig best;
    double best_cost = 0;
    std::vector<HistoryEntry> history;
};

// Cost lookup by candidate index into space.candidates().
using CostFn = std::function<double(std::size_t)>;

AnnealResult simulated_annealing(const CandidateSpace& space, const CostFn& cost, const SearchParams& params);

// Metropolis rule as applied by the search: accept when delta <= 0, else
// when draw < exp(-delta / T).
bool metropolis_accepts(double delta, double temperature, std::optional<double> draw);

struct AccuracyOutcome {
    double accuracy = 0;
    bool feasible = true;
    std::string diagnostic;
    std::vector<int> predictions;
};

// Bit-exact accuracy of a candidate on an event set, memoized per candidate.
// Samples are split across `threads` workers, each with its own pipeline;
// the result does not depend on the split.
class AccuracyEvaluator {
public:
    AccuracyEvaluator(TrainedModel model, std::vector<sys::EventSample> samples, int threads = 1,
                      sys::Schedule schedule = sys::Schedule::RoundRobin);

    const AccuracyOutcome& evaluate(const CandidateConfig& cfg);

    // Distinct candidates simulated so far, and lookups served from cache.
    std::size_t simulations() const;
    std::size_t cache_hits() const;
    const std::vector<sys::EventSample>& samples() const { return samples_; }

private:
    AccuracyOutcome compute(const CandidateConfig& cfg) const;

    TrainedModel model_;
    std::vector<sys::EventSample> samples_;
    int threads_;
    sys::Schedule schedule_;
    mutable std::mutex mutex_;
    std::map<CandidateConfig, AccuracyOutcome> cache_;
    std::size_t simulations_ = 0;
    std::size_t hits_ = 0;
};

// Accuracy over a quantized network, run through the loaded pipeline.
AccuracyOutcome evaluate_network(const sys::QuantizedNetwork& q, const std::vector<sys::EventSample>& samples,
                                 int threads = 1, sys::Schedule schedule = sys::Schedule::RoundRobin);

enum class Normalization : uint8_t { CandidateMax, Device };

struct ExploreSettings {
    KnobRanges ranges;
    cost::CostWeights weights;
    SearchParams search;
    cost::CalibrationTable calibration = cost::CalibrationTable::placeholder();
    Normalization normalization = Normalization::CandidateMax;
    cost::ResourceEstimate device{53200, 106400, 140}; // used with Normalization::Device
    int64_t bram_primitive_bits = cost::kDefaultBramBits;
    int threads = 1;
};

struct CandidateRow {
    CandidateConfig cfg;
    bool feasible = true;
    std::string diagnostic;
    cost::ResourceEstimate hw;
    cost::NormalizedResources normalized;
    double hw_cost = 0;
    std::optional<double> accuracy; // set once simulated
    std::optional<double> total;
};

struct ExploreReport {
    std::vector<CandidateRow> rows; // in candidate order
    AnnealResult anneal;
    std::size_t simulations = 0;
    std::size_t cache_hits = 0;
    std::vector<std::string> warnings;
};

// Precomputes hardware cost for every candidate, then anneals with accuracy
// evaluated on demand through the cache. Infeasible candidates keep the
// enumeration intact: accuracy 0 and every normalized resource at 1.
ExploreReport explore(const TrainedModel& model, const std::vector<sys::EventSample>& samples,
                      const ExploreSettings& settings);

// Line-oriented text renderings.
std::string format_history(const AnnealResult& r);
std::string format_report(const ExploreReport& r);

} // namespace spikecore::dse
