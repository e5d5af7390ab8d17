// SPDX-FileCopyrightText: 2026 spikecore contributors
//
// SPDX-License-Identifier: Apache-2.0

#include <algorithm>
#include <cmath>
#include <set>

#include <gtest/gtest.h>

#include "spikecore/demo.hpp"
#include "spikecore/dse.hpp"
#include "spikecore/io.hpp"
#include "support.hpp"

using namespace spikecore;
using namespace spikecore::dse;
using spikecore::testing::error_of;

namespace {

const KnobRanges kFig{{4, 8, 12, 16}, {4, 8, 12, 16}, {3, 8}};

int knob_changes(const CandidateConfig& a, const CandidateConfig& b) {
    return (a.ff_bits != b.ff_bits) + (a.rec_bits != b.rec_bits) + (a.leak_bits != b.leak_bits);
}

std::vector<double> random_costs(std::size_t n, uint64_t seed) {
    Rng rng(seed);
    std::vector<double> c(n);
    for (double& v : c) {
        v = rng.uniform01();
    }
    return c;
}

io::fs::path scratch(const std::string& name) {
    const io::fs::path p = io::fs::path(::testing::TempDir()) / ("spikecore_" + name);
    io::fs::remove_all(p);
    io::fs::create_directories(p);
    return p;
}

} // namespace

TEST(Candidates, Enumeration) {
    const auto all = enumerate_candidates(kFig, true);
    ASSERT_EQ(all.size(), 32U);
    EXPECT_TRUE(std::is_sorted(all.begin(), all.end()));
    EXPECT_EQ(all.front(), (CandidateConfig{4, 4, 3}));
    EXPECT_EQ(all.back(), (CandidateConfig{16, 16, 8}));
    EXPECT_EQ(enumerate_candidates(kFig, false).size(), 8U);
    EXPECT_EQ(enumerate_candidates({{8}, {8}, {8}}, true).size(), 1U);
    EXPECT_EQ(enumerate_candidates({{8, 4, 8}, {8}, {8}}, true).size(), 2U);
    EXPECT_EQ(error_of([] { enumerate_candidates({{}, {8}, {8}}, true); }), ErrorCategory::config);
    CandidateSpace space(kFig, true);
    EXPECT_EQ(space.index_of({8, 8, 8}), 11U);
    EXPECT_EQ(error_of([&] { space.index_of({9, 8, 8}); }), ErrorCategory::value);
}

TEST(Neighbor, AdjacentMovesOfOneKnob) {
    const CandidateSpace space(kFig, true);
    const std::set<CandidateConfig> allowed{{4, 8, 8}, {12, 8, 8}, {8, 4, 8}, {8, 12, 8}, {8, 8, 3}};
    std::set<CandidateConfig> seen;
    Rng rng(3);
    for (int i = 0; i < 2000; ++i) {
        const CandidateConfig n = neighbor({8, 8, 8}, space, rng);
        ASSERT_EQ(allowed.count(n), 1U);
        seen.insert(n);
    }
    EXPECT_EQ(seen, allowed);
}

TEST(Neighbor, RangeEndsOnlyMoveInward) {
    const CandidateSpace space(kFig, true);
    Rng rng(4);
    for (int i = 0; i < 500; ++i) {
        const CandidateConfig n = neighbor({4, 16, 3}, space, rng);
        ASSERT_EQ(knob_changes(n, {4, 16, 3}), 1);
        ASSERT_TRUE(n == (CandidateConfig{8, 16, 3}) || n == (CandidateConfig{4, 12, 3}) ||
                    n == (CandidateConfig{4, 16, 8}));
    }
    const CandidateSpace toggle({{4, 8}, {8}, {8}}, true);
    EXPECT_EQ(neighbor({4, 8, 8}, toggle, rng), (CandidateConfig{8, 8, 8}));
    EXPECT_EQ(neighbor({8, 8, 8}, toggle, rng), (CandidateConfig{4, 8, 8}));
}

TEST(Neighbor, EveryProposalStaysInSpace) {
    const CandidateSpace space(kFig, true);
    Rng rng(5);
    for (const CandidateConfig& c : space.candidates()) {
        for (int i = 0; i < 50; ++i) {
            const CandidateConfig n = neighbor(c, space, rng);
            ASSERT_EQ(knob_changes(c, n), 1);
            ASSERT_NO_THROW(space.index_of(n));
        }
    }
}

TEST(Anneal, MetropolisRule) {
    EXPECT_TRUE(metropolis_accepts(0.0, 0.5, std::nullopt));
    EXPECT_TRUE(metropolis_accepts(-0.2, 0.001, std::nullopt));
    EXPECT_TRUE(metropolis_accepts(0.1, 1.0, std::exp(-0.1) - 1e-9));
    EXPECT_FALSE(metropolis_accepts(0.1, 1.0, std::exp(-0.1)));
}

TEST(Anneal, FindsBruteForceOptimumOn24Candidates) {
    const CandidateSpace space({{4, 8, 12, 16}, {4, 8, 12}, {3, 8}}, true);
    ASSERT_EQ(space.size(), 24U);
    int hits = 0;
    for (uint64_t seed = 1; seed <= 100; ++seed) {
        const std::vector<double> costs = random_costs(space.size(), 1000 + seed);
        const std::size_t opt = static_cast<std::size_t>(std::min_element(costs.begin(), costs.end()) - costs.begin());
        SearchParams p;
        p.seed = seed;
        const AnnealResult r = simulated_annealing(space, [&](std::size_t i) { return costs[i]; }, p);
        hits += r.best == space.candidates()[opt] ? 1 : 0;
    }
    EXPECT_GE(hits, 95);
}

TEST(Anneal, HistoryIsAuditable) {
    const CandidateSpace space(kFig, true);
    const std::vector<double> costs = random_costs(space.size(), 77);
    SearchParams p;
    p.seed = 11;
    const AnnealResult r = simulated_annealing(space, [&](std::size_t i) { return costs[i]; }, p);
    ASSERT_FALSE(r.history.empty());
    // One proposal per candidate per temperature with k = 1.
    int steps = 0;
    for (double t = p.t_start; t > p.t_min; t *= p.alpha) {
        ++steps;
    }
    EXPECT_EQ(r.history.size(), static_cast<std::size_t>(steps) * space.size());
    double best = std::numeric_limits<double>::infinity();
    CandidateConfig current = r.initial;
    for (const HistoryEntry& h : r.history) {
        ASSERT_EQ(h.current, current);
        ASSERT_EQ(h.current_cost, costs[space.index_of(h.current)]);
        ASSERT_EQ(h.proposal_cost, costs[space.index_of(h.proposal)]);
        ASSERT_EQ(h.delta, h.proposal_cost - h.current_cost);
        ASSERT_EQ(h.draw.has_value(), h.delta > 0);
        ASSERT_EQ(h.accepted, metropolis_accepts(h.delta, h.temperature, h.draw));
        ASSERT_LE(h.best_cost, best);
        best = h.best_cost;
        ASSERT_EQ(h.best_cost, costs[space.index_of(h.best)]);
        current = h.accepted ? h.proposal : h.current;
    }
    EXPECT_EQ(r.best_cost, best);
    // Same seed, same walk.
    EXPECT_EQ(format_history(r),
              format_history(simulated_annealing(space, [&](std::size_t i) { return costs[i]; }, p)));
}

TEST(Anneal, DivisorEqualToSpaceGivesOneProposalPerTemperature) {
    const CandidateSpace space(kFig, true);
    SearchParams p;
    p.k_divisor = static_cast<int>(space.size());
    p.alpha = 0.5;
    const AnnealResult r = simulated_annealing(space, [](std::size_t i) { return static_cast<double>(i); }, p);
    EXPECT_EQ(r.history.size(), 10U); // 1, 0.5, ..., 2^-9 > 1e-3
    for (std::size_t i = 0; i < r.history.size(); ++i) {
        EXPECT_EQ(r.history[i].temperature_step, static_cast<int>(i));
    }
}

TEST(Anneal, ParameterValidation) {
    SearchParams p;
    p.alpha = 1.0;
    EXPECT_EQ(error_of([&] { p.validate(); }), ErrorCategory::config);
    p = {};
    p.t_min = 2.0;
    EXPECT_EQ(error_of([&] { p.validate(); }), ErrorCategory::config);
    p = {};
    p.k_divisor = 0;
    EXPECT_EQ(error_of([&] { p.validate(); }), ErrorCategory::config);
}

TEST(Accuracy, DemoTaskSeparatesAtEightBits) {
    AccuracyEvaluator eval(demo::model(), demo::samples(10, 7));
    const AccuracyOutcome& a8 = eval.evaluate({8, 8, 8});
    EXPECT_DOUBLE_EQ(a8.accuracy, 1.0);
    const double a2 = eval.evaluate({2, 8, 8}).accuracy;
    EXPECT_LT(a2, a8.accuracy);
    EXPECT_EQ(eval.simulations(), 2U);

    // Dense oracle agrees on every sample.
    const auto q = quantize_model(demo::model(), {8, 8, 8});
    for (std::size_t i = 0; i < eval.samples().size(); ++i) {
        ASSERT_EQ(sys::dense_reference(q, eval.samples()[i]).predicted, a8.predictions[i]);
    }
}

TEST(Accuracy, CacheServesRepeatsWithoutSimulating) {
    AccuracyEvaluator eval(demo::model(), demo::samples(4, 1));
    const double first = eval.evaluate({8, 4, 8}).accuracy;
    const double second = eval.evaluate({8, 4, 8}).accuracy;
    EXPECT_EQ(first, second);
    EXPECT_EQ(eval.simulations(), 1U);
    EXPECT_EQ(eval.cache_hits(), 1U);
}

TEST(Accuracy, ThreadCountDoesNotChangeResult) {
    const auto samples = demo::samples(6, 3);
    AccuracyEvaluator one(demo::model(), samples, 1);
    AccuracyEvaluator four(demo::model(), samples, 4, sys::Schedule::Threaded);
    for (const CandidateConfig& c : enumerate_candidates(kFig, true)) {
        ASSERT_EQ(one.evaluate(c).predictions, four.evaluate(c).predictions);
    }
}

TEST(Accuracy, InfeasibleCandidateScoresZero) {
    TrainedModel m = demo::model();
    m.potential_headroom = 20;
    AccuracyEvaluator eval(m, demo::samples(2, 1));
    const AccuracyOutcome& o = eval.evaluate({16, 8, 8});
    EXPECT_FALSE(o.feasible);
    EXPECT_EQ(o.accuracy, 0.0);
    EXPECT_FALSE(o.diagnostic.empty());
}

TEST(Explore, DemoProjectReport) {
    const io::ProjectConfig p = demo::project();
    const ExploreReport r = explore(demo::model(), demo::samples(10, 7), p.explore);
    ASSERT_EQ(r.rows.size(), 32U);
    EXPECT_EQ(r.anneal.best.ff_bits, 8);
    EXPECT_LE(r.simulations, 32U);
    for (const CandidateRow& row : r.rows) {
        if (row.accuracy) {
            EXPECT_NEAR(*row.total, row.hw_cost + 0.5 * (1 - *row.accuracy), 1e-12);
        }
        EXPECT_LE(row.normalized.lut, 1.0);
        EXPECT_LE(row.normalized.bram, 1.0);
    }
    // Leak precision leaves hardware cost untouched.
    for (std::size_t i = 0; i + 1 < r.rows.size(); i += 2) {
        EXPECT_EQ(r.rows[i].hw_cost, r.rows[i + 1].hw_cost);
    }
    EXPECT_EQ(format_report(r), format_report(explore(demo::model(), demo::samples(10, 7), p.explore)));
}

TEST(Manifest, RoundTripReproducesAccuracy) {
    const auto dir = scratch("manifest_rt");
    const auto samples = demo::samples(10, 7);
    io::write_dataset(dir / "data.scev", {demo::kChannels, demo::kTimesteps, samples});
    const CandidateConfig chosen{8, 8, 8};
    const auto q = quantize_model(demo::model(), chosen);
    const AccuracyOutcome before = evaluate_network(q, samples);
    io::emit_manifest(dir / "best.json", chosen, q, "data.scev", before.accuracy);

    const io::Manifest m = io::load_manifest(dir / "best.json");
    EXPECT_EQ(m.candidate, chosen);
    EXPECT_EQ(m.network, q);
    ASSERT_TRUE(m.accuracy.has_value());
    EXPECT_EQ(*m.accuracy, before.accuracy);
    const io::Dataset d = io::read_dataset(dir / m.dataset_file);
    const AccuracyOutcome after = evaluate_network(m.network, d.samples);
    EXPECT_EQ(after.predictions, before.predictions);

    const auto j = io::parse_json(io::read_text(dir / "best.json"), "manifest");
    EXPECT_EQ(j["candidate"]["ff_bits"], 8);
    EXPECT_EQ(j["candidate"]["rec_bits"], 8);
    EXPECT_EQ(j["candidate"]["leak_bits"], 8);
}

TEST(Manifest, EditedGeometryIsRejected) {
    const auto dir = scratch("manifest_geo");
    const auto q = quantize_model(demo::model(), {8, 8, 8});
    io::emit_manifest(dir / "best.json", {8, 8, 8}, q, "data.scev", std::nullopt);
    auto j = io::parse_json(io::read_text(dir / "best.json"), "manifest");
    auto& ff = j["network"]["cores"][0]["geometry"]["ff"];
    ff["rows_per_block"] = ff["rows_per_block"].get<int>() * 2;
    io::write_text(dir / "best.json", io::dump(j));
    EXPECT_EQ(error_of([&] { io::load_manifest(dir / "best.json"); }), ErrorCategory::config);

    io::emit_manifest(dir / "best.json", {8, 8, 8}, q, "data.scev", std::nullopt);
    j = io::parse_json(io::read_text(dir / "best.json"), "manifest");
    j["candidate"]["ff_bits"] = 12;
    io::write_text(dir / "best.json", io::dump(j));
    EXPECT_EQ(error_of([&] { io::load_manifest(dir / "best.json"); }), ErrorCategory::config);
}
