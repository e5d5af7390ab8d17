// SPDX-FileCopyrightText: 2026 spikecore contributors
//
// SPDX-License-Identifier: Apache-2.0

#include <cstdio>
#include <sys/wait.h>

#include <gtest/gtest.h>

#include "spikecore/demo.hpp"
#include "spikecore/error.hpp"
#include "spikecore/io.hpp"

using namespace spikecore;
namespace fs = std::filesystem;

namespace {

struct CliRun {
    int code = -1;
    std::string out;
};

CliRun run(const std::string& args) {
    const std::string cmd = std::string(SPIKECORE_CLI) + " " + args + " 2>/dev/null";
    CliRun r;
    FILE* p = popen(cmd.c_str(), "r");
    if (p == nullptr) {
        return r;
    }
    char buf[4096];
    std::size_t n = 0;
    while ((n = fread(buf, 1, sizeof buf, p)) > 0) {
        r.out.append(buf, n);
    }
    const int status = pclose(p);
    r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return r;
}

fs::path scratch(const std::string& name) {
    const fs::path p = fs::path(::testing::TempDir()) / ("spikecore_cli_" + name);
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

std::string q(const fs::path& p) { return "'" + p.string() + "'"; }

} // namespace

TEST(Cli, EstimateWideLayerProject) {
    const fs::path dir = scratch("estimate");
    io::ProjectConfig p;
    p.input_channels = 256;
    p.timesteps = 4;
    p.layers = {{sys::Topology::FF, neuron::NeuronModelKind::LIF, 128},
                {sys::Topology::FF, neuron::NeuronModelKind::LIF, 10}};
    p.explore.ranges = {{6}, {6}, {8}};
    p.candidate = dse::CandidateConfig{6, 0, 8};
    io::write_text(dir / "p.json", io::dump(io::project_to_json(p)));
    const CliRun r = run("estimate --config " + q(dir / "p.json"));
    ASSERT_EQ(r.code, 0);
    // 256 blocks x 16 rows x 48 bits = 196608 -> 6 primitives; 128 x 16-bit state -> 1.
    EXPECT_NE(r.out.find("\n0 FF LIF 128 6 0 196608 2048 0 7 "), std::string::npos) << r.out;
    // 128 blocks x 2 rows x 48 bits and 16 x 16-bit state rows -> 1 + 1.
    EXPECT_NE(r.out.find("\n1 FF LIF 10 6 0 12288 256 0 2 "), std::string::npos) << r.out;
    EXPECT_NE(r.out.find(" brams 9\n"), std::string::npos) << r.out;
    EXPECT_NE(r.out.find("non-physical"), std::string::npos);
}

TEST(Cli, CorruptedModelIsAParseError) {
    const fs::path dir = scratch("corrupt");
    demo::write_files(dir);
    std::string text = io::read_text(dir / "model.json");
    io::write_text(dir / "model.json", text.substr(0, text.size() / 3));
    ASSERT_EQ(run("encode --config " + q(dir / "project.json") + " --input " + q(dir / "intensities.csv") +
                  " --out " + q(dir / "dataset.scev"))
                  .code,
              0);
    const CliRun r = run("simulate --config " + q(dir / "project.json"));
    EXPECT_EQ(r.code, exit_code(ErrorCategory::parse));
    EXPECT_NE(r.code, 0);
}

TEST(Cli, UsageErrorsAreNonZero) {
    EXPECT_NE(run("").code, 0);
    EXPECT_NE(run("simulate").code, 0);
    EXPECT_NE(run("frobnicate").code, 0);
    EXPECT_EQ(run("manifest-check --manifest /nonexistent/m.json").code, exit_code(ErrorCategory::io));
}

TEST(Cli, EncodeRejectsTooManyChannels) {
    const fs::path dir = scratch("wide");
    std::string csv = "0";
    for (int i = 0; i < 300; ++i) {
        csv += ",0.5";
    }
    io::write_text(dir / "in.csv", csv + "\n");
    const std::string base = "encode --timesteps 4 --input " + q(dir / "in.csv") + " --out " + q(dir / "d.scev");
    EXPECT_EQ(run(base).code, exit_code(ErrorCategory::capacity));
}

TEST(Cli, PipelineIsByteStable) {
    const fs::path dir = scratch("pipeline");
    demo::write_files(dir);
    const std::string cfg = " --config " + q(dir / "project.json");
    ASSERT_EQ(run("encode" + cfg + " --input " + q(dir / "intensities.csv") + " --out " + q(dir / "dataset.scev"))
                  .code,
              0);
    const CliRun e1 = run("explore" + cfg + " --threads 1 --out " + q(dir / "a"));
    const CliRun e2 = run("explore" + cfg + " --threads 2 --out " + q(dir / "b"));
    ASSERT_EQ(e1.code, 0);
    ASSERT_EQ(e2.code, 0);
    EXPECT_NE(e1.out.find("candidates 32"), std::string::npos) << e1.out;
    for (const char* f : {"report.txt", "best.json", "best.scwt"}) {
        EXPECT_EQ(io::read_bytes(dir / "a" / f), io::read_bytes(dir / "b" / f)) << f;
    }
    const CliRun c = run("manifest-check --manifest " + q(dir / "a" / "best.json"));
    EXPECT_EQ(c.code, 0) << c.out;
    const CliRun s1 = run("simulate --manifest " + q(dir / "a" / "best.json") + " --trace " + q(dir / "t1.txt"));
    const CliRun s2 = run("simulate --manifest " + q(dir / "a" / "best.json") + " --schedule threaded --trace " +
                       q(dir / "t2.txt"));
    ASSERT_EQ(s1.code, 0);
    EXPECT_EQ(s1.out, s2.out);
    EXPECT_NE(s1.out.find("accuracy 1 "), std::string::npos) << s1.out;
    EXPECT_EQ(io::read_bytes(dir / "t1.txt"), io::read_bytes(dir / "t2.txt"));
}

TEST(Cli, ManifestCheckDetectsAccuracyMismatch) {
    const fs::path dir = scratch("mismatch");
    demo::write_files(dir);
    const std::string cfg = " --config " + q(dir / "project.json");
    ASSERT_EQ(run("encode" + cfg + " --input " + q(dir / "intensities.csv") + " --out " + q(dir / "dataset.scev"))
                  .code,
              0);
    ASSERT_EQ(run("explore" + cfg + " --out " + q(dir / "x")).code, 0);
    auto j = io::parse_json(io::read_text(dir / "x" / "best.json"), "m");
    j["accuracy"] = 0.5;
    io::write_text(dir / "x" / "best.json", io::dump(j));
    EXPECT_EQ(run("manifest-check --manifest " + q(dir / "x" / "best.json")).code, exit_code(ErrorCategory::config));
}
