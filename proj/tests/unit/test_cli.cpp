#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "perclab/cli.hpp"
#include "perclab/harness.hpp"
#include "perclab/lattice.hpp"

using namespace perclab;

namespace {

struct Run {
    int status;
    std::string out;
    std::string err;
};

Run run(std::vector<std::string> args) {
    args.insert(args.begin(), "perclab");
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    std::ostringstream out, err;
    const int status = cli_dispatch(static_cast<int>(argv.size()), argv.data(), out, err);
    return {status, out.str(), err.str()};
}

std::filesystem::path scratch(const std::string& name) {
    const auto dir = std::filesystem::temp_directory_path() / "perclab_cli_test";
    std::filesystem::create_directories(dir);
    return dir / name;
}

}  // namespace

TEST(Cli, ProfileExactCase) {
    const auto r = run({"profile", "--d", "2", "--p", "1", "--n", "3", "--radius", "8", "--seed", "1"});
    ASSERT_EQ(r.status, 0) << r.err;
    const auto j = nlohmann::json::parse(r.out);
    EXPECT_EQ(j.at("value"), "4/3");
    EXPECT_EQ(j.at("scaled"), "4/1");
    EXPECT_EQ(j.at("mode"), "exact");

    const auto c = run({"--format", "csv", "profile", "--d", "2", "--p", "1", "--n", "3", "--radius", "8"});
    EXPECT_EQ(c.out, "n,value,scaled,mode,cluster_size,witness_size,truncated\n3,4/3,4/1,exact,289,9,1\n");
}

TEST(Cli, WulffL1) {
    const auto r = run({"wulff", "--norm", "l1", "--d", "2"});
    ASSERT_EQ(r.status, 0) << r.err;
    const auto j = nlohmann::json::parse(r.out);
    EXPECT_NEAR(j.at("volume").get<double>(), 4.0, 1e-9);
    EXPECT_NEAR(j.at("surface_tension").get<double>(), 8.0, 1e-9);
    EXPECT_EQ(run({"--format", "csv", "wulff", "--norm", "l1", "--d", "2"}).out,
              "volume,surface_tension,facets,phi\n4,8,4,4\n");
}

TEST(Cli, WulffFromTable) {
    const auto path = scratch("axis.norm");
    std::ofstream(path) << "1 0 1\n0 1 1\n";
    const auto r = run({"wulff", "--table", path.string(), "--d", "2"});
    ASSERT_EQ(r.status, 0) << r.err;
    EXPECT_NEAR(nlohmann::json::parse(r.out).at("volume").get<double>(), 4.0, 1e-9);
    EXPECT_EQ(run({"wulff", "--table", scratch("absent.norm").string(), "--d", "2"}).status, 2);
}

TEST(Cli, ExperimentMissingConfig) {
    const auto r = run({"experiment", "--config", "missing.cfg"});
    EXPECT_EQ(r.status, 2);
    EXPECT_NE(r.err.find("missing.cfg"), std::string::npos);
}

TEST(Cli, ExperimentWritesRecords) {
    const auto cfg = scratch("probe.cfg");
    const auto records = scratch("probe.jsonl");
    std::ofstream(cfg) << "kind = halfspace_probe\np = 1\nn_list = 2\nradius_factor = 1\ntrials = 3\n";
    std::filesystem::remove(records);
    const auto r = run({"--out", records.string(), "experiment", "--config", cfg.string(), "--workers", "2"});
    ASSERT_EQ(r.status, 0) << r.err;
    std::ifstream in(records);
    EXPECT_EQ(read_records(in).size(), 3u);
}

TEST(Cli, UsageErrorsExitTwo) {
    for (const auto& args : std::vector<std::vector<std::string>>{
             {}, {"profile", "--bogus"}, {"frobnicate"}, {"--format", "xml", "sample", "--d", "2"},
             {"profile", "--n", "three"}, {"wulff", "--norm", "l9"}}) {
        const auto r = run(args);
        EXPECT_EQ(r.status, 2) << (args.empty() ? "" : args[0]);
        EXPECT_FALSE(r.err.empty());
    }
}

TEST(Cli, DomainErrorsExitOne) {
    EXPECT_EQ(run({"profile", "--d", "2", "--p", "2", "--n", "3"}).status, 1);
    EXPECT_EQ(run({"sample", "--d", "1", "--p", "0.5", "--radius", "3"}).status, 1);
    EXPECT_EQ(run({"flow", "--d", "2", "--p", "0.5", "--side", "1"}).status, 1);
}

TEST(Cli, HelpPerSubcommand) {
    for (const char* sub : {"sample", "profile", "explore", "wulff", "flow", "experiment"}) {
        const auto r = run({sub, "--help"});
        EXPECT_EQ(r.status, 0) << sub;
        EXPECT_NE(r.out.find("Usage"), std::string::npos) << sub;
    }
    EXPECT_EQ(run({"--help"}).status, 0);
}

TEST(Cli, SampleDumpRoundTrip) {
    const auto path = scratch("config.bin");
    const auto r = run({"--seed", "3", "--out", path.string(), "sample", "--d", "2", "--p", "0.5", "--radius", "2"});
    ASSERT_EQ(r.status, 0) << r.err;
    std::ifstream in(path, std::ios::binary);
    const auto back = read_config(in);
    const auto direct = sample_config(build_box(2, 2), 0.5, 3);
    EXPECT_TRUE(std::equal(back.words().begin(), back.words().end(), direct.words().begin(), direct.words().end()));
    EXPECT_EQ(nlohmann::json::parse(r.out).at("open_edges"), direct.open_edge_count());
}

TEST(Cli, ExploreAndFlow) {
    const auto e = run({"explore", "--d", "2", "--p", "1", "--radius", "2"});
    ASSERT_EQ(e.status, 0) << e.err;
    EXPECT_TRUE(nlohmann::json::parse(e.out).at("halted").get<bool>());
    const auto f = run({"flow", "--d", "2", "--p", "1", "--side", "4", "--length", "4", "--trials", "2"});
    ASSERT_EQ(f.status, 0) << f.err;
    EXPECT_EQ(nlohmann::json::parse(f.out).at("beta_hat"), 1.0);
}
