#include "cli.hpp"

#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <sys/wait.h>

namespace fs = std::filesystem;
using namespace leaksim;
using namespace leaksim::cli;

namespace {

struct Result {
    int code;
    std::string out;
    std::string err;
};

Result invoke(std::vector<std::string> args) {
    args.insert(args.begin(), "leaksim");
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    std::ostringstream out, err;
    const int code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
    return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), {}};
}

class CliTest : public ::testing::Test {
protected:
    void SetUp() override {
        const auto* info = ::testing::UnitTest::GetInstance()->current_test_info();
        dir_ = fs::temp_directory_path() / (std::string("leaksim_cli_") + info->name());
        fs::remove_all(dir_);
        fs::create_directories(dir_);
    }
    void TearDown() override { fs::remove_all(dir_); }

    std::string path(const std::string& name) const { return (dir_ / name).string(); }

    fs::path dir_;
};

} // namespace

// ---------- amplitude parsing ----------

TEST(ParseAmplitude, FixedAndRange) {
    EXPECT_TRUE(parse_amplitude("chi", "0.02").is_fixed());
    EXPECT_EQ(parse_amplitude("chi", "0.02").lo, 0.02);
    const auto r = parse_amplitude("chi", "0.005:0.02");
    EXPECT_FALSE(r.is_fixed());
    EXPECT_EQ(r.lo, 0.005);
    EXPECT_EQ(r.hi, 0.02);
    for (const char* bad : {"", "abc", "-0.1", "0.2:0.1", "0.1:", "0.1x"})
        EXPECT_THROW(parse_amplitude("chi", bad), ConfigError) << bad;
}

// ---------- run ----------

TEST_F(CliTest, RunWritesTracesAndManifest) {
    const auto r = invoke({"run", "--scheme", "swap", "--cycles", "12", "--trajectories", "3", "--seed", "4",
                           "--inject", "5:data0", "--out", path("out")});
    ASSERT_EQ(r.code, 0) << r.err;
    for (const char* f : {"trajectory_0000.csv", "trajectory_0001.csv", "trajectory_0002.csv", "manifest.json"})
        EXPECT_TRUE(fs::exists(dir_ / "out" / f)) << f;

    std::ifstream csv(dir_ / "out" / "trajectory_0001.csv");
    const auto records = read_csv(csv);
    ASSERT_EQ(records.size(), 12u);
    EXPECT_GT(records[4].p_leak, 0.99);

    const auto manifest = nlohmann::json::parse(slurp(dir_ / "out" / "manifest.json"));
    EXPECT_EQ(manifest["config"]["scheme"], "swap");
    EXPECT_EQ(manifest["trajectories"].size(), 3u);
    EXPECT_EQ(manifest["trajectories"][2]["seed"], trajectory_seed(4, 2));
    EXPECT_EQ(manifest["trajectories"][0]["noise"].size(), 4u);
    EXPECT_TRUE(manifest["trajectories"][0]["noise"].contains("0-2"));
}

TEST_F(CliTest, RunTraceHeader) {
    ASSERT_EQ(invoke({"run", "--cycles", "2", "--out", path("o")}).code, 0);
    const std::string text = slurp(dir_ / "o" / "trajectory_0000.csv");
    EXPECT_EQ(text.substr(0, text.find('\n')),
              "cycle,raw_zz,raw_xx,bit_zz,bit_xx,p_leak,bell_prediction,prediction_overlap,data_site_0,data_site_1");
}

TEST_F(CliTest, RunIsDeterministic) {
    for (const char* o : {"a", "b"})
        ASSERT_EQ(invoke({"run", "--scheme", "swap", "--cycles", "40", "--seed", "11", "--chi", "0.1", "--out", path(o)}).code, 0);
    EXPECT_EQ(slurp(dir_ / "a" / "trajectory_0000.csv"), slurp(dir_ / "b" / "trajectory_0000.csv"));
}

TEST_F(CliTest, ConfigFileWithFlagOverride) {
    {
        std::ofstream cfg(path("cfg.json"));
        cfg << R"({"scheme": "swap", "cycles": 7, "chi": [0.001, 0.002], "bell": 3, "out": ")" << path("from_cfg")
            << R"("})";
    }
    const auto r = invoke({"run", "--config", path("cfg.json"), "--cycles", "3"});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto manifest = nlohmann::json::parse(slurp(dir_ / "from_cfg" / "manifest.json"));
    EXPECT_EQ(manifest["config"]["cycles"], 3);
    EXPECT_EQ(manifest["config"]["scheme"], "swap");
    EXPECT_EQ(manifest["config"]["bell"], 3);
    EXPECT_EQ(manifest["config"]["chi"], "0.001:0.002");
}

TEST_F(CliTest, ConfigErrorsAreUsageErrors) {
    {
        std::ofstream cfg(path("bad_key.json"));
        cfg << R"({"cycels": 7})";
    }
    {
        std::ofstream cfg(path("bad_type.json"));
        cfg << R"({"cycles": "many"})";
    }
    {
        std::ofstream cfg(path("bad_syntax.json"));
        cfg << "{";
    }
    for (const char* f : {"bad_key.json", "bad_type.json", "bad_syntax.json"}) {
        const auto r = invoke({"run", "--config", path(f), "--out", path("x")});
        EXPECT_EQ(r.code, 2) << f;
        EXPECT_NE(r.err.find("error:"), std::string::npos);
    }
    EXPECT_EQ(invoke({"run", "--config", path("missing.json")}).code, 3);
}

TEST_F(CliTest, InvalidArgumentsExitTwo) {
    EXPECT_EQ(invoke({}).code, 2);
    EXPECT_EQ(invoke({"frobnicate"}).code, 2);
    EXPECT_EQ(invoke({"run", "--scheme", "bogus", "--out", path("x")}).code, 2);
    EXPECT_EQ(invoke({"run", "--cycles", "0", "--out", path("x")}).code, 2);
    EXPECT_EQ(invoke({"run", "--bell", "4", "--out", path("x")}).code, 2);
    EXPECT_EQ(invoke({"run", "--chi", "-1", "--out", path("x")}).code, 2);
    EXPECT_EQ(invoke({"run", "--inject", "zz", "--out", path("x")}).code, 2);
    EXPECT_EQ(invoke({"run", "--cycles", "ten"}).code, 2);
    EXPECT_FALSE(fs::exists(dir_ / "x"));
}

TEST_F(CliTest, UnwritableOutputExitsThree) {
    {
        std::ofstream blocker(path("file"));
        blocker << "x";
    }
    EXPECT_EQ(invoke({"run", "--cycles", "1", "--out", path("file") + "/sub"}).code, 3);
}

TEST(Cli, HelpExitsZero) {
    const auto r = invoke({"--help"});
    EXPECT_EQ(r.code, 0);
    EXPECT_NE(r.out.find("dump-circuit"), std::string::npos);
}

// ---------- plot ----------

TEST_F(CliTest, PlotRendersSvg) {
    ASSERT_EQ(invoke({"run", "--cycles", "10", "--inject", "3:data1", "--out", path("o")}).code, 0);
    const auto r = invoke({"plot", path("o/trajectory_0000.csv"), "--out", path("t.svg")});
    ASSERT_EQ(r.code, 0) << r.err;
    const std::string svg = slurp(dir_ / "t.svg");
    EXPECT_EQ(svg.rfind("<svg", 0), 0u);
    EXPECT_NE(svg.find("</svg>"), std::string::npos);
    EXPECT_NE(svg.find("P(data leaked)"), std::string::npos);
}

TEST_F(CliTest, PlotRejectsMalformedTrace) {
    {
        std::ofstream bad(path("bad.csv"));
        bad << kCsvHeader << "\n1,0,0,0,0,0.5,0,1,0\n";
    }
    const auto r = invoke({"plot", path("bad.csv"), "--out", path("t.svg")});
    EXPECT_EQ(r.code, 2);
    EXPECT_NE(r.err.find("expected 10 fields"), std::string::npos);
    EXPECT_EQ(invoke({"plot", path("nope.csv"), "--out", path("t.svg")}).code, 3);
}

// ---------- plan ----------

TEST_F(CliTest, PlanPrintsReportAndJson) {
    const auto r = invoke({"plan", "--distance", "5", "--out", path("plan.json")});
    ASSERT_EQ(r.code, 0);
    EXPECT_NE(r.out.find("41 data, 40 syndrome, 9 supplementary, 90 total"), std::string::npos);
    EXPECT_EQ(r.out.find("FAIL"), std::string::npos);
    const auto j = nlohmann::json::parse(slurp(dir_ / "plan.json"));
    EXPECT_EQ(j["counts"]["supplementary"], 9);
}

TEST(Cli, PlanRejectsSmallDistance) {
    const auto r = invoke({"plan", "--distance", "1"});
    EXPECT_EQ(r.code, 2);
    EXPECT_NE(r.err.find("distance must be ≥ 2"), std::string::npos);
}

// ---------- dump-circuit ----------

TEST(Cli, DumpCircuitSwapScheme) {
    const auto r = invoke({"dump-circuit", "--scheme", "swap", "--seed", "3"});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto j = nlohmann::json::parse(r.out);
    EXPECT_EQ(j["scheme"], "swap");
    ASSERT_EQ(j["cycles"].size(), 2u);
    EXPECT_EQ(j["cycles"][0]["parity"], "odd");
    EXPECT_EQ(j["cycles"][1]["roles"]["data"], (std::vector<int>{2, 3}));
    EXPECT_EQ(j["cycles"][0]["circuit"]["gates"]["H"]["matrix"].size(), 3u);
}

TEST(Cli, DumpCircuitStandardIdeal) {
    const auto r = invoke({"dump-circuit", "--ideal"});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto j = nlohmann::json::parse(r.out);
    ASSERT_EQ(j["cycles"].size(), 1u);
    const auto& gates = j["cycles"][0]["circuit"]["gates"];
    for (const auto& [name, g] : gates.items()) {
        if (name == "H") continue;
        EXPECT_EQ(g["matrix"][4][4][0].get<double>(), -1.0) << name;
    }
}

// ---------- trace io ----------

TEST(TraceIo, RoundTrip) {
    TrajectoryConfig cfg;
    cfg.scheme = Scheme::swap;
    cfg.cycles = 25;
    cfg.noise.chi = AmplitudeSpec::fixed(0.2);
    cfg.injections.push_back(Injection::parse("4:xx"));
    const auto log = run_trajectory(cfg);
    std::stringstream csv;
    write_csv(csv, log.records);
    const auto back = read_csv(csv);
    ASSERT_EQ(back.size(), log.records.size());
    for (std::size_t i = 0; i < back.size(); ++i) {
        EXPECT_EQ(back[i].cycle, log.records[i].cycle);
        EXPECT_EQ(back[i].raw_zz, log.records[i].raw_zz);
        EXPECT_EQ(back[i].bell_prediction, log.records[i].bell_prediction);
        EXPECT_NEAR(back[i].p_leak, log.records[i].p_leak, 1e-11);
        EXPECT_EQ(back[i].roles_after.data, log.records[i].roles_after.data);
    }
}

TEST(TraceIo, MalformedTraces) {
    const std::string header = std::string(kCsvHeader) + "\n";
    for (const std::string& body : {std::string(""), std::string("cycle,raw\n"),
                                    header + "1,0,0,0,0,0.5,0,1,0,1,9\n", header + "1,3,0,1,0,0,2,1,0,1\n",
                                    header + "1,2,0,0,0,0,0,1,0,1\n", header + "1,0,0,0,0,1.5,0,1,0,1\n",
                                    header + "x,0,0,0,0,0,0,1,0,1\n", header + "1,0,0,0,0,0,4,1,0,1\n"}) {
        std::istringstream in(body);
        EXPECT_THROW(read_csv(in), TraceFormatError) << body;
    }
    std::istringstream ok(header + "1,2,0,1,0,0,2,1,0,1\n");
    EXPECT_EQ(read_csv(ok).size(), 1u);
}

TEST(TraceIo, ProbabilityFormatting) {
    EXPECT_EQ(format_probability(1.0), "1");
    EXPECT_EQ(format_probability(0.0), "0");
    EXPECT_EQ(format_probability(0.5), "0.5");
    EXPECT_EQ(format_probability(9.99966667e-5), "9.99966667e-05");
}

// ---------- installed binary ----------

TEST(Binary, ExitCodes) {
    auto status = [](const std::string& args) {
        const std::string cmd = std::string(LEAKSIM_TOOL_PATH) + " " + args + " >/dev/null 2>&1";
        const int s = std::system(cmd.c_str());
        return WIFEXITED(s) ? WEXITSTATUS(s) : -1;
    };
    EXPECT_EQ(status("plan --distance 3"), 0);
    EXPECT_EQ(status("plan --distance 1"), 2);
    EXPECT_EQ(status("plan"), 2);
    EXPECT_EQ(status("plot /nonexistent/trace.csv --out /tmp/x.svg"), 3);
}
