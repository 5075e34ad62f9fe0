#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "tangle/harness.hpp"

using namespace tangle;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
    std::ifstream f(p);
    std::stringstream s;
    s << f.rdbuf();
    return s.str();
}

std::vector<std::string> lines(const std::string& text) {
    std::vector<std::string> out;
    std::istringstream in(text);
    for (std::string l; std::getline(in, l);) out.push_back(l);
    return out;
}

class HarnessTest : public ::testing::Test {
protected:
    void SetUp() override {
        const auto* info = ::testing::UnitTest::GetInstance()->current_test_info();
        root_ = fs::temp_directory_path() / (std::string("tangle_harness_") + info->name());
        fs::remove_all(root_);
        fs::create_directories(root_);
    }
    void TearDown() override { fs::remove_all(root_); }

    std::string dir(const std::string& name) const { return (root_ / name).string(); }

    static ExperimentConfig small_simulate(const std::string& out) {
        ExperimentConfig c;
        c.command = "simulate";
        c.out = out;
        c.lambda = 10;
        c.horizon = 30;
        c.warmup = 10;
        c.seed = 5;
        return c;
    }

    fs::path root_;
};

int run_cli(const std::string& args) {
    const std::string cmd = std::string(TANGLE_SIM_PATH) + " " + args + " > /dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

} // namespace

TEST(HarnessParse, NamesRoundTrip) {
    EXPECT_EQ(parse_scale("paper"), Scale::paper);
    EXPECT_EQ(parse_selector("brw"), TipSelectorKind::walk);
    EXPECT_EQ(parse_selector(to_string(TipSelectorKind::urts)), TipSelectorKind::urts);
    EXPECT_EQ(parse_calibration_unit("walk"), CalibrationUnit::walk);
    EXPECT_THROW(parse_scale("huge"), Error);
    EXPECT_THROW(parse_selector("mcmc"), Error);
}

TEST_F(HarnessTest, SimulateWritesOutputsWithConfigHeaders) {
    const auto result = run_command(small_simulate(dir("a")));
    ASSERT_FALSE(result.files.empty());
    for (const auto& f : result.files) {
        ASSERT_TRUE(fs::exists(f)) << f;
        if (fs::path(f).extension() == ".csv") {
            const auto l = lines(slurp(f));
            ASSERT_GE(l.size(), 2u);
            EXPECT_EQ(l[0].rfind("# config: command=simulate seed=5 lambda=10", 0), 0u) << l[0];
        }
    }
    EXPECT_TRUE(fs::exists(dir("a") + "/tangle.snapshot"));
    EXPECT_TRUE(fs::exists(dir("a") + "/run.ini"));
    const auto hist = lines(slurp(dir("a") + "/histogram.csv"));
    EXPECT_EQ(hist[1], "n,count,probability");
}

TEST_F(HarnessTest, SameSeedGivesByteIdenticalFiles) {
    for (auto selector : {TipSelectorKind::urts, TipSelectorKind::walk}) {
        ExperimentConfig c = small_simulate(dir("x"));
        c.selector = selector;
        const auto first = run_command(c);
        c.out = dir("y");
        const auto second = run_command(c);
        ASSERT_EQ(first.files.size(), second.files.size());
        for (std::size_t i = 0; i < first.files.size(); ++i)
            EXPECT_EQ(slurp(first.files[i]), slurp(second.files[i])) << first.files[i];
    }
}

TEST_F(HarnessTest, InvalidConfigThrows) {
    ExperimentConfig c = small_simulate(dir("bad"));
    c.lambda = 0;
    EXPECT_THROW(run_command(c), Error);
    c = small_simulate(dir("bad"));
    c.command = "plot";
    EXPECT_THROW(run_command(c), Error);
    c = small_simulate(dir("bad"));
    c.a = 2.5;
    EXPECT_THROW(run_command(c), Error);
}

TEST_F(HarnessTest, UnwritableOutputThrows) {
    std::ofstream(dir("file")) << "x";
    ExperimentConfig c = small_simulate(dir("file") + "/sub");
    EXPECT_THROW(run_command(c), Error);
}

TEST_F(HarnessTest, AnalyticMatchesModel) {
    ExperimentConfig c;
    c.command = "analytic";
    c.out = dir("an");
    c.lambda = 100;
    c.n_max = 20;
    run_command(c);
    const auto l = lines(slurp(dir("an") + "/analytic.csv"));
    ASSERT_EQ(l.size(), 22u);
    EXPECT_EQ(l[1], "n,p_u,p_urw,p_urw_star");
    const auto star = p_urw_star(c.model());
    std::istringstream row(l[2]);
    std::string cell;
    std::vector<double> v;
    while (std::getline(row, cell, ',')) v.push_back(std::stod(cell));
    ASSERT_EQ(v.size(), 4u);
    EXPECT_EQ(v[0], 1.0);
    EXPECT_NEAR(v[3], star[1], 1e-12);
}

TEST_F(HarnessTest, AttackDetectWithoutTrialsWritesHeadersOnly) {
    ExperimentConfig c;
    c.command = "attack-detect";
    c.out = dir("ad");
    c.trials = 0;
    run_command(c);
    for (const char* name : {"campaign.csv", "attack_reports.csv"}) {
        const auto l = lines(slurp(dir("ad") + "/" + name));
        ASSERT_EQ(l.size(), 2u) << name;
        EXPECT_EQ(l[0].rfind("# config: command=attack-detect", 0), 0u);
    }
}

TEST_F(HarnessTest, AttackDetectRejectsSpcWithPartialRoot) {
    ExperimentConfig c;
    c.command = "attack-detect";
    c.out = dir("ad");
    c.p_root = 0.5;
    EXPECT_THROW(run_command(c), Error);
}

TEST_F(HarnessTest, SmallSpcCampaign) {
    ExperimentConfig c;
    c.command = "attack-detect";
    c.out = dir("spc");
    c.lambda = 20;
    c.mu = 10;
    c.attack_start = 20;
    c.build_duration = 5;
    c.sample_size = 5;
    c.calibration_samples = 500;
    c.selections = 100;
    c.trials = 2;
    c.seed = 3;
    run_command(c);
    const auto l = lines(slurp(dir("spc") + "/campaign.csv"));
    ASSERT_EQ(l.size(), 4u);
    EXPECT_EQ(l[2].substr(0, 2), "0,");
    EXPECT_EQ(l[3].substr(0, 2), "1,");
    EXPECT_NE(l[2].find(",spc,"), std::string::npos);
    // Same seed, same campaign.
    c.out = dir("spc2");
    run_command(c);
    EXPECT_EQ(slurp(dir("spc") + "/campaign.csv"), slurp(dir("spc2") + "/campaign.csv"));
}

TEST_F(HarnessTest, TrialReportsRateAndCapture) {
    ExperimentConfig c;
    c.lambda = 20;
    c.mu = 10;
    c.attack_start = 20;
    c.build_duration = 5;
    c.sample_size = 5;
    c.selections = 200;
    const TrialResult r = run_attack_trial(c, 1.0, 11);  // eta = 1 never flags
    EXPECT_EQ(r.report.kind, AttackKind::spc);
    EXPECT_GT(r.report.num_malicious, 10u);
    EXPECT_EQ(r.pc_flag_rate, 0.0);
    // Without flags the guard is a plain walk; the two streams differ only by sampling noise.
    EXPECT_NEAR(r.capture_unguarded, r.capture_guarded, 0.2);
    EXPECT_GT(r.capture_unguarded, 0.0);
}

TEST_F(HarnessTest, CalibrateWritesCdf) {
    ExperimentConfig c;
    c.command = "calibrate";
    c.out = dir("cal");
    c.lambda = 20;
    c.horizon = 60;
    c.warmup = 0;
    c.sample_size = 5;
    c.calibration_samples = 300;
    run_command(c);
    const auto cdf = lines(slurp(dir("cal") + "/cdf.csv"));
    ASSERT_GT(cdf.size(), 3u);
    EXPECT_EQ(cdf[1], "d,cumulative_probability");
    double prev_d = -1.0, prev_p = 0.0;
    for (std::size_t i = 2; i < cdf.size(); ++i) {
        const auto comma = cdf[i].find(',');
        const double d = std::stod(cdf[i].substr(0, comma));
        const double p = std::stod(cdf[i].substr(comma + 1));
        EXPECT_GT(d, prev_d);
        EXPECT_GT(p, prev_p);
        prev_d = d;
        prev_p = p;
    }
    EXPECT_DOUBLE_EQ(prev_p, 1.0);
}

TEST_F(HarnessTest, FigureFourIsAnalyticOnly) {
    ExperimentConfig c;
    c.command = "reproduce-figure";
    c.figure = 4;
    c.out = dir("f4");
    const auto result = run_command(c);
    EXPECT_EQ(result.files.size(), 3u);  // two CSVs and run.ini
    const auto l = lines(slurp(dir("f4") + "/fig4_p_urw_star.csv"));
    EXPECT_EQ(l.size(), 2u + 41u * 5u);
}

TEST_F(HarnessTest, UnknownFigureRejected) {
    ExperimentConfig c;
    c.command = "reproduce-figure";
    c.out = dir("f6");
    for (int f : {1, 6, 8}) {
        c.figure = f;
        EXPECT_THROW(run_command(c), Error) << f;
    }
    EXPECT_FALSE(fs::exists(dir("f6")));
}

TEST_F(HarnessTest, CliExitCodes) {
    EXPECT_EQ(run_cli("simulate --lambda 10 --horizon 20 --warmup 5 --seed 2 --out " + dir("c1")), 0);
    EXPECT_NE(run_cli("simulate --lambda 0 --out " + dir("c2")), 0);
    EXPECT_NE(run_cli("reproduce-figure --figure 4 --out " + dir("c3")), 0);  // seed is mandatory
    EXPECT_NE(run_cli("reproduce-figure --figure 6 --seed 1 --out " + dir("c3")), 0);
    EXPECT_NE(run_cli("simulate --policy both --out " + dir("c4")), 0);
    EXPECT_NE(run_cli("--lambda 3"), 0);
}

TEST_F(HarnessTest, CliRerunFromCsvHeaderAndIni) {
    ASSERT_EQ(run_cli("simulate --lambda 12 --horizon 25 --warmup 5 --tip-selection urw --seed 9 --out " + dir("o1")),
              0);
    ASSERT_EQ(run_cli("simulate --config " + dir("o1") + "/histogram.csv --out " + dir("o2")), 0);
    ASSERT_EQ(run_cli("simulate --config " + dir("o1") + "/run.ini --out " + dir("o3")), 0);
    for (const char* name : {"histogram.csv", "histogram_walks.csv", "summary.csv", "tangle.snapshot"}) {
        EXPECT_EQ(slurp(dir("o1") + "/" + name), slurp(dir("o2") + "/" + name)) << name;
        EXPECT_EQ(slurp(dir("o1") + "/" + name), slurp(dir("o3") + "/" + name)) << name;
    }
    // Flags win over the config file.
    ASSERT_EQ(run_cli("simulate --config " + dir("o1") + "/run.ini --seed 10 --out " + dir("o4")), 0);
    EXPECT_NE(slurp(dir("o1") + "/summary.csv"), slurp(dir("o4") + "/summary.csv"));
    EXPECT_NE(lines(slurp(dir("o4") + "/summary.csv"))[0].find("seed=10"), std::string::npos);
}
