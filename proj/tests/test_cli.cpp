#include <gtest/gtest.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>

#include <json.hpp>

namespace fs = std::filesystem;

namespace {

int run_cli(const std::string& args) {
    const std::string cmd = std::string(REMBO_BENCH_PATH) + " " + args + " > /dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

fs::path scratch(const std::string& name) {
    const fs::path p = fs::temp_directory_path() / ("rembo_cli_" + name + "_" + std::to_string(::getpid()));
    fs::remove_all(p);
    return p;
}

const std::string kTiny = "--dim-high 8 --dim-low 2 --budget 7 --n-init 5 --ei-budget 200 --reps 1 ";

TEST(Cli, SuccessWritesOutputs) {
    const fs::path out = scratch("ok");
    EXPECT_EQ(run_cli(kTiny + "--kernels kY,kPsi --seed 4 --parallel 1 --ybox gamma --out " + out.string()), 0);
    EXPECT_TRUE(fs::exists(out / "gaps.csv"));
    EXPECT_TRUE(fs::exists(out / "summary.json"));
    EXPECT_TRUE(fs::exists(out / "runs" / "kPsi_rep0.csv"));
    EXPECT_FALSE(fs::exists(out / "runs" / "kX_rep0.csv"));

    const fs::path again = scratch("summ");
    fs::create_directories(again);
    EXPECT_EQ(run_cli("summarize " + (out / "gaps.csv").string()), 0);
    fs::remove_all(out);
    fs::remove_all(again);
}

TEST(Cli, ConfigFileWithFlagOverride) {
    const fs::path dir = scratch("cfg");
    fs::create_directories(dir);
    {
        std::ofstream cfg(dir / "c.json");
        cfg << R"({"D": 8, "d": 2, "budget": 7, "n_init": 5, "ei_budget": 200, "reps": 3,
                   "kernels": ["kX"], "seed": 2})";
    }
    const fs::path out = dir / "out";
    EXPECT_EQ(run_cli("--config " + (dir / "c.json").string() + " --reps 1 --out " + out.string()), 0);
    std::ifstream in(out / "summary.json");
    const auto j = nlohmann::json::parse(in);
    EXPECT_EQ(j.at("config").at("reps"), 1);
    EXPECT_EQ(j.at("config").at("D"), 8);
    fs::remove_all(dir);
}

TEST(Cli, ConfigErrorsExitOne) {
    const fs::path out = scratch("bad");
    EXPECT_EQ(run_cli("--kernels kZ --out " + out.string()), 1);
    EXPECT_EQ(run_cli("--ybox wide --out " + out.string()), 1);
    EXPECT_EQ(run_cli("--dim-high 25 --dim-low 30 --out " + out.string()), 1);
    EXPECT_EQ(run_cli("--budget 10 --out " + out.string()), 1);
    EXPECT_EQ(run_cli("--config /nonexistent.json"), 1);
    EXPECT_EQ(run_cli("--no-such-flag"), 1);

    const fs::path dir = scratch("badcfg");
    fs::create_directories(dir);
    std::ofstream(dir / "c.json") << R"({"dims": 3})";
    EXPECT_EQ(run_cli("--config " + (dir / "c.json").string()), 1);
    fs::remove_all(dir);
    fs::remove_all(out);
}

TEST(Cli, ManyFailedRunsExitTwo) {
    // A one-dimensional embedding with a huge box: every image saturates onto
    // one of two corners of X, so the filtered design cannot be built.
    const fs::path out = scratch("fail");
    EXPECT_EQ(run_cli("--dim-high 6 --dim-low 1 --budget 12 --n-init 10 --reps 2 --kernels kY "
                      "--ybox 1e9 --out " +
                      out.string()),
              2);
    std::ifstream in(out / "gaps.csv");
    std::string header, row;
    std::getline(in, header);
    std::getline(in, row);
    EXPECT_NE(row.find(",nan,"), std::string::npos);
    fs::remove_all(out);
}

}  // namespace
