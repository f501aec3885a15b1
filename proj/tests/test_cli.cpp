#include "cli.hpp"

#include "nearcol/core.hpp"
#include "nearcol/partition.hpp"

#include <gtest/gtest.h>
#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <sstream>

namespace nearcol {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

struct Run {
    int code;
    std::string out;
    std::string err;
};

Run run(std::vector<std::string> args) {
    std::ostringstream out, err;
    const int code = cli::run(args, out, err);
    return {code, out.str(), err.str()};
}

// Drops the trailing timing columns of each data row.
std::string strip_timing(const std::string& csv, int time_columns) {
    std::istringstream in(csv);
    std::string line, kept;
    while (std::getline(in, line)) {
        if (!line.empty() && line[0] != '#' && line.find("time_ms") == std::string::npos) {
            auto cut = line.size();
            for (int i = 0; i < time_columns; ++i) cut = line.rfind(',', cut - 1);
            line = line.substr(0, cut);
        }
        kept += line + '\n';
    }
    return kept;
}

class CliTest : public ::testing::Test {
protected:
    void SetUp() override {
        dir_ = fs::temp_directory_path() /
               (std::string("nearcol_cli_") + ::testing::UnitTest::GetInstance()->current_test_info()->name());
        fs::create_directories(dir_);
    }
    void TearDown() override { fs::remove_all(dir_); }

    std::string path(const std::string& name) const { return (dir_ / name).string(); }
    std::string write(const std::string& name, const std::string& text) const {
        std::ofstream(path(name)) << text;
        return path(name);
    }

    fs::path dir_;
};

const char* kEvenWeightCode = "a 000\nb 011\nc 101\nd 110\n";

void expect_partition_entries(const std::string& db, const std::string& out, const char* eps, std::size_t entries) {
    const auto r = run({"partition", "--db", db, "--epsilon", eps, "--out", out});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_NE(r.out.find("entries=" + std::to_string(entries)), std::string::npos) << r.out;
    std::ifstream in(out);
    const auto parsed = parse_database(kEvenWeightCode);
    const auto mts = parse_master_template_set(in, parsed, std::stoi(eps));
    EXPECT_EQ(check_master_template_set(mts, parsed), "");
    EXPECT_EQ(mts.size(), entries);
}

TEST_F(CliTest, PartitionEvenWeightCodeTrivialThresholds) {
    expect_partition_entries(write("db.txt", kEvenWeightCode), path("mts.txt"), "0", 4);
    expect_partition_entries(write("db.txt", kEvenWeightCode), path("mts.txt"), "3", 1);
}

TEST_F(CliTest, PartitionEvenWeightCodeEpsilonOne) {
    expect_partition_entries(write("db.txt", kEvenWeightCode), path("mts.txt"), "1", 2);
}

TEST_F(CliTest, GreedyToStdout) {
    const auto db = write("db.txt", kEvenWeightCode);
    const auto r = run({"greedy", "--db", db, "--epsilon", "0"});
    ASSERT_EQ(r.code, 0);
    EXPECT_NE(r.out.find("# entries=4"), std::string::npos);
}

TEST_F(CliTest, CoverJson) {
    const auto db = write("db.txt", "b 011\nc 101\nd 110\n");
    const auto r = run({"cover", "--db", db, "--epsilon", "1", "--all"});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto j = json::parse(r.out);
    EXPECT_EQ(j["status"], "found");
    EXPECT_EQ(j["center"], "111");
    EXPECT_EQ(j["covers"], json::array({"111"}));

    const auto full = write("full.txt", kEvenWeightCode);
    EXPECT_EQ(json::parse(run({"cover", "--db", full, "--epsilon", "1"}).out)["status"], "not_found");
    EXPECT_EQ(json::parse(run({"cover", "--db", full, "--epsilon", "1", "--solver", "sann", "--max-iters", "500"}).out)["status"],
              "unknown");
}

TEST_F(CliTest, BoundsTextAndJson) {
    auto r = run({"bounds", "--n", "3", "--epsilon", "1", "--json"});
    ASSERT_EQ(r.code, 0);
    auto j = json::parse(r.out);
    EXPECT_EQ(j["ball_volume"], "4");
    EXPECT_EQ(j["dirichlet_k"], "2");

    r = run({"bounds", "--n", "512", "--epsilon", "51", "--json"});
    j = json::parse(r.out);
    EXPECT_TRUE(j["meets_recommendation"].get<bool>());
    EXPECT_GT(j["birthday_log2_k"].get<double>(), 100.0);

    r = run({"bounds", "--n", "512", "--epsilon", "10%"});
    ASSERT_EQ(r.code, 0);
    EXPECT_NE(r.out.find("epsilon = 51"), std::string::npos);
    EXPECT_NE(r.out.find("safe"), std::string::npos);
}

TEST_F(CliTest, CurvesCsv) {
    const auto r = run({"curves", "--out", path("c.csv")});
    ASSERT_EQ(r.code, 0);
    std::ifstream in(path("c.csv"));
    std::string header;
    std::getline(in, header);
    EXPECT_EQ(header, "n,epsilon,log2_k");
}

TEST_F(CliTest, BenchIsReproducibleAndEchoesConfig) {
    const std::vector<std::string> args{"bench", "--n", "15,20", "--epsilon", "10", "--clients", "20", "--reps", "5", "--seed", "7"};
    const auto a = run(args), b = run(args);
    ASSERT_EQ(a.code, 0) << a.err;
    EXPECT_NE(a.out.find("# bench reps=5 seed=7 solver=exact"), std::string::npos);
    EXPECT_NE(a.out.find("n,epsilon,clients,clust_mean,clust_greedy_mean,efficiency,time_ms,time_greedy_ms"),
              std::string::npos);
    EXPECT_EQ(strip_timing(a.out, 2), strip_timing(b.out, 2));
}

TEST_F(CliTest, SannAndCoolingBench) {
    auto r = run({"sann-bench", "--n", "20", "--reps", "3", "--max-iters", "2000"});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_NE(r.out.find("n,epsilon,clients,error_pct,time_ms"), std::string::npos);
    EXPECT_NE(r.out.find("\n20,10,50,"), std::string::npos);

    r = run({"cooling-bench", "--n", "30", "--reps", "2", "--max-iters", "2000"});
    ASSERT_EQ(r.code, 0) << r.err;
    for (const char* s : {"additive", "linear-multiplicative", "exponential", "logarithmic"}) {
        EXPECT_NE(r.out.find(std::string("\n") + s + ",30,"), std::string::npos) << s;
    }
}

TEST_F(CliTest, GenAttackRoundTrip) {
    ASSERT_EQ(run({"gen", "--n", "24", "--clients", "20", "--ball", "4", "--leak", "key", "--out", path("leak.txt")}).code, 0);
    const auto r = run({"attack", "--leak", path("leak.txt"), "--kind", "key", "--tau", "4"});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto j = json::parse(r.out);
    EXPECT_EQ(j["item_count"], 1);
    EXPECT_EQ(j["coverage"], 1.0);
    EXPECT_EQ(j["inversion_calls"], 20);

    const auto plain = json::parse(run({"attack", "--leak", path("leak.txt"), "--kind", "key", "--tau", "4", "--no-partition"}).out);
    EXPECT_EQ(plain["item_count"], 20);
}

TEST_F(CliTest, AddAndRemoveUser) {
    ASSERT_EQ(run({"gen", "--n", "16", "--clients", "30", "--seed", "3", "--out", path("db.txt")}).code, 0);
    ASSERT_EQ(run({"partition", "--db", path("db.txt"), "--epsilon", "3", "--out", path("mts.txt")}).code, 0);

    auto r = run({"add-user", "--db", path("db.txt"), "--mts", path("mts.txt"), "--epsilon", "3", "--id", "new",
                  "--bits", "0101010101010101", "--out-db", path("db2.txt"), "--out-mts", path("mts2.txt")});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_EQ(json::parse(r.out)["members"], 31);

    r = run({"remove-user", "--db", path("db2.txt"), "--id", "new", "--epsilon", "3"});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto j = json::parse(r.out);
    EXPECT_EQ(j["removed"], "new");
    EXPECT_EQ(j["members"], 30);

    EXPECT_EQ(run({"remove-user", "--db", path("db2.txt"), "--id", "ghost", "--epsilon", "3"}).code, 2);
}

TEST_F(CliTest, ExitCodes) {
    EXPECT_EQ(run({}).code, 1);
    EXPECT_EQ(run({"nonsense"}).code, 1);
    EXPECT_EQ(run({"partition", "--epsilon", "1"}).code, 1);
    EXPECT_EQ(run({"cover", "--db", "x", "--epsilon", "1", "--solver", "ilp"}).code, 1);
    EXPECT_EQ(run({"--help"}).code, 0);
    EXPECT_EQ(run({"partition", "--db", path("missing.txt"), "--epsilon", "1"}).code, 2);
    const auto bad = write("bad.txt", "a 010\nb 01\n");
    EXPECT_EQ(run({"partition", "--db", bad, "--epsilon", "1"}).code, 2);
    const auto db = write("db.txt", kEvenWeightCode);
    EXPECT_EQ(run({"partition", "--db", db, "--epsilon", "-1"}).code, 2);
    EXPECT_EQ(run({"bounds", "--n", "8", "--epsilon", "9"}).code, 2);
}

}  // namespace
}  // namespace nearcol
