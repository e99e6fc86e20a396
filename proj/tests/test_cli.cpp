#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "dpsi/cli.hpp"
#include "dpsi/wire.hpp"

using namespace dpsi;
namespace fs = std::filesystem;

namespace {

const char* kSeed = "000102030405060708090a0b0c0d0e0f";

struct Cli {
    std::string out, err;
    int code = -1;
};

Cli call(std::vector<std::string> args) {
    args.insert(args.begin(), "dpsi");
    std::vector<const char*> argv;
    for (auto& a : args) argv.push_back(a.c_str());
    std::ostringstream out, err;
    Cli r;
    r.code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
    r.out = out.str();
    r.err = err.str();
    return r;
}

class CliTest : public ::testing::Test {
protected:
    void SetUp() override {
        dir = fs::temp_directory_path() /
              ("dpsi_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
        fs::remove_all(dir);
        fs::create_directories(dir);
        write("a.txt", "1\n2\n3\n10\n");
        write("b.txt", "2\n3\n4\n# trailing comment\n");
    }
    void TearDown() override { fs::remove_all(dir); }

    std::string path(const std::string& name) const { return (dir / name).string(); }
    void write(const std::string& name, const std::string& text) const { std::ofstream(dir / name) << text; }
    std::string slurp(const std::string& name) const {
        std::ifstream in(dir / name, std::ios::binary);
        return {std::istreambuf_iterator<char>(in), {}};
    }

    fs::path dir;
};

}  // namespace

TEST_F(CliTest, RunPrintsIntersection) {
    for (const char* scheme : {"improved", "eo"}) {
        auto r = call({"run", path("a.txt"), path("b.txt"), "--scheme", scheme, "--seed", kSeed});
        EXPECT_EQ(r.code, kExitOk) << r.err;
        EXPECT_EQ(r.out, "2\n3\n");
    }
}

TEST_F(CliTest, RandomSeedIsReported) {
    auto r = call({"run", path("a.txt"), path("b.txt")});
    EXPECT_EQ(r.code, kExitOk);
    EXPECT_EQ(r.err.rfind("seed: ", 0), 0u);
}

TEST_F(CliTest, RunIsDeterministicForASeed) {
    auto r1 = call({"run", path("a.txt"), path("b.txt"), "--seed", kSeed, "--transcript", path("t1.bin"), "--counters",
                    path("c1.json"), "--out", path("o1.txt")});
    auto r2 = call({"run", path("a.txt"), path("b.txt"), "--seed", kSeed, "--transcript", path("t2.bin")});
    ASSERT_EQ(r1.code, kExitOk);
    EXPECT_EQ(slurp("o1.txt"), "2\n3\n");
    EXPECT_EQ(slurp("t1.bin"), slurp("t2.bin"));
    auto counters = nlohmann::json::parse(slurp("c1.json"));
    EXPECT_GT(counters["A"]["online"]["table"]["muls"].get<u64>(), 0u);
}

TEST_F(CliTest, ExitCodes) {
    write("big.txt", "1\n2\n3\n4\n5\n");
    auto r = call({"run", path("big.txt"), path("b.txt"), "-c", "4", "--seed", kSeed});
    EXPECT_EQ(r.code, kExitProtocol);
    EXPECT_NE(r.err.find("cardinality"), std::string::npos);
    EXPECT_EQ(call({"run", path("missing.txt"), path("b.txt"), "--seed", kSeed}).code, kExitIo);
    EXPECT_EQ(call({"run", path("a.txt"), path("b.txt"), "--prime", "21"}).code, kExitUsage);
    EXPECT_EQ(call({"run", path("a.txt"), path("b.txt"), "--seed", "xyz"}).code, kExitUsage);
    EXPECT_EQ(call({"frobnicate"}).code, kExitUsage);
    write("bad.txt", "1\nfoo\n");
    EXPECT_EQ(call({"run", path("bad.txt"), path("b.txt"), "--seed", kSeed}).code, kExitUsage);
}

TEST_F(CliTest, AttackOnEoTranscript) {
    ASSERT_EQ(call({"run", path("a.txt"), path("b.txt"), "--scheme", "eo", "--seed", kSeed, "--transcript",
                    path("t.bin")})
                  .code,
              kExitOk);
    auto r = call({"attack", path("t.bin"), "--seed", kSeed, "--set-a", path("a.txt"), "--set-b", path("b.txt")});
    ASSERT_EQ(r.code, kExitOk) << r.err;
    std::istringstream lines(r.out);
    std::string line;
    std::vector<nlohmann::json> js;
    while (std::getline(lines, line)) js.push_back(nlohmann::json::parse(line));
    ASSERT_EQ(js.size(), 5u);
    EXPECT_EQ(js[0]["attack"], "eo_keyleak");
    EXPECT_EQ(js[0]["recovered"], nlohmann::json({2, 3, 4}));
    EXPECT_EQ(js[1]["recovered"], nlohmann::json({2, 3}));
    EXPECT_EQ(js[2]["recovered"], nlohmann::json({1, 2, 3, 10}));
    for (int i = 0; i < 3; ++i) EXPECT_EQ(js[i]["matched_truth"], true);
    EXPECT_EQ(js[3]["applicable"], false);
    EXPECT_EQ(js[4]["attack"], "key_scan");
    EXPECT_EQ(js[4]["hits"].size(), 2u);

    auto limited = call({"attack", path("t.bin"), "--channels", "A>B,C>B"});
    ASSERT_EQ(limited.code, kExitOk);
    EXPECT_NE(limited.out.find("\"recovered\":[2,3]"), std::string::npos);
    EXPECT_EQ(call({"attack", path("t.bin"), "--channels", "Q>B"}).code, kExitUsage);
}

TEST_F(CliTest, AttackOnImprovedTranscript) {
    ASSERT_EQ(call({"run", path("a.txt"), path("b.txt"), "--seed", kSeed, "--transcript", path("t.bin")}).code, kExitOk);
    auto r = call({"attack", path("t.bin"), "--seed", kSeed});
    ASSERT_EQ(r.code, kExitOk);
    std::istringstream lines(r.out);
    std::string line;
    int n = 0;
    while (std::getline(lines, line)) {
        auto j = nlohmann::json::parse(line);
        if (n < 3) EXPECT_EQ(j["applicable"], false);
        if (n == 4) EXPECT_TRUE(j["hits"].empty());
        ++n;
    }
    EXPECT_EQ(n, 5);
}

TEST_F(CliTest, Bench) {
    auto r = call({"bench", "--c-list", "3", "-d", "3", "--bins", "2", "--no-timing", "--out", path("b.csv"), "--seed",
                   kSeed});
    ASSERT_EQ(r.code, kExitOk) << r.err;
    EXPECT_NE(r.out.find("counts: EXACT MATCH"), std::string::npos);
    auto csv = slurp("b.csv");
    EXPECT_NE(csv.find("improved,3,2,3,7,A,online,42,56,"), std::string::npos);
    EXPECT_NE(csv.find("eo,3,2,3,7,A,online,112,112,"), std::string::npos);
    EXPECT_EQ(call({"bench", "--c-list", "", "--out", path("x.csv")}).code, kExitUsage);
    EXPECT_EQ(call({"bench", "--c-list", "0", "--out", path("x.csv")}).code, kExitUsage);
}

TEST_F(CliTest, StepPipelineMatchesRun) {
    for (std::string scheme : {"improved", "eo"}) {
        std::string store = path("store_" + scheme);
        auto s = [&](std::vector<std::string> extra) {
            std::vector<std::string> args{"step"};
            args.insert(args.end(), extra.begin(), extra.end());
            for (std::string x : {"--store-dir", store.c_str(), "--seed", kSeed}) args.push_back(x);
            return call(args);
        };
        ASSERT_EQ(s({"setup", "--scheme", scheme}).code, kExitOk);
        ASSERT_EQ(s({"outsource", "--party", "A", path("a.txt")}).code, kExitOk);
        ASSERT_EQ(s({"outsource", "--party", "B", path("b.txt")}).code, kExitOk);
        auto early = s({"retrieve", path("b.txt")});
        EXPECT_EQ(early.code, kExitIo);
        EXPECT_NE(early.err.find("result.msg"), std::string::npos);
        ASSERT_EQ(s({"delegate"}).code, kExitOk);
        ASSERT_EQ(s({"cloud"}).code, kExitOk);
        auto got = s({"retrieve", path("b.txt")});
        ASSERT_EQ(got.code, kExitOk) << got.err;
        EXPECT_EQ(got.out, "2\n3\n");

        auto ran = call({"run", path("a.txt"), path("b.txt"), "--scheme", scheme, "--seed", kSeed, "--transcript",
                         path("run_" + scheme + ".bin")});
        ASSERT_EQ(ran.code, kExitOk);
        EXPECT_EQ(slurp("run_" + scheme + ".bin"), slurp("store_" + scheme + "/transcript.bin"));
    }
}

TEST_F(CliTest, StepWithoutSetup) {
    auto r = call({"step", "delegate", "--store-dir", path("nowhere"), "--seed", kSeed});
    EXPECT_EQ(r.code, kExitIo);
    EXPECT_EQ(call({"step", "setup", "--store-dir", path("s")}).code, kExitUsage);
}
