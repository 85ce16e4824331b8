#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <sstream>
#include <vector>

#include "mandel/cli.hpp"

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

namespace {

int cli(std::initializer_list<std::string> args) {
    std::vector<std::string> owned{"mcoeff"};
    owned.insert(owned.end(), args);
    std::vector<const char*> argv;
    for (const auto& s : owned) argv.push_back(s.c_str());
    return mandel::run_cli(static_cast<int>(argv.size()), argv.data());
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    REQUIRE(in.good());
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

struct TempDir {
    fs::path path;
    TempDir() {
        path = fs::temp_directory_path() / ("mcoeff_test_" + std::to_string(::getpid()) + "_" +
                                            std::to_string(counter++));
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
    std::string file(const std::string& name) const { return (path / name).string(); }
    static inline int counter = 0;
};

}  // namespace

TEST_CASE("coeffs writes the published table rows") {
    TempDir tmp;
    REQUIRE(cli({"coeffs", "--series", "b", "--max-m", "10", "--out", tmp.file("b.csv")}) == 0);
    CHECK(slurp(tmp.file("b.csv")) ==
          "m,numerator,denom_exponent\n"
          "0,-1,1\n"
          "1,1,3\n"
          "2,-1,2\n"
          "3,15,7\n"
          "4,0,\n"
          "5,-47,10\n"
          "6,-1,4\n"
          "7,987,15\n"
          "8,0,\n"
          "9,-3673,18\n"
          "10,1,5\n");

    REQUIRE(cli({"coeffs", "--series", "a", "--max-m", "10", "--out", tmp.file("a.csv")}) == 0);
    CHECK(slurp(tmp.file("a.csv")) ==
          "m,numerator,denom_exponent\n"
          "2,1,1\n"
          "3,1,3\n"
          "4,1,2\n"
          "5,15,7\n"
          "6,0,\n"
          "7,81,10\n"
          "8,1,3\n"
          "9,1499,15\n"
          "10,1,5\n");
}

TEST_CASE("coeffs direct method agrees and respects the cap") {
    TempDir tmp;
    REQUIRE(cli({"coeffs", "--series", "b", "--max-m", "12", "--method", "direct", "--out",
                 tmp.file("bd.csv")}) == 0);
    REQUIRE(cli({"coeffs", "--series", "b", "--max-m", "12", "--out", tmp.file("br.csv")}) == 0);
    CHECK(slurp(tmp.file("bd.csv")) == slurp(tmp.file("br.csv")));

    CHECK(cli({"coeffs", "--series", "b", "--max-m", "600", "--method", "direct", "--out",
               tmp.file("big.csv")}) == 1);
}

TEST_CASE("coeffs resume extends without rewriting the prefix") {
    TempDir tmp;
    REQUIRE(cli({"coeffs", "--series", "b", "--max-m", "24", "--out", tmp.file("b.csv")}) == 0);
    const std::string before = slurp(tmp.file("b.csv"));
    REQUIRE(cli({"coeffs", "--series", "b", "--max-m", "48", "--out", tmp.file("b.csv")}) == 0);
    const std::string after = slurp(tmp.file("b.csv"));
    CHECK(after.size() > before.size());
    CHECK(after.substr(0, before.size()) == before);

    REQUIRE(cli({"coeffs", "--series", "a", "--max-m", "24", "--out", tmp.file("a.csv")}) == 0);
    const std::string abefore = slurp(tmp.file("a.csv"));
    REQUIRE(cli({"coeffs", "--series", "a", "--max-m", "48", "--out", tmp.file("a.csv")}) == 0);
    const std::string aafter = slurp(tmp.file("a.csv"));
    CHECK(aafter.substr(0, abefore.size()) == abefore);

    // shrinking is a no-op that leaves the file alone
    REQUIRE(cli({"coeffs", "--series", "b", "--max-m", "24", "--out", tmp.file("b.csv")}) == 0);
    CHECK(slurp(tmp.file("b.csv")) == after);

    // series mismatch is refused
    CHECK(cli({"coeffs", "--series", "a", "--max-m", "64", "--out", tmp.file("b.csv")}) == 1);
}

TEST_CASE("general-degree direct export") {
    TempDir tmp;
    REQUIRE(cli({"coeffs", "--series", "a", "--max-m", "9", "--method", "direct", "--degree",
                 "3", "--out", tmp.file("a3.csv")}) == 0);
    const std::string text = slurp(tmp.file("a3.csv"));
    CHECK(text.find("m,numerator,denom_exponent\n") == 0);
    // a_{3,3} = 1/3 (power-of-d law at d = 3)
    CHECK(text.find("3,1,1\n") != std::string::npos);
    // a_{3,9} = 1/9
    CHECK(text.find("9,1,2\n") != std::string::npos);
}

TEST_CASE("verify passes on matching tables") {
    TempDir tmp;
    REQUIRE(cli({"coeffs", "--series", "b", "--max-m", "40", "--out", tmp.file("b.csv")}) == 0);
    REQUIRE(cli({"coeffs", "--series", "a", "--max-m", "40", "--out", tmp.file("a.csv")}) == 0);
    CHECK(cli({"verify", "--a", tmp.file("a.csv"), "--b", tmp.file("b.csv"), "--max-direct",
               "32", "--out", tmp.file("verify.json")}) == 0);
    const json diag = json::parse(slurp(tmp.file("verify.json")));
    CHECK(diag["pass"] == true);
    CHECK(diag["oracle_equivalence"]["mismatches"] == 0);

    // corrupt one entry: verify must fail with nonzero exit
    std::string tampered = slurp(tmp.file("b.csv"));
    const auto pos = tampered.find("3,15,7");
    REQUIRE(pos != std::string::npos);
    tampered.replace(pos, 6, "3,17,7");
    std::ofstream(tmp.file("b_bad.csv"), std::ios::binary) << tampered;
    CHECK(cli({"verify", "--a", tmp.file("a.csv"), "--b", tmp.file("b_bad.csv"), "--max-direct",
               "16", "--out", tmp.file("verify_bad.json")}) == 1);
    const json bad = json::parse(slurp(tmp.file("verify_bad.json")));
    CHECK(bad["pass"] == false);
}

TEST_CASE("valuations report") {
    TempDir tmp;
    REQUIRE(cli({"coeffs", "--series", "b", "--max-m", "128", "--out", tmp.file("b.csv")}) == 0);
    REQUIRE(cli({"valuations", "--input", tmp.file("b.csv"), "--out", tmp.file("val.json"),
                 "--slopes", "0,1"}) == 0);
    const json rep = json::parse(slurp(tmp.file("val.json")));
    CHECK(rep["tool"] == "mcoeff");
    CHECK(rep["report"]["pass"] == true);
    CHECK(rep["report"]["series"] == "b");
    CHECK(rep["input_hash"].get<std::string>().rfind("fnv1a64:", 0) == 0);
}

TEST_CASE("benford reports are byte-identical for identical configs") {
    TempDir tmp;
    REQUIRE(cli({"coeffs", "--series", "b", "--max-m", "200", "--out", tmp.file("b.csv")}) == 0);
    auto run = [&](const std::string& out) {
        REQUIRE(cli({"benford", "--input", tmp.file("b.csv"), "--component", "numerator",
                     "--seed", "31337", "--trials", "200", "--samples", "200", "--out",
                     tmp.file(out), "--plot-data", tmp.file("plots")}) == 0);
    };
    run("r1.json");
    run("r2.json");
    CHECK(slurp(tmp.file("r1.json")) == slurp(tmp.file("r2.json")));

    const json rep = json::parse(slurp(tmp.file("r1.json")));
    CHECK(rep["report"]["count"].get<long>() > 0);
    CHECK(fs::exists(tmp.path / "plots" / "running_chi2.csv"));
    CHECK(fs::exists(tmp.path / "plots" / "log_mod1.csv"));
    const std::string chi = slurp(tmp.path / "plots" / "running_chi2.csv");
    CHECK(chi.rfind("index,chi2\n", 0) == 0);

    // a different seed changes the bootstrap outcome deterministically
    REQUIRE(cli({"benford", "--input", tmp.file("b.csv"), "--component", "numerator", "--seed",
                 "7", "--trials", "200", "--samples", "200", "--out", tmp.file("r3.json")}) == 0);
    const json other = json::parse(slurp(tmp.file("r3.json")));
    CHECK(other["report"]["seed"] == 7);
}

TEST_CASE("render subcommand") {
    TempDir tmp;
    REQUIRE(cli({"render", "--out", tmp.file("m.ppm"), "--width", "64", "--height", "48",
                 "--max-iter", "80"}) == 0);
    const std::string ppm = slurp(tmp.file("m.ppm"));
    CHECK(ppm.rfind("P6\n64 48\n255\n", 0) == 0);
    CHECK(ppm.size() == std::string("P6\n64 48\n255\n").size() + 64 * 48 * 3);
}

TEST_CASE("usage errors exit with 2") {
    CHECK(cli({"coeffs", "--series", "q", "--max-m", "4", "--out", "/tmp/x.csv"}) == 2);
    CHECK(cli({"nonsense"}) == 2);
    CHECK(cli({}) == 2);
    CHECK(cli({"benford", "--input", "/nonexistent.csv", "--out", "/tmp/x.json"}) == 1);
}
