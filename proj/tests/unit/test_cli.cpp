#include <doctest.h>

#include <filesystem>
#include <sstream>

#include <json.hpp>

#include "magicsim/cli.hpp"
#include "magicsim/fixtures.hpp"
#include "magicsim/keyvalue.hpp"
#include "support/oracles.hpp"

using namespace magicsim;
namespace fs = std::filesystem;

namespace {

struct Result {
    int code;
    std::string out;
    std::string err;
};

Result cli(std::vector<std::string> args) {
    args.insert(args.begin(), "magicsim");
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    std::ostringstream out, err;
    const int code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
    return {code, out.str(), err.str()};
}

const std::string kHalfAdder = MAGICSIM_FIXTURE_DIR "/half_adder.json";
const std::string kC17 = MAGICSIM_FIXTURE_DIR "/c17.json";

std::size_t line_count(const std::string& s) {
    std::size_t n = 0;
    for (char c : s) n += c == '\n';
    return n;
}

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("exit codes by stage") {
    testsupport::TempDir dir("codes");
    const std::string broken = (dir.path() / "broken.json").string();
    write_text_file(broken, "{ \"Row size\": ");
    CHECK(cli({"gen", broken, "-o", dir.str()}).code == kExitParse);

    const std::string overlap = (dir.path() / "overlap.json").string();
    write_text_file(overlap, "{\"Row size\": 3, \"Number of Gates\": 1, \"Inputs\": \"{A(0)}\", \"Outputs\": \"{Y(1)}\","
                             "\"Reuse cycles\": 0, \"Execution sequence\": {\"T0\": \"Init{'Y(1)'}\","
                             "\"T1\": \"Y(1)=inv1{Y(1)}\"}}");
    const Result bad = cli({"gen", overlap, "-o", dir.str()});
    CHECK(bad.code == kExitValidate);
    CHECK(bad.err.find("T1") != std::string::npos);

    CHECK(cli({"gen", (dir.path() / "missing.json").string()}).code == kExitIo);
    CHECK(cli({"gen", kHalfAdder, "--pattern", "111", "-o", dir.str()}).code == kExitConfig);
    CHECK(cli({"gen", kHalfAdder, "--kernel", "gpu", "-o", dir.str()}).code == kExitConfig);
    CHECK(cli({"gen", kHalfAdder, "--row-size", "2", "-o", dir.str()}).code == kExitConfig);
    CHECK(cli({"frobnicate"}).code == kExitUsage);
    CHECK(cli({}).code == kExitUsage);

    ExitCode none = kExitOk;
    CHECK(exit_code_for(ParseError("x", 0)) == kExitParse);
    CHECK(exit_code_for(SimError("x")) == kExitSim);
    CHECK(none == 0);
}

TEST_CASE("gen writes the full tree") {
    testsupport::TempDir dir("gen");
    const Result r = cli({"gen", kHalfAdder, "--pattern", "I3", "-o", dir.str()});
    REQUIRE(r.code == kExitOk);
    CHECK(line_count(r.out) == 17);
    for (const char* f : {"crossbar.scs", "switches.scs", "sources.scs", "simparams.scs", "main.scs", "energy.ocn",
                          "pwl/r0.txt", "pwl/c4.txt", "pwl/s4.txt"})
        CHECK(fs::exists(dir.path() / f));
    CHECK(testsupport::read_file(dir.path() / "simparams.scs").find("parameters in0=2 in1=0") != std::string::npos);
}

TEST_CASE("a config file feeds the same fields as flags") {
    testsupport::TempDir dir("cfg");
    const std::string ini = (dir.path() / "run.ini").string();
    write_text_file(ini, "[array]\nrow_size = 8\n");
    REQUIRE(cli({"gen", kHalfAdder, "--config", ini, "-o", (dir.path() / "a").string()}).code == kExitOk);
    CHECK(testsupport::read_file(dir.path() / "a" / "crossbar.scs").find(" c7") != std::string::npos);
    // Flags override the file.
    REQUIRE(cli({"gen", kHalfAdder, "--config", ini, "--row-size", "6", "-o", (dir.path() / "b").string()}).code ==
            kExitOk);
    CHECK(testsupport::read_file(dir.path() / "b" / "crossbar.scs").find(" c7") == std::string::npos);

    write_text_file(ini, "[array]\nrows = 8\n");
    const Result bad = cli({"gen", kHalfAdder, "--config", ini, "-o", dir.str()});
    CHECK(bad.code == kExitConfig);
    CHECK(bad.err.find("run.ini:2") != std::string::npos);
}

TEST_CASE("sim verifies and writes its outputs") {
    testsupport::TempDir dir("sim");
    const Result r = cli({"sim", kHalfAdder, "--pattern", "10", "--trace-decimation", "50", "-o", dir.str()});
    REQUIRE(r.code == kExitOk);
    CHECK(r.out.find("10: pass S=1 Cy=0") != std::string::npos);
    for (const char* f : {"trace.csv", "summary.json", "energy.csv", "energy.json", "cumulative_energy.csv",
                          "verification.json"})
        CHECK(fs::exists(dir.path() / f));
    const auto v = nlohmann::json::parse(testsupport::read_file(dir.path() / "verification.json"));
    CHECK(v.at("pass") == true);

    const Result sweep = cli({"sim", kHalfAdder, "--sweep-patterns", "00,01,10,11", "--trace-decimation", "100",
                              "-o", (dir.path() / "sweep").string()});
    CHECK(sweep.code == kExitOk);
    for (const char* p : {"00", "01", "10", "11"}) CHECK(fs::exists(dir.path() / "sweep" / p / "energy.json"));

    const Result weak = cli({"sim", kHalfAdder, "--pattern", "00", "--v-op", "0.3", "-o", (dir.path() / "weak").string()});
    CHECK(weak.code == kExitVerify);
    CHECK(weak.out.find("FAIL") != std::string::npos);
}

TEST_CASE("energy table") {
    const Result r = cli({"energy-table", kHalfAdder, kC17, "--trace-decimation", "1000"});
    REQUIRE(r.code == kExitOk);
    std::istringstream lines(r.out);
    std::string header, ha, c17;
    std::getline(lines, header);
    std::getline(lines, ha);
    std::getline(lines, c17);
    CHECK(header.rfind("circuit,PI/PO,cycles,NOT,NOR,reinit,I1_exec_pJ", 0) == 0);
    CHECK(ha.rfind("half_adder,2/2,7,2,3,1,", 0) == 0);
    CHECK(c17.rfind("c17,5/2,14,7,6,0,", 0) == 0);

    const Result empty = cli({"energy-table"});
    CHECK(empty.code == kExitOk);
    CHECK(line_count(empty.out) == 1);
}

TEST_CASE("help lists the option groups") {
    const Result r = cli({"sim", "--help"});
    CHECK(r.code == kExitOk);
    for (const auto& s : kConfigSections) CHECK(r.out.find(s.group) != std::string::npos);
    CHECK(r.out.find("--v-op") != std::string::npos);
    CHECK(r.out.find("--sigma-r-on") != std::string::npos);
}

TEST_CASE("seeded variation is reproducible") {
    testsupport::TempDir dir("var");
    const std::vector<std::string> common = {"sim", kHalfAdder, "--pattern", "11", "--seed", "3", "--sigma-r-on",
                                             "0.05", "--sigma-k-set", "0.02", "--trace-decimation", "100", "-o"};
    auto with_out = [&](const std::string& sub) {
        auto a = common;
        a.push_back((dir.path() / sub).string());
        return a;
    };
    REQUIRE(cli(with_out("a")).code == kExitOk);
    REQUIRE(cli(with_out("b")).code == kExitOk);
    CHECK(testsupport::read_file(dir.path() / "a" / "energy.csv") ==
          testsupport::read_file(dir.path() / "b" / "energy.csv"));
}

TEST_CASE("fixtures subcommand reproduces the committed files") {
    testsupport::TempDir dir("fix");
    const Result r = cli({"fixtures", "-o", dir.str()});
    REQUIRE(r.code == kExitOk);
    for (const char* f : {"half_adder.json", "half_adder.tt", "c17.json", "c17.tt"})
        CHECK(testsupport::read_file(dir.path() / f) == testsupport::read_file(fs::path(MAGICSIM_FIXTURE_DIR) / f));
}

TEST_CASE("plan names come from file stems") {
    CHECK(plan_name_from_path("a/b/c17.json") == "c17");
    CHECK(plan_name_from_path("half_adder.json") == "half_adder");
}

}  // TEST_SUITE
