#include "doctest.h"

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "atab/ata.hpp"
#include "atab/builders.hpp"
#include "atab/cli.hpp"
#include "atab/tree.hpp"

using namespace atab;

namespace {

struct RunResult {
    int code;
    std::string out;
    std::string err;
};

RunResult cli(const std::vector<std::string>& args) {
    std::ostringstream out, err;
    int code = run(args, out, err);
    return {code, out.str(), err.str()};
}

std::filesystem::path write_temp(const std::string& name, const std::string& text) {
    auto p = std::filesystem::temp_directory_path() / name;
    std::ofstream f(p);
    f << text;
    return p;
}

const char* kPrinterText =
    "(sp (jo (lab P ($)))"
    " (sp (acq1 (lab P (rel1 ($)))) (acq1 (lab P (rel1 ($))))))";

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("version prints the tool name and number") {
    RunResult r = cli({"version"});
    CHECK(r.code == 0);
    CHECK(r.out == "atab 1.0.0\n");
    CHECK(r.err.empty());
}

TEST_CASE("help requests succeed, missing subcommands do not") {
    RunResult help = cli({"--help"});
    CHECK(help.code == 0);
    CHECK(help.out.find("build") != std::string::npos);
    CHECK(help.out.find("oracle-diff") != std::string::npos);

    RunResult bare = cli({});
    CHECK(bare.code == 2);
    CHECK_FALSE(bare.err.empty());

    RunResult unknown = cli({"check", "--bogus"});
    CHECK(unknown.code == 2);
    CHECK(unknown.err.find("error:") == 0);
}

TEST_CASE("build writes a parseable automaton") {
    RunResult r = cli({"build", "--locks", "2", "--labels", "A,B",
                       "--pairs", "A:B,B:B"});
    REQUIRE(r.code == 0);
    Ata a = parse_ata(r.out);
    CHECK(a.alphabet.count("br") == 1);
    CHECK(a.alphabet.count("acq2") == 1);
    CHECK(a.alphabet.count("labA") == 1);

    RunResult named = cli({"build", "--locks", "1", "--widget", "dfa:1"});
    REQUIRE(named.code == 0);
    CheckConfig cfg;
    cfg.lock_count = 1;
    CHECK(named.out == serialize(build_dfa(1, cfg)));

    CHECK(cli({"build", "--locks", "1", "--widget", "nonsense"}).code == 2);
    CHECK(cli({"build", "--locks", "1", "--widget", "dfa:2"}).code == 2);
}

TEST_CASE("build -o writes the file instead of stdout") {
    auto out_path = std::filesystem::temp_directory_path() / "atab_full.ata";
    std::filesystem::remove(out_path);
    RunResult r = cli({"build", "--locks", "2", "--labels", "A,B", "--pairs",
                       "A:B", "--widget", "full", "-o", out_path.string()});
    CHECK(r.code == 0);
    CHECK(r.out.empty());
    REQUIRE(std::filesystem::exists(out_path));
    std::ifstream in(out_path);
    std::stringstream buf;
    buf << in.rdbuf();
    CHECK_NOTHROW(parse_ata(buf.str()));
    std::filesystem::remove(out_path);
}

TEST_CASE("check reports SAFE with per-constituent reasons") {
    auto tree = write_temp("atab_printer.tree", kPrinterText);
    RunResult r = cli({"check", "--locks", "1", "--labels", "P", "--pairs",
                       "P:P", tree.string()});
    CHECK(r.code == 0);
    CHECK(r.out.rfind("SAFE", 0) == 0);
    CHECK(r.out.find("double final acquisition (lock 1)") != std::string::npos);
    CHECK(r.out.find("join deadlock: spawned thread never terminates") !=
          std::string::npos);
}

TEST_CASE("check reports UNSAFE with a witness and exits 1") {
    auto tree = write_temp("atab_unsafe.tree", "(sp (lab A ($)) (lab A ($)))");
    RunResult r = cli({"check", "--locks", "0", "--labels", "A", "--pairs",
                       "A:A", tree.string()});
    CHECK(r.code == 1);
    CHECK(r.out.find("UNSAFE") != std::string::npos);
    CHECK(r.out.find("witness schedule:") != std::string::npos);
}

TEST_CASE("check rejects unusable inputs with exit 2") {
    CHECK(cli({"check", "--locks", "1", "/nonexistent/file.tree"}).code == 2);

    auto tree = write_temp("atab_cfg.tree", "($)");
    // pair references a label outside the declared set
    RunResult bad_pair = cli({"check", "--locks", "2", "--labels", "A,B",
                              "--pairs", "A:C", tree.string()});
    CHECK(bad_pair.code == 2);
    CHECK(bad_pair.err.find("error:") == 0);

    auto broken = write_temp("atab_broken.tree", "(sp ($)");
    CHECK(cli({"check", "--locks", "0", broken.string()}).code == 2);
}

TEST_CASE("forest prints the br spine of the constituents") {
    auto tree = write_temp("atab_forest.tree", "(sp (lab A ($)) (lab A ($)))");
    RunResult r = cli({"forest", "--locks", "0", "--labels", "A", "--pairs",
                       "A:A", tree.string()});
    CHECK(r.code == 0);
    CHECK(r.out == "(sp (lab A) (lab A))\n");

    auto out_path = std::filesystem::temp_directory_path() / "atab_forest.out";
    std::filesystem::remove(out_path);
    RunResult f = cli({"forest", "--locks", "0", "--labels", "A", "--pairs",
                       "A:A", tree.string(), "-o", out_path.string()});
    CHECK(f.code == 0);
    REQUIRE(std::filesystem::exists(out_path));
    std::filesystem::remove(out_path);
}

TEST_CASE("oracle-diff summarizes a clean run and bounds its corpus") {
    RunResult r = cli({"oracle-diff", "--locks", "1", "--labels", "A",
                       "--pairs", "A:A", "--max-nodes", "4"});
    CHECK(r.code == 0);
    CHECK(r.out.find("0 disagreements") != std::string::npos);

    CHECK(cli({"oracle-diff", "--locks", "1", "--max-nodes", "13"}).code == 2);
}

}  // TEST_SUITE
