#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "cli.hpp"
#include "fcrepair/pnml.hpp"
#include "fixtures.hpp"

using namespace fcrepair;
using namespace fcrepair::testing;
namespace fs = std::filesystem;

namespace {

struct Outcome {
    int code;
    std::string out;
    std::string err;
};

Outcome run(std::vector<std::string> args) {
    std::ostringstream out, err;
    const int code = cli::run(args, out, err);
    return {code, out.str(), err.str()};
}

fs::path scratch(const std::string& name) {
    const auto dir = fs::path(FCREPAIR_TEST_OUTPUT) / name;
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

double value_of(const std::string& text, const std::string& key) {
    const auto at = text.find("\n" + key + "=");
    REQUIRE(at != std::string::npos);
    return std::stod(text.substr(at + key.size() + 2));
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), {}};
}

std::string d(const char* f) { return data_path(f).string(); }

}  // namespace

TEST_CASE("cli repair of the application net") {
    const auto dir = scratch("repair");
    const auto r = run({"repair", d("motivating.txt"), d("application.pnml"), "-o", (dir / "out.pnml").string(), "--report",
                        (dir / "report.jsonl").string(), "--dot-out", (dir / "dot").string(), "--predict-soundness"});
    REQUIRE(r.code == cli::kOk);
    CHECK(r.out.find("separation problems: 2 (solved 2") != std::string::npos);
    CHECK(r.out.find("soundness prediction: sound") != std::string::npos);
    const auto repaired = read_pnml_file(dir / "out.pnml");
    CHECK(language_equal(reachability_graph(repaired).ts, minimize(build_prefix_tree(motivating_log()))));
    CHECK(fs::exists(dir / "dot" / "repaired.dot"));
    CHECK(fs::exists(dir / "dot" / "log_ts.dot"));

    const auto again = scratch("repair_again");
    REQUIRE(run({"repair", d("motivating.txt"), d("application.pnml"), "-o", (again / "out.pnml").string(), "--report",
                 (again / "report.jsonl").string(), "--predict-soundness"})
                .code == cli::kOk);
    CHECK(slurp(dir / "out.pnml") == slurp(again / "out.pnml"));
    CHECK(slurp(dir / "report.jsonl") == slurp(again / "report.jsonl"));
}

TEST_CASE("cli repair refuses a net that is not free-choice") {
    const auto dir = scratch("repair_nfc");
    const auto r = run({"repair", d("motivating.txt"), d("not_free_choice.pnml"), "-o", (dir / "out.pnml").string(),
                        "--report", (dir / "report.jsonl").string()});
    CHECK(r.code == cli::kPrecondition);
    CHECK_FALSE(fs::exists(dir / "out.pnml"));
    CHECK_FALSE(fs::exists(dir / "report.jsonl"));
    CHECK(r.err.find("free-choice") != std::string::npos);
}

TEST_CASE("cli exit codes for usage, parse and resource errors") {
    CHECK(run({}).code == cli::kUsage);
    CHECK(run({"frobnicate"}).code == cli::kUsage);
    CHECK(run({"repair", d("motivating.txt")}).code == cli::kUsage);
    CHECK(run({"--help"}).code == cli::kOk);
    CHECK(run({"check", d("missing.pnml")}).code == cli::kParse);
    CHECK(run({"metrics", d("application.pnml"), d("application.pnml")}).code == cli::kParse);
    CHECK(run({"check", d("application.pnml"), "--max-states", "2"}).code == cli::kResource);
    CHECK(run({"repair", d("motivating.txt"), d("application.pnml"), "--essp-budget", "0"}).code == cli::kUsage);
}

TEST_CASE("cli verbose repair traces the search") {
    const auto r = run({"repair", d("motivating.txt"), d("application.pnml"), "-v"});
    REQUIRE(r.code == cli::kOk);
    CHECK(r.out.find("<pnml>") != std::string::npos);
    CHECK(r.err.find("\"outcome\":\"solution\"") != std::string::npos);
}

TEST_CASE("cli synthesize") {
    const auto dir = scratch("synth");
    const auto r = run({"synthesize", d("motivating.txt"), "-o", (dir / "n.pnml").string()});
    REQUIRE(r.code == cli::kOk);
    CHECK(r.out.find("places=7") != std::string::npos);
    CHECK(r.out.find("precision=1") != std::string::npos);
    const auto net = read_pnml_file(dir / "n.pnml");
    for (const auto& t : motivating_log().support()) CHECK(accepts(net, t));

    std::ofstream(dir / "ab.txt") << "a,b\n";
    const auto ab = run({"synthesize", (dir / "ab.txt").string(), "-o", (dir / "ab.pnml").string()});
    REQUIRE(ab.code == cli::kOk);
    CHECK(read_pnml_file(dir / "ab.pnml").net.num_places() == 3);
}

TEST_CASE("cli check") {
    const auto ok = run({"check", d("application.pnml"), "--strict"});
    CHECK(ok.code == cli::kOk);
    CHECK(ok.out.find("workflow_net=yes") != std::string::npos);
    CHECK(ok.out.find("free_choice=yes") != std::string::npos);
    CHECK(ok.out.find("sound=yes") != std::string::npos);

    const auto dir = scratch("check");
    REQUIRE(run({"repair", d("final_extension.txt"), d("final_extension.pnml"), "-o", (dir / "n.pnml").string()}).code == cli::kOk);
    const auto bad = run({"check", (dir / "n.pnml").string()});
    CHECK(bad.code == cli::kOk);
    CHECK(bad.out.find("sound=no") != std::string::npos);
    CHECK(bad.out.find("improper completion [o,r1]") != std::string::npos);
    CHECK(run({"check", (dir / "n.pnml").string(), "--strict"}).code == cli::kPrecondition);

    const auto nwf = run({"check", d("not_workflow.pnml")});
    CHECK(nwf.out.find("workflow_net=no") != std::string::npos);
    CHECK(nwf.out.find("source") != std::string::npos);
}

TEST_CASE("cli simulate") {
    const auto a = run({"simulate", d("application_repaired.pnml"), "-n", "100", "--seed", "5"});
    const auto b = run({"simulate", d("application_repaired.pnml"), "-n", "100", "--seed", "5"});
    REQUIRE(a.code == cli::kOk);
    CHECK(a.out == b.out);
    const auto log = parse_traces_text(a.out);
    CHECK(log_stats(log).trace_occurrences == 100);
    for (const auto& t : log.support()) CHECK(motivating_log().contains(t));
}

TEST_CASE("cli metrics") {
    const auto application = run({"metrics", d("motivating.txt"), d("application.pnml")});
    REQUIRE(application.code == cli::kOk);
    CHECK(application.out.find("replay_fitness=1\n") != std::string::npos);
    CHECK(value_of(application.out, "precision") == doctest::Approx(0.5).epsilon(1e-9));
    const auto repaired_application = run({"metrics", d("motivating.txt"), d("application_repaired.pnml")});
    CHECK(repaired_application.out.find("precision=1\n") != std::string::npos);

    const auto dir = scratch("metrics");
    std::ofstream(dir / "empty.txt") << "";
    const auto empty = run({"metrics", (dir / "empty.txt").string(), d("application.pnml")});
    REQUIRE(empty.code == cli::kOk);
    CHECK(empty.out.find("trace_occurrences=0\nevent_occurrences=0\nunique_events=0\n") != std::string::npos);
    CHECK(empty.out.find("replay_fitness=1\n") != std::string::npos);

    const auto top = run({"metrics", d("motivating.txt"), d("application.pnml"), "--top-k", "1"});
    CHECK(top.out.find("distinct_traces=1\n") != std::string::npos);
}
