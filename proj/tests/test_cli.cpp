#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "wfctl/analysis/schedule.hpp"
#include "wfctl/cli/cli.hpp"
#include "wfctl/workflow/build.hpp"
#include "wfctl/workflow/format.hpp"

using namespace wfctl;
namespace fs = std::filesystem;

namespace {

const std::string data = std::string(WFCTL_DATA_DIR) + "/case_study";
const std::string golden_dir = std::string(WFCTL_DATA_DIR) + "/../tests/golden";

cli::CommandOutcome run(std::vector<std::string> args) { return cli::execute(args); }

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

std::string cs(const std::string& file) { return data + "/" + file; }

fs::path scratch(const std::string& name) {
    const auto dir = fs::temp_directory_path() / ("wfctl_cli_" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

std::string write(const fs::path& dir, const std::string& name, const std::string& content) {
    std::ofstream(dir / name, std::ios::binary) << content;
    return (dir / name).string();
}

struct Golden {
    const char* name;
    std::vector<std::string> args;
    int exit_code;
};

std::vector<Golden> goldens() {
    return {
        {"validate", {"validate", cs("A1.wf"), cs("A2.wf"), cs("A3.wf"), cs("pool.txt")}, 0},
        {"compose", {"compose", data}, 0},
        {"reach", {"reach", data}, 0},
        {"deadlocks", {"deadlocks", data}, 0},
        {"forbidden", {"forbidden", data, "--forbidden", cs("forbidden.txt")}, 0},
        {"synthesize", {"synthesize", data, "--forbidden", cs("forbidden.txt")}, 0},
        {"schedules", {"schedules", data, "--weights", cs("weights.txt")}, 0},
        {"rank", {"rank", data, "--weights", cs("weights.txt")}, 0},
        {"simulate", {"simulate", data, "--scenario", cs("nominal.txt")}, 0},
        {"simulate_r1", {"simulate", data, "--scenario", cs("breakdown_r1.txt")}, 0},
        {"simulate_r2", {"simulate", data, "--scenario", cs("breakdown_r2.txt")}, 1},
    };
}

}  // namespace

TEST_CASE("case-study commands match their golden output") {
    for (const auto& g : goldens()) {
        CAPTURE(g.name);
        const auto first = run(g.args);
        CHECK(first.exit_code == g.exit_code);
        CHECK(first.err.empty());
        CHECK(first.out == slurp(golden_dir + "/" + g.name + ".txt"));
        CHECK(run(g.args).out == first.out);
    }
}

TEST_CASE("a single valid workflow prints ok") {
    const auto r = run({"validate", cs("A1.wf"), cs("pool.txt")});
    CHECK(r.exit_code == 0);
    CHECK(r.out == "ok\n");
}

TEST_CASE("schedules output equals the analysis module") {
    const auto specs = workflow::parse_workflows(slurp(cs("A1.wf")) + slurp(cs("A2.wf")) + slurp(cs("A3.wf")));
    const auto pool = workflow::parse_pool(slurp(cs("pool.txt")));
    const workflow::InstanceCounts counts{{"A1", 1}, {"A2", 1}, {"A3", 1}};
    const auto net = workflow::compose_global(specs, pool, counts);
    const auto all = analysis::enumerate_schedules(net, workflow::job_table(specs), workflow::completion_predicate(net));
    const auto ranked = analysis::rank_schedules(all, {{"A1", 1}, {"A2", 1}, {"A3", 1}});
    std::string expected = "schedules " + std::to_string(all.size()) + "\n";
    for (std::size_t i = 0; i < ranked.size(); ++i) {
        expected += "cost " + std::to_string(i + 1) + " " + analysis::format_cost(ranked[i].second) + "\n";
        expected += analysis::format_schedule_lines(i + 1, ranked[i].first);
    }
    CHECK(run({"schedules", data, "--weights", cs("weights.txt")}).out == expected);
    // Without a weights file every activity weighs 1.
    CHECK(run({"schedules", data}).out == expected);
}

TEST_CASE("--out writes the report to a file") {
    const auto dir = scratch("out");
    const auto target = (dir / "net.txt").string();
    const auto r = run({"compose", data, "--out", target});
    CHECK(r.exit_code == 0);
    CHECK(r.out.empty());
    CHECK(slurp(target) == slurp(golden_dir + "/compose.txt"));
    fs::remove_all(dir);
}

TEST_CASE("kb lifecycle through the command line") {
    const auto dir = scratch("kb");
    const auto kb = (dir / "kb").string();
    auto r = run({"kb", "register", cs("A1.wf"), cs("A2.wf"), cs("A3.wf"), "--kb", kb});
    CHECK(r.exit_code == 0);
    CHECK(r.out == "registered A1\nregistered A2\nregistered A3\n");
    r = run({"kb", "instantiate", cs("pool.txt"), cs("instances.txt"), "--kb", kb});
    CHECK(r.out == "model 1\n");
    CHECK(slurp(kb + "/dynamic/1.net") == slurp(golden_dir + "/compose.txt"));
    CHECK(run({"kb", "list", "--kb", kb}).out ==
          "template A1 jobs 3\ntemplate A2 jobs 3\ntemplate A3 jobs 3\nmodel 1 A1=1 A2=1 A3=1\n");
    CHECK(run({"kb", "retire", "1", "--kb", kb}).out == "retired 1\n");
    CHECK(run({"kb", "list", "--kb", kb}).out == "template A1 jobs 3\ntemplate A2 jobs 3\ntemplate A3 jobs 3\n");
    fs::remove_all(dir);
}

TEST_CASE("exit codes follow the contract") {
    const auto dir = scratch("codes");
    const auto bad_spec = write(dir, "bad.wf", "workflow B\njob X duration 1 uses R9\n");
    const auto broken_syntax = write(dir, "syntax.wf", "workflow B\njob X during 1\n");
    const auto reachable = write(dir, "reachable.txt", "mark(exec_J11) >= 1\n");
    const auto at_root = write(dir, "root.txt", "mark(pending_J11) >= 1\n");
    const auto bad_expr = write(dir, "expr.txt", "mark(exec_J11) >=\n");
    const auto partial = write(dir, "partial.txt", "weight A1 1\n");
    const auto kb = (dir / "kb").string();
    run({"kb", "register", cs("A1.wf"), "--kb", kb});

    struct Row {
        std::vector<std::string> args;
        int code;
    };
    const std::vector<Row> table{
        {{"frobnicate"}, 2},
        {{}, 2},
        {{"--help"}, 0},
        {{"validate", "--bogus", data}, 2},
        {{"validate", bad_spec, cs("pool.txt")}, 1},
        {{"validate", broken_syntax}, 2},
        {{"validate", (dir / "missing.wf").string()}, 2},
        {{"compose", cs("A1.wf")}, 2},  // no pool
        {{"reach", data, "--node-cap", "10"}, 1},
        {{"reach", data, "--node-cap", "ten"}, 2},
        {{"forbidden", data}, 2},
        {{"forbidden", data, "--forbidden", reachable}, 1},
        {{"forbidden", data, "--forbidden", bad_expr}, 2},
        {{"synthesize", data, "--forbidden", at_root}, 1},
        {{"schedules", data, "--weights", partial}, 1},
        {{"simulate", data, "--scenario", cs("breakdown_r2.txt")}, 1},
        {{"kb", "list"}, 2},
        {{"kb", "register", cs("A1.wf"), "--kb", kb}, 1},
        {{"kb", "retire", "7", "--kb", kb}, 1},
        {{"kb", "retire", "x", "--kb", kb}, 2},
        {{"kb", "instantiate", cs("pool.txt"), "--kb", kb, "--instances", cs("instances.txt")}, 1},
    };
    for (const auto& row : table) {
        std::string joined;
        for (const auto& a : row.args) joined += a + " ";
        CAPTURE(joined);
        const auto r = run(row.args);
        CHECK(r.exit_code == row.code);
        // Findings (diagnostics, forbidden states, blocked products) go to stdout.
        if (r.exit_code == 2) CHECK_FALSE(r.err.empty());
    }
    fs::remove_all(dir);
}
