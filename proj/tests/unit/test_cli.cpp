#include <catch_amalgamated.hpp>

#include <cstdlib>
#include <filesystem>
#include <initializer_list>
#include <sstream>
#include <string>
#include <vector>

#include "effortrank/cli.hpp"
#include "temp_dir.hpp"

using namespace effortrank;
namespace fs = std::filesystem;

namespace {

struct Invocation {
    int status = -1;
    std::string out, err;
};

Invocation invoke(std::initializer_list<std::string> args) {
    std::vector<std::string> storage = {"effortrank"};
    storage.insert(storage.end(), args.begin(), args.end());
    std::vector<const char*> argv;
    for (const auto& a : storage) argv.push_back(a.c_str());
    std::ostringstream out, err;
    Invocation r;
    r.status = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
    r.out = out.str();
    r.err = err.str();
    return r;
}

std::string slurp(const fs::path& p) { return text::read_file(p.string()); }

} // namespace

TEST_CASE("help lists subcommands and flag defaults", "[cli]") {
    const auto top = invoke({"--help"});
    CHECK(top.status == cli::kExitOk);
    for (const char* sub : {"run", "sweep-zeta", "synth", "stats", "minor-chaos-demo"})
        CHECK(top.out.find(sub) != std::string::npos);

    const auto run = invoke({"run", "--help"});
    CHECK(run.status == cli::kExitOk);
    CHECK(run.out.find("--manifest") != std::string::npos);
    CHECK(run.out.find("0.05") != std::string::npos);
    CHECK(run.out.find(cli::kDefaultLearners) != std::string::npos);
    CHECK(run.out.find("EFFORTRANK_SEED") != std::string::npos);
}

TEST_CASE("bad invocations exit with status 1", "[cli]") {
    CHECK(invoke({}).status == cli::kExitConfig);
    CHECK(invoke({"frobnicate"}).status == cli::kExitConfig);
    CHECK(invoke({"minor-chaos-demo", "--verbose"}).status == cli::kExitConfig);
    CHECK(invoke({"minor-chaos-demo", "--zeta", "1.5"}).status == cli::kExitConfig);

    TempDir dir("cli-bad");
    const auto missing = invoke({"run", "--out", dir.file("o")});
    CHECK(missing.status == cli::kExitConfig);
    CHECK(missing.err.find("--manifest") != std::string::npos);
    CHECK(missing.out.empty());

    const auto manifest = dir.write("m.csv", "SYNTH,x-train,x-test\n");
    const auto unresolved = invoke({"run", "--manifest", manifest, "--data-dir", dir.file("none"), "--out", dir.file("o")});
    CHECK(unresolved.status == cli::kExitConfig);
    CHECK(unresolved.err.find("SYNTH/x-train") != std::string::npos);

    CHECK(invoke({"run", "--manifest", manifest, "--out", dir.file("o"), "--learners", "xgb"}).status ==
          cli::kExitConfig);
    CHECK(invoke({"run", "--manifest", manifest, "--out", dir.file("o"), "--zeta", "abc"}).status == cli::kExitConfig);
}

TEST_CASE("minor-chaos-demo prints both walk-throughs", "[cli]") {
    const auto r = invoke({"minor-chaos-demo"});
    REQUIRE(r.status == cli::kExitOk);
    CHECK(r.out.find("prob_loc before recall@20% = 1.0000") != std::string::npos);
    CHECK(r.out.find("prob_loc after recall@20% = 0.6667") != std::string::npos);
    CHECK(r.out.find("ea_z before recall@20% = 1.0000") != std::string::npos);
    CHECK(r.out.find("ea_z after recall@20% = 1.0000") != std::string::npos);
    CHECK(r.out.find("0.0025") != std::string::npos);
    CHECK(r.out.find("0.00125") != std::string::npos);
}

TEST_CASE("synth, run, sweep-zeta and stats work end to end", "[cli]") {
    TempDir dir("cli-flow");
    const auto data = dir.file("data");
    const auto synth = invoke({"synth", "--pairs", "3", "--n", "60", "--defect-rate", "0.2", "--loc-skew", "2",
                               "--loc-skew-max", "20", "--seed", "7", "--out", data});
    REQUIRE(synth.status == cli::kExitOk);
    const auto manifest = (fs::path(data) / "manifest.csv").string();
    REQUIRE(fs::exists(manifest));
    CHECK(fs::exists(fs::path(data) / "SYNTH" / "synth-01-train.csv"));

    const auto run_to = [&](const std::string& out) {
        return invoke({"run", "--manifest", manifest, "--data-dir", data, "--learners", "lr,nb,c50",
                       "--seed", "42", "--out", out});
    };
    const auto a = run_to(dir.file("a"));
    REQUIRE(a.status == cli::kExitOk);
    CHECK(a.err.empty());
    for (const char* f : {"config.txt", "results.csv", "summary.txt", "comparisons.csv", "means_by_learner.csv"})
        CHECK(fs::exists(fs::path(dir.file("a")) / f));
    CHECK(slurp(fs::path(dir.file("a")) / "config.txt").find("seed = 42") != std::string::npos);

    const auto b = run_to(dir.file("b"));
    REQUIRE(b.status == cli::kExitOk);
    for (const auto& entry : fs::recursive_directory_iterator(dir.file("a"))) {
        if (!entry.is_regular_file() || entry.path().filename() == "config.txt") continue;
        const auto rel = fs::relative(entry.path(), dir.file("a"));
        INFO(rel.string());
        CHECK(slurp(entry.path()) == slurp(fs::path(dir.file("b")) / rel));
    }

    const auto results = (fs::path(dir.file("a")) / "results.csv").string();
    const auto stats = invoke({"stats", "--results", results, "--out", dir.file("s")});
    REQUIRE(stats.status == cli::kExitOk);
    CHECK(stats.out.find("ea_z") != std::string::npos);
    CHECK(slurp(fs::path(dir.file("s")) / "summary.txt") == slurp(fs::path(dir.file("a")) / "summary.txt"));

    const auto sweep = invoke({"sweep-zeta", "--manifest", manifest, "--data-dir", data, "--learners", "lr",
                               "--strategies", "ea_z", "--grid", "0.01,0.05", "--out", dir.file("z")});
    REQUIRE(sweep.status == cli::kExitOk);
    const auto rt = read_result_table((fs::path(dir.file("z")) / "results.csv").string());
    CHECK(rt.rows.size() == 6);
    CHECK(fs::exists(fs::path(dir.file("z")) / "zeta_sweep.csv"));
}

TEST_CASE("configuration files and the seed environment variable", "[cli]") {
    TempDir dir("cli-config");
    const auto data = dir.file("data");
    REQUIRE(invoke({"synth", "--n", "40", "--defect-rate", "0.25", "--out", data}).status == cli::kExitOk);
    const auto manifest = (fs::path(data) / "manifest.csv").string();
    const auto cfg = dir.write("run.cfg", "manifest = " + manifest + "\ndata_dir = " + data +
                                              "\nlearners = nb\nstrategies = ea_z,manual_up\nzeta = 0.1\n");

    ::setenv("EFFORTRANK_SEED", "977", 1);
    const auto env = invoke({"run", "--config", cfg, "--out", dir.file("env")});
    const auto flag = invoke({"run", "--config", cfg, "--seed", "5", "--zeta", "0.02", "--out", dir.file("flag")});
    ::unsetenv("EFFORTRANK_SEED");
    REQUIRE(env.status == cli::kExitOk);
    REQUIRE(flag.status == cli::kExitOk);
    const auto env_cfg = slurp(fs::path(dir.file("env")) / "config.txt");
    CHECK(env_cfg.find("seed = 977") != std::string::npos);
    CHECK(env_cfg.find("zeta = 0.1\n") != std::string::npos);
    CHECK(env_cfg.find("learners = nb\n") != std::string::npos);
    const auto flag_cfg = slurp(fs::path(dir.file("flag")) / "config.txt");
    CHECK(flag_cfg.find("seed = 5\n") != std::string::npos);
    CHECK(flag_cfg.find("zeta = 0.02\n") != std::string::npos);

    const auto bad = dir.write("bad.cfg", "colour = blue\n");
    CHECK(invoke({"run", "--config", bad, "--out", dir.file("x")}).status == cli::kExitConfig);
}

TEST_CASE("runtime failures exit with status 2", "[cli]") {
    TempDir dir("cli-runtime");
    const auto data = dir.file("data");
    REQUIRE(invoke({"synth", "--n", "40", "--defect-rate", "0.25", "--out", data}).status == cli::kExitOk);
    const auto blocker = dir.write("blocker", "not a directory");
    const auto r = invoke({"run", "--manifest", (fs::path(data) / "manifest.csv").string(), "--data-dir", data,
                           "--learners", "nb", "--out", blocker});
    CHECK(r.status == cli::kExitRuntime);
    CHECK_FALSE(r.err.empty());
}
