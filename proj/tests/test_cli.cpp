#include <doctest.h>

#include <unistd.h>

#include <cstdio>
#include <filesystem>

#include "fpbs/cli.hpp"
#include "support.hpp"

using namespace fpbs;
namespace fs = std::filesystem;

namespace {

int run(std::vector<std::string> args) {
    args.insert(args.begin(), "fpbs");
    std::vector<const char*> argv;
    argv.reserve(args.size());
    for (const auto& a : args) argv.push_back(a.c_str());
    return cli::run_cli(static_cast<int>(argv.size()), argv.data());
}

struct TempDir {
    fs::path path;
    explicit TempDir(const std::string& tag) {
        path = fs::temp_directory_path() / ("fpbs_test_" + tag + "_" +
                                            std::to_string(::getpid()));
        fs::remove_all(path);
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
};

fs::path write_instance(const fs::path& dir, const QapInstance& inst) {
    const fs::path path = dir / (inst.name + ".dat");
    std::ofstream out(path);
    out << serialize_instance(inst);
    return path;
}

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("duration parsing") {
    CHECK(cli::parse_duration_seconds("120s") == doctest::Approx(120.0));
    CHECK(cli::parse_duration_seconds("30m") == doctest::Approx(1800.0));
    CHECK(cli::parse_duration_seconds("0.5h") == doctest::Approx(1800.0));
    CHECK(cli::parse_duration_seconds("45") == doctest::Approx(45.0));
    CHECK_THROWS(cli::parse_duration_seconds("abc"));
    CHECK_THROWS(cli::parse_duration_seconds("-3s"));
}

TEST_CASE("solve on a missing instance fails with a nonzero exit") {
    CHECK(run({"solve", "--instance", "definitely_missing.dat", "--iters", "1"}) != 0);
}

TEST_CASE("unknown flags and missing subcommands fail") {
    CHECK(run({"solve", "--no-such-flag"}) != 0);
    CHECK(run({}) != 0);
}

TEST_CASE("solve writes solution and record, deterministically") {
    TempDir tmp("solve");
    const QapInstance inst = test::make_random_instance(7100, 9);
    const fs::path dat = write_instance(tmp.path, inst);
    const auto args = [&](const fs::path& out) {
        return std::vector<std::string>{
            "solve",   "--instance", dat.string(), "--iters", "4",
            "--seed",  "7",          "--k",        "3",       "--m",
            "2",       "--theta",    "2",          "--bls-max-iter", "6",
            "--out-dir", out.string()};
    };
    REQUIRE(run(args(tmp.path / "a")) == 0);
    REQUIRE(run(args(tmp.path / "b")) == 0);
    const fs::path sol = tmp.path / "a" / (inst.name + ".sol");
    const fs::path json_a = tmp.path / "a" / (inst.name + ".run.json");
    const fs::path json_b = tmp.path / "b" / (inst.name + ".run.json");
    REQUIRE(fs::exists(sol));
    REQUIRE(fs::exists(json_a));
    CHECK(read_text_file(json_a) == read_text_file(json_b));

    const SolutionFile parsed = read_solution(read_text_file(sol));
    CHECK(parsed.n == 9);
    CHECK(parsed.value == full_evaluate(inst, parsed.pi));
}

TEST_CASE("solve can dump the elite pool for analysis") {
    TempDir tmp("pool");
    const QapInstance inst = test::make_random_instance(7200, 9);
    const fs::path dat = write_instance(tmp.path, inst);
    const fs::path pool_dir = tmp.path / "pool";
    REQUIRE(run({"solve", "--instance", dat.string(), "--iters", "2", "--seed", "3",
                 "--k", "4", "--m", "2", "--bls-max-iter", "6", "--out-dir",
                 (tmp.path / "out").string(), "--dump-pool-dir",
                 pool_dir.string()}) == 0);
    int solutions = 0;
    for (const auto& entry : fs::directory_iterator(pool_dir))
        if (entry.path().extension() == ".sol") ++solutions;
    CHECK(solutions == 4);
    REQUIRE(fs::exists(pool_dir / "transactions.txt"));
    // 4 transactions of 9 items each
    const std::string dump = read_text_file(pool_dir / "transactions.txt");
    CHECK(std::count(dump.begin(), dump.end(), '\n') == 4);

    // the dumped pool feeds the analyze command
    CHECK(run({"analyze", "--pool-dir", pool_dir.string(), "--out-dir",
               (tmp.path / "out").string()}) == 0);
    REQUIRE(fs::exists(tmp.path / "out" / "similarity.csv"));
    const std::string csv = read_text_file(tmp.path / "out" / "similarity.csv");
    CHECK(csv.find("sim_max") != std::string::npos);
}

TEST_CASE("bench writes run records and a csv report") {
    TempDir tmp("bench");
    const QapInstance a = test::make_random_instance(7300, 8);
    const QapInstance b = test::make_random_instance(7301, 8);
    const fs::path da = write_instance(tmp.path, a);
    const fs::path db = write_instance(tmp.path, b);
    const fs::path out = tmp.path / "out";
    REQUIRE(run({"bench", "--instances", da.string(), db.string(), "--runs", "2",
                 "--iters", "2", "--seed", "11", "--k", "3", "--m", "2",
                 "--bls-max-iter", "5", "--workers", "2", "--format", "csv",
                 "--out-dir", out.string()}) == 0);
    REQUIRE(fs::exists(out / "report.csv"));
    REQUIRE(fs::exists(out / "runs.csv"));
    const std::string runs_csv = read_text_file(out / "runs.csv");
    CHECK(runs_csv.rfind("instance,seed,best,xpd,", 0) == 0);
    CHECK(std::count(runs_csv.begin(), runs_csv.end(), '\n') == 5);  // header + 4 runs
    int records = 0;
    for (const auto& entry : fs::directory_iterator(out / "runs"))
        if (entry.path().extension() == ".json") ++records;
    CHECK(records == 4);

    // the run directory feeds the sweep analyzer
    CHECK(run({"analyze", "--runs-dir", (out / "runs").string(), "--out-dir",
               out.string()}) == 0);
    REQUIRE(fs::exists(out / "sweep.csv"));
    const std::string sweep = read_text_file(out / "sweep.csv");
    CHECK(sweep.rfind("instance,m,seed,best,xpd", 0) == 0);
    CHECK(std::count(sweep.begin(), sweep.end(), '\n') == 5);
}

TEST_CASE("FPBS_OUT_DIR provides the default output directory") {
    TempDir tmp("env");
    const QapInstance inst = test::make_random_instance(7500, 8);
    const fs::path dat = write_instance(tmp.path, inst);
    const fs::path out = tmp.path / "from_env";
    setenv("FPBS_OUT_DIR", out.c_str(), 1);
    const int rc = run({"solve", "--instance", dat.string(), "--iters", "1", "--seed",
                        "2", "--k", "3", "--m", "2", "--bls-max-iter", "6"});
    unsetenv("FPBS_OUT_DIR");
    REQUIRE(rc == 0);
    CHECK(fs::exists(out / (inst.name + ".sol")));
}

TEST_CASE("config file values are overridden by flags") {
    TempDir tmp("config");
    const QapInstance inst = test::make_random_instance(7400, 8);
    const fs::path dat = write_instance(tmp.path, inst);
    const fs::path config = tmp.path / "fpbs.conf";
    {
        std::ofstream out(config);
        out << "k=3\nm=2\nbls-max-iter=5\nseed=9\n";
    }
    const fs::path out_a = tmp.path / "a";
    const fs::path out_b = tmp.path / "b";
    REQUIRE(run({"solve", "--instance", dat.string(), "--iters", "2", "--config",
                 config.string(), "--out-dir", out_a.string()}) == 0);
    REQUIRE(run({"solve", "--instance", dat.string(), "--iters", "2", "--config",
                 config.string(), "--seed", "10", "--out-dir", out_b.string()}) == 0);
    const auto ja = nlohmann::json::parse(
        read_text_file(out_a / (inst.name + ".run.json")));
    const auto jb = nlohmann::json::parse(
        read_text_file(out_b / (inst.name + ".run.json")));
    CHECK(ja["seed"] == 9);
    CHECK(jb["seed"] == 10);
    CHECK(ja["params"]["k"] == 3);
}

}  // TEST_SUITE
