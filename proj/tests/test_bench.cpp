#include <doctest.h>

#include <set>

#include "fpbs/bench.hpp"
#include "support.hpp"

using namespace fpbs;

namespace {

BenchOptions quick_options(std::uint64_t master_seed, int runs) {
    BenchOptions options;
    options.runs = runs;
    options.workers = 1;
    options.params.budget = Budget::iters(3);
    options.params.k = 3;
    options.params.m = 2;
    options.params.theta = 2;
    options.params.max_no_update = 2;
    options.params.bls.max_iter = 6;
    options.params.seed = master_seed;
    return options;
}

BkvRegistry registry_for(const std::vector<QapInstance>& instances) {
    std::string csv = "name,bkv\n";
    for (const auto& inst : instances) {
        Permutation pi;
        csv += inst.name + "," +
               std::to_string(test::exhaustive_optimum(inst, &pi)) + "\n";
    }
    return BkvRegistry::from_csv(csv);
}

}  // namespace

TEST_SUITE("bench") {

TEST_CASE("derived run seeds are deterministic and collision-free") {
    std::set<std::uint64_t> seen;
    for (const auto* name : {"tai40a", "sko72", "x"})
        for (int j = 0; j < 50; ++j)
            CHECK(seen.insert(derive_run_seed(7, name, j)).second);
    CHECK(derive_run_seed(7, "tai40a", 3) == derive_run_seed(7, "tai40a", 3));
    CHECK(derive_run_seed(7, "tai40a", 3) != derive_run_seed(8, "tai40a", 3));
}

TEST_CASE("report aggregates deviations with ordered statistics") {
    const std::vector<QapInstance> instances = {test::make_random_instance(21, 7),
                                                test::make_random_instance(22, 7)};
    const BkvRegistry registry = registry_for(instances);
    std::vector<std::vector<RunRecord>> records;
    const BenchmarkReport report =
        run_benchmark(instances, registry, quick_options(5, 4), &records);

    REQUIRE(report.rows.size() == 2);
    double bpd_sum = 0, apd_sum = 0, wpd_sum = 0;
    for (const auto& row : report.rows) {
        REQUIRE(row.bkv.has_value());
        CHECK(row.runs == 4);
        CHECK(row.bpd <= row.apd);
        CHECK(row.apd <= row.wpd);
        CHECK(row.hits <= row.runs);
        CHECK(row.bpd >= 0.0);  // cannot beat an exhaustive optimum
        bpd_sum += row.bpd;
        apd_sum += row.apd;
        wpd_sum += row.wpd;
    }
    CHECK(report.avg_bpd == doctest::Approx(bpd_sum / 2));
    CHECK(report.avg_apd == doctest::Approx(apd_sum / 2));
    CHECK(report.avg_wpd == doctest::Approx(wpd_sum / 2));
    REQUIRE(records.size() == 2);
    CHECK(records[0].size() == 4);
}

TEST_CASE("a single run collapses best, average, and worst") {
    const std::vector<QapInstance> instances = {test::make_random_instance(31, 7)};
    const BenchmarkReport report =
        run_benchmark(instances, registry_for(instances), quick_options(6, 1));
    const auto& row = report.rows.front();
    CHECK(row.bpd == doctest::Approx(row.apd));
    CHECK(row.apd == doctest::Approx(row.wpd));
}

TEST_CASE("rows that always reach the bkv render as 0.000 with full hits") {
    std::vector<QapInstance> instances = {test::make_random_instance(41, 8)};
    const BkvRegistry registry = registry_for(instances);
    BenchOptions options = quick_options(7, 3);
    options.params.budget = Budget::wall(10.0);
    options.stop_at_bkv = true;
    options.params.bls.max_iter = 8;
    const BenchmarkReport report = run_benchmark(instances, registry, options);
    const auto& row = report.rows.front();
    CHECK(row.hits == 3);
    CHECK(row.bpd == doctest::Approx(0.0));
    CHECK(report.as_table().find("0.000(3)") != std::string::npos);
}

TEST_CASE("csv, table, and json render the same in-memory report") {
    const std::vector<QapInstance> instances = {test::make_random_instance(51, 7),
                                                test::make_random_instance(52, 7)};
    const BenchmarkReport report =
        run_benchmark(instances, registry_for(instances), quick_options(8, 2));
    const std::string csv = report.as_csv();
    CHECK(csv.rfind("instance,bkv,runs,", 0) == 0);
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 3);  // header + 2 rows
    const std::string table = report.as_table();
    for (const auto& row : report.rows) {
        CHECK(csv.find(row.name) != std::string::npos);
        CHECK(table.find(row.name) != std::string::npos);
    }
    const auto j = report.as_json();
    CHECK(j["rows"].size() == 2);
    CHECK(j["avg"]["bpd"].get<double>() == doctest::Approx(report.avg_bpd));
}

TEST_CASE("worker counts do not change results") {
    const std::vector<QapInstance> instances = {test::make_random_instance(61, 8),
                                                test::make_random_instance(62, 8)};
    const BkvRegistry registry = registry_for(instances);
    std::vector<std::vector<RunRecord>> serial, parallel;
    BenchOptions options = quick_options(9, 3);
    run_benchmark(instances, registry, options, &serial);
    options.workers = 4;
    run_benchmark(instances, registry, options, &parallel);
    REQUIRE(serial.size() == parallel.size());
    for (std::size_t i = 0; i < serial.size(); ++i) {
        REQUIRE(serial[i].size() == parallel[i].size());
        for (std::size_t j = 0; j < serial[i].size(); ++j)
            CHECK(serial[i][j].to_json().dump() == parallel[i][j].to_json().dump());
    }
}

TEST_CASE("pool similarity statistics") {
    const std::vector<Assignment> same(3, Assignment{{0, 1, 2, 3}, 0});
    const SpreadStats stats = pool_similarity(same);
    CHECK(stats.max == doctest::Approx(1.0));
    CHECK(stats.avg == doctest::Approx(1.0));
    CHECK(stats.min == doctest::Approx(1.0));
    CHECK_THROWS_AS(pool_similarity({Assignment{{0, 1}, 0}}), std::invalid_argument);
}

TEST_CASE("theta=2 pool: max pattern length equals max similarity") {
    RandomSource rng(71);
    std::vector<Assignment> pool;
    for (int i = 0; i < 6; ++i) pool.push_back(Assignment{random_permutation(9, rng), 0});
    const SpreadStats sims = pool_similarity(pool);
    const SpreadStats lens = pool_pattern_lengths(pool, 2, 9);
    CHECK(lens.max == doctest::Approx(sims.max));
}

TEST_CASE("sweep grouping labels every m value") {
    BkvRegistry registry = BkvRegistry::from_csv("name,bkv\ntoy,100\n");
    std::vector<SweepSample> samples;
    std::set<int> ms;
    for (int m = 1; m <= 21; m += 2) {
        ms.insert(m);
        nlohmann::json j;
        j["instance"] = "toy";
        j["seed"] = 5 + m;
        j["best_value"] = 100 + m;
        j["params"]["m"] = m;
        samples.push_back(sweep_sample_from_json(j, registry));
    }
    CHECK(ms.size() == 11);
    const std::string csv = sweep_csv(samples);
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 12);  // header + 11 samples
    for (int m : ms)
        CHECK(csv.find("toy," + std::to_string(m) + ",") != std::string::npos);
    CHECK(samples.front().xpd.has_value());
}

}  // TEST_SUITE
