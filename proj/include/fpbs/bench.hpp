#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <iomanip>
#include <limits>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "fpbs/driver.hpp"
#include "fpbs/elite_pool.hpp"
#include "fpbs/qaplib_io.hpp"

namespace fpbs {

// Seed for run j of the named instance, derived from the batch master seed.
inline std::uint64_t derive_run_seed(std::uint64_t master_seed, const std::string& name,
                                     int run_index) {
    return mix_seed(mix_seed(master_seed, hash_string(name)),
                    static_cast<std::uint64_t>(run_index) + 1);
}

struct BenchRow {
    std::string name;
    std::optional<long long> bkv;
    int runs = 0;
    long long best_value = 0;
    long long worst_value = 0;
    double mean_value = 0.0;
    double bpd = 0.0, apd = 0.0, wpd = 0.0;
    int hits = 0;  // runs with best_value <= bkv
    double mean_time_to_best = 0.0;
    std::vector<std::string> errors;
};

struct BenchmarkReport {
    std::vector<BenchRow> rows;
    int runs_per_instance = 0;
    double avg_bpd = 0.0, avg_apd = 0.0, avg_wpd = 0.0, avg_time = 0.0;

    std::string as_table() const {
        std::ostringstream out;
        out << std::left << std::setw(10) << "instance" << std::right << std::setw(12)
            << "bkv" << std::setw(12) << "best" << std::setw(11) << "bpd" << std::setw(9)
            << "apd" << std::setw(9) << "wpd" << std::setw(11) << "t_best(s)" << "\n";
        for (const auto& row : rows) {
            out << std::left << std::setw(10) << row.name << std::right;
            if (!row.errors.empty() && row.runs == 0) {
                out << "  error: " << row.errors.front() << "\n";
                continue;
            }
            if (row.bkv) {
                std::ostringstream bpd_cell;
                bpd_cell << format_pd(row.bpd) << "(" << row.hits << ")";
                out << std::setw(12) << *row.bkv << std::setw(12) << row.best_value
                    << std::setw(11) << bpd_cell.str() << std::setw(9) << format_pd(row.apd)
                    << std::setw(9) << format_pd(row.wpd);
            } else {
                out << std::setw(12) << "-" << std::setw(12) << row.best_value
                    << std::setw(11) << "-" << std::setw(9) << "-" << std::setw(9) << "-";
            }
            out << std::setw(11) << std::fixed << std::setprecision(1)
                << row.mean_time_to_best << "\n";
            out.unsetf(std::ios::fixed);
        }
        out << std::left << std::setw(10) << "avg." << std::right << std::setw(12) << ""
            << std::setw(12) << "" << std::setw(11) << format_pd(avg_bpd) << std::setw(9)
            << format_pd(avg_apd) << std::setw(9) << format_pd(avg_wpd) << std::setw(11)
            << std::fixed << std::setprecision(1) << avg_time << "\n";
        out.unsetf(std::ios::fixed);
        return out.str();
    }

    std::string as_csv() const {
        std::ostringstream out;
        out << "instance,bkv,runs,best,mean,worst,bpd,apd,wpd,hits,mean_time_to_best_s,"
               "errors\n";
        out << std::setprecision(17);
        for (const auto& row : rows) {
            out << row.name << ",";
            if (row.bkv) out << *row.bkv;
            out << "," << row.runs << "," << row.best_value << "," << row.mean_value << ","
                << row.worst_value << ",";
            if (row.bkv) out << row.bpd << "," << row.apd << "," << row.wpd;
            else out << ",,";
            out << "," << row.hits << "," << row.mean_time_to_best << ","
                << row.errors.size() << "\n";
        }
        return out.str();
    }

    nlohmann::json as_json() const {
        nlohmann::json j;
        j["runs_per_instance"] = runs_per_instance;
        nlohmann::json rows_json = nlohmann::json::array();
        for (const auto& row : rows) {
            nlohmann::json r;
            r["instance"] = row.name;
            if (row.bkv) r["bkv"] = *row.bkv;
            r["runs"] = row.runs;
            r["best"] = row.best_value;
            r["mean"] = row.mean_value;
            r["worst"] = row.worst_value;
            if (row.bkv) {
                r["bpd"] = row.bpd;
                r["apd"] = row.apd;
                r["wpd"] = row.wpd;
                r["hits"] = row.hits;
            }
            r["mean_time_to_best_s"] = row.mean_time_to_best;
            r["errors"] = row.errors;
            rows_json.push_back(std::move(r));
        }
        j["rows"] = std::move(rows_json);
        j["avg"] = {{"bpd", avg_bpd}, {"apd", avg_apd}, {"wpd", avg_wpd},
                    {"time", avg_time}};
        return j;
    }

private:
    static std::string format_pd(double pd) {
        std::ostringstream out;
        out << std::fixed << std::setprecision(3) << pd;
        return out.str();
    }
};

struct BenchOptions {
    int runs = 10;
    int workers = 1;
    bool stop_at_bkv = false;  // end a run early once it reaches the known BKV
    FpbsParams params;         // params.seed acts as the batch master seed
};

// Runs `runs` independent seeded runs per instance (parallel across runs,
// never inside one) and aggregates percentage deviations per instance.
inline BenchmarkReport run_benchmark(const std::vector<QapInstance>& instances,
                                     const BkvRegistry& registry,
                                     const BenchOptions& options,
                                     std::vector<std::vector<RunRecord>>* all_records =
                                         nullptr) {
    if (instances.empty())
        throw std::invalid_argument("run_benchmark: need at least one instance");
    if (options.runs < 1) throw std::invalid_argument("run_benchmark: runs must be >= 1");
    const int workers = std::max(1, options.workers);

    // Per-run seeds, collision-checked across the whole batch.
    std::vector<std::vector<std::uint64_t>> seeds(instances.size());
    std::set<std::uint64_t> seen;
    for (std::size_t i = 0; i < instances.size(); ++i)
        for (int j = 0; j < options.runs; ++j) {
            const std::uint64_t seed =
                derive_run_seed(options.params.seed, instances[i].name, j);
            if (!seen.insert(seed).second)
                throw std::runtime_error("run seed collision in batch (instance " +
                                         instances[i].name + ", run " +
                                         std::to_string(j) + ")");
            seeds[i].push_back(seed);
        }

    struct Slot {
        std::optional<RunRecord> record;
        std::string error;
    };
    std::vector<std::vector<Slot>> results(instances.size());
    for (auto& per_instance : results) per_instance.resize(options.runs);

    struct Job {
        std::size_t instance;
        int run;
    };
    std::vector<Job> jobs;
    for (std::size_t i = 0; i < instances.size(); ++i)
        for (int j = 0; j < options.runs; ++j) jobs.push_back({i, j});

    std::atomic<std::size_t> next{0};
    const auto worker_loop = [&] {
        for (;;) {
            const std::size_t at = next.fetch_add(1);
            if (at >= jobs.size()) return;
            const Job job = jobs[at];
            FpbsParams params = options.params;
            params.seed = seeds[job.instance][job.run];
            if (options.stop_at_bkv && !params.target)
                if (const auto bkv = registry.lookup(instances[job.instance].name))
                    params.target = *bkv;
            try {
                results[job.instance][job.run].record = run(instances[job.instance], params);
            } catch (const std::exception& e) {
                results[job.instance][job.run].error = e.what();
            }
        }
    };
    if (workers == 1) {
        worker_loop();
    } else {
        std::vector<std::thread> threads;
        threads.reserve(workers);
        for (int w = 0; w < workers; ++w) threads.emplace_back(worker_loop);
        for (auto& t : threads) t.join();
    }

    BenchmarkReport report;
    report.runs_per_instance = options.runs;
    if (all_records) all_records->assign(instances.size(), {});
    int averaged_rows = 0;
    for (std::size_t i = 0; i < instances.size(); ++i) {
        BenchRow row;
        row.name = instances[i].name;
        row.bkv = registry.lookup(row.name);
        std::vector<const RunRecord*> ok;
        for (int j = 0; j < options.runs; ++j) {
            const auto& slot = results[i][j];
            if (slot.record) {
                ok.push_back(&*slot.record);
                if (all_records) (*all_records)[i].push_back(*slot.record);
            } else {
                row.errors.push_back("run " + std::to_string(j) + ": " + slot.error);
            }
        }
        row.runs = static_cast<int>(ok.size());
        if (!ok.empty()) {
            long long best = ok.front()->best_value, worst = best;
            double sum_value = 0.0, sum_time = 0.0;
            for (const RunRecord* rec : ok) {
                best = std::min(best, rec->best_value);
                worst = std::max(worst, rec->best_value);
                sum_value += static_cast<double>(rec->best_value);
                sum_time += rec->time_to_best_seconds;
                if (row.bkv && rec->best_value <= *row.bkv) ++row.hits;
            }
            row.best_value = best;
            row.worst_value = worst;
            row.mean_value = sum_value / static_cast<double>(ok.size());
            row.mean_time_to_best = sum_time / static_cast<double>(ok.size());
            if (row.bkv) {
                row.bpd = xpd(best, *row.bkv);
                row.apd = 100.0 * (row.mean_value - static_cast<double>(*row.bkv)) /
                          static_cast<double>(*row.bkv);
                row.wpd = xpd(worst, *row.bkv);
                report.avg_bpd += row.bpd;
                report.avg_apd += row.apd;
                report.avg_wpd += row.wpd;
                report.avg_time += row.mean_time_to_best;
                ++averaged_rows;
            }
        }
        report.rows.push_back(std::move(row));
    }
    if (averaged_rows > 0) {
        report.avg_bpd /= averaged_rows;
        report.avg_apd /= averaged_rows;
        report.avg_wpd /= averaged_rows;
        report.avg_time /= averaged_rows;
    }
    return report;
}

// ---- elite-set analysis (similarity / pattern-length statistics) ----

struct SpreadStats {
    double max = 0.0, avg = 0.0, min = 0.0;
};

// Pairwise similarity statistics over a set of solutions (needs >= 2).
inline SpreadStats pool_similarity(const std::vector<Assignment>& pool) {
    if (pool.size() < 2)
        throw std::invalid_argument("pool_similarity: need at least 2 solutions");
    SpreadStats stats;
    stats.min = 1.0;
    double sum = 0.0;
    long long pairs = 0;
    for (std::size_t s = 0; s + 1 < pool.size(); ++s)
        for (std::size_t t = s + 1; t < pool.size(); ++t) {
            const double sim = similarity(pool[s], pool[t]);
            stats.max = std::max(stats.max, sim);
            stats.min = std::min(stats.min, sim);
            sum += sim;
            ++pairs;
        }
    stats.avg = sum / static_cast<double>(pairs);
    return stats;
}

// Length statistics over all maximal patterns mined from the pool at theta.
inline SpreadStats pool_pattern_lengths(const std::vector<Assignment>& pool,
                                        long long theta, int n,
                                        std::size_t* pattern_count = nullptr) {
    const auto patterns =
        mine_patterns(pool, theta, std::numeric_limits<int>::max(), n);
    if (pattern_count) *pattern_count = patterns.size();
    SpreadStats stats;
    if (patterns.empty()) return stats;
    stats.min = 1.0;
    double sum = 0.0;
    for (const auto& p : patterns) {
        const double len = pattern_length(p, n);
        stats.max = std::max(stats.max, len);
        stats.min = std::min(stats.min, len);
        sum += len;
    }
    stats.avg = sum / static_cast<double>(patterns.size());
    return stats;
}

// ---- m-sweep analysis over a directory of run records ----

struct SweepSample {
    std::string instance;
    int m = 0;
    std::uint64_t seed = 0;
    long long best_value = 0;
    std::optional<double> xpd;
};

// Tidy CSV (one row per run) suitable for box plots, grouped by m.
inline std::string sweep_csv(std::vector<SweepSample> samples) {
    std::sort(samples.begin(), samples.end(), [](const auto& a, const auto& b) {
        if (a.instance != b.instance) return a.instance < b.instance;
        if (a.m != b.m) return a.m < b.m;
        return a.seed < b.seed;
    });
    std::ostringstream out;
    out << "instance,m,seed,best,xpd\n";
    out << std::setprecision(17);
    for (const auto& s : samples) {
        out << s.instance << "," << s.m << "," << s.seed << "," << s.best_value << ",";
        if (s.xpd) out << *s.xpd;
        out << "\n";
    }
    return out.str();
}

inline SweepSample sweep_sample_from_json(const nlohmann::json& j,
                                          const BkvRegistry& registry) {
    SweepSample s;
    s.instance = j.at("instance").get<std::string>();
    s.m = j.at("params").at("m").get<int>();
    s.seed = j.at("seed").get<std::uint64_t>();
    s.best_value = j.at("best_value").get<long long>();
    if (const auto bkv = registry.lookup(s.instance)) s.xpd = xpd(s.best_value, *bkv);
    return s;
}

}  // namespace fpbs
