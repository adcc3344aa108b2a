#pragma once

#include <chrono>
#include <cstdint>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "fpbs/bls.hpp"
#include "fpbs/construct.hpp"
#include "fpbs/elite_pool.hpp"
#include "fpbs/fpmine.hpp"
#include "fpbs/qaplib_io.hpp"

namespace fpbs {

// XPD = 100 * (x - bkv) / bkv [%]
inline double xpd(long long x, long long bkv) {
    if (bkv <= 0) throw std::invalid_argument("xpd: bkv must be positive");
    return 100.0 * static_cast<double>(x - bkv) / static_cast<double>(bkv);
}

// Either a wall-clock budget (seconds) or a deterministic iteration budget
// counting outer construct-improve-insert iterations.
struct Budget {
    enum class Kind { wall_seconds, iterations };
    Kind kind = Kind::wall_seconds;
    double seconds = 1800.0;
    long long iterations = 0;

    static Budget wall(double seconds) { return {Kind::wall_seconds, seconds, 0}; }
    static Budget iters(long long count) { return {Kind::iterations, 0.0, count}; }
};

struct FpbsParams {
    Budget budget = Budget::wall(1800.0);
    int k = 15;                 // elite set size
    int m = 11;                 // mined pattern set size
    long long theta = 2;        // minimum support
    int lambda = 3;             // tournament pool size
    double beta = 0.75;         // guided-completion length threshold factor
    long long max_no_update = 15;
    BlsParams bls;
    std::uint64_t seed = 1;
    std::optional<long long> target;  // stop once best <= target
    bool multistart = false;          // diagnostic: random restarts, no mining
    bool mining_array = true;         // FPmax* array technique toggle

    void validate() const {
        if (k < 1) throw std::invalid_argument("FpbsParams: k must be >= 1");
        if (m < 1) throw std::invalid_argument("FpbsParams: m must be >= 1");
        if (theta < 1) throw std::invalid_argument("FpbsParams: theta must be >= 1");
        if (theta > k) throw std::invalid_argument("FpbsParams: theta cannot exceed k");
        if (lambda < 1) throw std::invalid_argument("FpbsParams: lambda must be >= 1");
        if (beta < 0.0 || beta > 1.0)
            throw std::invalid_argument("FpbsParams: beta must be in [0,1]");
        if (max_no_update < 0)
            throw std::invalid_argument("FpbsParams: max_no_update must be >= 0");
    }
};

struct RunEvent {
    std::string kind;
    long long iteration = 0;
    long long value = 0;
    double seconds = 0.0;
};

struct RunRecord {
    std::string instance;
    int n = 0;
    std::uint64_t seed = 0;
    long long best_value = 0;
    Permutation best_solution;
    double time_to_best_seconds = 0.0;
    long long iteration_of_best = 0;
    long long iterations = 0;
    long long mining_invocations = 0;
    double total_seconds = 0.0;
    bool wall_budget = true;
    std::vector<RunEvent> events;
    std::vector<Assignment> final_pool;
    FpbsParams params;

    // Wall-clock fields are omitted under an iteration budget so that equal
    // (instance, params, seed) runs serialize byte-identically.
    nlohmann::json to_json() const {
        nlohmann::json j;
        j["instance"] = instance;
        j["n"] = n;
        j["seed"] = seed;
        j["best_value"] = best_value;
        nlohmann::json pi = nlohmann::json::array();
        for (int loc : best_solution) pi.push_back(loc + 1);
        j["best_solution"] = std::move(pi);
        j["iteration_of_best"] = iteration_of_best;
        j["iterations"] = iterations;
        j["mining_invocations"] = mining_invocations;
        j["budget"] = wall_budget ? "wall" : "iterations";
        if (wall_budget) {
            j["time_to_best_seconds"] = time_to_best_seconds;
            j["total_seconds"] = total_seconds;
        }
        nlohmann::json p;
        if (wall_budget)
            p["t_max_seconds"] = params.budget.seconds;
        else
            p["max_iterations"] = params.budget.iterations;
        p["k"] = params.k;
        p["m"] = params.m;
        p["theta"] = params.theta;
        p["lambda"] = params.lambda;
        p["beta"] = params.beta;
        p["max_no_update"] = params.max_no_update;
        p["bls_max_iter"] = params.bls.max_iter;
        p["multistart"] = params.multistart;
        j["params"] = std::move(p);
        nlohmann::json pool_json = nlohmann::json::array();
        for (const auto& member : final_pool) {
            nlohmann::json mj;
            mj["value"] = member.value;
            nlohmann::json mpi = nlohmann::json::array();
            for (int loc : member.pi) mpi.push_back(loc + 1);
            mj["pi"] = std::move(mpi);
            pool_json.push_back(std::move(mj));
        }
        j["final_pool"] = std::move(pool_json);
        nlohmann::json events_json = nlohmann::json::array();
        for (const auto& e : events) {
            nlohmann::json ej;
            ej["kind"] = e.kind;
            ej["iteration"] = e.iteration;
            ej["value"] = e.value;
            if (wall_budget) ej["seconds"] = e.seconds;
            events_json.push_back(std::move(ej));
        }
        j["events"] = std::move(events_json);
        return j;
    }
};

inline std::string run_record_csv_header() {
    return "instance,seed,best,xpd,time_to_best,iterations,minings\n";
}

// One CSV row per run; xpd is left empty when no best-known value is given.
inline std::string run_record_csv_row(const RunRecord& record,
                                      std::optional<long long> bkv = std::nullopt) {
    std::ostringstream out;
    out.precision(17);
    out << record.instance << "," << record.seed << "," << record.best_value << ",";
    if (bkv) out << xpd(record.best_value, *bkv);
    out << "," << record.time_to_best_seconds << "," << record.iterations << ","
        << record.mining_invocations << "\n";
    return out.str();
}

namespace detail {

class RunClock {
public:
    RunClock() : start_(std::chrono::steady_clock::now()) {}
    double elapsed_seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_)
            .count();
    }

private:
    std::chrono::steady_clock::time_point start_;
};

}  // namespace detail

// The solver loop: initialize the elite set with BLS-improved restarts, mine
// patterns, then repeatedly construct from a selected pattern, improve with
// BLS, update the elite set, and re-mine whenever max_no_update consecutive
// insertions fail. Runs until the budget expires (checked at the loop head;
// a BLS call in flight always completes).
inline RunRecord run(const QapInstance& inst, const FpbsParams& params) {
    inst.validate();
    params.validate();
    const detail::RunClock clock;

    RandomSource rng_init(params.seed, "init");
    RandomSource rng_bls(params.seed, "bls");
    RandomSource rng_tournament(params.seed, "tournament");
    RandomSource rng_completion(params.seed, "completion");

    RunRecord record;
    record.instance = inst.name;
    record.n = inst.n;
    record.seed = params.seed;
    record.wall_budget = params.budget.kind == Budget::Kind::wall_seconds;
    record.params = params;

    const auto note = [&](const char* kind, long long iteration, long long value) {
        record.events.push_back(RunEvent{kind, iteration, value, clock.elapsed_seconds()});
    };
    const auto mark_best = [&](const Assignment& best, long long iteration) {
        record.best_value = best.value;
        record.best_solution = best.pi;
        record.iteration_of_best = iteration;
        record.time_to_best_seconds = clock.elapsed_seconds();
    };

    ElitePool pool = initialize_pool(inst, params.k, params.bls, rng_init, rng_bls);
    Assignment best = pool.best();
    mark_best(best, 0);
    note("initialized", 0, best.value);

    std::vector<Pattern> patterns;
    if (!params.multistart) {
        patterns = mine_patterns(pool.members, params.theta, params.m, inst.n,
                                 params.mining_array);
        record.mining_invocations = 1;
        note("mined", 0, static_cast<long long>(patterns.size()));
    }

    const ConstructParams construct_params{params.lambda, params.beta};
    const std::vector<Pattern> empty_pattern_fallback{Pattern{}};
    long long iteration = 0;
    pool.no_update = 0;

    const auto budget_left = [&] {
        if (params.budget.kind == Budget::Kind::iterations)
            return iteration < params.budget.iterations;
        return clock.elapsed_seconds() < params.budget.seconds;
    };
    const auto target_reached = [&] {
        return params.target.has_value() && best.value <= *params.target;
    };

    if (target_reached()) note("target_reached", 0, best.value);

    while (!target_reached() && budget_left()) {
        Permutation start;
        if (params.multistart) {
            start = random_permutation(inst.n, rng_completion);
        } else {
            const auto& pool_patterns = patterns.empty() ? empty_pattern_fallback : patterns;
            start = build_solution(pool_patterns, pool, construct_params, rng_tournament,
                                   rng_completion)
                        .pi;
        }
        Assignment improved = bls_run(inst, start, params.bls, rng_bls);
        ++iteration;
        if (improved.value < best.value) {
            best = improved;
            mark_best(best, iteration);
            note("best_improved", iteration, best.value);
        }
        if (try_insert(pool, improved)) {
            pool.no_update = 0;
        } else if (++pool.no_update > params.max_no_update && !params.multistart) {
            patterns = mine_patterns(pool.members, params.theta, params.m, inst.n,
                                     params.mining_array);
            record.mining_invocations += 1;
            pool.no_update = 0;
            note("stagnation_remine", iteration, static_cast<long long>(patterns.size()));
        }
        if (target_reached()) note("target_reached", iteration, best.value);
    }

    record.iterations = iteration;
    record.total_seconds = clock.elapsed_seconds();
    record.final_pool = std::move(pool.members);
    return record;
}

}  // namespace fpbs
