#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "fpbs/bls.hpp"
#include "fpbs/fpmine.hpp"
#include "fpbs/qap_core.hpp"

namespace fpbs {

struct PoolInitError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Fixed-capacity archive of pairwise-distinct high-quality solutions, kept
// in insertion order (ties on value resolve to the oldest member).
struct ElitePool {
    std::vector<Assignment> members;
    int capacity = 0;
    long long no_update = 0;  // consecutive failed insertions (driver-managed)

    bool contains(const Permutation& pi) const {
        for (const auto& member : members)
            if (member.pi == pi) return true;
        return false;
    }

    int best_index() const {
        int best = 0;
        for (int i = 1; i < static_cast<int>(members.size()); ++i)
            if (members[i].value < members[best].value) best = i;
        return best;
    }

    int worst_index() const {
        int worst = 0;
        for (int i = 1; i < static_cast<int>(members.size()); ++i)
            if (members[i].value > members[worst].value) worst = i;
        return worst;
    }

    const Assignment& best() const {
        if (members.empty()) throw std::logic_error("ElitePool::best on empty pool");
        return members[best_index()];
    }

    const Assignment& worst() const {
        if (members.empty()) throw std::logic_error("ElitePool::worst on empty pool");
        return members[worst_index()];
    }
};

// Builds the elite set from BLS-improved random restarts until k distinct
// solutions are collected. Aborts after 50*k consecutive duplicates (small
// instances can have fewer than k reachable distinct optima).
inline ElitePool initialize_pool(const QapInstance& inst, int k,
                                 const BlsParams& bls_params, RandomSource& rng_start,
                                 RandomSource& rng_bls) {
    if (k < 1) throw std::invalid_argument("initialize_pool: k must be >= 1");
    ElitePool pool;
    pool.capacity = k;
    pool.members.reserve(k);
    long long consecutive_duplicates = 0;
    const long long duplicate_limit = 50LL * k;
    while (static_cast<int>(pool.members.size()) < k) {
        Assignment improved =
            bls_run(inst, random_permutation(inst.n, rng_start), bls_params, rng_bls);
        if (pool.contains(improved.pi)) {
            if (++consecutive_duplicates >= duplicate_limit)
                throw PoolInitError(
                    "elite pool initialization stalled: " +
                    std::to_string(consecutive_duplicates) +
                    " consecutive duplicate solutions while filling k=" +
                    std::to_string(k) + " (instance " + inst.name + ", n=" +
                    std::to_string(inst.n) + ")");
            continue;
        }
        consecutive_duplicates = 0;
        pool.members.push_back(std::move(improved));
    }
    return pool;
}

// Quality-based replacement: the candidate enters iff it differs from every
// member and is not worse than the current worst, which it evicts.
inline bool try_insert(ElitePool& pool, const Assignment& candidate) {
    if (static_cast<int>(pool.members.size()) < pool.capacity)
        throw std::logic_error("try_insert: pool not yet at capacity");
    if (pool.contains(candidate.pi)) return false;
    const int worst = pool.worst_index();
    if (candidate.value > pool.members[worst].value) return false;
    pool.members.erase(pool.members.begin() + worst);
    pool.members.push_back(candidate);
    return true;
}

// Number of positions assigned identically in both solutions.
inline int overlap_count(const Assignment& a, const Assignment& b) {
    if (a.pi.size() != b.pi.size())
        throw std::invalid_argument("overlap_count: size mismatch");
    int common = 0;
    for (std::size_t i = 0; i < a.pi.size(); ++i)
        if (a.pi[i] == b.pi[i]) ++common;
    return common;
}

// sim(a, b) = |a intersect b| / n
inline double similarity(const Assignment& a, const Assignment& b) {
    return static_cast<double>(overlap_count(a, b)) / static_cast<double>(a.pi.size());
}

// len(p) = |p| / n
inline double pattern_length(const Pattern& p, int n) {
    if (n < 1) throw std::invalid_argument("pattern_length: n must be >= 1");
    return static_cast<double>(p.size()) / static_cast<double>(n);
}

}  // namespace fpbs
