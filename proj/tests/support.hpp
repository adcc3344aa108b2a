#pragma once

// Test-only helpers: random generators and brute-force oracles that stay
// independent of the implementation paths they check.

#include <algorithm>
#include <set>
#include <vector>

#include "fpbs/fpmine.hpp"
#include "fpbs/instance.hpp"
#include "fpbs/qap_core.hpp"
#include "fpbs/rng.hpp"

namespace fpbs::test {

inline QapInstance make_random_instance(std::uint64_t seed, int n, long long lo = 0,
                                        long long hi = 30) {
    RandomSource gen(seed);
    QapInstance inst;
    inst.name = "rnd" + std::to_string(seed) + "_" + std::to_string(n);
    inst.n = n;
    inst.flow = SquareMatrix<long long>(n);
    inst.dist = SquareMatrix<long long>(n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            inst.flow(i, j) = lo + static_cast<long long>(gen.next_below(hi - lo + 1));
            inst.dist(i, j) = lo + static_cast<long long>(gen.next_below(hi - lo + 1));
        }
    return inst;
}

// Exhaustive n! search; only sensible for n <= 9.
inline long long exhaustive_optimum(const QapInstance& inst,
                                    Permutation* argmin = nullptr) {
    Permutation pi = identity_permutation(inst.n);
    long long best = full_evaluate(inst, pi);
    if (argmin) *argmin = pi;
    while (std::next_permutation(pi.begin(), pi.end())) {
        const long long value = full_evaluate(inst, pi);
        if (value < best) {
            best = value;
            if (argmin) *argmin = pi;
        }
    }
    return best;
}

// Best neighbor improvement by recomputing every swapped permutation.
inline long long brute_best_neighbor_delta(const QapInstance& inst,
                                           const Permutation& pi) {
    const long long value = full_evaluate(inst, pi);
    long long best = 0;
    for (int u = 0; u + 1 < inst.n; ++u)
        for (int v = u + 1; v < inst.n; ++v) {
            Permutation q = pi;
            std::swap(q[u], q[v]);
            best = std::min(best, full_evaluate(inst, q) - value);
        }
    return best;
}

struct RandomDb {
    std::vector<Transaction> transactions;
    int universe = 0;  // items are 1..universe
};

inline RandomDb make_random_db(std::uint64_t seed, int max_items = 12,
                               int max_transactions = 10) {
    RandomSource gen(seed);
    RandomDb db;
    db.universe = 2 + static_cast<int>(gen.next_below(max_items - 1));
    const int count = 1 + static_cast<int>(gen.next_below(max_transactions));
    for (int t = 0; t < count; ++t) {
        std::vector<Item> items;
        for (int item = 1; item <= db.universe; ++item)
            if (gen.next_below(100) < 45) items.push_back(item);
        db.transactions.push_back(Transaction::of(std::move(items)));
    }
    return db;
}

inline long long count_support(const std::vector<Transaction>& db,
                               const std::vector<Item>& itemset) {
    long long support = 0;
    for (const auto& t : db) {
        bool all = true;
        for (Item item : itemset)
            if (!std::binary_search(t.items.begin(), t.items.end(), item)) {
                all = false;
                break;
            }
        if (all) ++support;
    }
    return support;
}

// Maximal frequent itemsets by subset enumeration over a small universe.
inline std::set<std::vector<Item>> brute_force_mfis(const RandomDb& db,
                                                    long long theta) {
    const int u = db.universe;
    std::vector<unsigned> masks;
    for (const auto& t : db.transactions) {
        unsigned mask = 0;
        for (Item item : t.items) mask |= 1u << (item - 1);
        masks.push_back(mask);
    }
    std::vector<long long> support(1u << u, 0);
    for (unsigned s = 0; s < (1u << u); ++s)
        for (unsigned mask : masks)
            if ((mask & s) == s) ++support[s];
    std::set<std::vector<Item>> result;
    for (unsigned s = 1; s < (1u << u); ++s) {
        if (support[s] < theta) continue;
        bool maximal = true;
        for (int item = 0; item < u && maximal; ++item)
            if (!(s & (1u << item)) && support[s | (1u << item)] >= theta)
                maximal = false;
        if (!maximal) continue;
        std::vector<Item> itemset;
        for (int item = 0; item < u; ++item)
            if (s & (1u << item)) itemset.push_back(item + 1);
        result.insert(std::move(itemset));
    }
    return result;
}

}  // namespace fpbs::test
