#pragma once

#include <cassert>
#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "fpbs/instance.hpp"
#include "fpbs/matrix.hpp"
#include "fpbs/rng.hpp"

namespace fpbs {

// pi[i] is the 0-indexed location assigned to facility i.
using Permutation = std::vector<int>;

inline bool is_permutation_of(const Permutation& pi, int n) {
    if (static_cast<int>(pi.size()) != n) return false;
    std::vector<char> seen(n, 0);
    for (int loc : pi) {
        if (loc < 0 || loc >= n || seen[loc]) return false;
        seen[loc] = 1;
    }
    return true;
}

inline Permutation identity_permutation(int n) {
    Permutation pi(n);
    std::iota(pi.begin(), pi.end(), 0);
    return pi;
}

inline Permutation random_permutation(int n, RandomSource& rng) {
    Permutation pi = identity_permutation(n);
    for (int i = n - 1; i > 0; --i)
        std::swap(pi[i], pi[static_cast<int>(rng.next_below(i + 1))]);
    return pi;
}

// f(pi) = sum_{i,j} flow(i,j) * dist(pi(i), pi(j))
inline long long full_evaluate(const QapInstance& inst, const Permutation& pi) {
    const int n = inst.n;
    long long total = 0;
    for (int i = 0; i < n; ++i) {
        const long long* arow = inst.flow.row(i);
        const long long* brow = inst.dist.row(pi[i]);
        for (int j = 0; j < n; ++j) total += arow[j] * brow[pi[j]];
    }
    return total;
}

inline long long neighborhood_size(int n) {
    return static_cast<long long>(n) * (n - 1) / 2;
}

// A permutation together with its objective value; the value is kept
// consistent with pi by every operation that mutates it.
struct Assignment {
    Permutation pi;
    long long value = 0;

    static Assignment evaluated(const QapInstance& inst, Permutation pi) {
        Assignment a;
        a.value = full_evaluate(inst, pi);
        a.pi = std::move(pi);
        return a;
    }

    friend bool operator==(const Assignment& a, const Assignment& b) {
        return a.value == b.value && a.pi == b.pi;
    }
};

struct SwapMove {
    int u = 0;
    int v = 0;  // 0 <= u < v < n
};

// Cost change of exchanging the locations of facilities u and v in pi, in
// O(n) (Taillard-style incremental evaluation, general asymmetric form).
inline long long swap_delta(const QapInstance& inst, const Permutation& pi, int u,
                            int v) {
    const auto& a = inst.flow;
    const auto& b = inst.dist;
    const int pu = pi[u], pv = pi[v];
    long long d = (a(u, u) - a(v, v)) * (b(pv, pv) - b(pu, pu)) +
                  (a(u, v) - a(v, u)) * (b(pv, pu) - b(pu, pv));
    const int n = inst.n;
    for (int k = 0; k < n; ++k) {
        if (k == u || k == v) continue;
        const int pk = pi[k];
        d += (a(k, u) - a(k, v)) * (b(pk, pv) - b(pk, pu)) +
             (a(u, k) - a(v, k)) * (b(pv, pk) - b(pu, pk));
    }
    return d;
}

// delta(u,v) = f(pi with u,v swapped) - f(pi), maintained for all u < v.
class DeltaTable {
public:
    DeltaTable() = default;
    explicit DeltaTable(int n) : n_(n), d_(static_cast<std::size_t>(n) * n, 0) {}

    int size() const { return n_; }

    long long at(int u, int v) const {
        assert(u < v);
        return d_[static_cast<std::size_t>(u) * n_ + v];
    }

    void set(int u, int v, long long value) {
        assert(u < v);
        d_[static_cast<std::size_t>(u) * n_ + v] = value;
    }

private:
    int n_ = 0;
    std::vector<long long> d_;
};

inline DeltaTable build_delta_table(const QapInstance& inst, const Permutation& pi) {
    const int n = inst.n;
    DeltaTable table(n);
    for (int u = 0; u + 1 < n; ++u)
        for (int v = u + 1; v < n; ++v) table.set(u, v, swap_delta(inst, pi, u, v));
    return table;
}

// Applies the swap to the assignment and re-establishes the delta table:
// pairs not touching {u,v} get the O(1) second-order update, rows/columns
// through u and v are recomputed with the O(n) formula.
inline void apply_swap(const QapInstance& inst, Assignment& assignment,
                       DeltaTable& table, SwapMove move) {
    const int u = move.u, v = move.v;
    assert(u < v);
    const auto& a = inst.flow;
    const auto& b = inst.dist;
    Permutation& pi = assignment.pi;

    assignment.value += table.at(u, v);
    std::swap(pi[u], pi[v]);

    const int n = inst.n;
    const int pu = pi[u], pv = pi[v];  // locations after the swap
    for (int i = 0; i + 1 < n; ++i) {
        if (i == u || i == v) continue;
        const int qi = pi[i];
        const long long aui = a(u, i), avi = a(v, i);
        const long long aiu = a(i, u), aiv = a(i, v);
        for (int j = i + 1; j < n; ++j) {
            if (j == u || j == v) continue;
            const int qj = pi[j];
            const long long updated =
                table.at(i, j) +
                (aui - a(u, j) + a(v, j) - avi) *
                    (b(pv, qi) - b(pv, qj) + b(pu, qj) - b(pu, qi)) +
                (aiu - a(j, u) + a(j, v) - aiv) *
                    (b(qi, pv) - b(qj, pv) + b(qj, pu) - b(qi, pu));
            table.set(i, j, updated);
        }
    }
    for (int x = 0; x < n; ++x) {
        if (x != u) {
            const int lo = std::min(x, u), hi = std::max(x, u);
            table.set(lo, hi, swap_delta(inst, pi, lo, hi));
        }
        if (x != v) {
            const int lo = std::min(x, v), hi = std::max(x, v);
            table.set(lo, hi, swap_delta(inst, pi, lo, hi));
        }
    }
}

}  // namespace fpbs
