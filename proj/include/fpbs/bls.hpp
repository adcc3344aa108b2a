#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "fpbs/matrix.hpp"
#include "fpbs/qap_core.hpp"
#include "fpbs/rng.hpp"

namespace fpbs {

// Breakout local search parameters. Fields left at 0 are derived from the
// instance size by resolved(): gamma = n, l0 = ceil(n/10), l_max = n/2.
struct BlsParams {
    int max_iter = 10000;   // descent+perturbation episodes per call
    double q_floor = 0.75;  // Q: minimum probability of directed perturbation
    int gamma = 0;          // tabu tenure center; each move draws from [0.9g, 1.1g]
    int l0 = 0;             // initial perturbation strength L0
    int l_max = 0;          // cap on perturbation strength

    BlsParams resolved(int n) const {
        BlsParams p = *this;
        if (p.gamma == 0) p.gamma = n;
        if (p.l0 == 0) p.l0 = (n + 9) / 10;
        if (p.l_max == 0) p.l_max = std::max(p.l0, n / 2);
        if (p.max_iter < 1) throw std::invalid_argument("BlsParams: max_iter must be >= 1");
        if (p.q_floor < 0.0 || p.q_floor > 1.0)
            throw std::invalid_argument("BlsParams: q_floor must be in [0,1]");
        if (p.l0 < 1 || p.l0 > p.l_max || p.l_max > n)
            throw std::invalid_argument("BlsParams: need 1 <= l0 <= l_max <= n");
        return p;
    }
};

enum class PerturbationKind { directed, random };

// Probability of choosing the directed (tabu-based) perturbation after
// omega consecutive local optima without improving the run best:
// max(q_floor, e^-(omega+1)).
inline double directed_probability(long long omega, double q_floor) {
    return std::max(q_floor, std::exp(-static_cast<double>(omega + 1)));
}

struct BlsState {
    BlsState(const QapInstance& instance, Permutation start, const BlsParams& params)
        : inst(&instance),
          params(params.resolved(instance.n)),
          current(Assignment::evaluated(instance, std::move(start))),
          best(current),
          delta(build_delta_table(instance, current.pi)),
          tabu_until(instance.n, 0),
          l(this->params.l0) {}

    const QapInstance* inst;
    BlsParams params;
    Assignment current;
    Assignment best;
    DeltaTable delta;
    SquareMatrix<long long> tabu_until;  // episode stamp until which a pair is tabu
    long long episode = 0;
    int l = 0;                        // current perturbation strength L
    long long omega = 0;              // consecutive non-improving local optima
    Permutation last_local_optimum;   // empty before the first episode
    bool improved_since_decision = false;

    void apply_and_track(int u, int v) {
        apply_swap(*inst, current, delta, {u, v});
        if (current.value < best.value) {
            best = current;
            improved_since_decision = true;
        }
    }
};

// Best-improvement descent to a local optimum. Ties on the move delta break
// toward the lexicographically smallest (u, v).
inline void descend(BlsState& state) {
    const int n = state.inst->n;
    for (;;) {
        int best_u = -1, best_v = -1;
        long long best_delta = 0;
        for (int u = 0; u + 1 < n; ++u)
            for (int v = u + 1; v < n; ++v)
                if (state.delta.at(u, v) < best_delta) {
                    best_delta = state.delta.at(u, v);
                    best_u = u;
                    best_v = v;
                }
        if (best_u < 0) return;
        state.apply_and_track(best_u, best_v);
    }
}

inline PerturbationKind choose_perturbation(const BlsState& state, RandomSource& rng) {
    const double p = directed_probability(state.omega, state.params.q_floor);
    return rng.next_double() < p ? PerturbationKind::directed : PerturbationKind::random;
}

// Reactive strength update: returning to the immediately previous local
// optimum raises L by one (capped), escaping it resets L to L0.
inline void update_strength(BlsState& state) {
    if (!state.last_local_optimum.empty() &&
        state.current.pi == state.last_local_optimum)
        state.l = std::min(state.l + 1, state.params.l_max);
    else
        state.l = state.params.l0;
    state.last_local_optimum = state.current.pi;
}

namespace detail {

inline void stamp_tabu(BlsState& state, int u, int v, RandomSource& rng) {
    const long long lo = std::llround(0.9 * state.params.gamma);
    const long long hi = std::llround(1.1 * state.params.gamma);
    state.tabu_until(u, v) = state.episode + rng.next_int(std::max<long long>(1, lo), hi);
}

// Best non-tabu move; a tabu move is admissible when it improves on the run
// best (aspiration). Returns false when every move is blocked.
inline bool pick_directed_move(const BlsState& state, int& out_u, int& out_v) {
    const int n = state.inst->n;
    int best_u = -1, best_v = -1;
    long long best_delta = 0;
    bool found = false;
    for (int u = 0; u + 1 < n; ++u)
        for (int v = u + 1; v < n; ++v) {
            const long long d = state.delta.at(u, v);
            const bool tabu = state.tabu_until(u, v) > state.episode;
            const bool aspirated = state.current.value + d < state.best.value;
            if (tabu && !aspirated) continue;
            if (!found || d < best_delta) {
                found = true;
                best_delta = d;
                best_u = u;
                best_v = v;
            }
        }
    out_u = best_u;
    out_v = best_v;
    return found;
}

}  // namespace detail

// Applies exactly `strength` swap moves of the given kind. Every applied
// move stamps its pair tabu for the next gamma-ish episodes. If a directed
// step finds every move tabu without aspiration, that step degenerates to a
// random move.
inline void perturb(BlsState& state, PerturbationKind kind, int strength,
                    RandomSource& rng) {
    const int n = state.inst->n;
    for (int step = 0; step < strength; ++step) {
        int u = -1, v = -1;
        if (kind != PerturbationKind::directed ||
            !detail::pick_directed_move(state, u, v)) {
            u = static_cast<int>(rng.next_below(n));
            v = static_cast<int>(rng.next_below(n - 1));
            if (v >= u) ++v;
            if (u > v) std::swap(u, v);
        }
        detail::stamp_tabu(state, u, v, rng);
        state.apply_and_track(u, v);
    }
}

// One call = max_iter episodes of descent-to-local-optimum followed by an
// adaptive perturbation. Returns the best assignment observed.
inline Assignment bls_run(const QapInstance& inst, const Permutation& start,
                          const BlsParams& params, RandomSource& rng) {
    BlsState state(inst, start, params);
    for (int iter = 0; iter < state.params.max_iter; ++iter) {
        descend(state);
        if (state.improved_since_decision)
            state.omega = 0;
        else
            state.omega += 1;
        state.improved_since_decision = false;
        update_strength(state);
        const PerturbationKind kind = choose_perturbation(state, rng);
        perturb(state, kind, state.l, rng);
        state.episode += 1;
    }
    return state.best;
}

}  // namespace fpbs
