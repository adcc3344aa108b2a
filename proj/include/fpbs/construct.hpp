#pragma once

#include <stdexcept>
#include <vector>

#include "fpbs/elite_pool.hpp"
#include "fpbs/fpmine.hpp"
#include "fpbs/qap_core.hpp"
#include "fpbs/rng.hpp"

namespace fpbs {

// A permutation under construction: slot[facility] is the assigned location
// or -1, with the set of used locations tracked alongside.
struct PartialAssignment {
    explicit PartialAssignment(int n) : slots(n, -1), location_used(n, 0) {}

    std::vector<int> slots;
    std::vector<char> location_used;
    int assigned_count = 0;

    int size() const { return static_cast<int>(slots.size()); }

    void assign(int facility, int location) {
        if (slots[facility] != -1)
            throw std::invalid_argument("PartialAssignment: facility already assigned");
        if (location_used[location])
            throw std::invalid_argument("PartialAssignment: location already used");
        slots[facility] = location;
        location_used[location] = 1;
        ++assigned_count;
    }

    bool complete() const { return assigned_count == size(); }
};

// Picks the best of lambda draws with replacement; larger patterns win,
// ties go to higher support, then lexicographically smaller pair lists.
inline const Pattern& tournament_select(const std::vector<Pattern>& patterns,
                                        int lambda, RandomSource& rng) {
    if (patterns.empty())
        throw std::invalid_argument("tournament_select: empty pattern list");
    if (lambda < 1) throw std::invalid_argument("tournament_select: lambda must be >= 1");
    const auto beats = [](const Pattern& a, const Pattern& b) {
        if (a.size() != b.size()) return a.size() > b.size();
        if (a.support != b.support) return a.support > b.support;
        return a.pairs < b.pairs;
    };
    const Pattern* best = &patterns[rng.next_below(patterns.size())];
    for (int draw = 1; draw < lambda; ++draw) {
        const Pattern* contender = &patterns[rng.next_below(patterns.size())];
        if (beats(*contender, *best)) best = contender;
    }
    return *best;
}

inline PartialAssignment remap(const Pattern& pattern, int n) {
    PartialAssignment partial(n);
    for (const auto& [facility, location] : pattern.pairs) {
        if (facility < 0 || facility >= n || location < 0 || location >= n)
            throw std::invalid_argument("remap: pair out of range");
        partial.assign(facility, location);
    }
    return partial;
}

// Copies the guide's location into each empty slot unless that location is
// already used; never overwrites a filled slot.
inline void guided_complete(PartialAssignment& partial, const Assignment& guide) {
    const int n = partial.size();
    if (static_cast<int>(guide.pi.size()) != n)
        throw std::invalid_argument("guided_complete: guide size mismatch");
    for (int i = 0; i < n; ++i) {
        if (partial.slots[i] != -1) continue;
        const int location = guide.pi[i];
        if (!partial.location_used[location]) partial.assign(i, location);
    }
}

// Fills the remaining slots with the unused locations as a uniform random
// bijection.
inline Permutation random_complete(PartialAssignment partial, RandomSource& rng) {
    const int n = partial.size();
    std::vector<int> open_slots;
    std::vector<int> free_locations;
    for (int i = 0; i < n; ++i)
        if (partial.slots[i] == -1) open_slots.push_back(i);
    for (int loc = 0; loc < n; ++loc)
        if (!partial.location_used[loc]) free_locations.push_back(loc);
    for (int i = static_cast<int>(free_locations.size()) - 1; i > 0; --i)
        std::swap(free_locations[i], free_locations[rng.next_below(i + 1)]);
    for (std::size_t i = 0; i < open_slots.size(); ++i)
        partial.slots[open_slots[i]] = free_locations[i];
    return std::move(partial.slots);
}

struct ConstructParams {
    int lambda = 3;
    double beta = 0.75;  // guide only when the partial is shorter than beta*n
};

struct Construction {
    Permutation pi;
    Pattern pattern;      // the tournament winner, preserved in pi
    bool guided = false;  // whether a guiding elite solution was consulted
    int guide_index = -1;
};

// Tournament-select a pattern, re-map it, complete from a uniformly chosen
// guiding elite solution when the partial is short, then fill at random.
// An empty pattern list is an error; passing a single empty Pattern yields
// a guided random restart.
inline Construction build_solution(const std::vector<Pattern>& patterns,
                                   const ElitePool& elite, const ConstructParams& params,
                                   RandomSource& rng_select, RandomSource& rng_complete) {
    if (elite.members.empty())
        throw std::invalid_argument("build_solution: empty elite pool");
    const int n = static_cast<int>(elite.members.front().pi.size());
    Construction result;
    result.pattern = tournament_select(patterns, params.lambda, rng_select);
    PartialAssignment partial = remap(result.pattern, n);
    if (static_cast<double>(partial.assigned_count) < params.beta * n) {
        result.guided = true;
        result.guide_index = static_cast<int>(rng_select.next_below(elite.members.size()));
        guided_complete(partial, elite.members[result.guide_index]);
    }
    result.pi = random_complete(std::move(partial), rng_complete);
    return result;
}

}  // namespace fpbs
