#include <doctest.h>

#include "fpbs/qap_core.hpp"
#include "support.hpp"

using namespace fpbs;

namespace {

QapInstance two_by_two() {
    QapInstance inst;
    inst.name = "two";
    inst.n = 2;
    inst.flow = SquareMatrix<long long>(2);
    inst.dist = SquareMatrix<long long>(2);
    inst.flow(0, 1) = 1;
    inst.flow(1, 0) = 1;
    inst.dist(0, 1) = 3;
    inst.dist(1, 0) = 3;
    return inst;
}

}  // namespace

TEST_SUITE("qap_core") {

TEST_CASE("full_evaluate hand example") {
    const auto inst = two_by_two();
    CHECK(full_evaluate(inst, {0, 1}) == 6);
    CHECK(full_evaluate(inst, {1, 0}) == 6);
}

TEST_CASE("zero flow annihilates the objective") {
    QapInstance inst = test::make_random_instance(3, 6);
    inst.flow = SquareMatrix<long long>(6);
    RandomSource rng(7);
    CHECK(full_evaluate(inst, random_permutation(6, rng)) == 0);
}

TEST_CASE("neighborhood size formula") {
    CHECK(neighborhood_size(2) == 1);
    CHECK(neighborhood_size(40) == 780);
    CHECK(neighborhood_size(150) == 11175);
}

TEST_CASE("delta table on the 2x2 example is zero") {
    const auto inst = two_by_two();
    const auto table = build_delta_table(inst, {0, 1});
    CHECK(table.at(0, 1) == 0);
}

TEST_CASE("all-zero instance gives an all-zero table") {
    QapInstance inst;
    inst.n = 5;
    inst.flow = SquareMatrix<long long>(5);
    inst.dist = SquareMatrix<long long>(5);
    const auto table = build_delta_table(inst, identity_permutation(5));
    for (int u = 0; u + 1 < 5; ++u)
        for (int v = u + 1; v < 5; ++v) CHECK(table.at(u, v) == 0);
}

TEST_CASE("delta table matches brute-force swap recomputation") {
    for (std::uint64_t seed = 100; seed < 140; ++seed) {
        RandomSource pick(seed);
        const int n = 2 + static_cast<int>(pick.next_below(11));
        const QapInstance inst = test::make_random_instance(seed, n);
        const Permutation pi = random_permutation(n, pick);
        const long long value = full_evaluate(inst, pi);
        const auto table = build_delta_table(inst, pi);
        for (int u = 0; u + 1 < n; ++u)
            for (int v = u + 1; v < n; ++v) {
                Permutation q = pi;
                std::swap(q[u], q[v]);
                REQUIRE(table.at(u, v) == full_evaluate(inst, q) - value);
            }
    }
}

TEST_CASE("apply_swap keeps value and table consistent over move sequences") {
    const QapInstance inst = test::make_random_instance(555, 10);
    RandomSource rng(556);
    Assignment a = Assignment::evaluated(inst, random_permutation(10, rng));
    DeltaTable table = build_delta_table(inst, a.pi);
    for (int step = 0; step < 100; ++step) {
        const int u = static_cast<int>(rng.next_below(9));
        const int v = u + 1 + static_cast<int>(rng.next_below(9 - u));
        apply_swap(inst, a, table, {u, v});
        REQUIRE(a.value == full_evaluate(inst, a.pi));
    }
    // spot-check the table after the whole sequence
    const auto fresh = build_delta_table(inst, a.pi);
    for (int u = 0; u + 1 < 10; ++u)
        for (int v = u + 1; v < 10; ++v) REQUIRE(table.at(u, v) == fresh.at(u, v));
}

TEST_CASE("a swap is an involution") {
    const QapInstance inst = test::make_random_instance(42, 7);
    RandomSource rng(43);
    Assignment a = Assignment::evaluated(inst, random_permutation(7, rng));
    DeltaTable table = build_delta_table(inst, a.pi);
    const Assignment before = a;
    apply_swap(inst, a, table, {2, 5});
    apply_swap(inst, a, table, {2, 5});
    CHECK(a.pi == before.pi);
    CHECK(a.value == before.value);
}

TEST_CASE("n=2 example: applying the only swap keeps value 6") {
    const auto inst = two_by_two();
    Assignment a = Assignment::evaluated(inst, {0, 1});
    DeltaTable table = build_delta_table(inst, a.pi);
    apply_swap(inst, a, table, {0, 1});
    CHECK(a.value == 6);
}

TEST_CASE("objective is invariant under matrix exchange plus inversion") {
    for (std::uint64_t seed = 900; seed < 910; ++seed) {
        RandomSource pick(seed);
        const int n = 2 + static_cast<int>(pick.next_below(7));
        const QapInstance inst = test::make_random_instance(seed, n);
        const Permutation pi = random_permutation(n, pick);
        Permutation inverse(n);
        for (int i = 0; i < n; ++i) inverse[pi[i]] = i;
        QapInstance swapped;
        swapped.n = n;
        swapped.flow = inst.dist;
        swapped.dist = inst.flow;
        CHECK(full_evaluate(swapped, inverse) == full_evaluate(inst, pi));
    }
}

TEST_CASE("permutation helpers") {
    CHECK(is_permutation_of({0, 2, 1}, 3));
    CHECK_FALSE(is_permutation_of({0, 0, 1}, 3));
    CHECK_FALSE(is_permutation_of({0, 1}, 3));
    RandomSource rng(11);
    for (int trial = 0; trial < 50; ++trial)
        CHECK(is_permutation_of(random_permutation(12, rng), 12));
}

}  // TEST_SUITE
