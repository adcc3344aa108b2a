#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

#include "fpbs/matrix.hpp"

namespace fpbs {

// A QAP instance: assign n facilities to n locations, minimizing
// sum_{i,j} flow(i,j) * dist(pi(i), pi(j)). Matrices are n x n integers;
// diagonals may be nonzero. Entries are stored as 64-bit integers so that
// objective accumulation never needs widening casts.
struct QapInstance {
    std::string name;
    int n = 0;
    SquareMatrix<long long> flow;  // a
    SquareMatrix<long long> dist;  // b

    void validate() const {
        if (n < 2) throw std::invalid_argument("QapInstance: n must be >= 2");
        if (flow.size() != n || dist.size() != n)
            throw std::invalid_argument("QapInstance: matrices must be n x n");
    }
};

}  // namespace fpbs
