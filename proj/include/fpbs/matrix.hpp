#pragma once

#include <cassert>
#include <vector>

namespace fpbs {

// Dense square matrix with contiguous row-major storage.
template <typename T>
class SquareMatrix {
public:
    SquareMatrix() = default;
    explicit SquareMatrix(int n, T init = T{})
        : n_(n), cells_(static_cast<std::size_t>(n) * n, init) {}

    int size() const { return n_; }

    T& operator()(int i, int j) { return cells_[static_cast<std::size_t>(i) * n_ + j]; }
    const T& operator()(int i, int j) const {
        return cells_[static_cast<std::size_t>(i) * n_ + j];
    }

    T* row(int i) { return cells_.data() + static_cast<std::size_t>(i) * n_; }
    const T* row(int i) const { return cells_.data() + static_cast<std::size_t>(i) * n_; }

    void fill(T value) { cells_.assign(cells_.size(), value); }

    SquareMatrix transposed() const {
        SquareMatrix t(n_);
        for (int i = 0; i < n_; ++i)
            for (int j = 0; j < n_; ++j) t(j, i) = (*this)(i, j);
        return t;
    }

    friend bool operator==(const SquareMatrix& a, const SquareMatrix& b) {
        return a.n_ == b.n_ && a.cells_ == b.cells_;
    }

private:
    int n_ = 0;
    std::vector<T> cells_;
};

}  // namespace fpbs
