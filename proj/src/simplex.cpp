#include <algorithm>
#include <cmath>
#include <numeric>

#include "reinsure/errors.hpp"
#include "reinsure/simplex.hpp"

namespace reinsure {

// Points are stored through their tail sums c_i = sum_{j >= i} k_j for
// i = 1..M-1, a non-increasing sequence in [0, N]; c_0 = N is implicit.

SimplexLattice::SimplexLattice(int dimension, int divisions) : m_(dimension), n_(divisions) {
    if (m_ < 1) throw DomainError("simplex dimension must be >= 1");
    if (n_ < 1) throw DomainError("simplex resolution must be >= 2 points per dimension");
    std::vector<int> c(static_cast<std::size_t>(m_), 0);
    c[0] = n_;
    // Enumerate non-increasing sequences n = c_0 >= c_1 >= ... >= c_{M-1} >= 0.
    const auto emit = [&] {
        Eigen::VectorXd p(m_);
        for (int i = 0; i < m_; ++i) {
            const int next = i + 1 < m_ ? c[static_cast<std::size_t>(i + 1)] : 0;
            p[i] = static_cast<double>(c[static_cast<std::size_t>(i)] - next) / n_;
        }
        index_.emplace(key(c), static_cast<int>(points_.size()));
        points_.push_back(std::move(p));
    };
    if (m_ == 1) {
        emit();
        return;
    }
    std::vector<int>& v = c;
    for (int i = 1; i < m_; ++i) v[static_cast<std::size_t>(i)] = 0;
    while (true) {
        emit();
        int i = m_ - 1;
        while (i >= 1 && v[static_cast<std::size_t>(i)] == v[static_cast<std::size_t>(i - 1)]) --i;
        if (i < 1) break;
        ++v[static_cast<std::size_t>(i)];
        for (int j = i + 1; j < m_; ++j) v[static_cast<std::size_t>(j)] = 0;
    }
}

std::uint64_t SimplexLattice::key(const std::vector<int>& cumulative) const {
    std::uint64_t k = 0;
    for (int i = 1; i < m_; ++i) k = k * static_cast<std::uint64_t>(n_ + 1) + static_cast<std::uint64_t>(cumulative[static_cast<std::size_t>(i)]);
    return k;
}

int SimplexLattice::index_of_counts(const std::vector<int>& counts) const {
    if (static_cast<int>(counts.size()) != m_) return -1;
    std::vector<int> c(static_cast<std::size_t>(m_), 0);
    int tail = 0;
    for (int i = m_ - 1; i >= 0; --i) {
        tail += counts[static_cast<std::size_t>(i)];
        c[static_cast<std::size_t>(i)] = tail;
    }
    if (tail != n_) return -1;
    const auto it = index_.find(key(c));
    return it == index_.end() ? -1 : it->second;
}

Stencil SimplexLattice::stencil(const Eigen::VectorXd& pi) const {
    Stencil st;
    if (m_ == 1) {
        st.entries.push_back({0, 1.0});
        return st;
    }
    // Scaled tail sums x_i in [0, N], forced non-increasing against round-off.
    std::vector<double> x(static_cast<std::size_t>(m_));
    double tail = 0.0;
    for (int i = m_ - 1; i >= 1; --i) {
        tail += std::max(pi[i], 0.0);
        x[static_cast<std::size_t>(i)] = tail;
    }
    const double total = tail + std::max(pi[0], 0.0);
    x[0] = static_cast<double>(n_);
    for (int i = 1; i < m_; ++i) {
        double xi = x[static_cast<std::size_t>(i)] / total * n_;
        xi = std::clamp(xi, 0.0, x[static_cast<std::size_t>(i - 1)]);
        x[static_cast<std::size_t>(i)] = xi;
    }
    std::vector<int> base(static_cast<std::size_t>(m_));
    std::vector<double> frac(static_cast<std::size_t>(m_), 0.0);
    base[0] = n_;
    for (int i = 1; i < m_; ++i) {
        const double f = std::floor(x[static_cast<std::size_t>(i)]);
        base[static_cast<std::size_t>(i)] = static_cast<int>(f);
        frac[static_cast<std::size_t>(i)] = x[static_cast<std::size_t>(i)] - f;
    }
    std::vector<int> order(static_cast<std::size_t>(m_ - 1));
    std::iota(order.begin(), order.end(), 1);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
        return frac[static_cast<std::size_t>(a)] > frac[static_cast<std::size_t>(b)];
    });

    std::vector<int> vertex = base;
    double prev = 1.0;
    for (std::size_t k = 0; k <= order.size(); ++k) {
        const double next = k < order.size() ? frac[static_cast<std::size_t>(order[k])] : 0.0;
        const double w = prev - next;
        if (w > 0.0) {
            const auto it = index_.find(key(vertex));
            if (it == index_.end()) throw NumericalError("simplex interpolation left the lattice");
            st.entries.push_back({it->second, w});
        }
        if (k < order.size()) {
            if (next <= 0.0) break;
            ++vertex[static_cast<std::size_t>(order[k])];
        }
        prev = next;
    }
    return st;
}

}  // namespace reinsure
