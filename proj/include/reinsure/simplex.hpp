#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <unordered_map>
#include <vector>

namespace reinsure {

struct StencilEntry {
    int index;
    double weight;
};

// Up to M lattice points with positive barycentric weights.
struct Stencil {
    std::vector<StencilEntry> entries;

    template <class Values>
    double apply(const Values& values) const {
        double s = 0.0;
        for (const auto& e : entries) s += e.weight * values[static_cast<std::size_t>(e.index)];
        return s;
    }
};

// Regular lattice {k / N : k in N^M, |k| = N} on the probability simplex,
// with piecewise-linear interpolation on the Freudenthal triangulation.
class SimplexLattice {
public:
    SimplexLattice(int dimension, int divisions);

    int dimension() const noexcept { return m_; }
    int divisions() const noexcept { return n_; }
    std::size_t size() const noexcept { return points_.size(); }
    const Eigen::VectorXd& point(std::size_t i) const { return points_[i]; }
    const std::vector<Eigen::VectorXd>& points() const noexcept { return points_; }

    Stencil stencil(const Eigen::VectorXd& pi) const;

    template <class Values>
    double interpolate(const Values& values, const Eigen::VectorXd& pi) const {
        return stencil(pi).apply(values);
    }

    // Lattice index of a point given by its integer counts; -1 if absent.
    int index_of_counts(const std::vector<int>& counts) const;

private:
    std::uint64_t key(const std::vector<int>& cumulative) const;

    int m_;
    int n_;
    std::vector<Eigen::VectorXd> points_;
    std::unordered_map<std::uint64_t, int> index_;
};

}  // namespace reinsure
