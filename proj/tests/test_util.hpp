#pragma once

#include <Eigen/Core>
#include <random>
#include <vector>

#include "cwboost/dataset.hpp"

namespace cwboost::test {

inline std::mt19937_64 rng(std::uint64_t seed) { return std::mt19937_64(seed); }

inline Eigen::VectorXd random_vector(int n, std::mt19937_64& gen, double lo = -2.0,
                                     double hi = 2.0) {
    std::uniform_real_distribution<double> dist(lo, hi);
    Eigen::VectorXd v(n);
    for (int i = 0; i < n; ++i) v[i] = dist(gen);
    return v;
}

inline Eigen::MatrixXd random_matrix(int n, int k, std::mt19937_64& gen, double lo = -2.0,
                                     double hi = 2.0) {
    std::uniform_real_distribution<double> dist(lo, hi);
    Eigen::MatrixXd m(n, k);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < k; ++j) m(i, j) = dist(gen);
    }
    return m;
}

inline Eigen::VectorXd random_counts(int n, std::mt19937_64& gen, double mean = 2.0) {
    std::poisson_distribution<int> dist(mean);
    Eigen::VectorXd v(n);
    for (int i = 0; i < n; ++i) v[i] = static_cast<double>(dist(gen));
    return v;
}

inline Dataset random_dataset(int n, int k, std::mt19937_64& gen) {
    return make_dataset(random_matrix(n, k, gen), random_vector(n, gen));
}

}  // namespace cwboost::test
