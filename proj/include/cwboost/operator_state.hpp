#pragma once

#include <Eigen/Core>

#include "cwboost/base_learner.hpp"

namespace cwboost {

// Running approximation B of the boosting hat matrix. Its trace is the
// degrees-of-freedom estimate used by AIC selection.
struct OperatorState {
    Eigen::MatrixXd B;  // n x n
    double trace = 0.0;
    int iteration_count = 0;

    int n() const { return static_cast<int>(B.rows()); }
};

// B starts as the intercept-only hat matrix (1/n) * J, matching the ybar
// offset; trace (= df) starts at 1.
OperatorState init_operator(int n);

// tr(A C) without forming the product: tr(A C) = sum_{i,m} A[i,m] C[m,i],
// computed as the elementwise sum of A .* C' (the right factor is the one
// transposed).
double trace_product(const Eigen::MatrixXd& a, const Eigen::MatrixXd& c);

// Trace of the candidate update B + nu * diag(w) H (I - B) without
// materializing it: tr(B) + nu * tr(diag(w) H (I - B)) via trace_product.
double candidate_df(const OperatorState& state, const Eigen::MatrixXd& h,
                    const Eigen::VectorXd& w, double nu);

// Same value through the rank-2 factorization of H; O(n^2) per candidate.
double candidate_df(const OperatorState& state, const HatFactor& h,
                    const Eigen::VectorXd& w, double nu);

// B <- B + nu * diag(w) H (I - B), trace recomputed, iteration count
// incremented.
OperatorState advance_operator(const OperatorState& state, const Eigen::MatrixXd& h,
                               const Eigen::VectorXd& w, double nu);

// In-place rank-2 update used by the fitting loop; identical result.
void advance_operator_in_place(OperatorState& state, const HatFactor& h,
                               const Eigen::VectorXd& w, double nu);

}  // namespace cwboost
