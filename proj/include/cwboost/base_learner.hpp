#pragma once

#include <Eigen/Core>

namespace cwboost {

// Least-squares fit of a working response on [1, x_j].
struct BaseLearnerFit {
    int covariate_index = 0;  // 1..k once attributed, 0 when standalone
    double intercept = 0.0;
    double slope = 0.0;
};

// Closed-form simple regression of u on [1, x]. Throws SingularityError when
// x is (numerically) constant.
BaseLearnerFit fit_base_learner(const Eigen::Ref<const Eigen::VectorXd>& x,
                                const Eigen::Ref<const Eigen::VectorXd>& u,
                                int covariate_index = 0);

// Rank-2 factorization of the hat matrix of [1, x]:
//   H = (1/n) * J + q q',  q = (x - xbar) / ||x - xbar||.
// The two terms are the orthogonal projections onto the intercept and the
// centered covariate.
struct HatFactor {
    int n = 0;
    Eigen::VectorXd q;
};

HatFactor hat_factor(const Eigen::Ref<const Eigen::VectorXd>& x);

// Dense n x n hat matrix of [1, x]; symmetric, idempotent, trace 2.
Eigen::MatrixXd hat_matrix(const Eigen::Ref<const Eigen::VectorXd>& x);
Eigen::MatrixXd hat_matrix(const HatFactor& factor);

}  // namespace cwboost
