#include "cwboost/base_learner.hpp"

#include <cmath>

#include "cwboost/dataset.hpp"
#include "cwboost/errors.hpp"

namespace cwboost {

BaseLearnerFit fit_base_learner(const Eigen::Ref<const Eigen::VectorXd>& x,
                                const Eigen::Ref<const Eigen::VectorXd>& u,
                                int covariate_index) {
    const auto n = x.size();
    if (n != u.size()) {
        throw DimensionError("covariate and working response lengths differ");
    }
    if (n < 2) {
        throw DimensionError("base learner needs at least 2 observations");
    }
    const double xbar = x.mean();
    const double ubar = u.mean();
    const double sxx = (x.array() - xbar).square().sum();
    if (is_degenerate_css(sxx, x.squaredNorm())) {
        throw SingularityError("constant covariate in base learner");
    }
    const double sxu = ((x.array() - xbar) * (u.array() - ubar)).sum();
    const double slope = sxu / sxx;
    return BaseLearnerFit{covariate_index, ubar - slope * xbar, slope};
}

HatFactor hat_factor(const Eigen::Ref<const Eigen::VectorXd>& x) {
    const auto n = x.size();
    if (n < 2) {
        throw DimensionError("hat matrix needs at least 2 observations");
    }
    Eigen::VectorXd centered = x.array() - x.mean();
    const double css = centered.squaredNorm();
    if (is_degenerate_css(css, x.squaredNorm())) {
        throw SingularityError("constant covariate has a singular design");
    }
    HatFactor factor;
    factor.n = static_cast<int>(n);
    factor.q = centered / std::sqrt(css);
    return factor;
}

Eigen::MatrixXd hat_matrix(const HatFactor& factor) {
    Eigen::MatrixXd h = Eigen::MatrixXd::Constant(factor.n, factor.n, 1.0 / factor.n);
    h.noalias() += factor.q * factor.q.transpose();
    return h;
}

Eigen::MatrixXd hat_matrix(const Eigen::Ref<const Eigen::VectorXd>& x) {
    return hat_matrix(hat_factor(x));
}

}  // namespace cwboost
