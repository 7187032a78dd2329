#include "cwboost/operator_state.hpp"

#include "cwboost/errors.hpp"

namespace cwboost {

OperatorState init_operator(int n) {
    if (n < 2) {
        throw DimensionError("operator needs at least 2 observations");
    }
    OperatorState state;
    state.B = Eigen::MatrixXd::Constant(n, n, 1.0 / n);
    state.trace = 1.0;
    state.iteration_count = 0;
    return state;
}

double trace_product(const Eigen::MatrixXd& a, const Eigen::MatrixXd& c) {
    if (a.rows() != a.cols() || c.rows() != c.cols() || a.rows() != c.rows()) {
        throw DimensionError("trace_product needs square matrices of equal size");
    }
    return a.cwiseProduct(c.transpose()).sum();
}

namespace {

void check_update_args(const OperatorState& state, Eigen::Index hn,
                       const Eigen::VectorXd& w, double nu) {
    if (hn != state.B.rows() || w.size() != state.B.rows()) {
        throw DimensionError("operator update dimensions disagree");
    }
    if (!(nu >= 0.0)) {
        throw DomainError("step length must be nonnegative");
    }
}

}  // namespace

double candidate_df(const OperatorState& state, const Eigen::MatrixXd& h,
                    const Eigen::VectorXd& w, double nu) {
    check_update_args(state, h.rows(), w, nu);
    const Eigen::MatrixXd residual_map =
        Eigen::MatrixXd::Identity(state.n(), state.n()) - state.B;
    return state.trace + nu * trace_product(w.asDiagonal() * h, residual_map);
}

double candidate_df(const OperatorState& state, const HatFactor& h,
                    const Eigen::VectorXd& w, double nu) {
    check_update_args(state, h.q.size(), w, nu);
    const int n = state.n();
    // With M = I - B and H = J/n + qq':
    //   tr(diag(w) H M) = (1/n) sum_i w_i colsum_i(M) + sum_i w_i q_i (M'q)_i
    Eigen::VectorXd colsum = Eigen::VectorXd::Ones(n) - state.B.colwise().sum().transpose();
    Eigen::VectorXd mq = h.q - state.B.transpose() * h.q;
    const double intercept_term = w.dot(colsum) / n;
    const double covariate_term = (w.array() * h.q.array() * mq.array()).sum();
    return state.trace + nu * (intercept_term + covariate_term);
}

OperatorState advance_operator(const OperatorState& state, const Eigen::MatrixXd& h,
                               const Eigen::VectorXd& w, double nu) {
    check_update_args(state, h.rows(), w, nu);
    OperatorState next;
    const Eigen::MatrixXd residual_map =
        Eigen::MatrixXd::Identity(state.n(), state.n()) - state.B;
    next.B = state.B + nu * (w.asDiagonal() * (h * residual_map));
    next.trace = next.B.trace();
    next.iteration_count = state.iteration_count + 1;
    return next;
}

void advance_operator_in_place(OperatorState& state, const HatFactor& h,
                               const Eigen::VectorXd& w, double nu) {
    check_update_args(state, h.q.size(), w, nu);
    const int n = state.n();
    // H (I - B) = (1/n) 1 s' + q v' with s = (I - B)' 1 and v = (I - B)' q,
    // so the update is two rank-1 terms after row scaling by w.
    Eigen::VectorXd s = Eigen::VectorXd::Ones(n) - state.B.colwise().sum().transpose();
    Eigen::VectorXd v = h.q - state.B.transpose() * h.q;
    state.B.noalias() += (nu / n) * (w * s.transpose());
    state.B.noalias() += nu * (w.cwiseProduct(h.q) * v.transpose());
    state.trace = state.B.trace();
    state.iteration_count += 1;
}

}  // namespace cwboost
