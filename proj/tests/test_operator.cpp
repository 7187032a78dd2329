#include <doctest.h>

#include <cmath>

#include "cwboost/base_learner.hpp"
#include "cwboost/errors.hpp"
#include "cwboost/operator_state.hpp"
#include "test_util.hpp"

using namespace cwboost;

namespace {

// Product closed form of the unweighted operator:
// B^(t) = I - (I - nu H_{j_t}) ... (I - nu H_{j_1}).
Eigen::MatrixXd closed_form_operator(const std::vector<Eigen::MatrixXd>& hats, double nu) {
    const auto n = hats.front().rows();
    Eigen::MatrixXd product = Eigen::MatrixXd::Identity(n, n);
    for (const auto& h : hats) {
        product = (Eigen::MatrixXd::Identity(n, n) - nu * h) * product;
    }
    return Eigen::MatrixXd::Identity(n, n) - product;
}

double dense_trace(const Eigen::MatrixXd& a, const Eigen::MatrixXd& c) {
    return (a * c).trace();
}

}  // namespace

TEST_CASE("init operator is the intercept hat matrix") {
    auto state = init_operator(4);
    CHECK((state.B.array() == 0.25).all());
    CHECK(state.trace == doctest::Approx(1.0));
    CHECK(state.iteration_count == 0);
    CHECK((state.B * state.B - state.B).lpNorm<Eigen::Infinity>() < 1e-12);

    auto two = init_operator(2);
    CHECK(two.B(0, 0) == doctest::Approx(0.5));
    CHECK(two.B(1, 0) == doctest::Approx(0.5));
    CHECK_THROWS_AS(init_operator(1), DimensionError);
}

TEST_CASE("trace_product basics") {
    const Eigen::MatrixXd id3 = Eigen::MatrixXd::Identity(3, 3);
    CHECK(trace_product(id3, id3) == doctest::Approx(3.0));

    Eigen::MatrixXd a = Eigen::Vector2d(1, 2).asDiagonal();
    Eigen::MatrixXd c = Eigen::Vector2d(3, 4).asDiagonal();
    CHECK(trace_product(a, c) == doctest::Approx(11.0));
}

TEST_CASE("trace_product matches the dense product") {
    auto gen = test::rng(61);
    for (int trial = 0; trial < 20; ++trial) {
        const Eigen::MatrixXd a = test::random_matrix(6, 6, gen);
        const Eigen::MatrixXd c = test::random_matrix(6, 6, gen);
        CHECK(std::abs(trace_product(a, c) - dense_trace(a, c)) < 1e-10);
    }
    Eigen::MatrixXd rect(2, 3);
    CHECK_THROWS_AS(trace_product(rect, rect), DimensionError);
}

TEST_CASE("candidate_df on the initial state") {
    const int n = 6;
    auto gen = test::rng(67);
    const Eigen::VectorXd x = test::random_vector(n, gen);
    const Eigen::MatrixXd h = hat_matrix(x);
    const Eigen::VectorXd w = Eigen::VectorXd::Ones(n);
    auto state = init_operator(n);
    // H fixes the intercept space, so tr(H B0) = 1 and df = 1 + nu (2 - 1).
    for (const double nu : {0.1, 0.5, 1.0}) {
        CHECK(candidate_df(state, h, w, nu) == doctest::Approx(1.0 + nu).epsilon(1e-10));
    }
    CHECK(candidate_df(state, h, w, 0.0) == doctest::Approx(state.trace));
}

TEST_CASE("candidate_df matches densely materialized updates") {
    auto gen = test::rng(71);
    const int n = 8;
    const double nu = 0.3;
    // a state built from 3 prior updates with nonuniform weights
    auto state = init_operator(n);
    for (int step = 0; step < 3; ++step) {
        const Eigen::VectorXd x = test::random_vector(n, gen);
        const Eigen::VectorXd w = test::random_vector(n, gen, 0.5, 2.0);
        state = advance_operator(state, hat_matrix(x), w, nu);
    }
    for (int trial = 0; trial < 10; ++trial) {
        const Eigen::VectorXd x = test::random_vector(n, gen);
        const Eigen::VectorXd w = test::random_vector(n, gen, 0.5, 2.0);
        const Eigen::MatrixXd h = hat_matrix(x);
        const Eigen::MatrixXd dense =
            state.B + nu * (w.asDiagonal() * (h * (Eigen::MatrixXd::Identity(n, n) - state.B)));
        CHECK(std::abs(candidate_df(state, h, w, nu) - dense.trace()) < 1e-10);
        // fast path through the rank-2 factorization agrees with the dense path
        CHECK(std::abs(candidate_df(state, hat_factor(x), w, nu) - dense.trace()) < 1e-10);
        // and with the trace of the advanced operator
        CHECK(std::abs(candidate_df(state, h, w, nu) -
                       advance_operator(state, h, w, nu).trace) < 1e-10);
    }
}

TEST_CASE("advance_operator closed forms") {
    const int n = 5;
    auto gen = test::rng(73);
    const Eigen::VectorXd x = test::random_vector(n, gen);
    const Eigen::MatrixXd h = hat_matrix(x);
    const Eigen::VectorXd w = Eigen::VectorXd::Ones(n);

    auto state = init_operator(n);
    auto next = advance_operator(state, h, w, 0.1);
    CHECK(next.trace == doctest::Approx(1.1).epsilon(1e-10));
    CHECK(next.iteration_count == 1);

    // from B = 0 (test-only) one full-step update equals H itself
    OperatorState zero;
    zero.B = Eigen::MatrixXd::Zero(n, n);
    zero.trace = 0.0;
    auto one_step = advance_operator(zero, h, w, 1.0);
    CHECK((one_step.B - h).lpNorm<Eigen::Infinity>() < 1e-12);
}

TEST_CASE("incremental updates equal the product closed form") {
    auto gen = test::rng(79);
    const int n = 8;
    const double nu = 0.1;
    const Eigen::VectorXd w = Eigen::VectorXd::Ones(n);
    std::vector<Eigen::MatrixXd> hats;
    // start from B = 0 so the closed form has exactly the applied factors
    OperatorState state;
    state.B = Eigen::MatrixXd::Zero(n, n);
    state.trace = 0.0;
    OperatorState fast = state;
    for (int t = 0; t < 5; ++t) {
        const Eigen::VectorXd x = test::random_vector(n, gen);
        hats.push_back(hat_matrix(x));
        state = advance_operator(state, hats.back(), w, nu);
        advance_operator_in_place(fast, hat_factor(x), w, nu);
        const Eigen::MatrixXd expected = closed_form_operator(hats, nu);
        CHECK((state.B - expected).lpNorm<Eigen::Infinity>() < 1e-9);
        CHECK((fast.B - expected).lpNorm<Eigen::Infinity>() < 1e-9);
        CHECK(std::abs(fast.trace - state.trace) < 1e-10);
    }
}

TEST_CASE("trace never decreases for unit-weight updates") {
    auto gen = test::rng(83);
    const int n = 10;
    const Eigen::VectorXd w = Eigen::VectorXd::Ones(n);
    for (const double nu : {0.1, 0.5, 1.0}) {
        auto state = init_operator(n);
        double last = state.trace;
        for (int t = 0; t < 12; ++t) {
            const Eigen::VectorXd x = test::random_vector(n, gen);
            advance_operator_in_place(state, hat_factor(x), w, nu);
            CHECK(state.trace >= last - 1e-10);
            last = state.trace;
        }
    }
}
