#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <string>
#include <vector>

namespace cwboost {

// Design matrix with an explicit leading intercept column of ones.
struct Dataset {
    Eigen::MatrixXd X;                      // N x (k+1), column 0 all ones
    Eigen::VectorXd y;                      // length N
    std::vector<std::string> column_names;  // size k+1, [0] = "(Intercept)"
    std::vector<bool> standardized;         // size k+1

    int n() const { return static_cast<int>(X.rows()); }
    int k() const { return static_cast<int>(X.cols()) - 1; }
};

// Builds a Dataset from covariates (no intercept column) and outcome,
// prepending the intercept. Names default to x1..xk.
Dataset make_dataset(const Eigen::MatrixXd& covariates, const Eigen::VectorXd& y,
                     std::vector<std::string> names = {});

// Numerically-constant check shared by validation and base-learner guards:
// a column is degenerate when its centered sum of squares vanishes relative
// to its raw magnitude.
bool is_degenerate_css(double centered_sumsq, double sumsq);

// Throws DimensionError / DomainError / DegenerateColumnError on violation:
// column 0 exactly ones, N >= 2, k >= 1, all entries finite, every
// non-intercept column non-constant.
void validate_dataset(const Dataset& data);

// Centers and scales non-intercept columns in place (sample sd, n-1
// denominator). Columns whose values are all 0/1 are treated as dummy
// coded and left untouched. Returns the indices that were standardized.
std::vector<int> standardize_columns(Dataset& data);

// Order-sensitive digest of X and y bytes, for pairing checks and manifests.
std::uint64_t dataset_digest(const Dataset& data);

}  // namespace cwboost
