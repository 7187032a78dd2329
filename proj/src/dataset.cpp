#include "cwboost/dataset.hpp"

#include <cmath>

#include "cwboost/errors.hpp"
#include "cwboost/rng.hpp"

namespace cwboost {

Dataset make_dataset(const Eigen::MatrixXd& covariates, const Eigen::VectorXd& y,
                     std::vector<std::string> names) {
    const auto n = covariates.rows();
    const auto k = covariates.cols();
    Dataset data;
    data.X.resize(n, k + 1);
    data.X.col(0).setOnes();
    data.X.rightCols(k) = covariates;
    data.y = y;
    data.column_names.resize(k + 1);
    data.column_names[0] = "(Intercept)";
    if (!names.empty()) {
        if (static_cast<Eigen::Index>(names.size()) != k) {
            throw DimensionError("expected " + std::to_string(k) + " covariate names, got " +
                                 std::to_string(names.size()));
        }
        for (Eigen::Index j = 0; j < k; ++j) data.column_names[j + 1] = std::move(names[j]);
    } else {
        for (Eigen::Index j = 0; j < k; ++j) data.column_names[j + 1] = "x" + std::to_string(j + 1);
    }
    data.standardized.assign(k + 1, false);
    return data;
}

bool is_degenerate_css(double centered_sumsq, double sumsq) {
    return !(centered_sumsq > 1e-18 * std::max(sumsq, 1e-30));
}

void validate_dataset(const Dataset& data) {
    const int n = data.n();
    const int k = data.k();
    if (n < 2) throw DimensionError("dataset needs at least 2 observations");
    if (k < 1) throw DimensionError("dataset needs at least 1 covariate");
    if (data.y.size() != n) {
        throw DimensionError("outcome length " + std::to_string(data.y.size()) +
                             " does not match " + std::to_string(n) + " rows");
    }
    if ((data.X.col(0).array() != 1.0).any()) {
        throw DomainError("column 0 must be the constant 1 vector");
    }
    if (!data.X.allFinite() || !data.y.allFinite()) {
        throw DomainError("dataset contains non-finite values");
    }
    for (int j = 1; j <= k; ++j) {
        const auto col = data.X.col(j);
        const double mean = col.mean();
        const double css = (col.array() - mean).square().sum();
        if (is_degenerate_css(css, col.squaredNorm())) {
            const std::string name = static_cast<std::size_t>(j) < data.column_names.size()
                                         ? data.column_names[j]
                                         : ("column " + std::to_string(j));
            throw DegenerateColumnError("covariate '" + name + "' is constant");
        }
    }
}

std::vector<int> standardize_columns(Dataset& data) {
    std::vector<int> changed;
    const int n = data.n();
    if (n < 2) return changed;
    for (int j = 1; j <= data.k(); ++j) {
        auto col = data.X.col(j);
        const bool dummy = ((col.array() == 0.0) || (col.array() == 1.0)).all();
        if (dummy) continue;
        const double mean = col.mean();
        const double sd = std::sqrt((col.array() - mean).square().sum() / (n - 1));
        if (sd <= 0.0) continue;  // degenerate, caught by validation
        col = (col.array() - mean) / sd;
        data.standardized[j] = true;
        changed.push_back(j);
    }
    return changed;
}

std::uint64_t dataset_digest(const Dataset& data) {
    std::uint64_t h = fnv1a64(data.X.data(), sizeof(double) * data.X.size());
    const std::uint64_t hy = fnv1a64(data.y.data(), sizeof(double) * data.y.size());
    return derive_seed({h, hy});
}

}  // namespace cwboost
