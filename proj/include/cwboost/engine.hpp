#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <string>
#include <vector>

#include "cwboost/dataset.hpp"
#include "cwboost/family.hpp"
#include "cwboost/selection.hpp"

namespace cwboost {

// Fixed default so unadorned runs are reproducible.
inline constexpr std::uint64_t kDefaultSeed = 20240815;

struct FitConfig {
    int iterations = 3000;        // T
    double nu = 0.1;              // step length, in (0, 1]
    int folds = 10;               // F
    double threshold = 1e-8;      // minimum-improvement threshold
    Strategy strategy = Strategy::loss;
    std::uint64_t seed = kDefaultSeed;
    Family family = Family::gaussian;
    bool early_stop = false;
    // Classical benchmark: loss-based selection with the stopping iteration
    // chosen by F-fold cross-validation over the whole path.
    bool cv_stopping = false;
    GaussianAicForm gaussian_aic = GaussianAicForm::fixed_sigma;
};

void validate_fit_config(const FitConfig& config);

struct FitTiming {
    double total_seconds = 0.0;
    double selection_seconds = 0.0;
    double stopping_seconds = 0.0;
};

struct BoostFit {
    Eigen::MatrixXd beta_path;            // (iterations_run+1) x (k+1), row 0 = offset only
    std::vector<int> selected_index_path;  // length iterations_run
    std::vector<double> criterion_path;    // length iterations_run
    int stopping_iteration = 0;            // t*, in 0..iterations_run
    Eigen::VectorXd final_beta;            // beta_path row t*
    std::vector<int> active_set;           // covariates with nonzero coefficient at t*
    FoldAssignment folds;                  // empty unless cv selection / cv stopping
    std::vector<double> mean_holdout_curve;  // cv stopping only, size iterations+1
    std::vector<std::string> warnings;
    bool early_stopped = false;
    int iterations_run = 0;
    FitTiming timing;
};

// Smallest index attaining the global criterion minimum, unless the walk
// towards it finds consecutive iterations whose criterion or coefficient
// change (max norm) falls below the threshold first; then that earlier
// iteration is returned. Empty path selects 0, the offset-only model.
int select_stopping_iteration(const std::vector<double>& criterion_path,
                              const Eigen::MatrixXd& beta_path, double threshold);

// Runs the component-wise boosting loop with the configured selection
// strategy. Dispatches to fit_with_cv_stopping when config.cv_stopping.
BoostFit fit(const Dataset& data, const FitConfig& config);

// Full-length loss-selection path plus F held-out refits of the same path;
// the stopping iteration is the argmin of the fold-averaged held-out loss
// curve. early_stop is ignored here: the curve needs the complete path.
BoostFit fit_with_cv_stopping(const Dataset& data, const FitConfig& config);

}  // namespace cwboost
