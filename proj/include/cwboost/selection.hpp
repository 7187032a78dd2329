#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <limits>
#include <optional>
#include <string_view>
#include <vector>

#include "cwboost/base_learner.hpp"
#include "cwboost/dataset.hpp"
#include "cwboost/family.hpp"
#include "cwboost/operator_state.hpp"

namespace cwboost {

// How the covariate to update is chosen in each boosting iteration:
//   loss - in-sample loss of the damped update (classical behaviour)
//   cv   - fold-averaged held-out loss of the damped update
//   aic  - -2 log-likelihood plus twice the candidate operator trace
enum class Strategy { loss, cv, aic };

const char* to_string(Strategy strategy);
std::optional<Strategy> parse_strategy(std::string_view name);

// Which -2 log-likelihood enters the Gaussian AIC: sum of squares with
// sigma^2 = 1 (default), or the profiled form n * log(RSS / n).
enum class GaussianAicForm { fixed_sigma, profiled };

const char* to_string(GaussianAicForm form);
std::optional<GaussianAicForm> parse_gaussian_aic_form(std::string_view name);

// Fold labels 0..fold_count-1, drawn once per fit and reused in every
// iteration. Sizes differ by at most one.
struct FoldAssignment {
    std::vector<int> labels;
    int fold_count = 0;

    bool empty() const { return labels.empty(); }
    int n() const { return static_cast<int>(labels.size()); }
};

// Shuffled near-equal assignment. Throws ConfigError when fold_count < 2 or
// any fold would end up with fewer than 2 observations.
FoldAssignment make_folds(int n, int fold_count, std::uint64_t seed);

// Per-fit precomputation shared by the strategies: column sums/means and
// centered sums of squares, per-fold column sums (CV), and the unit centered
// columns q_j of the rank-2 hat factorization (AIC).
struct SelectionCache {
    Eigen::VectorXd col_sum;    // k+1
    Eigen::VectorXd col_sumsq;  // k+1
    Eigen::VectorXd col_mean;   // k+1
    Eigen::VectorXd col_css;    // k+1
    std::vector<bool> usable;   // k+1; false for degenerate columns
    Eigen::MatrixXd q;          // n x k, empty unless built with_q
    std::vector<std::vector<int>> fold_rows;
    Eigen::MatrixXd fold_sum_x;   // (k+1) x F, empty without folds
    Eigen::MatrixXd fold_sum_xx;  // (k+1) x F
};

SelectionCache build_selection_cache(const Dataset& data, const FoldAssignment* folds,
                                     bool with_q);

inline constexpr double kNoValue = std::numeric_limits<double>::quiet_NaN();

struct SelectionResult {
    int chosen_index = 0;            // 1..k
    double criterion_value = kNoValue;
    BaseLearnerFit candidate_fit;    // refit on the full data
    std::vector<double> per_candidate_values;  // size k, NaN for skipped candidates
    std::vector<int> skipped;        // candidates excluded this iteration
};

// Read-only snapshot of one boosting iteration. eta must equal X * beta
// (checked in debug builds by the engine).
struct IterationContext {
    const Dataset& data;
    const Eigen::VectorXd& beta;
    const Eigen::VectorXd& eta;
    Family family = Family::gaussian;
    double nu = 0.1;
    const FoldAssignment* folds = nullptr;   // cv only
    const OperatorState* op = nullptr;       // aic only
    const Eigen::VectorXd* w = nullptr;      // aic only; derived from eta when null
    GaussianAicForm gaussian_aic = GaussianAicForm::fixed_sigma;
    const SelectionCache* cache = nullptr;   // built on the fly when null
};

// Ties are broken by the lowest covariate index in all three strategies.
SelectionResult select_loss(const IterationContext& ctx);
SelectionResult select_cv(const IterationContext& ctx);
SelectionResult select_aic(const IterationContext& ctx);
SelectionResult select(Strategy strategy, const IterationContext& ctx);

}  // namespace cwboost
