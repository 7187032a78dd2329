#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "cwboost/dataset.hpp"
#include "cwboost/engine.hpp"

namespace cwboost {

enum class CovarianceKind { identity, toeplitz };

const char* to_string(CovarianceKind kind);
std::optional<CovarianceKind> parse_covariance(std::string_view name);

// One cell of the benchmark grid. `signal` is the noise-to-signal ratio for
// gaussian outcomes; for poisson outcomes it is the coefficient level on the
// log-mean scale (the NSR cannot be induced directly there, so three levels
// act as a signal proxy).
struct SimSetting {
    int k = 100;
    int informative = 5;
    double signal = 0.2;
    CovarianceKind covariance = CovarianceKind::identity;
    double rho = 0.9;
    Family family = Family::gaussian;
    int n_train = 250;
    int n_test = 100;
    int replications = 100;
    double poisson_mean = 5.0;  // target marginal mean of a poisson outcome

    std::string id() const;
};

void validate_setting(const SimSetting& setting);

// Sparse truth: beta_0 plus `informative` leading nonzero coefficients.
struct TrueModel {
    Eigen::VectorXd beta;        // k+1
    Eigen::VectorXd beta_tilde;  // unscaled draws from {-3,-2,-1,1,2,3}
    double kappa = 0.0;          // gaussian scaling factor (poisson: the level)
};

Eigen::MatrixXd toeplitz_covariance(int k, double rho);
Eigen::MatrixXd covariance_matrix(const SimSetting& setting);

TrueModel draw_true_model(const SimSetting& setting, std::uint64_t seed);

struct SimData {
    Dataset train;
    Dataset test;
};

// Rows iid MVN(0, Sigma) via Cholesky; gaussian outcome X beta + N(0,1)
// noise, poisson outcome sampled with mean exp(X beta). Train and test come
// from independent draws of the same process.
SimData generate_dataset(const SimSetting& setting, const TrueModel& truth,
                         std::uint64_t draw_seed);

// Fit procedures compared by the bench. loss_cv_stop is the classical
// benchmark: loss-based selection, stopping iteration picked by F-fold CV.
enum class Method { loss, cv, aic, loss_cv_stop };

const char* to_string(Method method);
std::optional<Method> parse_method(std::string_view name);
FitConfig method_config(Method method, const struct GridOptions& options, Family family,
                        std::uint64_t fit_seed);

struct MetricRow {
    std::string setting_id;
    std::string method;
    int replication = 0;
    double fpr = kNoValue;
    double tpr = kNoValue;
    double mse = kNoValue;
    double mspe = kNoValue;
    int t_star = 0;
    int active_set_size = 0;
    double wall_seconds = 0.0;  // written to the timings file, not the raw CSV
    std::uint64_t data_digest = 0;
    std::string status = "ok";
};

// Selection and prediction metrics of one fit against the known truth.
// FPR = FP / (k - INF), TPR = TP / INF (NaN when INF = 0); MSE and MSPE are
// response-scale squared errors on train and test.
MetricRow evaluate_fit(const BoostFit& fit, const TrueModel& truth, const Dataset& train,
                       const Dataset& test, Family family);

struct GridOptions {
    std::uint64_t seed = kDefaultSeed;
    int threads = 1;
    int iterations = 3000;
    double nu = 0.1;
    int folds = 10;
    double threshold = 1e-8;
    bool early_stop = false;
    GaussianAicForm gaussian_aic = GaussianAicForm::fixed_sigma;
    std::optional<int> replications_override;
};

// Reduced-runtime defaults: 20 replications, 500 iterations, early stop on.
void apply_desk_scale(GridOptions& options);

struct AggregateRow {
    std::string setting_id;
    SimSetting setting;
    std::string method;
    int rows_ok = 0;
    double median_fpr = kNoValue;
    double var100_fpr = kNoValue;
    double median_tpr = kNoValue;
    double var100_tpr = kNoValue;
    double median_mspe = kNoValue;
    double median_t_star = kNoValue;
};

struct GridResult {
    std::vector<SimSetting> settings;  // replications override applied
    std::vector<Method> methods;
    std::vector<MetricRow> rows;       // fixed order: setting, replication, method
    std::vector<AggregateRow> aggregates;
    int failures = 0;
};

// Within a replication every method sees the same train/test draw, so the
// comparison is paired; rows land in preassigned slots, making the output
// independent of the worker count.
GridResult run_grid(const std::vector<SimSetting>& settings, const std::vector<Method>& methods,
                    const GridOptions& options);

double median(std::vector<double> values);
double sample_variance(const std::vector<double>& values);

std::vector<AggregateRow> aggregate_rows(const std::vector<SimSetting>& settings,
                                         const std::vector<Method>& methods,
                                         const std::vector<MetricRow>& rows);

std::string raw_metrics_csv(const GridResult& result);
std::string aggregate_csv(const GridResult& result);
std::string timings_csv(const GridResult& result);

// The 24 gaussian grid cells (2 correlation structures x k in {100,500} x
// INF in {5,20} x NSR in {0.2,0.5,1}) and the poisson analogue with levels
// {0.05,0.1,0.2}.
std::vector<SimSetting> preset_gaussian_grid();
std::vector<SimSetting> preset_poisson_grid();

}  // namespace cwboost
