#include "cwboost/engine.hpp"

#include <chrono>
#include <cmath>
#include <set>

#include "cwboost/errors.hpp"
#include "cwboost/rng.hpp"

namespace cwboost {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

constexpr std::uint64_t kFoldSalt = 0xf01d5;

void collect_outcome_warnings(const Dataset& data, const FitConfig& config, BoostFit& fit) {
    if (config.family != Family::poisson) return;
    for (Eigen::Index i = 0; i < data.y.size(); ++i) {
        if (data.y[i] != std::floor(data.y[i])) {
            fit.warnings.push_back(
                "poisson outcome has non-integer values; fitted as quasi-likelihood rates");
            return;
        }
    }
}

void finalize_at(BoostFit& fit, int t_star) {
    fit.stopping_iteration = t_star;
    fit.final_beta = fit.beta_path.row(t_star).transpose();
    fit.active_set.clear();
    for (Eigen::Index j = 1; j < fit.final_beta.size(); ++j) {
        if (fit.final_beta[j] != 0.0) fit.active_set.push_back(static_cast<int>(j));
    }
}

// The boosting loop proper. `validate` is off for internal fold refits,
// where columns constant on the subsample are skipped rather than rejected.
BoostFit run_path(const Dataset& data, const FitConfig& config, bool validate) {
    if (validate) validate_dataset(data);
    validate_fit_config(config);
    const auto start = Clock::now();
    const int n = data.n();
    const int k = data.k();
    const int total_iterations = config.iterations;

    BoostFit fit;
    collect_outcome_warnings(data, config, fit);

    const bool use_cv = config.strategy == Strategy::cv;
    const bool use_aic = config.strategy == Strategy::aic;
    FoldAssignment folds;
    if (use_cv) {
        folds = make_folds(n, config.folds, derive_seed({config.seed, kFoldSalt}));
        fit.folds = folds;
    }
    const SelectionCache cache =
        build_selection_cache(data, use_cv ? &folds : nullptr, use_aic);

    Eigen::VectorXd beta = Eigen::VectorXd::Zero(k + 1);
    beta[0] = offset_value(config.family, data.y);
    Eigen::VectorXd eta = Eigen::VectorXd::Constant(n, beta[0]);

    fit.beta_path.resize(total_iterations + 1, k + 1);
    fit.beta_path.row(0) = beta.transpose();
    fit.selected_index_path.reserve(total_iterations);
    fit.criterion_path.reserve(total_iterations);

    OperatorState op;
    if (use_aic) op = init_operator(n);

    std::set<int> reported_skips;
    int realized = 0;
    for (int t = 1; t <= total_iterations; ++t) {
#ifndef NDEBUG
        {
            const double drift = (data.X * beta - eta).lpNorm<Eigen::Infinity>();
            if (drift > 1e-7) throw FitError("linear predictor drifted from X beta");
        }
#endif
        Eigen::VectorXd w;
        IterationContext ctx{data,          beta,
                             eta,           config.family,
                             config.nu,     use_cv ? &folds : nullptr,
                             use_aic ? &op : nullptr, nullptr,
                             config.gaussian_aic,     &cache};
        if (use_aic) {
            w = weights(config.family, eta);
            ctx.w = &w;
        }
        SelectionResult chosen;
        const auto select_start = Clock::now();
        try {
            chosen = select(config.strategy, ctx);
        } catch (const Error& err) {
            throw FitError("selection failed at iteration " + std::to_string(t) + ": " +
                           err.what());
        }
        fit.timing.selection_seconds += seconds_since(select_start);
        for (int j : chosen.skipped) {
            if (reported_skips.insert(j).second) {
                fit.warnings.push_back("covariate '" + data.column_names[j] +
                                       "' skipped: constant on a training split");
            }
        }

        const int j = chosen.chosen_index;
        beta[0] += config.nu * chosen.candidate_fit.intercept;
        beta[j] += config.nu * chosen.candidate_fit.slope;
        eta.array() += config.nu * chosen.candidate_fit.intercept;
        eta.noalias() += (config.nu * chosen.candidate_fit.slope) * data.X.col(j);

        fit.beta_path.row(t) = beta.transpose();
        fit.selected_index_path.push_back(j);
        fit.criterion_path.push_back(chosen.criterion_value);
        realized = t;

        if (use_aic) {
            HatFactor factor{n, cache.q.col(j - 1)};
            advance_operator_in_place(op, factor, w, config.nu);
        }

        if (config.early_stop && t >= 2) {
            const double criterion_change =
                std::abs(fit.criterion_path[t - 1] - fit.criterion_path[t - 2]);
            const double beta_change =
                (fit.beta_path.row(t) - fit.beta_path.row(t - 1)).lpNorm<Eigen::Infinity>();
            if (criterion_change < config.threshold || beta_change < config.threshold) {
                fit.early_stopped = true;
                break;
            }
        }
    }
    fit.iterations_run = realized;
    if (realized < total_iterations) {
        fit.beta_path.conservativeResize(realized + 1, Eigen::NoChange);
    }

    const auto stop_start = Clock::now();
    const int t_star =
        select_stopping_iteration(fit.criterion_path, fit.beta_path, config.threshold);
    fit.timing.stopping_seconds = seconds_since(stop_start);
    finalize_at(fit, t_star);
    fit.timing.total_seconds = seconds_since(start);
    return fit;
}

Dataset rows_subset(const Dataset& data, const std::vector<int>& rows) {
    Dataset sub;
    sub.X.resize(rows.size(), data.X.cols());
    sub.y.resize(rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        sub.X.row(i) = data.X.row(rows[i]);
        sub.y[i] = data.y[rows[i]];
    }
    sub.column_names = data.column_names;
    sub.standardized = data.standardized;
    return sub;
}

}  // namespace

void validate_fit_config(const FitConfig& config) {
    if (config.iterations < 0) throw ConfigError("iterations must be >= 0");
    if (!(config.nu > 0.0 && config.nu <= 1.0)) throw ConfigError("nu must be in (0, 1]");
    if (!(config.threshold >= 0.0)) throw ConfigError("threshold must be >= 0");
    const bool needs_folds = config.strategy == Strategy::cv || config.cv_stopping;
    if (needs_folds && config.folds < 2) throw ConfigError("fold count must be at least 2");
    if (config.cv_stopping && config.strategy != Strategy::loss) {
        throw ConfigError("cv stopping is defined for the loss strategy");
    }
}

int select_stopping_iteration(const std::vector<double>& criterion_path,
                              const Eigen::MatrixXd& beta_path, double threshold) {
    const int total = static_cast<int>(criterion_path.size());
    if (total == 0) return 0;
    if (beta_path.rows() < total + 1) {
        throw DimensionError("beta path shorter than criterion path");
    }
    int t_min = 1;
    for (int t = 2; t <= total; ++t) {
        if (criterion_path[t - 1] < criterion_path[t_min - 1]) t_min = t;
    }
    for (int t = 1; t < t_min; ++t) {
        const double criterion_change = std::abs(criterion_path[t] - criterion_path[t - 1]);
        const double beta_change =
            (beta_path.row(t + 1) - beta_path.row(t)).lpNorm<Eigen::Infinity>();
        if (criterion_change < threshold || beta_change < threshold) return t;
    }
    return t_min;
}

BoostFit fit(const Dataset& data, const FitConfig& config) {
    if (config.cv_stopping) return fit_with_cv_stopping(data, config);
    return run_path(data, config, true);
}

BoostFit fit_with_cv_stopping(const Dataset& data, const FitConfig& config) {
    validate_dataset(data);
    {
        FitConfig check = config;
        check.cv_stopping = true;
        validate_fit_config(check);
    }
    FitConfig path_config = config;
    path_config.strategy = Strategy::loss;
    path_config.cv_stopping = false;
    path_config.early_stop = false;

    const auto start = Clock::now();
    BoostFit full = run_path(data, path_config, false);
    const int total = config.iterations;

    const FoldAssignment folds =
        make_folds(data.n(), config.folds, derive_seed({config.seed, kFoldSalt}));
    std::vector<std::vector<int>> fold_rows(folds.fold_count);
    for (int i = 0; i < data.n(); ++i) fold_rows[folds.labels[i]].push_back(i);

    std::vector<double> curve(total + 1, 0.0);
    for (int f = 0; f < folds.fold_count; ++f) {
        std::vector<int> train_rows;
        train_rows.reserve(data.n() - fold_rows[f].size());
        for (int i = 0; i < data.n(); ++i) {
            if (folds.labels[i] != f) train_rows.push_back(i);
        }
        const Dataset train = rows_subset(data, train_rows);
        const Dataset held = rows_subset(data, fold_rows[f]);
        const BoostFit part = run_path(train, path_config, false);
        const double nf = static_cast<double>(held.n());
        for (int t = 0; t <= total; ++t) {
            const Eigen::VectorXd eta_held = held.X * part.beta_path.row(t).transpose();
            curve[t] += loss(config.family, held.y, eta_held) / nf;
        }
    }
    for (double& value : curve) value /= folds.fold_count;

    int t_star = 0;
    for (int t = 1; t <= total; ++t) {
        if (curve[t] < curve[t_star]) t_star = t;
    }

    full.folds = folds;
    full.mean_holdout_curve = std::move(curve);
    finalize_at(full, t_star);
    full.timing.total_seconds = seconds_since(start);
    return full;
}

}  // namespace cwboost
