#include "cwboost/selection.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "cwboost/errors.hpp"
#include "cwboost/rng.hpp"

namespace cwboost {

const char* to_string(Strategy strategy) {
    switch (strategy) {
        case Strategy::loss: return "loss";
        case Strategy::cv: return "cv";
        case Strategy::aic: return "aic";
    }
    return "?";
}

std::optional<Strategy> parse_strategy(std::string_view name) {
    if (name == "loss") return Strategy::loss;
    if (name == "cv") return Strategy::cv;
    if (name == "aic") return Strategy::aic;
    return std::nullopt;
}

const char* to_string(GaussianAicForm form) {
    return form == GaussianAicForm::fixed_sigma ? "fixed_sigma" : "profiled";
}

std::optional<GaussianAicForm> parse_gaussian_aic_form(std::string_view name) {
    if (name == "fixed_sigma") return GaussianAicForm::fixed_sigma;
    if (name == "profiled") return GaussianAicForm::profiled;
    return std::nullopt;
}

FoldAssignment make_folds(int n, int fold_count, std::uint64_t seed) {
    if (fold_count < 2) {
        throw ConfigError("fold count must be at least 2");
    }
    if (n < 2 * fold_count) {
        throw ConfigError("need at least 2 observations per fold: n=" + std::to_string(n) +
                          ", folds=" + std::to_string(fold_count));
    }
    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    Rng rng = make_rng(seed);
    std::shuffle(order.begin(), order.end(), rng);
    FoldAssignment folds;
    folds.fold_count = fold_count;
    folds.labels.resize(n);
    for (int i = 0; i < n; ++i) {
        folds.labels[order[i]] = i % fold_count;
    }
    return folds;
}

SelectionCache build_selection_cache(const Dataset& data, const FoldAssignment* folds,
                                     bool with_q) {
    const int n = data.n();
    const int k = data.k();
    SelectionCache cache;
    cache.col_sum = data.X.colwise().sum();
    cache.col_sumsq = data.X.colwise().squaredNorm();
    cache.col_mean = cache.col_sum / n;
    cache.col_css.resize(k + 1);
    cache.usable.assign(k + 1, true);
    cache.usable[0] = false;
    for (int j = 0; j <= k; ++j) {
        cache.col_css[j] = cache.col_sumsq[j] - cache.col_sum[j] * cache.col_sum[j] / n;
        if (j >= 1 && is_degenerate_css(cache.col_css[j], cache.col_sumsq[j])) {
            cache.usable[j] = false;
        }
    }
    if (with_q) {
        cache.q.resize(n, k);
        for (int j = 1; j <= k; ++j) {
            if (!cache.usable[j]) {
                cache.q.col(j - 1).setZero();
                continue;
            }
            cache.q.col(j - 1) =
                (data.X.col(j).array() - cache.col_mean[j]) / std::sqrt(cache.col_css[j]);
        }
    }
    if (folds != nullptr) {
        if (folds->n() != n) {
            throw DimensionError("fold assignment length does not match dataset");
        }
        const int fold_count = folds->fold_count;
        cache.fold_rows.assign(fold_count, {});
        for (int i = 0; i < n; ++i) {
            const int f = folds->labels[i];
            if (f < 0 || f >= fold_count) {
                throw ConfigError("fold label out of range");
            }
            cache.fold_rows[f].push_back(i);
        }
        for (int f = 0; f < fold_count; ++f) {
            if (cache.fold_rows[f].size() < 2) {
                throw ConfigError("fold " + std::to_string(f) + " has fewer than 2 observations");
            }
        }
        cache.fold_sum_x = Eigen::MatrixXd::Zero(k + 1, fold_count);
        cache.fold_sum_xx = Eigen::MatrixXd::Zero(k + 1, fold_count);
        for (int i = 0; i < n; ++i) {
            const int f = folds->labels[i];
            for (int j = 0; j <= k; ++j) {
                const double v = data.X(i, j);
                cache.fold_sum_x(j, f) += v;
                cache.fold_sum_xx(j, f) += v * v;
            }
        }
    }
    return cache;
}

namespace {

struct OlsStats {
    double n = 0, sum_x = 0, sum_xx = 0, sum_u = 0, sum_xu = 0;

    // Returns false when x is degenerate on this subset.
    bool solve(double& intercept, double& slope) const {
        const double css = sum_xx - sum_x * sum_x / n;
        if (is_degenerate_css(css, sum_xx)) return false;
        slope = (sum_xu - sum_x * sum_u / n) / css;
        intercept = (sum_u - slope * sum_x) / n;
        return true;
    }
};

// Loss of the damped candidate update eta + nu * (a + b x), evaluated on
// rows [begin, end) of the full data; allocation free.
double candidate_loss_full(Family family, const Eigen::VectorXd& y, const Eigen::VectorXd& eta,
                           const Eigen::MatrixXd& X, int j, double nu, double a, double b) {
    const double da = nu * a;
    const double db = nu * b;
    if (family == Family::gaussian) {
        return 0.5 * ((y - eta).array() - da - db * X.col(j).array()).square().sum();
    }
    auto shifted = eta.array() + da + db * X.col(j).array();
    return (shifted.exp() - y.array() * shifted).sum();
}

double candidate_loss_rows(Family family, const Eigen::VectorXd& y, const Eigen::VectorXd& eta,
                           const Eigen::MatrixXd& X, int j, double nu, double a, double b,
                           const std::vector<int>& rows) {
    const double da = nu * a;
    const double db = nu * b;
    double total = 0.0;
    if (family == Family::gaussian) {
        for (int i : rows) {
            const double r = y[i] - eta[i] - da - db * X(i, j);
            total += 0.5 * r * r;
        }
    } else {
        for (int i : rows) {
            const double e = eta[i] + da + db * X(i, j);
            total += std::exp(e) - y[i] * e;
        }
    }
    return total;
}

struct ArgminTracker {
    int index = 0;
    double value = std::numeric_limits<double>::infinity();

    // Strict comparison keeps the lowest index on ties.
    void offer(int candidate, double v) {
        if (v < value) {
            value = v;
            index = candidate;
        }
    }
    bool found() const { return index != 0; }
};

SelectionResult finish(const IterationContext& ctx, const ArgminTracker& best,
                       std::vector<double> values, std::vector<int> skipped,
                       const SelectionCache& cache, double sum_u,
                       const Eigen::VectorXd& xtu) {
    if (!best.found()) {
        throw FitError("no usable covariate candidate in this iteration");
    }
    SelectionResult result;
    result.chosen_index = best.index;
    result.criterion_value = best.value;
    result.per_candidate_values = std::move(values);
    result.skipped = std::move(skipped);
    const int n = ctx.data.n();
    OlsStats stats{static_cast<double>(n), cache.col_sum[best.index], cache.col_sumsq[best.index],
                   sum_u, xtu[best.index]};
    double a = 0, b = 0;
    if (!stats.solve(a, b)) {
        throw SingularityError("chosen candidate became degenerate");
    }
    result.candidate_fit = BaseLearnerFit{best.index, a, b};
    return result;
}

}  // namespace

SelectionResult select_loss(const IterationContext& ctx) {
    const Dataset& data = ctx.data;
    const int n = data.n();
    const int k = data.k();
    SelectionCache local;
    const SelectionCache* cache = ctx.cache;
    if (cache == nullptr) {
        local = build_selection_cache(data, nullptr, false);
        cache = &local;
    }
    const Eigen::VectorXd u = negative_gradient(ctx.family, data.y, ctx.eta);
    const double sum_u = u.sum();
    const Eigen::VectorXd xtu = data.X.transpose() * u;

    std::vector<double> values(k, kNoValue);
    std::vector<int> skipped;
    ArgminTracker best;
    for (int j = 1; j <= k; ++j) {
        if (!cache->usable[j]) {
            skipped.push_back(j);
            continue;
        }
        OlsStats stats{static_cast<double>(n), cache->col_sum[j], cache->col_sumsq[j], sum_u,
                       xtu[j]};
        double a = 0, b = 0;
        if (!stats.solve(a, b)) {
            skipped.push_back(j);
            continue;
        }
        const double value = candidate_loss_full(ctx.family, data.y, ctx.eta, data.X, j, ctx.nu, a, b);
        values[j - 1] = value;
        best.offer(j, value);
    }
    return finish(ctx, best, std::move(values), std::move(skipped), *cache, sum_u, xtu);
}

SelectionResult select_cv(const IterationContext& ctx) {
    if (ctx.folds == nullptr || ctx.folds->empty()) {
        throw ConfigError("cv selection requires a fold assignment");
    }
    const Dataset& data = ctx.data;
    const int n = data.n();
    const int k = data.k();
    const int fold_count = ctx.folds->fold_count;
    SelectionCache local;
    const SelectionCache* cache = ctx.cache;
    if (cache == nullptr || cache->fold_rows.empty()) {
        local = build_selection_cache(data, ctx.folds, false);
        cache = &local;
    }
    const Eigen::VectorXd u = negative_gradient(ctx.family, data.y, ctx.eta);
    const double sum_u = u.sum();
    const Eigen::VectorXd xtu = data.X.transpose() * u;

    Eigen::VectorXd fold_sum_u = Eigen::VectorXd::Zero(fold_count);
    for (int i = 0; i < n; ++i) {
        fold_sum_u[ctx.folds->labels[i]] += u[i];
    }

    std::vector<double> values(k, kNoValue);
    std::vector<int> skipped;
    ArgminTracker best;
    Eigen::VectorXd fold_sum_xu(fold_count);
    for (int j = 1; j <= k; ++j) {
        if (!cache->usable[j]) {
            skipped.push_back(j);
            continue;
        }
        fold_sum_xu.setZero();
        for (int i = 0; i < n; ++i) {
            fold_sum_xu[ctx.folds->labels[i]] += data.X(i, j) * u[i];
        }
        double mean_loss = 0.0;
        bool usable = true;
        for (int f = 0; f < fold_count; ++f) {
            const double nf = static_cast<double>(cache->fold_rows[f].size());
            OlsStats stats{n - nf,
                           cache->col_sum[j] - cache->fold_sum_x(j, f),
                           cache->col_sumsq[j] - cache->fold_sum_xx(j, f),
                           sum_u - fold_sum_u[f],
                           xtu[j] - fold_sum_xu[f]};
            double a = 0, b = 0;
            if (!stats.solve(a, b)) {
                usable = false;
                break;
            }
            const double held_out = candidate_loss_rows(ctx.family, data.y, ctx.eta, data.X, j,
                                                        ctx.nu, a, b, cache->fold_rows[f]);
            mean_loss += held_out / nf;
        }
        if (!usable) {
            skipped.push_back(j);
            continue;
        }
        mean_loss /= fold_count;
        values[j - 1] = mean_loss;
        best.offer(j, mean_loss);
    }
    // The winner is refit on the full data before the coefficient update.
    return finish(ctx, best, std::move(values), std::move(skipped), *cache, sum_u, xtu);
}

SelectionResult select_aic(const IterationContext& ctx) {
    if (ctx.op == nullptr) {
        throw ConfigError("aic selection requires an operator state");
    }
    const Dataset& data = ctx.data;
    const int n = data.n();
    const int k = data.k();
    SelectionCache local;
    const SelectionCache* cache = ctx.cache;
    if (cache == nullptr || cache->q.size() == 0) {
        local = build_selection_cache(data, nullptr, true);
        cache = &local;
    }
    Eigen::VectorXd w_local;
    const Eigen::VectorXd* w = ctx.w;
    if (w == nullptr) {
        w_local = weights(ctx.family, ctx.eta);
        w = &w_local;
    }
    const Eigen::VectorXd u = negative_gradient(ctx.family, data.y, ctx.eta);
    const double sum_u = u.sum();
    const Eigen::VectorXd xtu = data.X.transpose() * u;

    // Shared across candidates: column sums of (I - B) and V = (I - B)' Q.
    const OperatorState& op = *ctx.op;
    Eigen::VectorXd colsum = Eigen::VectorXd::Ones(n) - op.B.colwise().sum().transpose();
    Eigen::MatrixXd v = cache->q - op.B.transpose() * cache->q;
    const double intercept_term = w->dot(colsum) / n;

    std::vector<double> values(k, kNoValue);
    std::vector<int> skipped;
    ArgminTracker best;
    for (int j = 1; j <= k; ++j) {
        if (!cache->usable[j]) {
            skipped.push_back(j);
            continue;
        }
        OlsStats stats{static_cast<double>(n), cache->col_sum[j], cache->col_sumsq[j], sum_u,
                       xtu[j]};
        double a = 0, b = 0;
        if (!stats.solve(a, b)) {
            skipped.push_back(j);
            continue;
        }
        double fit_term;
        if (ctx.family == Family::gaussian && ctx.gaussian_aic == GaussianAicForm::profiled) {
            const double rss =
                std::max(2.0 * candidate_loss_full(Family::gaussian, data.y, ctx.eta, data.X, j,
                                                   ctx.nu, a, b),
                         0.0);
            fit_term = n * std::log(rss / n);
        } else {
            // -2 log L up to constants is twice the loss for both families.
            fit_term = 2.0 * candidate_loss_full(ctx.family, data.y, ctx.eta, data.X, j, ctx.nu, a, b);
        }
        const double covariate_term =
            (w->array() * cache->q.col(j - 1).array() * v.col(j - 1).array()).sum();
        const double df = op.trace + ctx.nu * (intercept_term + covariate_term);
        const double aic = fit_term + 2.0 * df;
        values[j - 1] = aic;
        best.offer(j, aic);
    }
    return finish(ctx, best, std::move(values), std::move(skipped), *cache, sum_u, xtu);
}

SelectionResult select(Strategy strategy, const IterationContext& ctx) {
    switch (strategy) {
        case Strategy::loss: return select_loss(ctx);
        case Strategy::cv: return select_cv(ctx);
        case Strategy::aic: return select_aic(ctx);
    }
    throw ConfigError("unknown strategy");
}

}  // namespace cwboost
