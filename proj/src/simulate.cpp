#include "cwboost/simulate.hpp"

#include <Eigen/Cholesky>
#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <thread>

#include "cwboost/csv.hpp"
#include "cwboost/errors.hpp"
#include "cwboost/rng.hpp"

namespace cwboost {

namespace {

constexpr std::uint64_t kTruthSalt = 0x7274;
constexpr std::uint64_t kDataSalt = 0xda7a;
constexpr std::uint64_t kFitSalt = 0xf17;

using Clock = std::chrono::steady_clock;

}  // namespace

const char* to_string(CovarianceKind kind) {
    return kind == CovarianceKind::identity ? "identity" : "toeplitz";
}

std::optional<CovarianceKind> parse_covariance(std::string_view name) {
    if (name == "identity") return CovarianceKind::identity;
    if (name == "toeplitz") return CovarianceKind::toeplitz;
    return std::nullopt;
}

std::string SimSetting::id() const {
    std::string tag = std::string(to_string(family)) + "_" + to_string(covariance) + "_k" +
                      std::to_string(k) + "_inf" + std::to_string(informative) + "_s" +
                      format_double(signal);
    return tag;
}

void validate_setting(const SimSetting& setting) {
    if (setting.k < 1) throw ConfigError("setting needs k >= 1");
    if (setting.informative < 0 || setting.informative > setting.k) {
        throw ConfigError("INF must lie in 0..k");
    }
    if (!(setting.signal > 0.0)) throw ConfigError("NSR / signal level must be positive");
    if (setting.covariance == CovarianceKind::toeplitz &&
        !(setting.rho > 0.0 && setting.rho < 1.0)) {
        throw ConfigError("toeplitz rho must lie in (0, 1)");
    }
    if (setting.n_train < 2 || setting.n_test < 1) {
        throw ConfigError("setting needs n_train >= 2 and n_test >= 1");
    }
    if (setting.replications < 1) throw ConfigError("replications must be >= 1");
    if (setting.family == Family::poisson && !(setting.poisson_mean > 0.0)) {
        throw ConfigError("poisson target mean must be positive");
    }
}

Eigen::MatrixXd toeplitz_covariance(int k, double rho) {
    if (k < 1) throw ConfigError("covariance needs k >= 1");
    if (!(rho >= 0.0 && rho < 1.0)) throw ConfigError("rho must lie in [0, 1)");
    Eigen::MatrixXd sigma(k, k);
    for (int p = 0; p < k; ++p) {
        for (int q = 0; q < k; ++q) {
            sigma(p, q) = std::pow(rho, std::abs(p - q));
        }
    }
    return sigma;
}

Eigen::MatrixXd covariance_matrix(const SimSetting& setting) {
    if (setting.covariance == CovarianceKind::identity) {
        return Eigen::MatrixXd::Identity(setting.k, setting.k);
    }
    return toeplitz_covariance(setting.k, setting.rho);
}

TrueModel draw_true_model(const SimSetting& setting, std::uint64_t seed) {
    validate_setting(setting);
    const int inf = setting.informative;
    TrueModel truth;
    truth.beta = Eigen::VectorXd::Zero(setting.k + 1);
    truth.beta_tilde.resize(inf);
    Rng rng = make_rng(seed);
    std::uniform_int_distribution<int> draw(0, 5);
    for (int r = 0; r < inf; ++r) {
        const int pick = draw(rng);
        truth.beta_tilde[r] = pick < 3 ? static_cast<double>(pick - 3)   // -3,-2,-1
                                       : static_cast<double>(pick - 2);  // 1,2,3
    }
    if (setting.family == Family::gaussian) {
        truth.beta[0] = 1.0;
        if (inf > 0) {
            Eigen::MatrixXd sigma_inf =
                setting.covariance == CovarianceKind::identity
                    ? Eigen::MatrixXd::Identity(inf, inf)
                    : toeplitz_covariance(inf, setting.rho);
            const double quad = truth.beta_tilde.dot(sigma_inf * truth.beta_tilde);
            truth.kappa = std::sqrt(1.0 / (setting.signal * quad));
            truth.beta.segment(1, inf) = truth.kappa * truth.beta_tilde;
        }
        return truth;
    }
    // Poisson: scale the draws by the level and pick the intercept so that
    // E[y] = E[exp(beta0 + x'beta)] = exp(beta0 + s^2/2) hits the target mean.
    truth.kappa = setting.signal;
    double s2 = 0.0;
    if (inf > 0) {
        Eigen::MatrixXd sigma_inf = setting.covariance == CovarianceKind::identity
                                        ? Eigen::MatrixXd::Identity(inf, inf)
                                        : toeplitz_covariance(inf, setting.rho);
        Eigen::VectorXd scaled = setting.signal * truth.beta_tilde;
        s2 = scaled.dot(sigma_inf * scaled);
        truth.beta.segment(1, inf) = scaled;
    }
    truth.beta[0] = std::log(setting.poisson_mean) - 0.5 * s2;
    return truth;
}

namespace {

Eigen::MatrixXd draw_covariates(int n, int k, const Eigen::MatrixXd* chol_lower, Rng& rng) {
    std::normal_distribution<double> normal(0.0, 1.0);
    Eigen::MatrixXd z(n, k);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < k; ++j) z(i, j) = normal(rng);
    }
    if (chol_lower == nullptr) return z;
    return z * chol_lower->transpose();
}

Eigen::VectorXd outcome_from(const SimSetting& setting, const TrueModel& truth,
                             const Eigen::MatrixXd& covariates, Rng& rng) {
    const int n = static_cast<int>(covariates.rows());
    Eigen::VectorXd eta = Eigen::VectorXd::Constant(n, truth.beta[0]);
    eta.noalias() += covariates * truth.beta.tail(setting.k);
    Eigen::VectorXd y(n);
    if (setting.family == Family::gaussian) {
        std::normal_distribution<double> normal(0.0, 1.0);
        for (int i = 0; i < n; ++i) y[i] = eta[i] + normal(rng);
        return y;
    }
    for (int i = 0; i < n; ++i) {
        std::poisson_distribution<long> poisson(std::exp(eta[i]));
        y[i] = static_cast<double>(poisson(rng));
    }
    return y;
}

}  // namespace

SimData generate_dataset(const SimSetting& setting, const TrueModel& truth,
                         std::uint64_t draw_seed) {
    validate_setting(setting);
    if (truth.beta.size() != setting.k + 1) {
        throw DimensionError("true model does not match setting dimension");
    }
    Eigen::MatrixXd chol_lower;
    const Eigen::MatrixXd* lower = nullptr;
    if (setting.covariance != CovarianceKind::identity) {
        Eigen::LLT<Eigen::MatrixXd> llt(covariance_matrix(setting));
        if (llt.info() != Eigen::Success) {
            throw ConfigError("covariance matrix is not positive definite");
        }
        chol_lower = llt.matrixL();
        lower = &chol_lower;
    }
    Rng rng = make_rng(draw_seed);
    SimData data;
    const Eigen::MatrixXd train_x = draw_covariates(setting.n_train, setting.k, lower, rng);
    const Eigen::VectorXd train_y = outcome_from(setting, truth, train_x, rng);
    const Eigen::MatrixXd test_x = draw_covariates(setting.n_test, setting.k, lower, rng);
    const Eigen::VectorXd test_y = outcome_from(setting, truth, test_x, rng);
    data.train = make_dataset(train_x, train_y);
    data.test = make_dataset(test_x, test_y);
    return data;
}

const char* to_string(Method method) {
    switch (method) {
        case Method::loss: return "loss";
        case Method::cv: return "cv";
        case Method::aic: return "aic";
        case Method::loss_cv_stop: return "loss_cv_stop";
    }
    return "?";
}

std::optional<Method> parse_method(std::string_view name) {
    if (name == "loss") return Method::loss;
    if (name == "cv") return Method::cv;
    if (name == "aic") return Method::aic;
    if (name == "loss_cv_stop") return Method::loss_cv_stop;
    return std::nullopt;
}

FitConfig method_config(Method method, const GridOptions& options, Family family,
                        std::uint64_t fit_seed) {
    FitConfig config;
    config.iterations = options.iterations;
    config.nu = options.nu;
    config.folds = options.folds;
    config.threshold = options.threshold;
    config.seed = fit_seed;
    config.family = family;
    config.early_stop = options.early_stop;
    config.gaussian_aic = options.gaussian_aic;
    switch (method) {
        case Method::loss: config.strategy = Strategy::loss; break;
        case Method::cv: config.strategy = Strategy::cv; break;
        case Method::aic: config.strategy = Strategy::aic; break;
        case Method::loss_cv_stop:
            config.strategy = Strategy::loss;
            config.cv_stopping = true;
            break;
    }
    return config;
}

MetricRow evaluate_fit(const BoostFit& fit, const TrueModel& truth, const Dataset& train,
                       const Dataset& test, Family family) {
    const int k = train.k();
    int informative = 0;
    for (int j = 1; j <= k; ++j) {
        if (truth.beta[j] != 0.0) ++informative;
    }
    int true_positive = 0;
    int false_positive = 0;
    for (int j : fit.active_set) {
        if (truth.beta[j] != 0.0) {
            ++true_positive;
        } else {
            ++false_positive;
        }
    }
    MetricRow row;
    row.fpr = (k - informative) > 0
                  ? static_cast<double>(false_positive) / (k - informative)
                  : 0.0;
    row.tpr = informative > 0 ? static_cast<double>(true_positive) / informative : kNoValue;
    const Eigen::VectorXd fitted_train = response(family, train.X * fit.final_beta);
    const Eigen::VectorXd fitted_test = response(family, test.X * fit.final_beta);
    row.mse = (train.y - fitted_train).squaredNorm() / train.n();
    row.mspe = (test.y - fitted_test).squaredNorm() / test.n();
    row.t_star = fit.stopping_iteration;
    row.active_set_size = static_cast<int>(fit.active_set.size());
    return row;
}

void apply_desk_scale(GridOptions& options) {
    options.replications_override = 20;
    options.iterations = 500;
    options.early_stop = true;
}

GridResult run_grid(const std::vector<SimSetting>& settings, const std::vector<Method>& methods,
                    const GridOptions& options) {
    if (settings.empty()) throw ConfigError("no simulation settings given");
    if (methods.empty()) throw ConfigError("no methods given");
    GridResult result;
    result.settings = settings;
    if (options.replications_override) {
        for (auto& setting : result.settings) {
            setting.replications = *options.replications_override;
        }
    }
    for (const auto& setting : result.settings) validate_setting(setting);
    result.methods = methods;

    struct Task {
        int setting_index;
        int replication;
        std::size_t row_offset;  // first slot; methods follow in order
    };
    std::vector<Task> tasks;
    std::size_t total_rows = 0;
    for (int si = 0; si < static_cast<int>(result.settings.size()); ++si) {
        for (int r = 0; r < result.settings[si].replications; ++r) {
            tasks.push_back(Task{si, r, total_rows});
            total_rows += methods.size();
        }
    }
    result.rows.resize(total_rows);

    std::atomic<std::size_t> next{0};
    std::atomic<int> failures{0};
    auto worker = [&]() {
        while (true) {
            const std::size_t index = next.fetch_add(1);
            if (index >= tasks.size()) break;
            const Task& task = tasks[index];
            const SimSetting& setting = result.settings[task.setting_index];
            const std::uint64_t sid = fnv1a64(setting.id());
            const std::uint64_t rep = static_cast<std::uint64_t>(task.replication);
            for (std::size_t mi = 0; mi < methods.size(); ++mi) {
                MetricRow& row = result.rows[task.row_offset + mi];
                row.setting_id = setting.id();
                row.method = to_string(methods[mi]);
                row.replication = task.replication;
            }
            SimData data;
            TrueModel truth;
            std::uint64_t digest = 0;
            try {
                truth = draw_true_model(setting,
                                        derive_seed({options.seed, sid, rep, kTruthSalt}));
                data = generate_dataset(setting, truth,
                                        derive_seed({options.seed, sid, rep, kDataSalt}));
                digest = derive_seed({dataset_digest(data.train), dataset_digest(data.test)});
            } catch (const std::exception& err) {
                for (std::size_t mi = 0; mi < methods.size(); ++mi) {
                    result.rows[task.row_offset + mi].status =
                        std::string("failed: ") + err.what();
                }
                failures.fetch_add(static_cast<int>(methods.size()));
                continue;
            }
            const std::uint64_t fit_seed = derive_seed({options.seed, sid, rep, kFitSalt});
            for (std::size_t mi = 0; mi < methods.size(); ++mi) {
                MetricRow& row = result.rows[task.row_offset + mi];
                row.data_digest = digest;
                const FitConfig config =
                    method_config(methods[mi], options, setting.family, fit_seed);
                try {
                    const auto start = Clock::now();
                    const BoostFit boost_fit = fit(data.train, config);
                    const double wall =
                        std::chrono::duration<double>(Clock::now() - start).count();
                    MetricRow metrics =
                        evaluate_fit(boost_fit, truth, data.train, data.test, setting.family);
                    metrics.setting_id = row.setting_id;
                    metrics.method = row.method;
                    metrics.replication = row.replication;
                    metrics.data_digest = digest;
                    metrics.wall_seconds = wall;
                    row = std::move(metrics);
                } catch (const std::exception& err) {
                    row.status = std::string("failed: ") + err.what();
                    failures.fetch_add(1);
                }
            }
        }
    };

    const int worker_count = std::max(1, std::min<int>(options.threads,
                                                       static_cast<int>(tasks.size())));
    if (worker_count == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(worker_count);
        for (int i = 0; i < worker_count; ++i) pool.emplace_back(worker);
        for (auto& thread : pool) thread.join();
    }

    result.failures = failures.load();
    result.aggregates = aggregate_rows(result.settings, methods, result.rows);
    return result;
}

double median(std::vector<double> values) {
    if (values.empty()) return kNoValue;
    std::sort(values.begin(), values.end());
    const std::size_t mid = values.size() / 2;
    if (values.size() % 2 == 1) return values[mid];
    return 0.5 * (values[mid - 1] + values[mid]);
}

double sample_variance(const std::vector<double>& values) {
    const std::size_t count = values.size();
    if (count < 2) return kNoValue;
    double mean = 0.0;
    for (double v : values) mean += v;
    mean /= static_cast<double>(count);
    double ss = 0.0;
    for (double v : values) ss += (v - mean) * (v - mean);
    return ss / static_cast<double>(count - 1);
}

std::vector<AggregateRow> aggregate_rows(const std::vector<SimSetting>& settings,
                                         const std::vector<Method>& methods,
                                         const std::vector<MetricRow>& rows) {
    std::vector<AggregateRow> aggregates;
    for (const auto& setting : settings) {
        const std::string id = setting.id();
        for (const Method method : methods) {
            AggregateRow agg;
            agg.setting_id = id;
            agg.setting = setting;
            agg.method = to_string(method);
            std::vector<double> fpr, tpr, mspe, t_star;
            for (const auto& row : rows) {
                if (row.setting_id != id || row.method != agg.method) continue;
                if (row.status != "ok") continue;
                ++agg.rows_ok;
                if (std::isfinite(row.fpr)) fpr.push_back(row.fpr);
                if (std::isfinite(row.tpr)) tpr.push_back(row.tpr);
                if (std::isfinite(row.mspe)) mspe.push_back(row.mspe);
                t_star.push_back(static_cast<double>(row.t_star));
            }
            agg.median_fpr = median(fpr);
            agg.var100_fpr = 100.0 * sample_variance(fpr);
            agg.median_tpr = median(tpr);
            agg.var100_tpr = 100.0 * sample_variance(tpr);
            agg.median_mspe = median(mspe);
            agg.median_t_star = median(t_star);
            aggregates.push_back(std::move(agg));
        }
    }
    return aggregates;
}

namespace {

std::string hex_digest(std::uint64_t digest) {
    char buffer[17];
    std::snprintf(buffer, sizeof(buffer), "%016llx",
                  static_cast<unsigned long long>(digest));
    return std::string(buffer);
}

}  // namespace

std::string raw_metrics_csv(const GridResult& result) {
    std::string out =
        "setting,method,replication,fpr,tpr,mse,mspe,t_star,active_set_size,data_digest,status\n";
    for (const auto& row : result.rows) {
        out += row.setting_id;
        out += ',';
        out += row.method;
        out += ',';
        out += std::to_string(row.replication);
        out += ',';
        out += format_double(row.fpr);
        out += ',';
        out += format_double(row.tpr);
        out += ',';
        out += format_double(row.mse);
        out += ',';
        out += format_double(row.mspe);
        out += ',';
        out += std::to_string(row.t_star);
        out += ',';
        out += std::to_string(row.active_set_size);
        out += ',';
        out += hex_digest(row.data_digest);
        out += ',';
        out += csv_escape(row.status);
        out += '\n';
    }
    return out;
}

std::string aggregate_csv(const GridResult& result) {
    std::string out =
        "setting,correlation,k,inf,nsr,family,method,rows_ok,median_fpr,var100_fpr,"
        "median_tpr,var100_tpr,median_mspe,median_t_star\n";
    for (const auto& agg : result.aggregates) {
        out += agg.setting_id;
        out += ',';
        out += to_string(agg.setting.covariance);
        out += ',';
        out += std::to_string(agg.setting.k);
        out += ',';
        out += std::to_string(agg.setting.informative);
        out += ',';
        out += format_double(agg.setting.signal);
        out += ',';
        out += to_string(agg.setting.family);
        out += ',';
        out += agg.method;
        out += ',';
        out += std::to_string(agg.rows_ok);
        out += ',';
        out += format_double(agg.median_fpr);
        out += ',';
        out += format_double(agg.var100_fpr);
        out += ',';
        out += format_double(agg.median_tpr);
        out += ',';
        out += format_double(agg.var100_tpr);
        out += ',';
        out += format_double(agg.median_mspe);
        out += ',';
        out += format_double(agg.median_t_star);
        out += '\n';
    }
    return out;
}

std::string timings_csv(const GridResult& result) {
    std::string out = "setting,method,replication,wall_seconds\n";
    for (const auto& row : result.rows) {
        out += row.setting_id;
        out += ',';
        out += row.method;
        out += ',';
        out += std::to_string(row.replication);
        out += ',';
        out += format_double(row.wall_seconds);
        out += '\n';
    }
    return out;
}

std::vector<SimSetting> preset_gaussian_grid() {
    std::vector<SimSetting> settings;
    for (const CovarianceKind cov : {CovarianceKind::identity, CovarianceKind::toeplitz}) {
        for (const int k : {100, 500}) {
            for (const int inf : {5, 20}) {
                for (const double nsr : {0.2, 0.5, 1.0}) {
                    SimSetting setting;
                    setting.k = k;
                    setting.informative = inf;
                    setting.signal = nsr;
                    setting.covariance = cov;
                    setting.family = Family::gaussian;
                    settings.push_back(setting);
                }
            }
        }
    }
    return settings;
}

std::vector<SimSetting> preset_poisson_grid() {
    std::vector<SimSetting> settings;
    for (const CovarianceKind cov : {CovarianceKind::identity, CovarianceKind::toeplitz}) {
        for (const int k : {100, 500}) {
            for (const int inf : {5, 20}) {
                for (const double level : {0.05, 0.1, 0.2}) {
                    SimSetting setting;
                    setting.k = k;
                    setting.informative = inf;
                    setting.signal = level;
                    setting.covariance = cov;
                    setting.family = Family::poisson;
                    settings.push_back(setting);
                }
            }
        }
    }
    return settings;
}

}  // namespace cwboost
