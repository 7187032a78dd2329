#include "cwboost/report.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include <json.hpp>

#include "cwboost/csv.hpp"
#include "cwboost/errors.hpp"

namespace cwboost {

using nlohmann::json;

namespace {

json config_json(const FitConfig& config) {
    return json{{"iterations", config.iterations},
                {"nu", config.nu},
                {"folds", config.folds},
                {"threshold", config.threshold},
                {"strategy", to_string(config.strategy)},
                {"seed", config.seed},
                {"family", to_string(config.family)},
                {"early_stop", config.early_stop},
                {"cv_stopping", config.cv_stopping},
                {"gaussian_aic", to_string(config.gaussian_aic)}};
}

}  // namespace

std::string fit_report_json(const ReportInputs& inputs) {
    const Dataset& data = inputs.data;
    const BoostFit& fit = inputs.fit;
    json report;
    report["tool"] = {{"name", kToolName}, {"version", kToolVersion}};
    report["config"] = config_json(inputs.config);
    report["n"] = data.n();
    report["k"] = data.k();
    report["column_names"] = data.column_names;
    json standardized = json::array();
    for (int j : inputs.standardized_columns) standardized.push_back(data.column_names[j]);
    report["standardized_columns"] = standardized;
    report["stopping_iteration"] = fit.stopping_iteration;
    report["iterations_run"] = fit.iterations_run;
    report["early_stopped"] = fit.early_stopped;
    report["criterion_path"] = fit.criterion_path;
    report["active_set"] = fit.active_set;
    json active_names = json::array();
    for (int j : fit.active_set) active_names.push_back(data.column_names[j]);
    report["active_set_names"] = active_names;
    json coefficients = json::array();
    coefficients.push_back(
        {{"covariate", data.column_names[0]}, {"index", 0}, {"coefficient", fit.final_beta[0]}});
    for (int j : fit.active_set) {
        coefficients.push_back({{"covariate", data.column_names[j]},
                                {"index", j},
                                {"coefficient", fit.final_beta[j]}});
    }
    report["final_coefficients"] = coefficients;
    if (!fit.folds.empty()) {
        report["fold_assignment"] = fit.folds.labels;
        report["fold_count"] = fit.folds.fold_count;
    }
    if (!fit.mean_holdout_curve.empty()) {
        report["mean_holdout_curve"] = fit.mean_holdout_curve;
    }
    report["warnings"] = fit.warnings;
    report["timing_seconds"] = {{"total", fit.timing.total_seconds},
                                {"selection", fit.timing.selection_seconds},
                                {"stopping", fit.timing.stopping_seconds}};
    report["paths_csv"] = inputs.paths_csv_name;
    if (inputs.holdout_rows) {
        report["holdout"] = {{"rows", *inputs.holdout_rows}, {"mspe", *inputs.holdout_mspe}};
    }
    if (!inputs.true_active_names.empty()) {
        report["true_active_set"] = inputs.true_active_names;
    }
    return report.dump(2) + "\n";
}

std::string coefficient_path_csv(const Dataset& data, const BoostFit& fit) {
    std::string out = "iteration,covariate,coefficient\n";
    for (int t = 0; t <= fit.iterations_run; ++t) {
        for (int j = 0; j <= data.k(); ++j) {
            out += std::to_string(t);
            out += ',';
            out += csv_escape(data.column_names[j]);
            out += ',';
            out += format_double(fit.beta_path(t, j));
            out += '\n';
        }
    }
    return out;
}

std::string selected_table_csv(const Dataset& data, const BoostFit& fit) {
    std::vector<int> order = fit.active_set;
    std::sort(order.begin(), order.end(), [&](int a, int b) {
        const double va = std::abs(fit.final_beta[a]);
        const double vb = std::abs(fit.final_beta[b]);
        if (va != vb) return va > vb;
        return a < b;
    });
    std::string out = "rank,covariate,index,coefficient\n";
    int rank = 1;
    for (int j : order) {
        out += std::to_string(rank++);
        out += ',';
        out += csv_escape(data.column_names[j]);
        out += ',';
        out += std::to_string(j);
        out += ',';
        out += format_double(fit.final_beta[j]);
        out += '\n';
    }
    return out;
}

ParsedReport parse_fit_report(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open report " + path.string());
    json report;
    try {
        in >> report;
    } catch (const json::exception& err) {
        throw Error("invalid report " + path.string() + ": " + err.what());
    }
    ParsedReport parsed;
    try {
        parsed.n = report.at("n").get<int>();
        parsed.k = report.at("k").get<int>();
        parsed.stopping_iteration = report.at("stopping_iteration").get<int>();
        parsed.iterations_run = report.at("iterations_run").get<int>();
        parsed.column_names = report.at("column_names").get<std::vector<std::string>>();
        parsed.active_set = report.at("active_set").get<std::vector<int>>();
        parsed.paths_csv = report.at("paths_csv").get<std::string>();
        if (report.contains("true_active_set")) {
            parsed.true_active_names =
                report.at("true_active_set").get<std::vector<std::string>>();
        }
    } catch (const json::exception& err) {
        throw Error("report " + path.string() + " is missing fields: " + err.what());
    }
    return parsed;
}

}  // namespace cwboost
