#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "cwboost/dataset.hpp"
#include "cwboost/engine.hpp"

namespace cwboost {

inline constexpr const char* kToolName = "cwboost";
inline constexpr const char* kToolVersion = "0.1.0";

struct ReportInputs {
    const Dataset& data;
    const FitConfig& config;
    const BoostFit& fit;
    std::string paths_csv_name = "coef_path.csv";
    std::vector<int> standardized_columns;
    std::optional<int> holdout_rows;
    std::optional<double> holdout_mspe;
    std::vector<std::string> true_active_names;  // empty when the truth is unknown
};

// JSON fit report: config echo, stopping iteration, active set, final
// coefficients, criterion path, warnings, timing. The schema is documented
// in the README.
std::string fit_report_json(const ReportInputs& inputs);

// Long-format coefficient path over the realized iterations
// (columns: iteration, covariate, coefficient).
std::string coefficient_path_csv(const Dataset& data, const BoostFit& fit);

// Selected covariates ordered by |coefficient| (columns: rank, covariate,
// index, coefficient).
std::string selected_table_csv(const Dataset& data, const BoostFit& fit);

// The subset of a fit report needed to re-derive path exports.
struct ParsedReport {
    int n = 0;
    int k = 0;
    int stopping_iteration = 0;
    int iterations_run = 0;
    std::vector<std::string> column_names;
    std::vector<int> active_set;
    std::vector<std::string> true_active_names;
    std::string paths_csv;
};

ParsedReport parse_fit_report(const std::filesystem::path& path);

}  // namespace cwboost
