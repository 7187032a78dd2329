#pragma once

#include <Eigen/Core>
#include <optional>
#include <string_view>

namespace cwboost {

// Canonical-link GLM families: Gaussian with identity response, Poisson with
// exponential response.
enum class Family { gaussian, poisson };

const char* to_string(Family family);
std::optional<Family> parse_family(std::string_view name);

// Negative log-likelihood up to additive constants (sigma^2 = 1 for the
// Gaussian). All selection and stopping comparisons are argmin-based, so
// dropped constants never change a decision.
//   gaussian: 0.5 * sum (y_i - eta_i)^2
//   poisson:  sum (exp(eta_i) - y_i * eta_i)
double loss(Family family, const Eigen::VectorXd& y, const Eigen::VectorXd& eta);

// Pseudo-residuals u_i = y_i - h(eta_i), the negative gradient of the loss
// with respect to the linear predictor.
Eigen::VectorXd negative_gradient(Family family, const Eigen::VectorXd& y,
                                  const Eigen::VectorXd& eta);

// Diagonal of the GLM weight matrix, w_i = h'(eta_i)^2 / var(y_i).
// gaussian: 1, poisson: exp(eta_i).
Eigen::VectorXd weights(Family family, const Eigen::VectorXd& eta);

// Fitted values on the response scale, h(eta).
Eigen::VectorXd response(Family family, const Eigen::VectorXd& eta);

// Intercept-only start such that h(offset) equals the outcome mean:
// ybar for gaussian, log(ybar) for poisson.
double offset_value(Family family, const Eigen::VectorXd& y);

}  // namespace cwboost
