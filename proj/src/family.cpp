#include "cwboost/family.hpp"

#include <cmath>

#include "cwboost/errors.hpp"

namespace cwboost {

namespace {

void check_pair(Family family, const Eigen::VectorXd& y, const Eigen::VectorXd& eta) {
    if (y.size() != eta.size()) {
        throw DimensionError("y and eta have different lengths: " +
                             std::to_string(y.size()) + " vs " + std::to_string(eta.size()));
    }
    if (y.size() < 1) {
        throw DimensionError("y and eta must have length >= 1");
    }
    if (family == Family::poisson && (y.array() < 0.0).any()) {
        throw DomainError("poisson outcome must be nonnegative");
    }
}

}  // namespace

const char* to_string(Family family) {
    return family == Family::gaussian ? "gaussian" : "poisson";
}

std::optional<Family> parse_family(std::string_view name) {
    if (name == "gaussian") return Family::gaussian;
    if (name == "poisson") return Family::poisson;
    return std::nullopt;
}

double loss(Family family, const Eigen::VectorXd& y, const Eigen::VectorXd& eta) {
    check_pair(family, y, eta);
    if (family == Family::gaussian) {
        return 0.5 * (y - eta).squaredNorm();
    }
    return (eta.array().exp() - y.array() * eta.array()).sum();
}

Eigen::VectorXd negative_gradient(Family family, const Eigen::VectorXd& y,
                                  const Eigen::VectorXd& eta) {
    check_pair(family, y, eta);
    if (family == Family::gaussian) {
        return y - eta;
    }
    return y - eta.array().exp().matrix();
}

Eigen::VectorXd weights(Family family, const Eigen::VectorXd& eta) {
    if (eta.size() < 1) {
        throw DimensionError("eta must have length >= 1");
    }
    if (family == Family::gaussian) {
        return Eigen::VectorXd::Ones(eta.size());
    }
    return eta.array().exp().matrix();
}

Eigen::VectorXd response(Family family, const Eigen::VectorXd& eta) {
    if (family == Family::gaussian) {
        return eta;
    }
    return eta.array().exp().matrix();
}

double offset_value(Family family, const Eigen::VectorXd& y) {
    if (y.size() < 1) {
        throw DimensionError("y must have length >= 1");
    }
    const double ybar = y.mean();
    if (family == Family::gaussian) {
        return ybar;
    }
    if (ybar <= 0.0) {
        throw DomainError("poisson offset needs a positive outcome mean");
    }
    return std::log(ybar);
}

}  // namespace cwboost
