#include "lassoinfer/design.hpp"

#include <cmath>
#include <string>

#include "lassoinfer/errors.hpp"

namespace lassoinfer {

namespace {

void check_claimed_norms(const Eigen::MatrixXd& m, ColumnScaling scaling) {
    if (scaling == ColumnScaling::raw) return;
    const double target =
        scaling == ColumnScaling::unit_norm ? 1.0 : std::sqrt(static_cast<double>(m.rows()));
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
        const double nrm = m.col(j).norm();
        if (std::abs(nrm - target) > 1e-10 * std::max(1.0, target)) {
            throw InputError("DesignMatrix: column " + std::to_string(j + 1) +
                             " does not match the declared scaling (norm " +
                             std::to_string(nrm) + ")");
        }
    }
}

}  // namespace

DesignMatrix::DesignMatrix(Eigen::MatrixXd values, ColumnScaling scaling)
    : values_(std::move(values)), scaling_(scaling) {
    if (values_.rows() < 1) throw InputError("DesignMatrix: need at least one row");
    if (!values_.allFinite()) throw InputError("DesignMatrix: non-finite entries");
    check_claimed_norms(values_, scaling_);
}

DesignMatrix rescale_columns(const DesignMatrix& x, ColumnScaling mode) {
    if (mode == ColumnScaling::raw) return DesignMatrix(x.values(), ColumnScaling::raw);
    Eigen::MatrixXd m = x.values();
    const double target =
        mode == ColumnScaling::unit_norm ? 1.0 : std::sqrt(static_cast<double>(m.rows()));
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
        const double nrm = m.col(j).norm();
        if (nrm == 0.0) {
            throw InputError("rescale_columns: column " + std::to_string(j + 1) +
                             " has zero norm");
        }
        m.col(j) *= target / nrm;
    }
    return DesignMatrix(std::move(m), mode);
}

Response::Response(Eigen::VectorXd y) : y_(std::move(y)) {
    if (!y_.allFinite()) throw InputError("Response: non-finite entries");
}

const char* to_string(ColumnScaling mode) {
    switch (mode) {
        case ColumnScaling::raw: return "raw";
        case ColumnScaling::unit_norm: return "unit_norm";
        case ColumnScaling::sqrt_n_norm: return "sqrt_n_norm";
    }
    return "raw";
}

ColumnScaling column_scaling_from_string(const std::string& s) {
    if (s == "raw") return ColumnScaling::raw;
    if (s == "unit_norm") return ColumnScaling::unit_norm;
    if (s == "sqrt_n_norm") return ColumnScaling::sqrt_n_norm;
    throw ConfigError("unknown column scaling '" + s + "'");
}

}  // namespace lassoinfer
