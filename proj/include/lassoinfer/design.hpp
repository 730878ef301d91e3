#pragma once

#include <string>

#include <Eigen/Dense>

namespace lassoinfer {

enum class ColumnScaling { raw, unit_norm, sqrt_n_norm };

// n x p predictor matrix plus scaling metadata. Construction validates
// finiteness and, for the normalized modes, the claimed column norms.
// p == 0 is allowed so degenerate inputs flow through as empty fits.
class DesignMatrix {
public:
    explicit DesignMatrix(Eigen::MatrixXd values,
                          ColumnScaling scaling = ColumnScaling::raw);

    const Eigen::MatrixXd& values() const { return values_; }
    int n() const { return static_cast<int>(values_.rows()); }
    int p() const { return static_cast<int>(values_.cols()); }
    ColumnScaling scaling() const { return scaling_; }

private:
    Eigen::MatrixXd values_;
    ColumnScaling scaling_;
};

// Copy of X with columns rescaled to the requested mode. Zero-norm columns
// are rejected for the normalized modes.
DesignMatrix rescale_columns(const DesignMatrix& x, ColumnScaling mode);

// Response vector; finite entries enforced at construction, length against
// the design at each operation.
class Response {
public:
    explicit Response(Eigen::VectorXd y);

    const Eigen::VectorXd& values() const { return y_; }
    int n() const { return static_cast<int>(y_.size()); }

private:
    Eigen::VectorXd y_;
};

const char* to_string(ColumnScaling mode);
ColumnScaling column_scaling_from_string(const std::string& s);

}  // namespace lassoinfer
