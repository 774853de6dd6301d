// Row-wise Recursive Least Squares identification of the estimable entries of
// an LtiModel, plus a batch least-squares reference route.
#pragma once

#include <Eigen/Dense>
#include <array>
#include <cmath>
#include <vector>

#include "seisid/dataset.hpp"
#include "seisid/errors.hpp"
#include "seisid/model.hpp"

namespace seisid {

struct RlsConfig {
    double forgetting = 1.0;        // lambda in (0, 1]
    double p0_scale = 1e6;          // initial covariance = p0_scale * I
    Eigen::VectorXd theta0;         // empty = zero vector
    int trace_stride = 10;          // theta snapshot decimation

    void validate() const {
        if (!(forgetting > 0.0) || forgetting > 1.0)
            throw InvalidParameterError("RlsConfig: forgetting must be in (0,1]");
        if (!(p0_scale > 0.0) || !std::isfinite(p0_scale))
            throw InvalidParameterError("RlsConfig: p0_scale must be positive");
        if (trace_stride < 1)
            throw InvalidParameterError("RlsConfig: trace_stride must be >= 1");
    }
};

/// Decimated theta snapshots plus the full per-step squared prediction error.
/// Snapshot count is always ceil(samples_seen / stride).
struct ConvergenceTrace {
    int stride = 10;
    std::vector<long> sample_index;                  // samples_seen at each snapshot
    std::vector<Eigen::VectorXd> theta_snapshots;
    std::vector<double> squared_errors;              // one entry per update
};

/// Sequential estimator for one output row. The covariance is symmetrized
/// after every update; each update depends on the previous one, so a single
/// estimator is single-writer by construction.
class RlsEstimator {
public:
    explicit RlsEstimator(int dim, RlsConfig config = {})
        : config_(std::move(config)) {
        if (dim < 1)
            throw InvalidParameterError("RlsEstimator: dimension must be >= 1");
        config_.validate();
        if (config_.theta0.size() == 0)
            theta_ = Eigen::VectorXd::Zero(dim);
        else if (config_.theta0.size() == dim)
            theta_ = config_.theta0;
        else
            throw ShapeError("RlsEstimator: theta0 length does not match dimension");
        p_ = config_.p0_scale * Eigen::MatrixXd::Identity(dim, dim);
        trace_.stride = config_.trace_stride;
    }

    /// Gain k = p phi / (lambda + phi' p phi); theta += k (y - phi' theta);
    /// p <- (p - k phi' p) / lambda, then symmetrized.
    void update(const Eigen::VectorXd& phi, double y) {
        if (phi.size() != theta_.size())
            throw ShapeError("rls_update: regressor length does not match estimator");
        if (!std::isfinite(y))
            throw NumericError("rls_update: non-finite target");
        const double lambda = config_.forgetting;
        const Eigen::VectorXd p_phi = p_ * phi;
        const double denom = lambda + phi.dot(p_phi);
        if (!(denom > 0.0) || !std::isfinite(denom))
            throw NumericError("rls_update: non-positive gain denominator");
        const Eigen::VectorXd gain = p_phi / denom;
        const double innovation = y - phi.dot(theta_);
        theta_ += gain * innovation;
        p_ = (p_ - gain * p_phi.transpose()) / lambda;
        p_ = 0.5 * (p_ + p_.transpose());
        if (!theta_.allFinite() || !p_.allFinite())
            throw NumericError("rls_update: non-finite intermediate");

        if (samples_seen_ % trace_.stride == 0) {
            trace_.sample_index.push_back(samples_seen_ + 1);
            trace_.theta_snapshots.push_back(theta_);
        }
        trace_.squared_errors.push_back(innovation * innovation);
        ++samples_seen_;
    }

    const Eigen::VectorXd& theta() const { return theta_; }
    const Eigen::MatrixXd& covariance() const { return p_; }
    long samples_seen() const { return samples_seen_; }
    const ConvergenceTrace& trace() const { return trace_; }
    const RlsConfig& config() const { return config_; }

private:
    RlsConfig config_;
    Eigen::VectorXd theta_;
    Eigen::MatrixXd p_;
    long samples_seen_ = 0;
    ConvergenceTrace trace_;
};

namespace detail {

// Regression rows shared by identify and batch_least_squares.
// Order 2: phi_k = [ch0_k, ch1_k, m_k], k = 0..N-2.
// Order 4: phi_k = [ch0_k, ch0_{k-1}, ch1_k, ch1_{k-1}, m_k], k = 1..N-2.
// Targets are ch0_{k+1} and ch1_{k+1}.
struct RegressorSet {
    std::vector<Eigen::VectorXd> phi;
    std::vector<double> y_ch0;
    std::vector<double> y_ch1;
};

inline RegressorSet build_regressors(const IdentDataset& data, int order) {
    if (order != 2 && order != 4)
        throw InvalidParameterError("identify: order must be 2 or 4");
    const std::size_t n = data.size();
    const std::size_t first = (order == 4) ? 1 : 0;
    if (n < first + 2)
        throw ShapeError("identify: dataset too short for embedding");
    RegressorSet r;
    r.phi.reserve(n - first - 1);
    for (std::size_t k = first; k + 1 < n; ++k) {
        Eigen::VectorXd phi(order + 1);
        if (order == 2)
            phi << data.ch0[k], data.ch1[k], data.input[k];
        else
            phi << data.ch0[k], data.ch0[k - 1], data.ch1[k], data.ch1[k - 1], data.input[k];
        r.phi.push_back(std::move(phi));
        r.y_ch0.push_back(data.ch0[k + 1]);
        r.y_ch1.push_back(data.ch1[k + 1]);
    }
    return r;
}

// Writes a row's estimate into the model through the estimability mask:
// masked a entries in column order, then the masked b entry.
inline void write_row_through_mask(LtiModel& model, int row, const Eigen::VectorXd& theta) {
    Eigen::Index next = 0;
    for (int col = 0; col < model.order; ++col) {
        if (model.mask_a(row, col))
            model.a(row, col) = theta(next++);
    }
    if (model.mask_b(row))
        model.b(row) = theta(next++);
}

}  // namespace detail

struct IdentResult {
    LtiModel model;
    std::array<ConvergenceTrace, 2> traces;  // one per estimated output row (ch0, ch1)
};

/// Runs one RLS estimator per estimable output row over the dataset and
/// assembles the identified model. Fixed structural entries are untouched.
inline IdentResult identify(const IdentDataset& data, int order, const RlsConfig& config = {}) {
    const detail::RegressorSet reg = detail::build_regressors(data, order);
    const int dim = order + 1;
    RlsEstimator row_ch0(dim, config);
    RlsEstimator row_ch1(dim, config);
    for (std::size_t i = 0; i < reg.phi.size(); ++i) {
        row_ch0.update(reg.phi[i], reg.y_ch0[i]);
        row_ch1.update(reg.phi[i], reg.y_ch1[i]);
    }
    IdentResult result;
    result.model = (order == 2) ? make_second_order(0, 0, 0, 0, 0, 0)
                                : make_fourth_order(0, 0, 0, 0, 0, 0, 0, 0, 0, 0);
    detail::write_row_through_mask(result.model, 0, row_ch0.theta());
    detail::write_row_through_mask(result.model, (order == 2) ? 1 : 2, row_ch1.theta());
    result.traces = {row_ch0.trace(), row_ch1.trace()};
    return result;
}

/// Batch route: per row, solves (Phi' Phi + ridge I) theta = Phi' y with a
/// direct dense decomposition, using the same regressor construction as
/// identify. With ridge = 1/p0_scale and lambda = 1 this matches the RLS
/// fixed point exactly.
inline LtiModel batch_least_squares(const IdentDataset& data, int order, double ridge = 0.0) {
    if (ridge < 0.0 || !std::isfinite(ridge))
        throw InvalidParameterError("batch_least_squares: ridge must be >= 0");
    const detail::RegressorSet reg = detail::build_regressors(data, order);
    const int dim = order + 1;
    const auto rows = static_cast<Eigen::Index>(reg.phi.size());
    if (rows < dim)
        throw ShapeError("batch_least_squares: fewer regressor rows than parameters");

    Eigen::MatrixXd phi(rows, dim);
    Eigen::VectorXd y0(rows), y1(rows);
    for (Eigen::Index i = 0; i < rows; ++i) {
        phi.row(i) = reg.phi[i].transpose();
        y0(i) = reg.y_ch0[i];
        y1(i) = reg.y_ch1[i];
    }

    Eigen::VectorXd theta0, theta1;
    if (ridge == 0.0) {
        const Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(phi);
        if (qr.rank() < dim)
            throw RankDeficiencyError("batch_least_squares: rank-deficient regressors with ridge 0");
        theta0 = qr.solve(y0);
        theta1 = qr.solve(y1);
    } else {
        const Eigen::MatrixXd normal =
            phi.transpose() * phi + ridge * Eigen::MatrixXd::Identity(dim, dim);
        const Eigen::LDLT<Eigen::MatrixXd> ldlt(normal);
        theta0 = ldlt.solve(phi.transpose() * y0);
        theta1 = ldlt.solve(phi.transpose() * y1);
    }

    LtiModel model = (order == 2) ? make_second_order(0, 0, 0, 0, 0, 0)
                                  : make_fourth_order(0, 0, 0, 0, 0, 0, 0, 0, 0, 0);
    detail::write_row_through_mask(model, 0, theta0);
    detail::write_row_through_mask(model, (order == 2) ? 1 : 2, theta1);
    return model;
}

}  // namespace seisid
