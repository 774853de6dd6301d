// Structured second- and fourth-order discrete LTI state-space models:
// construction, simulation, one-step prediction and state embedding.
#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <span>
#include <vector>

#include "seisid/errors.hpp"

namespace seisid {

using StateVector = Eigen::VectorXd;

/// x_{k+1} = a x_k + b m_k with a fixed estimability structure.
///
/// Order 2: every entry of a and b is estimable. Order 4 stacks one lag of
/// each channel into the state, so rows 2 and 4 of a are hard-wired shift
/// rows ([1 0 0 0] and [0 0 1 0]) and b2 = b4 = 0; only rows 1 and 3 carry
/// estimable coefficients. `mask_a` / `mask_b` mark the estimable entries.
struct LtiModel {
    int order = 0;
    Eigen::MatrixXd a;
    Eigen::VectorXd b;
    Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic> mask_a;
    Eigen::Matrix<bool, Eigen::Dynamic, 1> mask_b;
};

/// Sequence of states; start_index is the hour of the first entry.
struct StateTrajectory {
    std::vector<StateVector> states;
    std::ptrdiff_t start_index = 0;
};

namespace detail {

inline void require_finite(std::initializer_list<double> vals, const char* who) {
    for (double v : vals) {
        if (!std::isfinite(v))
            throw InvalidParameterError(std::string(who) + ": non-finite coefficient");
    }
}

}  // namespace detail

inline LtiModel make_second_order(double a11, double a12, double a21, double a22,
                                  double b1, double b2) {
    detail::require_finite({a11, a12, a21, a22, b1, b2}, "make_second_order");
    LtiModel m;
    m.order = 2;
    m.a.resize(2, 2);
    m.a << a11, a12, a21, a22;
    m.b.resize(2);
    m.b << b1, b2;
    m.mask_a.setConstant(2, 2, true);
    m.mask_b.setConstant(2, true);
    return m;
}

/// Rows 2 and 4 of a and entries 2 and 4 of b are the fixed shift structure;
/// only the ten supplied coefficients are estimable.
inline LtiModel make_fourth_order(double a11, double a12, double a13, double a14,
                                  double a31, double a32, double a33, double a34,
                                  double b1, double b3) {
    detail::require_finite({a11, a12, a13, a14, a31, a32, a33, a34, b1, b3},
                           "make_fourth_order");
    LtiModel m;
    m.order = 4;
    m.a.setZero(4, 4);
    m.a(0, 0) = a11; m.a(0, 1) = a12; m.a(0, 2) = a13; m.a(0, 3) = a14;
    m.a(1, 0) = 1.0;                                      // shift row: x2 <- x1
    m.a(2, 0) = a31; m.a(2, 1) = a32; m.a(2, 2) = a33; m.a(2, 3) = a34;
    m.a(3, 2) = 1.0;                                      // shift row: x4 <- x3
    m.b.setZero(4);
    m.b(0) = b1;
    m.b(2) = b3;
    m.mask_a.setConstant(4, 4, false);
    m.mask_a.row(0).setConstant(true);
    m.mask_a.row(2).setConstant(true);
    m.mask_b.setConstant(4, false);
    m.mask_b(0) = true;
    m.mask_b(2) = true;
    return m;
}

/// One transition: a x + b m.
inline StateVector step(const LtiModel& model, const StateVector& x, double m) {
    if (x.size() != model.order)
        throw ShapeError("step: state length does not match model order");
    if (!std::isfinite(m))
        throw InvalidParameterError("step: non-finite input magnitude");
    return model.a * x + model.b * m;
}

/// Iterates step from x0 with no measurement feedback.
/// Result has len(inputs)+1 states, the first being x0.
inline StateTrajectory simulate_free_run(const LtiModel& model, const StateVector& x0,
                                         std::span<const double> inputs) {
    if (x0.size() != model.order)
        throw ShapeError("simulate_free_run: initial state length does not match order");
    StateTrajectory traj;
    traj.states.reserve(inputs.size() + 1);
    traj.states.push_back(x0);
    for (double m : inputs)
        traj.states.push_back(step(model, traj.states.back(), m));
    return traj;
}

/// prediction_{k+1} = a x_k + b m_k from the MEASURED state at k.
/// Output has len(states)-1 entries aligned one index after the input states.
inline StateTrajectory predict_one_step(const LtiModel& model, const StateTrajectory& states,
                                        std::span<const double> inputs) {
    if (states.states.empty() || inputs.size() != states.states.size() - 1)
        throw ShapeError("predict_one_step: need len(inputs) = len(states) - 1");
    StateTrajectory pred;
    pred.start_index = states.start_index + 1;
    pred.states.reserve(inputs.size());
    for (std::size_t k = 0; k < inputs.size(); ++k)
        pred.states.push_back(step(model, states.states[k], inputs[k]));
    return pred;
}

/// Stacks the two channels into state vectors.
/// Order 2: [ch0_k, ch1_k] for every k. Order 4: [ch0_k, ch0_{k-1}, ch1_k,
/// ch1_{k-1}] for k >= 1; start_index records the first usable k.
inline StateTrajectory state_embed(std::span<const double> ch0, std::span<const double> ch1,
                                   int order) {
    if (ch0.size() != ch1.size())
        throw ShapeError("state_embed: channel lengths differ");
    if (order != 2 && order != 4)
        throw InvalidParameterError("state_embed: order must be 2 or 4");
    const std::size_t n = ch0.size();
    StateTrajectory traj;
    if (order == 2) {
        if (n < 1)
            throw ShapeError("state_embed: empty channels");
        traj.start_index = 0;
        traj.states.reserve(n);
        for (std::size_t k = 0; k < n; ++k) {
            StateVector s(2);
            s << ch0[k], ch1[k];
            traj.states.push_back(std::move(s));
        }
    } else {
        if (n < 2)
            throw ShapeError("state_embed: order 4 needs at least 2 samples");
        traj.start_index = 1;
        traj.states.reserve(n - 1);
        for (std::size_t k = 1; k < n; ++k) {
            StateVector s(4);
            s << ch0[k], ch0[k - 1], ch1[k], ch1[k - 1];
            traj.states.push_back(std::move(s));
        }
    }
    return traj;
}

/// Largest eigenvalue magnitude of a, by power iteration.
///
/// Uses the two-step variant: fit A^2 u = alpha A u + beta u over the current
/// iterate and take the dominant root of t^2 - alpha t - beta. This reduces to
/// plain power iteration when the dominant eigenvalue is real and still
/// converges when it is a complex pair, where the one-step ratio oscillates.
inline double spectral_radius(const Eigen::MatrixXd& a, double tol = 1e-9,
                              int max_iter = 10000) {
    if (a.rows() != a.cols() || a.rows() == 0)
        throw ShapeError("spectral_radius: matrix must be square and non-empty");
    const auto n = a.rows();

    Eigen::VectorXd u(n);
    for (Eigen::Index i = 0; i < n; ++i)
        u(i) = 1.0 + 0.013 * static_cast<double>(i);  // deterministic, not axis-aligned
    u.normalize();

    double prev = -1.0;
    for (int it = 0; it < max_iter; ++it) {
        const Eigen::VectorXd v = a * u;
        const double nv = v.norm();
        if (nv == 0.0)
            return 0.0;  // u fell into the kernel; dominant behavior is nilpotent
        const Eigen::VectorXd w = a * v;

        // Least-squares fit w = alpha v + beta u via the 2x2 Gram system.
        const double vv = v.squaredNorm(), uu = 1.0, uv = u.dot(v);
        const double wv = w.dot(v), wu = w.dot(u);
        const double det = vv * uu - uv * uv;
        double rho;
        if (det > 1e-14 * vv) {
            const double alpha = (wv * uu - wu * uv) / det;
            const double beta = (vv * wu - uv * wv) / det;
            const double disc = 0.25 * alpha * alpha + beta;
            rho = disc >= 0.0
                      ? std::max(std::abs(0.5 * alpha + std::sqrt(disc)),
                                 std::abs(0.5 * alpha - std::sqrt(disc)))
                      : std::sqrt(-beta);  // complex pair: |t|^2 = -beta
        } else {
            rho = nv;  // v parallel to u: u is an eigenvector already
        }
        if (!std::isfinite(rho))
            throw NumericError("spectral_radius: iteration diverged");
        if (prev >= 0.0 && std::abs(rho - prev) <= tol * std::max(1.0, rho))
            return rho;
        prev = rho;

        const double nw = w.norm();
        if (nw == 0.0)
            return 0.0;
        u = w / nw;
    }
    return prev;  // best estimate; tolerance not reached (defective dominant block)
}

}  // namespace seisid
