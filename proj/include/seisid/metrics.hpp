// Fit-quality metrics: Best Fit Rate and model evaluation reports.
#pragma once

#include <array>
#include <cmath>
#include <span>
#include <string>
#include <vector>

#include "seisid/dataset.hpp"
#include "seisid/errors.hpp"
#include "seisid/model.hpp"

namespace seisid {

enum class EvalMode { one_step, free_run };

inline const char* to_string(EvalMode m) {
    return m == EvalMode::one_step ? "one-step" : "free-run";
}

struct FitReport {
    std::array<double, 2> bfr_per_channel{};   // percent, ch0 then ch1
    double bfr_mean = 0.0;                     // arithmetic mean of the channels
    std::array<double, 2> rmse_per_channel{};  // signal units
    long n_samples = 0;
    EvalMode mode = EvalMode::one_step;
};

/// Best Fit Rate: 100 * max(0, 1 - ||y - yhat|| / ||y - mean(y)||), in percent.
inline double bfr(std::span<const double> actual, std::span<const double> predicted) {
    if (actual.size() != predicted.size())
        throw ShapeError("bfr: sequence lengths differ");
    if (actual.size() < 2)
        throw ShapeError("bfr: need at least 2 samples");
    double mean = 0.0;
    for (double v : actual) mean += v;
    mean /= static_cast<double>(actual.size());
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < actual.size(); ++i) {
        const double e = actual[i] - predicted[i];
        const double c = actual[i] - mean;
        num += e * e;
        den += c * c;
    }
    if (den == 0.0)
        throw DegenerateDataError("bfr: constant reference sequence");
    return 100.0 * std::max(0.0, 1.0 - std::sqrt(num) / std::sqrt(den));
}

namespace detail {

inline double rmse(std::span<const double> actual, std::span<const double> predicted) {
    double acc = 0.0;
    for (std::size_t i = 0; i < actual.size(); ++i) {
        const double e = actual[i] - predicted[i];
        acc += e * e;
    }
    return std::sqrt(acc / static_cast<double>(actual.size()));
}

}  // namespace detail

/// Per-channel predictions over samples [first_sample, first_sample + n).
struct ChannelPredictions {
    std::size_t first_sample = 0;  // dataset index of the first predicted sample
    std::vector<double> pred_ch0;
    std::vector<double> pred_ch1;
};

/// Predicts the physical channels of data under the model. One-step mode
/// predicts each sample from the measured previous state; free-run iterates
/// the model from the first measured state with no feedback.
inline ChannelPredictions predict_channels(const LtiModel& model, const IdentDataset& data,
                                           EvalMode mode) {
    const StateTrajectory states = state_embed(data.ch0, data.ch1, model.order);
    const std::size_t first = static_cast<std::size_t>(states.start_index);
    const std::size_t n_states = states.states.size();
    if (n_states < 3)
        throw ShapeError("evaluate: dataset too short for embedding");
    // Inputs driving the transitions between consecutive embedded states.
    const std::span<const double> inputs(data.input.data() + first, n_states - 1);

    const int c1 = (model.order == 4) ? 2 : 1;  // state component holding ch1
    ChannelPredictions out;
    out.first_sample = first + 1;
    out.pred_ch0.reserve(n_states - 1);
    out.pred_ch1.reserve(n_states - 1);
    if (mode == EvalMode::one_step) {
        const StateTrajectory pred = predict_one_step(model, states, inputs);
        for (const auto& s : pred.states) {
            out.pred_ch0.push_back(s(0));
            out.pred_ch1.push_back(s(c1));
        }
    } else {
        const StateTrajectory traj = simulate_free_run(model, states.states.front(), inputs);
        for (std::size_t k = 1; k < traj.states.size(); ++k) {
            out.pred_ch0.push_back(traj.states[k](0));
            out.pred_ch1.push_back(traj.states[k](c1));
        }
    }
    return out;
}

/// Scores a model against the measured channels. Only the physical channels
/// are scored (state components 1 and 3 for order 4), so the report always
/// carries exactly two channel entries.
inline FitReport evaluate(const LtiModel& model, const IdentDataset& data, EvalMode mode) {
    const ChannelPredictions pred = predict_channels(model, data, mode);
    const std::size_t n = pred.pred_ch0.size();
    const std::span<const double> act0(data.ch0.data() + pred.first_sample, n);
    const std::span<const double> act1(data.ch1.data() + pred.first_sample, n);

    FitReport report;
    report.mode = mode;
    report.n_samples = static_cast<long>(n);
    report.bfr_per_channel = {bfr(act0, pred.pred_ch0), bfr(act1, pred.pred_ch1)};
    report.bfr_mean = 0.5 * (report.bfr_per_channel[0] + report.bfr_per_channel[1]);
    report.rmse_per_channel = {detail::rmse(act0, pred.pred_ch0), detail::rmse(act1, pred.pred_ch1)};
    return report;
}

}  // namespace seisid
