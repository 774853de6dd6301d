// Identification dataset: two signal channels plus the magnitude input series.
#pragma once

#include <cmath>
#include <cstddef>
#include <utility>
#include <vector>

#include "seisid/errors.hpp"

namespace seisid {

/// Equal-length hourly series: ch0/ch1 signal channels and the earthquake
/// magnitude input (0 = no event that hour). Validated on construction.
struct IdentDataset {
    std::vector<double> ch0;
    std::vector<double> ch1;
    std::vector<double> input;

    IdentDataset() = default;
    IdentDataset(std::vector<double> c0, std::vector<double> c1, std::vector<double> in)
        : ch0(std::move(c0)), ch1(std::move(c1)), input(std::move(in)) {
        if (ch0.size() != ch1.size() || ch0.size() != input.size())
            throw ShapeError("IdentDataset: channel/input lengths differ");
        if (ch0.size() < 3)
            throw ShapeError("IdentDataset: need at least 3 samples");
        for (std::size_t i = 0; i < ch0.size(); ++i) {
            if (!std::isfinite(ch0[i]) || !std::isfinite(ch1[i]) || !std::isfinite(input[i]))
                throw NumericError("IdentDataset: non-finite value");
        }
    }

    std::size_t size() const { return ch0.size(); }
};

/// Copies samples [begin, end) into a new dataset.
inline IdentDataset slice_dataset(const IdentDataset& d, std::size_t begin, std::size_t end) {
    if (begin > end || end > d.size())
        throw RangeError("slice_dataset: bounds out of range");
    return IdentDataset({d.ch0.begin() + begin, d.ch0.begin() + end},
                        {d.ch1.begin() + begin, d.ch1.begin() + end},
                        {d.input.begin() + begin, d.input.begin() + end});
}

/// First train_count samples train, the rest validate; both parts keep order
/// and together cover the dataset exactly.
inline std::pair<IdentDataset, IdentDataset> split_dataset(const IdentDataset& d,
                                                           std::size_t train_count) {
    if (train_count < 3 || d.size() < train_count + 3)
        throw ShapeError("split_dataset: both parts need at least 3 samples");
    return {slice_dataset(d, 0, train_count), slice_dataset(d, train_count, d.size())};
}

}  // namespace seisid
