// Geographic partitioning, event-window dataset assembly and the two
// end-to-end experimental scenarios.
#pragma once

#include <algorithm>
#include <array>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "seisid/dataio.hpp"
#include "seisid/dataset.hpp"
#include "seisid/errors.hpp"
#include "seisid/metrics.hpp"
#include "seisid/rls.hpp"

namespace seisid {

/// Closed lon/lat box.
struct GeoArea {
    std::string name;
    double lon_min = 0.0, lon_max = 0.0;
    double lat_min = 0.0, lat_max = 0.0;

    bool contains(double lon, double lat) const {
        return lon >= lon_min && lon <= lon_max && lat >= lat_min && lat <= lat_max;
    }
};

inline std::vector<GeoArea> default_areas() {
    return {{"Area1", 20.0, 21.0, 38.0, 39.5},
            {"Area2", 21.5, 22.5, 38.0, 39.0},
            {"Area3", 20.0, 22.0, 37.0, 38.0}};
}

enum class WindowSide { before, after, both };
enum class OverlapPolicy { concatenate, merge_union };

struct WindowConfig {
    long half_width_hours = 168;  // one week
    OverlapPolicy overlap_policy = OverlapPolicy::concatenate;
};

inline void validate_areas(const std::vector<GeoArea>& areas) {
    for (const GeoArea& a : areas) {
        if (!(a.lon_min < a.lon_max) || !(a.lat_min < a.lat_max))
            throw InvalidParameterError("area '" + a.name + "': min must be < max on both axes");
    }
    // Shared edges are allowed; only interior overlap is a configuration error.
    for (std::size_t i = 0; i < areas.size(); ++i) {
        for (std::size_t j = i + 1; j < areas.size(); ++j) {
            const GeoArea& a = areas[i];
            const GeoArea& b = areas[j];
            const bool lon_overlap = a.lon_min < b.lon_max && b.lon_min < a.lon_max;
            const bool lat_overlap = a.lat_min < b.lat_max && b.lat_min < a.lat_max;
            if (lon_overlap && lat_overlap)
                throw ConfigError("areas '" + a.name + "' and '" + b.name + "' overlap");
        }
    }
}

/// First area whose closed box contains the epicenter; nullopt if none.
inline std::optional<std::string> assign_area(const CatalogEvent& event,
                                              const std::vector<GeoArea>& areas) {
    validate_areas(areas);
    for (const GeoArea& a : areas) {
        if (a.contains(event.longitude, event.latitude))
            return a.name;
    }
    return std::nullopt;
}

/// Extracts the per-event hourly windows and stitches them into one dataset.
/// before = [p-w, p], after = [p, p+w], both = [p-w, p+w]. concatenate appends
/// slices in point order (overlaps duplicated); merge_union merges overlapping
/// index ranges first.
inline IdentDataset build_event_windows(const LtgpSeries& series, const InputSeries& input,
                                        std::vector<CatalogEvent> events,
                                        const WindowConfig& cfg, WindowSide side) {
    if (cfg.half_width_hours < 1)
        throw InvalidParameterError("build_event_windows: half width must be >= 1");
    if (events.empty())
        throw EmptyDatasetError("build_event_windows: no events");
    if (input.values.size() != series.size())
        throw ShapeError("build_event_windows: input length does not match series");
    std::stable_sort(events.begin(), events.end(),
                     [](const CatalogEvent& a, const CatalogEvent& b) { return a.point < b.point; });

    const long w = cfg.half_width_hours;
    const long n = static_cast<long>(series.size());
    std::vector<std::pair<long, long>> ranges;  // inclusive [lo, hi]
    for (const CatalogEvent& e : events) {
        if (e.point - w < 0 || e.point + w >= n)
            throw RangeError("build_event_windows: window around point " +
                             std::to_string(e.point) + " falls outside the series");
        switch (side) {
            case WindowSide::before: ranges.emplace_back(e.point - w, e.point); break;
            case WindowSide::after: ranges.emplace_back(e.point, e.point + w); break;
            case WindowSide::both: ranges.emplace_back(e.point - w, e.point + w); break;
        }
    }
    if (cfg.overlap_policy == OverlapPolicy::merge_union) {
        std::vector<std::pair<long, long>> merged;
        for (const auto& r : ranges) {
            if (!merged.empty() && r.first <= merged.back().second)
                merged.back().second = std::max(merged.back().second, r.second);
            else
                merged.push_back(r);
        }
        ranges = std::move(merged);
    }

    std::vector<double> ch0, ch1, in;
    for (const auto& [lo, hi] : ranges) {
        for (long k = lo; k <= hi; ++k) {
            ch0.push_back(series.ch0[static_cast<std::size_t>(k)]);
            ch1.push_back(series.ch1[static_cast<std::size_t>(k)]);
            in.push_back(input.values[static_cast<std::size_t>(k)]);
        }
    }
    return IdentDataset(std::move(ch0), std::move(ch1), std::move(in));
}

struct ScenarioCell {
    std::string dataset_label;  // "Entire", "Area1", ...
    std::string side;           // scenario 2: "before" | "after" | "entire"
    int order = 0;
    bool empty = false;  // area had no events
    LtiModel model;
    FitReport fit;
    std::array<ConvergenceTrace, 2> traces;
    IdentDataset eval_data;  // the validation segment the fit was scored on
    long train_samples = 0;
    long eval_samples = 0;
};

struct ScenarioReport {
    int scenario = 0;
    std::vector<ScenarioCell> cells;
    std::vector<GeoArea> areas;
    RlsConfig rls;
    EvalMode mode = EvalMode::one_step;
    WindowConfig window;
    long train_len = 0;          // scenario 1 split
    double train_fraction = 0.0; // scenario 2 split
};

namespace detail {

inline ScenarioCell run_cell(const IdentDataset& train, const IdentDataset& eval_data,
                             std::string label, std::string side, int order,
                             const RlsConfig& rls, EvalMode mode) {
    ScenarioCell cell;
    cell.dataset_label = std::move(label);
    cell.side = std::move(side);
    cell.order = order;
    IdentResult ident = identify(train, order, rls);
    cell.fit = evaluate(ident.model, eval_data, mode);
    cell.model = std::move(ident.model);
    cell.traces = std::move(ident.traces);
    cell.eval_data = eval_data;
    cell.train_samples = static_cast<long>(train.size());
    cell.eval_samples = static_cast<long>(eval_data.size());
    return cell;
}

inline std::vector<CatalogEvent> events_in_area(const Catalog& catalog, const GeoArea& area) {
    std::vector<CatalogEvent> out;
    for (const CatalogEvent& e : catalog.events) {
        if (area.contains(e.longitude, e.latitude))
            out.push_back(e);
    }
    return out;
}

}  // namespace detail

/// One model per dataset: the entire region plus one per area (full-length
/// signals, input filtered to that area's events). Trains on the first
/// train_len samples, evaluates on the remainder.
inline ScenarioReport run_scenario1(const LtgpSeries& series, const InputSeries& input,
                                    const Catalog& catalog, const std::vector<GeoArea>& areas,
                                    const std::vector<int>& orders = {2, 4},
                                    long train_len = 30000, const RlsConfig& rls = {},
                                    EvalMode mode = EvalMode::one_step) {
    validate_areas(areas);
    if (input.values.size() != series.size())
        throw ShapeError("run_scenario1: input length does not match series");
    if (train_len <= 0 || static_cast<std::size_t>(train_len) >= series.size())
        throw RangeError("run_scenario1: train_len must be inside the series");

    ScenarioReport report;
    report.scenario = 1;
    report.areas = areas;
    report.rls = rls;
    report.mode = mode;
    report.train_len = train_len;

    std::vector<std::pair<std::string, InputSeries>> datasets;
    datasets.emplace_back("Entire", input);
    for (const GeoArea& area : areas) {
        Catalog filtered{detail::events_in_area(catalog, area)};
        datasets.emplace_back(area.name, build_input_series(filtered, series.size()));
    }

    for (const auto& [label, in] : datasets) {
        const IdentDataset full(series.ch0, series.ch1, in.values);
        const auto [train, eval_data] = split_dataset(full, static_cast<std::size_t>(train_len));
        for (int order : orders)
            report.cells.push_back(detail::run_cell(train, eval_data, label, "", order, rls, mode));
    }
    return report;
}

/// Per area and window side, trains on the first floor(train_fraction * N)
/// samples of the stitched window dataset and validates on the rest. Areas
/// without events yield empty cells rather than failures.
inline ScenarioReport run_scenario2(const LtgpSeries& series, const InputSeries& input,
                                    const Catalog& catalog, const std::vector<GeoArea>& areas,
                                    const WindowConfig& cfg = {},
                                    const std::vector<int>& orders = {2, 4},
                                    double train_fraction = 2.0 / 3.0, const RlsConfig& rls = {},
                                    EvalMode mode = EvalMode::one_step) {
    validate_areas(areas);
    if (!(train_fraction > 0.0) || train_fraction >= 1.0)
        throw InvalidParameterError("run_scenario2: train_fraction must be in (0,1)");

    ScenarioReport report;
    report.scenario = 2;
    report.areas = areas;
    report.rls = rls;
    report.mode = mode;
    report.window = cfg;
    report.train_fraction = train_fraction;

    static constexpr std::array<std::pair<WindowSide, const char*>, 3> kSides = {
        {{WindowSide::before, "before"}, {WindowSide::after, "after"}, {WindowSide::both, "entire"}}};

    for (const GeoArea& area : areas) {
        const std::vector<CatalogEvent> events = detail::events_in_area(catalog, area);
        for (const auto& [side, side_name] : kSides) {
            if (events.empty()) {
                for (int order : orders) {
                    ScenarioCell cell;
                    cell.dataset_label = area.name;
                    cell.side = side_name;
                    cell.order = order;
                    cell.empty = true;
                    report.cells.push_back(std::move(cell));
                }
                continue;
            }
            const IdentDataset window_data = build_event_windows(series, input, events, cfg, side);
            const auto train_count = static_cast<std::size_t>(
                std::floor(train_fraction * static_cast<double>(window_data.size())));
            const auto [train, eval_data] = split_dataset(window_data, train_count);
            for (int order : orders)
                report.cells.push_back(
                    detail::run_cell(train, eval_data, area.name, side_name, order, rls, mode));
        }
    }
    return report;
}

/// Flat text area config: one `name lon_min lon_max lat_min lat_max` per line.
inline std::vector<GeoArea> parse_areas(std::string_view text) {
    std::vector<GeoArea> areas;
    detail::for_each_line(text, [&](std::string_view line, std::size_t line_no) {
        const std::size_t hash = line.find('#');
        if (hash != std::string_view::npos) line = line.substr(0, hash);
        std::vector<std::string_view> tokens;
        std::size_t pos = 0;
        while (pos < line.size()) {
            while (pos < line.size() && (line[pos] == ' ' || line[pos] == '\t')) ++pos;
            std::size_t end = pos;
            while (end < line.size() && line[end] != ' ' && line[end] != '\t') ++end;
            if (end > pos) tokens.push_back(line.substr(pos, end - pos));
            pos = end;
        }
        if (tokens.empty()) return;
        if (tokens.size() != 5)
            throw ParseError(line_no, "expected 'name lon_min lon_max lat_min lat_max'");
        GeoArea a;
        a.name = std::string(tokens[0]);
        a.lon_min = detail::parse_double_field(tokens[1], line_no);
        a.lon_max = detail::parse_double_field(tokens[2], line_no);
        a.lat_min = detail::parse_double_field(tokens[3], line_no);
        a.lat_max = detail::parse_double_field(tokens[4], line_no);
        areas.push_back(std::move(a));
    });
    if (areas.empty())
        throw ConfigError("area config defines no areas");
    validate_areas(areas);
    return areas;
}

}  // namespace seisid
