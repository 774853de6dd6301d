// Command implementations behind the seisid CLI: synth, identify, scenario.
// All file output is funneled through a single writer so the run manifest
// lists every emitted artifact with its checksum.
#pragma once

#include <cfenv>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "seisid/dataio.hpp"
#include "seisid/dataset.hpp"
#include "seisid/errors.hpp"
#include "seisid/metrics.hpp"
#include "seisid/model.hpp"
#include "seisid/rls.hpp"
#include "seisid/scenarios.hpp"

namespace seisid {

namespace detail {

inline std::uint64_t fnv1a64(std::string_view bytes) {
    std::uint64_t h = 14695981039346656037ull;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

inline std::string hex64(std::uint64_t v) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

/// Two-decimal fixed formatting with ties rounded half-to-even.
inline std::string format_fixed2(double v) {
    const double scaled = std::nearbyint(v * 100.0);  // FE_TONEAREST = ties-to-even
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.2f", scaled / 100.0);
    return buf;
}

inline std::string lower(std::string s) {
    for (char& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return s;
}

}  // namespace detail

/// Collects emitted files and writes the run manifest last.
class ArtifactWriter {
public:
    explicit ArtifactWriter(std::filesystem::path out_dir) : out_dir_(std::move(out_dir)) {
        std::error_code ec;
        std::filesystem::create_directories(out_dir_, ec);
        if (ec)
            throw IoError("cannot create output directory '" + out_dir_.string() + "'");
        start_ = std::chrono::steady_clock::now();
    }

    void write(const std::string& rel_path, std::string_view bytes) {
        const std::filesystem::path full = out_dir_ / rel_path;
        std::error_code ec;
        std::filesystem::create_directories(full.parent_path(), ec);
        std::ofstream out(full, std::ios::binary);
        if (!out)
            throw IoError("cannot write '" + full.string() + "'");
        out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
        if (!out)
            throw IoError("write failed for '" + full.string() + "'");
        files_.emplace_back(rel_path, detail::hex64(detail::fnv1a64(bytes)));
    }

    void finalize(const std::string& command, const std::vector<std::string>& inputs,
                  const std::string& config_echo) {
        const auto wall = std::chrono::duration_cast<std::chrono::milliseconds>(
                              std::chrono::steady_clock::now() - start_)
                              .count();
        std::string m = "command = " + command + "\n";
        for (const auto& in : inputs) m += "input = " + in + "\n";
        m += "config = " + config_echo + "\n";
        m += "out_dir = " + out_dir_.string() + "\n";
        m += "wall_clock_ms = " + std::to_string(wall) + "\n";
        for (const auto& [rel, sum] : files_) m += "file = " + rel + " fnv1a64 = " + sum + "\n";
        const std::filesystem::path full = out_dir_ / "manifest.txt";
        std::ofstream out(full, std::ios::binary);
        if (!out)
            throw IoError("cannot write '" + full.string() + "'");
        out << m;
    }

    const std::vector<std::pair<std::string, std::string>>& files() const { return files_; }
    const std::filesystem::path& out_dir() const { return out_dir_; }

private:
    std::filesystem::path out_dir_;
    std::vector<std::pair<std::string, std::string>> files_;
    std::chrono::steady_clock::time_point start_;
};

namespace detail {

inline std::vector<std::string> row_param_names(int order, int row_target) {
    if (order == 2)
        return row_target == 0 ? std::vector<std::string>{"a11", "a12", "b1"}
                               : std::vector<std::string>{"a21", "a22", "b2"};
    return row_target == 0 ? std::vector<std::string>{"a11", "a12", "a13", "a14", "b1"}
                           : std::vector<std::string>{"a31", "a32", "a33", "a34", "b3"};
}

inline std::string model_text(const LtiModel& model) {
    std::string out = "order = " + std::to_string(model.order) + "\n";
    for (int row = 0; row < model.order; ++row) {
        for (int col = 0; col < model.order; ++col) {
            if (!model.mask_a(row, col)) continue;
            out += "a" + std::to_string(row + 1) + std::to_string(col + 1) + " = " +
                   format_double(model.a(row, col)) + "\n";
        }
    }
    for (int row = 0; row < model.order; ++row) {
        if (!model.mask_b(row)) continue;
        out += "b" + std::to_string(row + 1) + " = " + format_double(model.b(row)) + "\n";
    }
    out += "spectral_radius = " + format_double(spectral_radius(model.a)) + "\n";
    return out;
}

inline std::string trace_csv(const ConvergenceTrace& trace, int order, int row_target) {
    const auto names = row_param_names(order, row_target);
    std::string out = "samples_seen,squared_error";
    for (const auto& n : names) out += "," + n;
    out.push_back('\n');
    for (std::size_t i = 0; i < trace.sample_index.size(); ++i) {
        const long seen = trace.sample_index[i];
        out += std::to_string(seen);
        out += "," + format_double(trace.squared_errors[static_cast<std::size_t>(seen - 1)]);
        const Eigen::VectorXd& theta = trace.theta_snapshots[i];
        for (Eigen::Index j = 0; j < theta.size(); ++j) out += "," + format_double(theta(j));
        out.push_back('\n');
    }
    return out;
}

inline std::string fit_report_csv(const FitReport& fit) {
    std::string out = "channel,bfr_percent,rmse,n_samples,mode\n";
    const char* mode = to_string(fit.mode);
    for (int c = 0; c < 2; ++c) {
        out += std::string("ch") + std::to_string(c) + "," + format_fixed2(fit.bfr_per_channel[c]) +
               "," + format_double(fit.rmse_per_channel[c]) + "," + std::to_string(fit.n_samples) +
               "," + mode + "\n";
    }
    out += "mean," + format_fixed2(fit.bfr_mean) + ",," + std::to_string(fit.n_samples) + "," +
           mode + "\n";
    return out;
}

inline std::string predicted_vs_actual_csv(const IdentDataset& data, const ChannelPredictions& pred,
                                           std::size_t index_offset) {
    std::string out = "sample_index,ch0_actual,ch0_pred,ch1_actual,ch1_pred\n";
    for (std::size_t j = 0; j < pred.pred_ch0.size(); ++j) {
        const std::size_t k = pred.first_sample + j;
        out += std::to_string(index_offset + k);
        out += "," + format_double(data.ch0[k]);
        out += "," + format_double(pred.pred_ch0[j]);
        out += "," + format_double(data.ch1[k]);
        out += "," + format_double(pred.pred_ch1[j]);
        out.push_back('\n');
    }
    return out;
}

struct SvgSeries {
    std::string name;
    const std::vector<double>* values;
};

/// Minimal line plot; series are decimated to keep files small.
inline std::string svg_line_plot(const std::string& title, const std::vector<SvgSeries>& series) {
    static constexpr const char* kColors[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e",
                                              "#9467bd", "#8c564b"};
    const double width = 960, height = 320, pad = 42;
    double lo = 0.0, hi = 1.0;
    bool first = true;
    std::size_t max_len = 0;
    for (const auto& s : series) {
        max_len = std::max(max_len, s.values->size());
        for (double v : *s.values) {
            if (first) { lo = hi = v; first = false; }
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
    }
    if (hi == lo) hi = lo + 1.0;
    const std::size_t stride = std::max<std::size_t>(1, max_len / 1200);

    std::string out = "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"960\" height=\"320\" "
                      "viewBox=\"0 0 960 320\">\n";
    out += "<rect width=\"960\" height=\"320\" fill=\"white\"/>\n";
    out += "<text x=\"12\" y=\"18\" font-family=\"sans-serif\" font-size=\"13\">" + title +
           "</text>\n";
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6g", hi);
    out += "<text x=\"4\" y=\"40\" font-family=\"sans-serif\" font-size=\"10\">" +
           std::string(buf) + "</text>\n";
    std::snprintf(buf, sizeof buf, "%.6g", lo);
    out += "<text x=\"4\" y=\"314\" font-family=\"sans-serif\" font-size=\"10\">" +
           std::string(buf) + "</text>\n";
    for (std::size_t si = 0; si < series.size(); ++si) {
        const auto& vals = *series[si].values;
        if (vals.empty()) continue;
        std::string points;
        for (std::size_t i = 0; i < vals.size(); i += stride) {
            const double x = pad + (width - 2 * pad) * static_cast<double>(i) /
                                       static_cast<double>(std::max<std::size_t>(1, max_len - 1));
            const double y = height - pad - (height - 2 * pad) * (vals[i] - lo) / (hi - lo);
            std::snprintf(buf, sizeof buf, "%.1f,%.1f ", x, y);
            points += buf;
        }
        const char* color = kColors[si % 6];
        out += "<polyline fill=\"none\" stroke=\"" + std::string(color) +
               "\" stroke-width=\"1\" points=\"" + points + "\"/>\n";
        out += "<text x=\"" + std::to_string(60 + 140 * si) +
               "\" y=\"306\" font-family=\"sans-serif\" font-size=\"11\" fill=\"" + color + "\">" +
               series[si].name + "</text>\n";
    }
    out += "</svg>\n";
    return out;
}

// Per-cell artifact bundle shared by identify and scenario emission.
inline void emit_fit_artifacts(ArtifactWriter& writer, const std::string& prefix,
                               const LtiModel& model, const std::array<ConvergenceTrace, 2>& traces,
                               const FitReport& fit, const IdentDataset& eval_data,
                               EvalMode mode, std::size_t index_offset, bool svg) {
    writer.write(prefix + "model.txt", model_text(model));
    writer.write(prefix + "trace_ch0.csv", trace_csv(traces[0], model.order, 0));
    writer.write(prefix + "trace_ch1.csv", trace_csv(traces[1], model.order, 1));
    writer.write(prefix + "fit_report.csv", fit_report_csv(fit));
    const ChannelPredictions pred = predict_channels(model, eval_data, mode);
    writer.write(prefix + "predicted_vs_actual.csv",
                 predicted_vs_actual_csv(eval_data, pred, index_offset));
    if (svg) {
        std::vector<double> act0(eval_data.ch0.begin() + static_cast<long>(pred.first_sample),
                                 eval_data.ch0.end());
        std::vector<double> act1(eval_data.ch1.begin() + static_cast<long>(pred.first_sample),
                                 eval_data.ch1.end());
        writer.write(prefix + "predicted_vs_actual.svg",
                     svg_line_plot("measured vs predicted",
                                   {{"ch0", &act0},
                                    {"ch0 predicted", &pred.pred_ch0},
                                    {"ch1", &act1},
                                    {"ch1 predicted", &pred.pred_ch1}}));
        std::vector<std::vector<double>> params;
        std::vector<SvgSeries> param_series;
        for (int r = 0; r < 2; ++r) {
            const auto names = row_param_names(model.order, r);
            for (std::size_t p = 0; p < names.size(); ++p) {
                std::vector<double> traj;
                traj.reserve(traces[r].theta_snapshots.size());
                for (const auto& th : traces[r].theta_snapshots)
                    traj.push_back(th(static_cast<Eigen::Index>(p)));
                params.push_back(std::move(traj));
            }
        }
        std::size_t idx = 0;
        for (int r = 0; r < 2; ++r) {
            for (const auto& name : row_param_names(model.order, r))
                param_series.push_back({name, &params[idx++]});
        }
        writer.write(prefix + "convergence.svg",
                     svg_line_plot("parameter convergence", param_series));
    }
}

}  // namespace detail

struct SynthOptions {
    std::string spec_path;
    std::string out_dir;
    std::optional<std::uint64_t> seed;  // overrides the spec file's seed
};

inline void cmd_synth(const SynthOptions& opt) {
    SynthSpec spec = parse_synth_spec(read_file(opt.spec_path));
    if (opt.seed) spec.seed = *opt.seed;
    const auto [series, catalog] = generate_synthetic(spec);

    ArtifactWriter writer(opt.out_dir);
    writer.write("ltgp.csv", write_ltgp_csv(series));
    writer.write("catalog.csv", write_catalog_csv(catalog));
    writer.write("truth.txt", detail::model_text(spec.true_model));
    writer.finalize("synth", {opt.spec_path},
                    "n_samples=" + std::to_string(spec.n_samples) +
                        " seed=" + std::to_string(spec.seed) +
                        " event_rate=" + detail::format_double(spec.event_rate) +
                        " noise_std=" + detail::format_double(spec.noise_std) +
                        " drift_amplitude=" + detail::format_double(spec.drift_amplitude));
}

struct IdentifyOptions {
    std::string ltgp_path;
    std::string catalog_path;
    std::string out_dir;
    int order = 2;
    RlsConfig rls;
    EvalMode mode = EvalMode::one_step;
    long train_len = 0;  // 0 = train and evaluate on the full series
    bool svg = false;
};

inline void cmd_identify(const IdentifyOptions& opt) {
    const LtgpSeries series = parse_ltgp_csv(read_file(opt.ltgp_path));
    const Catalog catalog = parse_catalog_csv(read_file(opt.catalog_path));
    const InputSeries input = build_input_series(catalog, series.size());
    const IdentDataset full(series.ch0, series.ch1, input.values);

    IdentDataset train = full, eval_data = full;
    std::size_t eval_offset = 0;
    if (opt.train_len > 0) {
        auto [tr, ev] = split_dataset(full, static_cast<std::size_t>(opt.train_len));
        train = std::move(tr);
        eval_data = std::move(ev);
        eval_offset = static_cast<std::size_t>(opt.train_len);
    }

    const IdentResult ident = identify(train, opt.order, opt.rls);
    const FitReport fit = evaluate(ident.model, eval_data, opt.mode);

    ArtifactWriter writer(opt.out_dir);
    detail::emit_fit_artifacts(writer, "", ident.model, ident.traces, fit, eval_data, opt.mode,
                               eval_offset, opt.svg);
    writer.finalize("identify", {opt.ltgp_path, opt.catalog_path},
                    "order=" + std::to_string(opt.order) +
                        " lambda=" + detail::format_double(opt.rls.forgetting) +
                        " p0=" + detail::format_double(opt.rls.p0_scale) +
                        " stride=" + std::to_string(opt.rls.trace_stride) +
                        " mode=" + to_string(opt.mode) +
                        " train_len=" + std::to_string(opt.train_len));
}

struct ScenarioOptions {
    int which = 1;
    std::string ltgp_path;
    std::string catalog_path;
    std::string out_dir;
    std::string areas_path;  // empty = built-in boxes
    RlsConfig rls;
    EvalMode mode = EvalMode::one_step;
    WindowConfig window;
    long train_len = 30000;
    double train_fraction = 2.0 / 3.0;
    bool svg = false;
};

namespace detail {

inline std::string scenario1_summary(const ScenarioReport& report) {
    std::string out = "data_set,order2_bfr,order4_bfr\n";
    std::vector<std::string> labels{"Entire"};
    for (const auto& a : report.areas) labels.push_back(a.name);
    for (const auto& label : labels) {
        out += label;
        for (int order : {2, 4}) {
            out.push_back(',');
            for (const auto& cell : report.cells) {
                if (cell.dataset_label == label && cell.order == order && !cell.empty) {
                    out += format_fixed2(cell.fit.bfr_mean);
                    break;
                }
            }
        }
        out.push_back('\n');
    }
    return out;
}

inline std::string scenario2_summary(const ScenarioReport& report) {
    std::string out = "model_order,area,before_bfr,after_bfr,entire_bfr\n";
    for (int order : {2, 4}) {
        for (const auto& area : report.areas) {
            out += std::to_string(order) + "," + area.name;
            for (const char* side : {"before", "after", "entire"}) {
                out.push_back(',');
                for (const auto& cell : report.cells) {
                    if (cell.dataset_label == area.name && cell.side == side &&
                        cell.order == order && !cell.empty) {
                        out += format_fixed2(cell.fit.bfr_mean);
                        break;
                    }
                }
            }
            out.push_back('\n');
        }
    }
    return out;
}

}  // namespace detail

inline void cmd_scenario(const ScenarioOptions& opt) {
    const LtgpSeries series = parse_ltgp_csv(read_file(opt.ltgp_path));
    const Catalog catalog = parse_catalog_csv(read_file(opt.catalog_path));
    const InputSeries input = build_input_series(catalog, series.size());
    const std::vector<GeoArea> areas =
        opt.areas_path.empty() ? default_areas() : parse_areas(read_file(opt.areas_path));

    ScenarioReport report;
    if (opt.which == 1)
        report = run_scenario1(series, input, catalog, areas, {2, 4}, opt.train_len, opt.rls,
                               opt.mode);
    else if (opt.which == 2)
        report = run_scenario2(series, input, catalog, areas, opt.window, {2, 4},
                               opt.train_fraction, opt.rls, opt.mode);
    else
        throw InvalidParameterError("scenario must be 1 or 2");

    ArtifactWriter writer(opt.out_dir);
    writer.write("summary.csv", opt.which == 1 ? detail::scenario1_summary(report)
                                               : detail::scenario2_summary(report));
    for (const auto& cell : report.cells) {
        if (cell.empty) continue;
        std::string dir = "cells/" + detail::lower(cell.dataset_label);
        if (!cell.side.empty()) dir += "_" + cell.side;
        dir += "_o" + std::to_string(cell.order) + "/";
        const std::size_t offset =
            opt.which == 1 ? static_cast<std::size_t>(cell.train_samples) : 0;
        detail::emit_fit_artifacts(writer, dir, cell.model, cell.traces, cell.fit, cell.eval_data,
                                   opt.mode, offset, opt.svg);
    }
    writer.finalize("scenario " + std::to_string(opt.which),
                    {opt.ltgp_path, opt.catalog_path},
                    "lambda=" + detail::format_double(opt.rls.forgetting) +
                        " p0=" + detail::format_double(opt.rls.p0_scale) +
                        " mode=" + std::string(to_string(opt.mode)) +
                        " window_hours=" + std::to_string(opt.window.half_width_hours) +
                        " overlap=" +
                        (opt.window.overlap_policy == OverlapPolicy::concatenate ? "concatenate"
                                                                                 : "union") +
                        " train_len=" + std::to_string(opt.train_len) +
                        " train_fraction=" + detail::format_double(opt.train_fraction));
}

/// Maps an error to the machine-parsable category printed on stderr.
inline const char* error_category(const std::exception& e) {
    if (dynamic_cast<const InvalidParameterError*>(&e)) return "invalid-parameter";
    if (dynamic_cast<const ShapeError*>(&e)) return "shape";
    if (dynamic_cast<const NumericError*>(&e)) return "numeric";
    if (dynamic_cast<const ParseError*>(&e)) return "parse";
    if (dynamic_cast<const OrderingError*>(&e)) return "ordering";
    if (dynamic_cast<const RangeError*>(&e)) return "range";
    if (dynamic_cast<const ConfigError*>(&e)) return "config";
    if (dynamic_cast<const DegenerateDataError*>(&e)) return "degenerate-data";
    if (dynamic_cast<const RankDeficiencyError*>(&e)) return "rank-deficiency";
    if (dynamic_cast<const EmptyDatasetError*>(&e)) return "empty-dataset";
    if (dynamic_cast<const IoError*>(&e)) return "io";
    return "internal";
}

}  // namespace seisid
