// Ingestion of LTGP signal and earthquake-catalog CSV files, input-series
// construction, calendar arithmetic and seeded synthetic data generation.
#pragma once

#include <algorithm>
#include <array>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "seisid/errors.hpp"
#include "seisid/model.hpp"

namespace seisid {

namespace detail {

/// Shortest round-trip decimal form (parse(format(x)) == x bitwise).
inline std::string format_double(double v) {
    std::array<char, 32> buf;
    const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v);
    return std::string(buf.data(), res.ptr);
}

inline double parse_double_field(std::string_view s, std::size_t line) {
    double v = 0.0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc{} || res.ptr != s.data() + s.size())
        throw ParseError(line, "bad numeric field '" + std::string(s) + "'");
    if (!std::isfinite(v))
        throw NumericError("line " + std::to_string(line) + ": non-finite field");
    return v;
}

inline long parse_long_field(std::string_view s, std::size_t line) {
    long v = 0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc{} || res.ptr != s.data() + s.size())
        throw ParseError(line, "bad integer field '" + std::string(s) + "'");
    return v;
}

inline std::vector<std::string_view> split_fields(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t pos = 0;
    while (true) {
        const std::size_t comma = line.find(',', pos);
        if (comma == std::string_view::npos) {
            out.push_back(line.substr(pos));
            return out;
        }
        out.push_back(line.substr(pos, comma - pos));
        pos = comma + 1;
    }
}

// Iterates lines, tolerating a trailing \r and a missing final newline.
template <typename Fn>
inline void for_each_line(std::string_view text, Fn&& fn) {
    std::size_t pos = 0, line_no = 1;
    while (pos < text.size()) {
        std::size_t nl = text.find('\n', pos);
        if (nl == std::string_view::npos) nl = text.size();
        std::string_view line = text.substr(pos, nl - pos);
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        fn(line, line_no);
        pos = nl + 1;
        ++line_no;
    }
}

inline std::string format_date(std::chrono::year_month_day d) {
    char buf[16];
    std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", static_cast<int>(d.year()),
                  static_cast<unsigned>(d.month()), static_cast<unsigned>(d.day()));
    return buf;
}

inline std::chrono::year_month_day parse_date(std::string_view s, std::size_t line) {
    if (s.size() != 10 || s[4] != '-' || s[7] != '-')
        throw ParseError(line, "bad date '" + std::string(s) + "' (want yyyy-mm-dd)");
    const auto y = parse_long_field(s.substr(0, 4), line);
    const auto mo = parse_long_field(s.substr(5, 2), line);
    const auto dd = parse_long_field(s.substr(8, 2), line);
    const std::chrono::year_month_day ymd{std::chrono::year(static_cast<int>(y)),
                                          std::chrono::month(static_cast<unsigned>(mo)),
                                          std::chrono::day(static_cast<unsigned>(dd))};
    if (!ymd.ok())
        throw ParseError(line, "invalid calendar date '" + std::string(s) + "'");
    return ymd;
}

}  // namespace detail

/// Hourly two-channel geoelectric potential record.
struct LtgpSeries {
    std::chrono::year_month_day start_date{std::chrono::year(1993), std::chrono::month(1),
                                           std::chrono::day(1)};
    int start_hour = 0;  // 0..23, UTC
    std::vector<double> ch0;  // NS
    std::vector<double> ch1;  // EW

    LtgpSeries() = default;
    LtgpSeries(std::vector<double> c0, std::vector<double> c1)
        : ch0(std::move(c0)), ch1(std::move(c1)) {
        if (ch0.size() != ch1.size())
            throw ShapeError("LtgpSeries: channel lengths differ");
        if (ch0.empty())
            throw ShapeError("LtgpSeries: empty series");
        for (std::size_t i = 0; i < ch0.size(); ++i) {
            if (!std::isfinite(ch0[i]) || !std::isfinite(ch1[i]))
                throw NumericError("LtgpSeries: non-finite sample");
        }
    }

    std::size_t size() const { return ch0.size(); }
};

/// One catalog row; `point` is the hour index into the companion series.
struct CatalogEvent {
    long point = 0;
    std::chrono::year_month_day date{};
    double distance_km = 0.0;
    double depth_km = 0.0;
    double longitude = 0.0;
    double latitude = 0.0;
    double magnitude = 0.0;
};

struct Catalog {
    std::vector<CatalogEvent> events;  // sorted ascending by point
};

inline Catalog make_catalog(std::vector<CatalogEvent> events) {
    for (const auto& e : events) {
        if (e.point < 0)
            throw InvalidParameterError("catalog: negative point index");
        if (!(e.magnitude > 0.0))
            throw InvalidParameterError("catalog: magnitude must be positive");
        if (std::abs(e.latitude) > 90.0 || std::abs(e.longitude) > 180.0)
            throw InvalidParameterError("catalog: coordinates out of range");
    }
    std::stable_sort(events.begin(), events.end(),
                     [](const CatalogEvent& a, const CatalogEvent& b) { return a.point < b.point; });
    return Catalog{std::move(events)};
}

/// Hourly magnitude input; 0 = no event, otherwise the strongest event that hour.
struct InputSeries {
    std::vector<double> values;
};

inline constexpr std::string_view kLtgpHeader = "hour_index,ch0,ch1";
inline constexpr std::string_view kCatalogHeader =
    "no,point,date,distance_km,depth_km,longitude,latitude,magnitude";

inline LtgpSeries parse_ltgp_csv(std::string_view bytes) {
    std::vector<double> ch0, ch1;
    long expected = 0;
    detail::for_each_line(bytes, [&](std::string_view line, std::size_t line_no) {
        if (line_no == 1) {
            if (line != kLtgpHeader)
                throw ParseError(line_no, "expected header '" + std::string(kLtgpHeader) + "'");
            return;
        }
        const auto fields = detail::split_fields(line);
        if (fields.size() != 3)
            throw ParseError(line_no, "expected 3 fields, got " + std::to_string(fields.size()));
        const long idx = detail::parse_long_field(fields[0], line_no);
        if (idx != expected)
            throw OrderingError("line " + std::to_string(line_no) + ": hour_index " +
                                std::to_string(idx) + ", expected " + std::to_string(expected));
        ++expected;
        ch0.push_back(detail::parse_double_field(fields[1], line_no));
        ch1.push_back(detail::parse_double_field(fields[2], line_no));
    });
    if (ch0.empty())
        throw ParseError(1, "no data rows");
    return LtgpSeries(std::move(ch0), std::move(ch1));
}

inline std::string write_ltgp_csv(const LtgpSeries& series) {
    std::string out(kLtgpHeader);
    out.push_back('\n');
    for (std::size_t i = 0; i < series.size(); ++i) {
        out += std::to_string(i);
        out.push_back(',');
        out += detail::format_double(series.ch0[i]);
        out.push_back(',');
        out += detail::format_double(series.ch1[i]);
        out.push_back('\n');
    }
    return out;
}

inline Catalog parse_catalog_csv(std::string_view bytes) {
    std::vector<CatalogEvent> events;
    bool saw_header = false;
    detail::for_each_line(bytes, [&](std::string_view line, std::size_t line_no) {
        if (line_no == 1) {
            if (line != kCatalogHeader)
                throw ParseError(line_no, "expected header '" + std::string(kCatalogHeader) + "'");
            saw_header = true;
            return;
        }
        const auto fields = detail::split_fields(line);
        if (fields.size() != 8)
            throw ParseError(line_no, "expected 8 fields, got " + std::to_string(fields.size()));
        CatalogEvent e;
        detail::parse_long_field(fields[0], line_no);  // `no` is presentation only
        e.point = detail::parse_long_field(fields[1], line_no);
        e.date = detail::parse_date(fields[2], line_no);
        e.distance_km = detail::parse_double_field(fields[3], line_no);
        e.depth_km = detail::parse_double_field(fields[4], line_no);
        e.longitude = detail::parse_double_field(fields[5], line_no);
        e.latitude = detail::parse_double_field(fields[6], line_no);
        e.magnitude = detail::parse_double_field(fields[7], line_no);
        events.push_back(e);
    });
    if (!saw_header)
        throw ParseError(1, "empty file");
    return make_catalog(std::move(events));
}

inline std::string write_catalog_csv(const Catalog& catalog) {
    std::string out(kCatalogHeader);
    out.push_back('\n');
    for (std::size_t i = 0; i < catalog.events.size(); ++i) {
        const CatalogEvent& e = catalog.events[i];
        out += std::to_string(i + 1);
        out.push_back(',');
        out += std::to_string(e.point);
        out.push_back(',');
        out += detail::format_date(e.date);
        for (double v : {e.distance_km, e.depth_km, e.longitude, e.latitude, e.magnitude}) {
            out.push_back(',');
            out += detail::format_double(v);
        }
        out.push_back('\n');
    }
    return out;
}

/// values[p] = strongest magnitude among events at hour p, 0 elsewhere.
inline InputSeries build_input_series(const Catalog& catalog, std::size_t length) {
    InputSeries input;
    input.values.assign(length, 0.0);
    for (const CatalogEvent& e : catalog.events) {
        if (e.point < 0 || static_cast<std::size_t>(e.point) >= length)
            throw RangeError("build_input_series: event point " + std::to_string(e.point) +
                             " outside series of length " + std::to_string(length));
        double& slot = input.values[static_cast<std::size_t>(e.point)];
        slot = std::max(slot, e.magnitude);
    }
    return input;
}

/// Hourly samples spanning the inclusive date range.
inline long calendar_hours(std::chrono::year_month_day start, std::chrono::year_month_day end) {
    if (!start.ok() || !end.ok())
        throw InvalidParameterError("calendar_hours: invalid date");
    const auto days = (std::chrono::sys_days(end) - std::chrono::sys_days(start)).count();
    if (days < 0)
        throw RangeError("calendar_hours: start after end");
    return (days + 1) * 24;
}

struct SynthSpec {
    LtiModel true_model;
    long n_samples = 0;
    double event_rate = 0.0;                       // events per 1000 hours
    std::array<double, 2> magnitude_range{0.0, 0.0};
    double noise_std = 0.0;
    double drift_amplitude = 0.0;
    std::uint64_t seed = 42;

    void validate() const {
        if (true_model.order != 2 && true_model.order != 4)
            throw InvalidParameterError("SynthSpec: true_model order must be 2 or 4");
        if (n_samples < 10)
            throw InvalidParameterError("SynthSpec: n_samples must be >= 10");
        if (event_rate < 0.0)
            throw InvalidParameterError("SynthSpec: event_rate must be >= 0");
        if (!(magnitude_range[0] > 0.0) || magnitude_range[0] > magnitude_range[1])
            throw InvalidParameterError("SynthSpec: need 0 < magnitude min <= max");
        if (noise_std < 0.0 || drift_amplitude < 0.0)
            throw InvalidParameterError("SynthSpec: noise/drift must be >= 0");
    }
};

namespace detail {

// Engine-only use of <random>: the transforms below are pinned here so fixed
// seeds produce identical bytes on any standard library.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : eng_(seed) {}

    double uniform() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }  // [0,1)

    std::pair<double, double> normal_pair() {
        double u1 = uniform();
        while (u1 == 0.0) u1 = uniform();
        const double u2 = uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double a = 2.0 * M_PI * u2;
        return {r * std::cos(a), r * std::sin(a)};
    }

private:
    std::mt19937_64 eng_;
};

}  // namespace detail

/// Sparse magnitude impulses drive the true model; white noise and a slow
/// sinusoidal drift (period n_samples/4) are added to both channels.
/// Deterministic for a fixed seed. Epicenters fall in one of three fixed
/// boxes matching the default geographic partition, so synthetic catalogs
/// exercise the area machinery.
inline std::pair<LtgpSeries, Catalog> generate_synthetic(const SynthSpec& spec) {
    spec.validate();
    detail::Rng rng(spec.seed);
    const long n = spec.n_samples;

    struct Box { double lon_min, lon_max, lat_min, lat_max; };
    static constexpr Box kBoxes[3] = {{20.0, 21.0, 38.0, 39.5},
                                      {21.5, 22.5, 38.0, 39.0},
                                      {20.0, 22.0, 37.0, 38.0}};

    const long n_events = std::llround(spec.event_rate * static_cast<double>(n) / 1000.0);
    std::vector<CatalogEvent> events;
    events.reserve(static_cast<std::size_t>(n_events));
    const std::chrono::sys_days start_day(LtgpSeries{}.start_date);
    for (long i = 0; i < n_events; ++i) {
        CatalogEvent e;
        e.point = std::min<long>(n - 1, static_cast<long>(rng.uniform() * static_cast<double>(n)));
        e.magnitude = spec.magnitude_range[0] +
                      rng.uniform() * (spec.magnitude_range[1] - spec.magnitude_range[0]);
        const Box& box = kBoxes[std::min<int>(2, static_cast<int>(rng.uniform() * 3.0))];
        e.longitude = box.lon_min + rng.uniform() * (box.lon_max - box.lon_min);
        e.latitude = box.lat_min + rng.uniform() * (box.lat_max - box.lat_min);
        e.distance_km = 5.0 + rng.uniform() * 200.0;
        e.depth_km = 1.0 + rng.uniform() * 59.0;
        e.date = std::chrono::year_month_day(start_day + std::chrono::days(e.point / 24));
        events.push_back(e);
    }
    Catalog catalog = make_catalog(std::move(events));
    const InputSeries input = build_input_series(catalog, static_cast<std::size_t>(n));

    std::vector<double> ch0(static_cast<std::size_t>(n)), ch1(static_cast<std::size_t>(n));
    const int c1 = (spec.true_model.order == 4) ? 2 : 1;
    StateVector x = StateVector::Zero(spec.true_model.order);
    for (long k = 0; k < n; ++k) {
        ch0[static_cast<std::size_t>(k)] = x(0);
        ch1[static_cast<std::size_t>(k)] = x(c1);
        x = step(spec.true_model, x, input.values[static_cast<std::size_t>(k)]);
    }
    const double omega = 2.0 * M_PI * 4.0 / static_cast<double>(n);
    for (long k = 0; k < n; ++k) {
        const double drift = spec.drift_amplitude * std::sin(omega * static_cast<double>(k));
        const auto [z0, z1] = spec.noise_std > 0.0 ? rng.normal_pair() : std::pair{0.0, 0.0};
        ch0[static_cast<std::size_t>(k)] += spec.noise_std * z0 + drift;
        ch1[static_cast<std::size_t>(k)] += spec.noise_std * z1 + drift;
    }
    return {LtgpSeries(std::move(ch0), std::move(ch1)), std::move(catalog)};
}

/// Flat `key = value` spec text; keys are exactly the SynthSpec field names.
/// true_model is the order followed by its estimable coefficients
/// (6 values for order 2, 10 for order 4); magnitude_range is "min max".
inline SynthSpec parse_synth_spec(std::string_view text) {
    SynthSpec spec;
    bool have_model = false, have_n = false, have_rate = false, have_range = false,
         have_noise = false, have_drift = false;
    detail::for_each_line(text, [&](std::string_view line, std::size_t line_no) {
        const std::size_t hash = line.find('#');
        if (hash != std::string_view::npos) line = line.substr(0, hash);
        auto trim = [](std::string_view s) {
            while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
            while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
            return s;
        };
        line = trim(line);
        if (line.empty()) return;
        const std::size_t eq = line.find('=');
        if (eq == std::string_view::npos)
            throw ParseError(line_no, "expected 'key = value'");
        const std::string_view key = trim(line.substr(0, eq));
        const std::string_view value = trim(line.substr(eq + 1));
        auto values = [&]() {
            std::vector<double> vs;
            std::size_t pos = 0;
            while (pos < value.size()) {
                while (pos < value.size() && value[pos] == ' ') ++pos;
                std::size_t end = value.find(' ', pos);
                if (end == std::string_view::npos) end = value.size();
                if (end > pos)
                    vs.push_back(detail::parse_double_field(value.substr(pos, end - pos), line_no));
                pos = end;
            }
            return vs;
        };
        if (key == "true_model") {
            const auto vs = values();
            if (vs.size() == 7 && vs[0] == 2.0)
                spec.true_model = make_second_order(vs[1], vs[2], vs[3], vs[4], vs[5], vs[6]);
            else if (vs.size() == 11 && vs[0] == 4.0)
                spec.true_model = make_fourth_order(vs[1], vs[2], vs[3], vs[4], vs[5], vs[6],
                                                    vs[7], vs[8], vs[9], vs[10]);
            else
                throw ConfigError("true_model: want order then 6 (order 2) or 10 (order 4) values");
            have_model = true;
        } else if (key == "n_samples") {
            spec.n_samples = detail::parse_long_field(value, line_no);
            have_n = true;
        } else if (key == "event_rate") {
            spec.event_rate = detail::parse_double_field(value, line_no);
            have_rate = true;
        } else if (key == "magnitude_range") {
            const auto vs = values();
            if (vs.size() != 2)
                throw ConfigError("magnitude_range: want 'min max'");
            spec.magnitude_range = {vs[0], vs[1]};
            have_range = true;
        } else if (key == "noise_std") {
            spec.noise_std = detail::parse_double_field(value, line_no);
            have_noise = true;
        } else if (key == "drift_amplitude") {
            spec.drift_amplitude = detail::parse_double_field(value, line_no);
            have_drift = true;
        } else if (key == "seed") {
            spec.seed = static_cast<std::uint64_t>(detail::parse_long_field(value, line_no));
        } else {
            throw ConfigError("unknown synth spec key '" + std::string(key) + "'");
        }
    });
    if (!(have_model && have_n && have_rate && have_range && have_noise && have_drift))
        throw ConfigError("synth spec missing required keys");
    spec.validate();
    return spec;
}

inline std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw IoError("cannot open '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace seisid
