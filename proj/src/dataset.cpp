#include "pilube/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <numbers>
#include <numeric>
#include <random>
#include <sstream>
#include <stdexcept>

#include <boost/math/distributions/normal.hpp>

namespace pilube {

namespace {

// RFC-4180 records: quoted fields may contain separators, newlines and "" escapes.
std::vector<std::vector<std::string>> parse_csv_records(std::istream& in) {
    std::vector<std::vector<std::string>> records;
    std::vector<std::string> record;
    std::string field;
    bool quoted = false;
    bool field_started = false;
    char c;
    auto end_field = [&] {
        record.push_back(std::move(field));
        field.clear();
        field_started = false;
    };
    auto end_record = [&] {
        end_field();
        if (!(record.size() == 1 && record.front().empty())) records.push_back(std::move(record));
        record.clear();
    };
    while (in.get(c)) {
        if (quoted) {
            if (c == '"') {
                if (in.peek() == '"') {
                    in.get(c);
                    field.push_back('"');
                } else {
                    quoted = false;
                }
            } else {
                field.push_back(c);
            }
            continue;
        }
        if (c == '"' && !field_started) {
            quoted = true;
            field_started = true;
        } else if (c == ',') {
            end_field();
        } else if (c == '\n') {
            end_record();
        } else if (c == '\r') {
            if (in.peek() == '\n') in.get(c);
            end_record();
        } else {
            field.push_back(c);
            field_started = true;
        }
    }
    if (quoted) throw std::runtime_error("csv: unterminated quoted field");
    if (field_started || !record.empty()) end_record();
    return records;
}

std::string trim(const std::string& s) {
    const auto first = s.find_first_not_of(" \t");
    if (first == std::string::npos) return {};
    const auto last = s.find_last_not_of(" \t");
    return s.substr(first, last - first + 1);
}

bool parse_number(const std::string& text, double& out) {
    const std::string s = trim(text);
    if (s.empty()) return false;
    const char* begin = s.data();
    const char* end = s.data() + s.size();
    if (*begin == '+') ++begin;
    auto [ptr, ec] = std::from_chars(begin, end, out);
    return ec == std::errc() && ptr == end && std::isfinite(out);
}

bool parse_timestamp(const std::string& text, double& out) {
    if (parse_number(text, out)) return true;
    std::string s = trim(text);
    std::replace(s.begin(), s.end(), 'T', ' ');
    if (!s.empty() && s.back() == 'Z') s.pop_back();
    std::tm tm{};
    std::istringstream is(s);
    is >> std::get_time(&tm, "%Y-%m-%d %H:%M");
    if (is.fail()) return false;
    int seconds = 0;
    if (is.peek() == ':') {
        is.get();
        is >> seconds;
        if (is.fail()) return false;
    }
    is >> std::ws;
    if (!is.eof()) return false;
    tm.tm_sec = seconds;
    out = static_cast<double>(timegm(&tm));
    return true;
}

std::size_t column_index(const std::vector<std::string>& header, const std::string& name,
                         const std::filesystem::path& path) {
    for (std::size_t i = 0; i < header.size(); ++i) {
        if (trim(header[i]) == name) return i;
    }
    throw std::runtime_error("csv " + path.string() + ": missing column '" + name + "'");
}

}  // namespace

double time_of_day(double timestamp) {
    double seconds = std::fmod(timestamp, 86400.0);
    if (seconds < 0) seconds += 86400.0;
    const double hour = std::floor(seconds / 3600.0);
    const double minutes = (seconds - hour * 3600.0) / 60.0;
    return hour + minutes / 60.0;
}

std::vector<double> FeatureScaling::apply(const std::vector<double>& raw) const {
    if (raw.size() != offset.size()) throw std::invalid_argument("FeatureScaling: dimension mismatch");
    std::vector<double> out(raw.size());
    for (std::size_t i = 0; i < raw.size(); ++i) out[i] = (raw[i] - offset[i]) / span[i];
    return out;
}

std::vector<double> FeatureScaling::invert(const std::vector<double>& scaled) const {
    if (scaled.size() != offset.size()) throw std::invalid_argument("FeatureScaling: dimension mismatch");
    std::vector<double> out(scaled.size());
    for (std::size_t i = 0; i < scaled.size(); ++i) out[i] = scaled[i] * span[i] + offset[i];
    return out;
}

TimeSeries load_csv(const std::filesystem::path& path, const std::string& time_col,
                    const std::string& value_col) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("csv: cannot open " + path.string());
    // skip a UTF-8 byte order mark
    if (in.peek() == 0xEF) {
        char bom[3];
        in.read(bom, 3);
        if (!(static_cast<unsigned char>(bom[1]) == 0xBB && static_cast<unsigned char>(bom[2]) == 0xBF)) {
            in.seekg(0);
        }
    }
    const auto records = parse_csv_records(in);
    if (records.empty()) throw std::runtime_error("csv " + path.string() + ": empty file");
    const std::size_t tcol = column_index(records[0], time_col, path);
    const std::size_t vcol = column_index(records[0], value_col, path);

    struct Row {
        double t;
        double v;
        std::size_t line;
    };
    std::vector<Row> rows;
    std::vector<std::size_t> bad;
    for (std::size_t r = 1; r < records.size(); ++r) {
        const auto& rec = records[r];
        Row row{0.0, 0.0, r + 1};
        if (rec.size() <= std::max(tcol, vcol) || !parse_timestamp(rec[tcol], row.t) ||
            !parse_number(rec[vcol], row.v)) {
            bad.push_back(r + 1);
            continue;
        }
        rows.push_back(row);
    }
    if (!bad.empty()) {
        std::ostringstream msg;
        msg << "csv " << path.string() << ": unparseable rows";
        for (auto b : bad) msg << ' ' << b;
        throw std::runtime_error(msg.str());
    }
    std::stable_sort(rows.begin(), rows.end(), [](const Row& a, const Row& b) { return a.t < b.t; });
    std::ostringstream dup;
    for (std::size_t i = 1; i < rows.size(); ++i) {
        if (rows[i].t == rows[i - 1].t) {
            dup << " timestamp " << std::setprecision(17) << rows[i].t << " (rows " << rows[i - 1].line
                << ", " << rows[i].line << ")";
        }
    }
    if (!dup.str().empty()) throw std::runtime_error("csv " + path.string() + ": duplicate" + dup.str());

    TimeSeries series;
    series.timestamps.reserve(rows.size());
    series.values.reserve(rows.size());
    for (const auto& r : rows) {
        series.timestamps.push_back(r.t);
        series.values.push_back(r.v);
    }
    return series;
}

void write_csv(const TimeSeries& series, const std::filesystem::path& path, const std::string& time_col,
               const std::string& value_col) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("csv: cannot write " + path.string());
    out << time_col << ',' << value_col << '\n';
    out << std::setprecision(17);
    for (std::size_t i = 0; i < series.size(); ++i) {
        out << series.timestamps[i] << ',' << series.values[i] << '\n';
    }
}

std::vector<SampleWindow> make_windows(const TimeSeries& series, std::size_t lags, std::size_t horizon) {
    if (lags == 0 || horizon == 0) throw std::invalid_argument("make_windows: lags and horizon must be >= 1");
    if (series.timestamps.size() != series.values.size())
        throw std::invalid_argument("make_windows: timestamps/values length mismatch");
    if (series.size() < lags + horizon) {
        throw std::invalid_argument("make_windows: series of length " + std::to_string(series.size()) +
                                    " too short for lags=" + std::to_string(lags) +
                                    " horizon=" + std::to_string(horizon));
    }
    const std::size_t count = series.size() - lags - horizon + 1;
    std::vector<SampleWindow> windows(count);
    for (std::size_t k = 0; k < count; ++k) {
        auto& w = windows[k];
        w.target_index = k + lags + horizon - 1;
        w.features.assign(series.values.begin() + static_cast<std::ptrdiff_t>(k),
                          series.values.begin() + static_cast<std::ptrdiff_t>(k + lags));
        w.timestamp = series.timestamps[w.target_index];
        w.features.push_back(time_of_day(w.timestamp));
        w.target = series.values[w.target_index];
    }
    return windows;
}

namespace {

Split build_split(std::vector<SampleWindow> windows, const FeatureScaling& norm) {
    Split split;
    split.input_dim = norm.offset.size();
    split.features.reserve(windows.size() * split.input_dim);
    split.targets.reserve(windows.size());
    for (const auto& w : windows) {
        const auto scaled = norm.apply(w.features);
        split.features.insert(split.features.end(), scaled.begin(), scaled.end());
        split.targets.push_back(w.target);
    }
    const std::size_t n = windows.size();
    split.columns.resize(split.features.size());
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t k = 0; k < split.input_dim; ++k) split.columns[k * n + i] = split.features[i * split.input_dim + k];
    }
    split.windows = std::move(windows);
    return split;
}

}  // namespace

Dataset split_chronological(const std::vector<SampleWindow>& windows, std::array<double, 3> fractions) {
    const double total = fractions[0] + fractions[1] + fractions[2];
    if (std::abs(total - 1.0) > 1e-9) throw std::invalid_argument("split_chronological: fractions must sum to 1");
    for (double f : fractions) {
        if (!(f >= 0.0)) throw std::invalid_argument("split_chronological: negative fraction");
    }
    const std::size_t n = windows.size();
    const auto n_train = static_cast<std::size_t>(std::llround(fractions[0] * static_cast<double>(n)));
    const auto n_val = static_cast<std::size_t>(std::llround(fractions[1] * static_cast<double>(n)));
    if (n_train == 0 || n_val == 0 || n_train + n_val >= n)
        throw std::invalid_argument("split_chronological: empty split for " + std::to_string(n) + " windows");

    const std::size_t dim = windows.front().features.size();
    FeatureScaling norm;
    norm.offset.assign(dim, 0.0);
    norm.span.assign(dim, 1.0);
    // lag columns: min-max over the training split; last column: time of day / 24
    for (std::size_t f = 0; f + 1 < dim; ++f) {
        double lo = windows[0].features[f], hi = lo;
        for (std::size_t i = 0; i < n_train; ++i) {
            lo = std::min(lo, windows[i].features[f]);
            hi = std::max(hi, windows[i].features[f]);
        }
        norm.offset[f] = lo;
        norm.span[f] = hi > lo ? hi - lo : 1.0;
    }
    norm.span[dim - 1] = 24.0;

    double tmin = windows[0].target, tmax = tmin;
    for (std::size_t i = 0; i < n_train; ++i) {
        tmin = std::min(tmin, windows[i].target);
        tmax = std::max(tmax, windows[i].target);
    }
    if (!(tmax > tmin)) throw std::invalid_argument("split_chronological: training targets have zero range");

    auto slice = [&](std::size_t from, std::size_t to) {
        return std::vector<SampleWindow>(windows.begin() + static_cast<std::ptrdiff_t>(from),
                                         windows.begin() + static_cast<std::ptrdiff_t>(to));
    };
    Dataset ds;
    ds.norm = norm;
    ds.range_R = tmax - tmin;
    ds.train = build_split(slice(0, n_train), norm);
    ds.validation = build_split(slice(n_train, n_train + n_val), norm);
    ds.test = build_split(slice(n_train + n_val, n), norm);
    return ds;
}

void SynthSpec::validate() const {
    if (period < 8) throw std::invalid_argument("SynthSpec: period must be >= 8");
    if (length <= period) throw std::invalid_argument("SynthSpec: length must exceed period");
    if (!(sample_interval_s > 0)) throw std::invalid_argument("SynthSpec: sample interval must be positive");
}

QuantileOracle::QuantileOracle(NoiseKind kind, std::vector<double> signal, std::vector<double> scale)
    : kind_(kind), signal_(std::move(signal)), scale_(std::move(scale)) {
    if (signal_.size() != scale_.size()) throw std::invalid_argument("QuantileOracle: size mismatch");
}

double QuantileOracle::noise_scale(double s) { return 0.05 + 0.15 * std::abs(s); }

double QuantileOracle::quantile(std::size_t i, double p) const {
    if (!(p > 0.0 && p < 1.0)) throw std::invalid_argument("QuantileOracle: p must be in (0,1)");
    const double z = boost::math::quantile(boost::math::normal_distribution<double>(), p);
    const double s = signal_.at(i);
    const double sigma = scale_.at(i);
    if (kind_ == NoiseKind::GaussianHeteroscedastic) return s + sigma * z;
    // exp(0.5 z) is lognormal(0, 0.5^2) with mean e^{0.125}
    return s + sigma * (std::exp(0.5 * z) - std::exp(0.125));
}

double QuantileOracle::central_width(std::size_t i, double alpha) const {
    return quantile(i, 1.0 - alpha / 2.0) - quantile(i, alpha / 2.0);
}

SyntheticSeries generate_synthetic(const SynthSpec& spec) {
    spec.validate();
    std::mt19937_64 rng(spec.seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    TimeSeries series;
    std::vector<double> signal(spec.length), scale(spec.length);
    series.timestamps.resize(spec.length);
    series.values.resize(spec.length);
    const double shift = std::exp(0.125);
    for (std::size_t t = 0; t < spec.length; ++t) {
        const double s = std::sin(2.0 * std::numbers::pi * static_cast<double>(t) / static_cast<double>(spec.period));
        const double sigma = QuantileOracle::noise_scale(s);
        const double z = normal(rng);
        signal[t] = s;
        scale[t] = sigma;
        series.timestamps[t] = static_cast<double>(t) * spec.sample_interval_s;
        series.values[t] = spec.noise_kind == NoiseKind::GaussianHeteroscedastic
                               ? s + sigma * z
                               : s + sigma * (std::exp(0.5 * z) - shift);
    }
    return {std::move(series), QuantileOracle(spec.noise_kind, std::move(signal), std::move(scale))};
}

NoiseKind parse_noise_kind(const std::string& name) {
    if (name == "gaussian-heteroscedastic" || name == "gaussian") return NoiseKind::GaussianHeteroscedastic;
    if (name == "lognormal-skewed" || name == "lognormal") return NoiseKind::LognormalSkewed;
    throw std::invalid_argument("unknown noise kind '" + name + "'");
}

std::string to_string(NoiseKind kind) {
    return kind == NoiseKind::GaussianHeteroscedastic ? "gaussian-heteroscedastic" : "lognormal-skewed";
}

}  // namespace pilube
