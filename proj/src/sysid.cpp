#include "pendkit/sysid.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "pendkit/trajectory.hpp"

namespace pendkit {

std::optional<double> RegressionResult::coefficient(const std::string& term) const {
    for (const auto& [name, value] : coefficients)
        if (name == term) return value;
    return std::nullopt;
}

namespace {

const std::array<std::string, 10> kLogColumns = {
    "t",            "position_fbk", "velocity_fbk",  "effort_fbk",
    "position_cmd", "velocity_cmd", "effort_cmd",    "pwm_cmd",
    "motor_current", "winding_current"};

constexpr int kMandatoryColumns = 4; // t .. effort_fbk

std::vector<std::string> split_row(const std::string& line) {
    std::vector<std::string> fields;
    std::string cur;
    for (char c : line) {
        if (c == ',') {
            fields.push_back(cur);
            cur.clear();
        } else if (c != '\r') {
            cur.push_back(c);
        }
    }
    fields.push_back(cur);
    return fields;
}

std::string trim(const std::string& s) {
    std::size_t b = s.find_first_not_of(" \t");
    if (b == std::string::npos) return "";
    std::size_t e = s.find_last_not_of(" \t");
    return s.substr(b, e - b + 1);
}

void assign_field(LogRecord& rec, int column_id, double value) {
    switch (column_id) {
        case 0: rec.t = value; break;
        case 1: rec.position_fbk = value; break;
        case 2: rec.velocity_fbk = value; break;
        case 3: rec.effort_fbk = value; break;
        case 4: rec.position_cmd = value; break;
        case 5: rec.velocity_cmd = value; break;
        case 6: rec.effort_cmd = value; break;
        case 7: rec.pwm_cmd = value; break;
        case 8: rec.motor_current = value; break;
        case 9: rec.winding_current = value; break;
    }
}

} // namespace

std::vector<LogRecord> parse_log(const std::string& csv_text) {
    std::istringstream in(csv_text);
    std::string line;
    if (!std::getline(in, line))
        throw Error(ErrorCode::parse, "log: missing header row");

    // Map header fields onto the known schema.
    std::vector<int> column_ids;
    bool have[10] = {};
    for (const std::string& raw : split_row(line)) {
        const std::string name = trim(raw);
        auto it = std::find(kLogColumns.begin(), kLogColumns.end(), name);
        if (it == kLogColumns.end())
            throw Error(ErrorCode::parse, "log: unknown column '" + name + "'");
        const int id = static_cast<int>(it - kLogColumns.begin());
        if (have[id])
            throw Error(ErrorCode::parse, "log: duplicate column '" + name + "'");
        have[id] = true;
        column_ids.push_back(id);
    }
    for (int id = 0; id < kMandatoryColumns; ++id)
        if (!have[id])
            throw Error(ErrorCode::parse,
                        "log: missing mandatory column '" + kLogColumns[id] + "'");

    std::vector<LogRecord> records;
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty() || line == "\r") continue;
        auto fields = split_row(line);
        if (fields.size() != column_ids.size())
            throw Error(ErrorCode::parse,
                        "log: line " + std::to_string(lineno) + ": expected " +
                            std::to_string(column_ids.size()) + " fields, got " +
                            std::to_string(fields.size()));
        LogRecord rec;
        for (std::size_t i = 0; i < fields.size(); ++i) {
            const int id = column_ids[i];
            const std::string cell = trim(fields[i]);
            if (cell.empty() && id >= kMandatoryColumns)
                continue; // optional channel gap
            double value;
            if (!parse_double(cell, value) ||
                (id < kMandatoryColumns && !std::isfinite(value)))
                throw Error(ErrorCode::parse,
                            "log: line " + std::to_string(lineno) + ": column '" +
                                kLogColumns[id] + "': bad value '" + cell + "'");
            assign_field(rec, id, value);
        }
        if (!records.empty() && rec.t < records.back().t)
            throw Error(ErrorCode::parse,
                        "log: line " + std::to_string(lineno) +
                            ": time decreases (" + format_double(rec.t) + " after " +
                            format_double(records.back().t) + ")");
        records.push_back(std::move(rec));
    }
    return records;
}

std::vector<LogRecord> parse_log_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw Error(ErrorCode::io, "cannot open: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    try {
        return parse_log(buf.str());
    } catch (const Error& e) {
        throw Error(e.code(), path + ": " + e.what());
    }
}

std::vector<std::pair<double, double>>
finite_difference_acceleration(const std::vector<LogRecord>& records) {
    if (records.size() < 2)
        throw Error(ErrorCode::invalid_argument,
                    "finite_difference_acceleration: need at least 2 records");
    std::vector<std::pair<double, double>> accel;
    accel.reserve(records.size() - 1);
    for (std::size_t k = 0; k + 1 < records.size(); ++k) {
        const double dt = records[k + 1].t - records[k].t;
        if (!(dt > 0.0))
            throw Error(ErrorCode::invalid_argument,
                        "finite_difference_acceleration: repeated timestamp at "
                        "record " +
                            std::to_string(k + 1));
        accel.emplace_back(records[k].t,
                           (records[k + 1].velocity_fbk - records[k].velocity_fbk) / dt);
    }
    return accel;
}

OlsResult ols(const std::vector<double>& design, std::size_t n, std::size_t p,
              const std::vector<double>& y) {
    if (p == 0 || n <= p)
        throw Error(ErrorCode::invalid_argument,
                    "ols: need n > p >= 1, got n = " + std::to_string(n) +
                        ", p = " + std::to_string(p));
    if (design.size() != n * p || y.size() != n)
        throw Error(ErrorCode::invalid_argument, "ols: shape mismatch");

    // Column-major working copy for Householder QR with column pivoting.
    std::vector<std::vector<double>> col(p, std::vector<double>(n));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < p; ++j) col[j][i] = design[i * p + j];
    std::vector<double> qty(y);
    std::vector<std::size_t> perm(p);
    for (std::size_t j = 0; j < p; ++j) perm[j] = j;

    std::vector<double> rdiag(p);
    for (std::size_t k = 0; k < p; ++k) {
        // Pivot: remaining column with the largest trailing norm.
        std::size_t best = k;
        double best_norm = -1.0;
        for (std::size_t j = k; j < p; ++j) {
            double norm = 0.0;
            for (std::size_t i = k; i < n; ++i) norm += col[j][i] * col[j][i];
            if (norm > best_norm) {
                best_norm = norm;
                best = j;
            }
        }
        std::swap(col[k], col[best]);
        std::swap(perm[k], perm[best]);

        double alpha = std::sqrt(best_norm);
        if (col[k][k] > 0.0) alpha = -alpha;
        rdiag[k] = alpha;
        if (alpha == 0.0) continue; // zero column; caught by the rank check
        // Householder vector v = x - alpha*e_k, applied as I - 2vv'/v'v.
        col[k][k] -= alpha;
        double vv = 0.0;
        for (std::size_t i = k; i < n; ++i) vv += col[k][i] * col[k][i];
        for (std::size_t j = k + 1; j < p; ++j) {
            double s = 0.0;
            for (std::size_t i = k; i < n; ++i) s += col[k][i] * col[j][i];
            const double f = 2.0 * s / vv;
            for (std::size_t i = k; i < n; ++i) col[j][i] -= f * col[k][i];
        }
        double s = 0.0;
        for (std::size_t i = k; i < n; ++i) s += col[k][i] * qty[i];
        const double f = 2.0 * s / vv;
        for (std::size_t i = k; i < n; ++i) qty[i] -= f * col[k][i];
    }

    const double pivot_max = std::abs(rdiag[0]);
    for (std::size_t k = 0; k < p; ++k) {
        if (std::abs(rdiag[k]) < 1e-12 * pivot_max || pivot_max == 0.0)
            throw Error(ErrorCode::singular,
                        "ols: rank-deficient design matrix (pivot " +
                            std::to_string(k) + ")");
    }

    // Back-substitution on R (upper triangle lives in col[j][i], i < k after
    // the reflections; reconstruct R entries from the transformed columns).
    std::vector<double> beta_perm(p);
    for (std::size_t k = p; k-- > 0;) {
        double acc = qty[k];
        for (std::size_t j = k + 1; j < p; ++j) acc -= col[j][k] * beta_perm[j];
        beta_perm[k] = acc / rdiag[k];
    }
    OlsResult out;
    out.beta.assign(p, 0.0);
    for (std::size_t k = 0; k < p; ++k) out.beta[perm[k]] = beta_perm[k];
    out.n_samples = n;

    double ss_res = 0.0;
    double y_mean = 0.0;
    for (double v : y) y_mean += v;
    y_mean /= static_cast<double>(n);
    double ss_tot = 0.0;
    double y_absmax = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double fit = 0.0;
        for (std::size_t j = 0; j < p; ++j) fit += design[i * p + j] * out.beta[j];
        const double r = y[i] - fit;
        ss_res += r * r;
        ss_tot += (y[i] - y_mean) * (y[i] - y_mean);
        y_absmax = std::max(y_absmax, std::abs(y[i]));
    }
    const double zero_res = n * 1e-24 * (1.0 + y_absmax) * (1.0 + y_absmax);
    const bool y_constant =
        *std::max_element(y.begin(), y.end()) == *std::min_element(y.begin(), y.end());
    if (y_constant) {
        out.r_squared = ss_res <= zero_res ? 1.0 : 0.0;
    } else {
        out.r_squared = std::clamp(1.0 - ss_res / ss_tot, 0.0, 1.0);
    }
    out.residual_std = std::sqrt(ss_res / static_cast<double>(n - p));
    return out;
}

namespace {

RegressionResult to_regression(const OlsResult& fit,
                               const std::vector<std::string>& terms) {
    RegressionResult out;
    for (std::size_t j = 0; j < terms.size(); ++j)
        out.coefficients.emplace_back(terms[j], fit.beta[j]);
    out.r_squared = fit.r_squared;
    out.n_samples = fit.n_samples;
    out.residual_std = fit.residual_std;
    return out;
}

} // namespace

RegressionResult regress_inertia_damping(const std::vector<LogRecord>& records,
                                         bool with_intercept) {
    if (records.size() < 10)
        throw Error(ErrorCode::invalid_argument,
                    "regress_inertia_damping: need at least 10 samples, got " +
                        std::to_string(records.size()));
    const auto accel = finite_difference_acceleration(records);
    const std::size_t n = accel.size();
    const std::size_t p = with_intercept ? 3 : 2;

    std::vector<double> design;
    design.reserve(n * p);
    std::vector<double> y;
    y.reserve(n);
    for (std::size_t k = 0; k < n; ++k) {
        design.push_back(records[k].velocity_fbk);
        design.push_back(accel[k].second);
        if (with_intercept) design.push_back(1.0);
        y.push_back(records[k].effort_fbk);
    }
    std::vector<std::string> terms = {"velocity", "acceleration"};
    if (with_intercept) terms.push_back("intercept");
    return to_regression(ols(design, n, p, y), terms);
}

std::vector<StaticSegment>
extract_static_segments(const std::vector<LogRecord>& records,
                        double velocity_threshold, double min_duration) {
    if (!(velocity_threshold > 0.0))
        throw Error(ErrorCode::invalid_argument,
                    "extract_static_segments: velocity threshold must be > 0");

    // A run also breaks across a sampling gap (over five nominal periods):
    // a concatenation of previously extracted holds then re-segments into the
    // same holds instead of merging into one.
    double gap_limit = std::numeric_limits<double>::infinity();
    if (records.size() >= 2) {
        std::vector<double> dts;
        dts.reserve(records.size() - 1);
        for (std::size_t k = 0; k + 1 < records.size(); ++k)
            dts.push_back(records[k + 1].t - records[k].t);
        std::nth_element(dts.begin(), dts.begin() + dts.size() / 2, dts.end());
        const double median_dt = dts[dts.size() / 2];
        if (median_dt > 0.0) gap_limit = 5.0 * median_dt;
    }

    std::vector<StaticSegment> segments;
    double previous_hold_end_pos = records.empty() ? 0.0 : records.front().position_fbk;

    std::size_t i = 0;
    while (i < records.size()) {
        if (std::abs(records[i].velocity_fbk) > velocity_threshold) {
            ++i;
            continue;
        }
        std::size_t j = i;
        while (j < records.size() &&
               std::abs(records[j].velocity_fbk) <= velocity_threshold) {
            if (j > i && records[j].t - records[j - 1].t > gap_limit) break;
            ++j;
        }
        const double span = records[j - 1].t - records[i].t;
        if (span >= min_duration) {
            StaticSegment seg;
            seg.records.assign(records.begin() + i, records.begin() + j);
            std::vector<double> pos;
            pos.reserve(seg.records.size());
            for (const auto& r : seg.records) pos.push_back(r.position_fbk);
            std::sort(pos.begin(), pos.end());
            const std::size_t m = pos.size();
            seg.commanded_angle = (m % 2 == 1)
                                      ? pos[m / 2]
                                      : 0.5 * (pos[m / 2 - 1] + pos[m / 2]);
            const double displacement = records[i].position_fbk - previous_hold_end_pos;
            seg.cycle = displacement >= 0.0 ? StaticSegment::Cycle::positive
                                            : StaticSegment::Cycle::negative;
            previous_hold_end_pos = records[j - 1].position_fbk;
            segments.push_back(std::move(seg));
        }
        i = j;
    }
    return segments;
}

RegressionResult regress_gravity(const std::vector<StaticSegment>& segments,
                                 bool with_intercept) {
    if (segments.size() < 3)
        throw Error(ErrorCode::invalid_argument,
                    "regress_gravity: need at least 3 static segments, got " +
                        std::to_string(segments.size()));
    double lo = segments.front().commanded_angle;
    double hi = lo;
    for (const auto& seg : segments) {
        lo = std::min(lo, seg.commanded_angle);
        hi = std::max(hi, seg.commanded_angle);
    }
    if (hi - lo <= 1e-9)
        throw Error(ErrorCode::singular,
                    "regress_gravity: all hold angles equal; sin(angle) carries no "
                    "information");

    const std::size_t n = segments.size();
    const std::size_t p = with_intercept ? 2 : 1;
    std::vector<double> design;
    design.reserve(n * p);
    std::vector<double> y;
    y.reserve(n);
    for (const auto& seg : segments) {
        double mean_effort = 0.0;
        for (const auto& r : seg.records) mean_effort += r.effort_fbk;
        mean_effort /= static_cast<double>(seg.records.size());
        design.push_back(std::sin(seg.commanded_angle));
        if (with_intercept) design.push_back(1.0);
        y.push_back(mean_effort);
    }
    std::vector<std::string> terms = {"sine_pos"};
    if (with_intercept) terms.push_back("intercept");
    return to_regression(ols(design, n, p, y), terms);
}

namespace {

/// Mean of |values| with a guard against trials that disagree in sign.
double normalized_mean(const std::vector<RegressionResult>& results,
                       const std::string& term, TrialKind kind) {
    const char* kind_name =
        kind == TrialKind::inertia_damping ? "inertia-damping" : "gravity";
    bool any_pos = false, any_neg = false;
    double sum = 0.0;
    for (const auto& r : results) {
        const auto value = r.coefficient(term);
        if (!value)
            throw Error(ErrorCode::invalid_argument,
                        std::string("average_trials: result lacks the '") + term +
                            "' coefficient; mixed trial kinds for " + kind_name + "?");
        if (*value > 0.0) any_pos = true;
        if (*value < 0.0) any_neg = true;
        sum += std::abs(*value);
    }
    if (any_pos && any_neg)
        throw Error(ErrorCode::invalid_argument,
                    std::string("average_trials: '") + term +
                        "' changes sign across trials; inconsistent sensor "
                        "convention");
    return sum / static_cast<double>(results.size());
}

} // namespace

ParamEstimate average_trials(const std::vector<RegressionResult>& results,
                             TrialKind kind) {
    if (results.empty())
        throw Error(ErrorCode::invalid_argument, "average_trials: no results");
    ParamEstimate est;
    if (kind == TrialKind::inertia_damping) {
        est.b_c = normalized_mean(results, "velocity", kind);
        est.m_c = normalized_mean(results, "acceleration", kind);
    } else {
        est.g_c = normalized_mean(results, "sine_pos", kind);
    }
    return est;
}

std::string regression_report_json(const RegressionResult& result) {
    std::string out = "{\"coefficients\": {";
    for (std::size_t i = 0; i < result.coefficients.size(); ++i) {
        if (i) out += ", ";
        out += "\"" + result.coefficients[i].first +
               "\": " + format_double(result.coefficients[i].second);
    }
    out += "}, \"r_squared\": " + format_double(result.r_squared);
    out += ", \"n_samples\": " + std::to_string(result.n_samples);
    out += ", \"residual_std\": " + format_double(result.residual_std);
    out += "}";
    return out;
}

} // namespace pendkit
