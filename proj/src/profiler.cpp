/*
 * Copyright 2026 Mess toolkit contributors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 * http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "mess/profiler.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <fstream>
#include <ostream>

#include "csv_util.hpp"
#include "mess/metrics.hpp"

namespace mess {

void StressWeights::validate() const {
    if (w_latency < 0.0 || w_slope < 0.0 || std::abs(w_latency + w_slope - 1.0) > 1e-9)
        throw SimulationError("stress weights must be non-negative and sum to 1");
}

// Latency normalization spans [unloaded, highest envelope latency]: the
// range lookups can actually produce. Raw wave points above the envelope do
// not stretch the scale, so the right-most reachable point scores exactly 1.
bool degenerate_for_scoring(const CurveFamily& family) {
    return family.max_envelope_latency() <= family.min_raw_latency();
}

namespace {

// Normalized curve inclination at a bandwidth: the running maximum of the
// envelope segment slopes up to the segment containing b, divided by the
// curve's steepest segment. The running maximum keeps the term (and with it
// the score) monotone along the curve even where the raw slope dips.
double slope_norm_on_curve(const Curve& curve, double bandwidth_gbps) {
    const auto& env = curve.envelope;
    if (env.size() < 2) return 0.0;

    double max_slope = 0.0;
    double at_b = 0.0;
    double running = 0.0;
    for (size_t i = 1; i < env.size(); ++i) {
        double slope = (env[i].latency_ns - env[i - 1].latency_ns) /
                       (env[i].bandwidth_gbps - env[i - 1].bandwidth_gbps);
        running = std::max(running, slope);
        max_slope = std::max(max_slope, slope);
        if (bandwidth_gbps > env[i - 1].bandwidth_gbps) at_b = running;
    }
    if (max_slope <= 0.0) return 0.0;
    return std::clamp(at_b / max_slope, 0.0, 1.0);
}

} // namespace

double stress_score(const CurveFamily& family, double read_ratio_pct, double bandwidth_gbps,
                    StressWeights weights) {
    weights.validate();
    assert(!family.empty());
    if (degenerate_for_scoring(family)) return 0.0;

    double unloaded = family.min_raw_latency();
    double span = family.max_envelope_latency() - unloaded;
    double lat = family.lookup_latency(read_ratio_pct, bandwidth_gbps).latency_ns;
    double lat_norm = std::clamp((lat - unloaded) / span, 0.0, 1.0);

    // Slope blends between the bracketing curves the same way latency does.
    auto keys_lo = family.curves.begin()->first;
    auto keys_hi = family.curves.rbegin()->first;
    double r = std::clamp(read_ratio_pct, static_cast<double>(keys_lo), static_cast<double>(keys_hi));
    auto hi = family.curves.lower_bound(static_cast<int>(std::ceil(r)));
    if (hi == family.curves.end()) hi = std::prev(family.curves.end());
    auto lo = hi;
    while (lo != family.curves.begin() && lo->first > r) --lo;

    double slope_norm;
    if (lo == hi) {
        slope_norm = slope_norm_on_curve(lo->second, bandwidth_gbps);
    } else {
        double t = (r - lo->first) / static_cast<double>(hi->first - lo->first);
        slope_norm = (1.0 - t) * slope_norm_on_curve(lo->second, bandwidth_gbps) +
                     t * slope_norm_on_curve(hi->second, bandwidth_gbps);
    }

    return std::clamp(weights.w_latency * lat_norm + weights.w_slope * slope_norm, 0.0, 1.0);
}

Bucket bucket_for(double score) {
    if (score < 0.33) return Bucket::green;
    if (score < 0.66) return Bucket::yellow;
    return Bucket::red;
}

std::vector<ProfilePoint> profile(const CurveFamily& family,
                                  const std::vector<ProfileSample>& samples,
                                  StressWeights weights) {
    weights.validate();
    std::vector<ProfilePoint> out;
    out.reserve(samples.size());
    for (const ProfileSample& s : samples) {
        LatencyLookup look = family.lookup_latency(s.read_ratio_pct, s.total_bw_gbps);
        ProfilePoint p;
        p.sample = s;
        p.latency_ns = look.latency_ns;
        p.saturated = look.saturated;
        p.stress_score = stress_score(family, s.read_ratio_pct, s.total_bw_gbps, weights);
        p.bucket = bucket_for(p.stress_score);
        out.push_back(p);
    }
    return out;
}

namespace {

constexpr const char* kCanonicalHeader = "timestamp_us,total_bw_gbps,read_ratio_pct";
constexpr const char* kSplitHeader = "timestamp_us,read_bw_gbps,write_bw_gbps";

} // namespace

std::vector<ProfileSample> load_samples(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) throw EmptyInputError("sample file is empty");
    if (!line.empty() && line.back() == '\r') line.pop_back();

    bool split_form;
    {
        std::string header = csv::trim(line);
        if (header == kCanonicalHeader)
            split_form = false;
        else if (header == kSplitHeader)
            split_form = true;
        else
            throw FormatError("expected sample header '" + std::string(kCanonicalHeader) + "' or '" +
                              kSplitHeader + "', got '" + line + "'");
    }

    std::vector<ProfileSample> samples;
    uint64_t row = 0;
    double prev_ts = -std::numeric_limits<double>::infinity();
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (csv::trim(line).empty()) continue;
        ++row;
        std::vector<std::string> cols = csv::split(line);
        if (cols.size() != 3) throw FormatError("row " + std::to_string(row) + ": expected 3 columns");

        ProfileSample s;
        s.timestamp_us = csv::parse_number(cols[0], row, "timestamp_us");
        if (s.timestamp_us < prev_ts) throw ValueError(row, "timestamps must be non-decreasing");
        prev_ts = s.timestamp_us;

        if (split_form) {
            double rd = csv::parse_number(cols[1], row, "read_bw_gbps");
            double wr = csv::parse_number(cols[2], row, "write_bw_gbps");
            if (rd < 0.0 || wr < 0.0) throw ValueError(row, "bandwidth must be non-negative");
            s.total_bw_gbps = rd + wr;
            s.read_ratio_pct = s.total_bw_gbps > 0.0 ? 100.0 * rd / s.total_bw_gbps : 100.0;
        } else {
            s.total_bw_gbps = csv::parse_number(cols[1], row, "total_bw_gbps");
            s.read_ratio_pct = csv::parse_number(cols[2], row, "read_ratio_pct");
            if (s.total_bw_gbps < 0.0) throw ValueError(row, "bandwidth must be non-negative");
            if (s.read_ratio_pct < 0.0 || s.read_ratio_pct > 100.0)
                throw ValueError(row, "read_ratio_pct must be in [0, 100]");
        }
        samples.push_back(s);
    }
    return samples;
}

std::vector<ProfileSample> load_samples(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw FormatError("cannot open sample file: " + path.string());
    return load_samples(in);
}

void save_profile(const std::vector<ProfilePoint>& points, std::ostream& out) {
    out << kCanonicalHeader << ",latency_ns,stress_score,bucket,saturated\n";
    for (const ProfilePoint& p : points) {
        const char* bucket = p.bucket == Bucket::green    ? "green"
                             : p.bucket == Bucket::yellow ? "yellow"
                                                          : "red";
        out << format_double(p.sample.timestamp_us) << ',' << format_double(p.sample.total_bw_gbps)
            << ',' << format_double(p.sample.read_ratio_pct) << ',' << format_double(p.latency_ns)
            << ',' << format_double(p.stress_score) << ',' << bucket << ',' << (p.saturated ? 1 : 0)
            << '\n';
    }
}

} // namespace mess
