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

#include "mess/curves.hpp"

#include <algorithm>
#include <cassert>
#include <charconv>
#include <cmath>
#include <fstream>
#include <set>

#include <nlohmann/json.hpp>

#include "csv_util.hpp"

namespace mess {

std::string format_double(double value) {
    char buf[64];
    auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), value);
    assert(ec == std::errc());
    return std::string(buf, end);
}

std::vector<CurvePoint> build_envelope(const std::vector<CurvePoint>& points) {
    assert(!points.empty());
    std::vector<CurvePoint> sorted = points;
    std::stable_sort(sorted.begin(), sorted.end(), [](const CurvePoint& a, const CurvePoint& b) {
        if (a.bandwidth_gbps != b.bandwidth_gbps) return a.bandwidth_gbps < b.bandwidth_gbps;
        return a.latency_ns < b.latency_ns;
    });

    // Equal bandwidths: only the minimum-latency point can survive.
    std::vector<CurvePoint> unique;
    unique.reserve(sorted.size());
    for (const CurvePoint& p : sorted) {
        if (!unique.empty() && unique.back().bandwidth_gbps == p.bandwidth_gbps) continue;
        unique.push_back(p);
    }

    // Right-to-left sweep: a point survives iff its latency is strictly below
    // that of every higher-bandwidth point.
    std::vector<CurvePoint> envelope;
    envelope.reserve(unique.size());
    double best_latency = std::numeric_limits<double>::infinity();
    for (auto it = unique.rbegin(); it != unique.rend(); ++it) {
        if (it->latency_ns < best_latency) {
            envelope.push_back(*it);
            best_latency = it->latency_ns;
        }
    }
    std::reverse(envelope.begin(), envelope.end());
#ifndef NDEBUG
    for (size_t i = 1; i < envelope.size(); ++i) {
        assert(envelope[i].bandwidth_gbps > envelope[i - 1].bandwidth_gbps);
        assert(envelope[i].latency_ns >= envelope[i - 1].latency_ns);
    }
#endif
    return envelope;
}

LatencyLookup Curve::envelope_latency(double bandwidth_gbps) const {
    assert(!envelope.empty());
    if (bandwidth_gbps <= envelope.front().bandwidth_gbps)
        return {envelope.front().latency_ns, false};
    if (bandwidth_gbps > envelope.back().bandwidth_gbps)
        return {envelope.back().latency_ns, true};

    auto it = std::lower_bound(envelope.begin(), envelope.end(), bandwidth_gbps,
                               [](const CurvePoint& p, double b) { return p.bandwidth_gbps < b; });
    if (it->bandwidth_gbps == bandwidth_gbps) return {it->latency_ns, false};
    const CurvePoint& hi = *it;
    const CurvePoint& lo = *(it - 1);
    double t = (bandwidth_gbps - lo.bandwidth_gbps) / (hi.bandwidth_gbps - lo.bandwidth_gbps);
    return {lo.latency_ns + t * (hi.latency_ns - lo.latency_ns), false};
}

double Curve::max_raw_latency() const {
    double m = points.front().latency_ns;
    for (const CurvePoint& p : points) m = std::max(m, p.latency_ns);
    return m;
}

CurveFamily::Bracket CurveFamily::bracket(double read_ratio_pct) const {
    assert(!curves.empty());
    double lo_key = curves.begin()->first;
    double hi_key = curves.rbegin()->first;
    double r = std::clamp(read_ratio_pct, lo_key, hi_key);

    auto hi = curves.lower_bound(static_cast<int>(std::ceil(r)));
    if (hi == curves.end()) hi = std::prev(curves.end());
    auto lo = hi;
    while (lo != curves.begin() && lo->first > r) --lo;
    if (lo->first > r) lo = hi; // single-curve family

    if (lo == hi) return {&lo->second, &hi->second, 0.0};
    double t = (r - lo->first) / static_cast<double>(hi->first - lo->first);
    return {&lo->second, &hi->second, t};
}

LatencyLookup CurveFamily::lookup_latency(double read_ratio_pct, double bandwidth_gbps) const {
    Bracket b = bracket(read_ratio_pct);
    LatencyLookup lo = b.lo->envelope_latency(bandwidth_gbps);
    if (b.lo == b.hi) return lo;
    LatencyLookup hi = b.hi->envelope_latency(bandwidth_gbps);
    return {lo.latency_ns + b.t * (hi.latency_ns - lo.latency_ns), lo.saturated || hi.saturated};
}

double CurveFamily::max_bandwidth(double read_ratio_pct) const {
    Bracket b = bracket(read_ratio_pct);
    double lo = b.lo->max_bandwidth();
    if (b.lo == b.hi) return lo;
    return lo + b.t * (b.hi->max_bandwidth() - lo);
}

double CurveFamily::min_raw_latency() const {
    assert(!curves.empty());
    double m = std::numeric_limits<double>::infinity();
    for (const auto& [ratio, curve] : curves)
        for (const CurvePoint& p : curve.points) m = std::min(m, p.latency_ns);
    return m;
}

double CurveFamily::max_raw_latency() const {
    assert(!curves.empty());
    double m = 0.0;
    for (const auto& [ratio, curve] : curves) m = std::max(m, curve.max_raw_latency());
    return m;
}

double CurveFamily::max_envelope_latency() const {
    assert(!curves.empty());
    double m = 0.0;
    for (const auto& [ratio, curve] : curves) m = std::max(m, curve.envelope.back().latency_ns);
    return m;
}

namespace {

constexpr const char* kCurveHeader = "read_ratio_pct,bandwidth_gbps,latency_ns";

} // namespace

std::filesystem::path manifest_path_for(const std::filesystem::path& csv_path) {
    std::filesystem::path p = csv_path;
    p.replace_extension(".json");
    return p;
}

CurveFamily load_family(std::istream& csv, std::istream* manifest) {
    CurveFamily family;

    if (manifest) {
        nlohmann::json j = nlohmann::json::parse(*manifest, nullptr, true, true);
        if (j.contains("platform_name")) family.platform_name = j["platform_name"].get<std::string>();
        if (j.contains("theoretical_max_bandwidth_gbps") && !j["theoretical_max_bandwidth_gbps"].is_null()) {
            double t = j["theoretical_max_bandwidth_gbps"].get<double>();
            if (!(t > 0.0) || !std::isfinite(t))
                throw FormatError("manifest theoretical_max_bandwidth_gbps must be positive");
            family.theoretical_max_bandwidth_gbps = t;
        }
        if (j.contains("line_size_bytes")) {
            family.line_size_bytes = j["line_size_bytes"].get<int>();
            if (family.line_size_bytes <= 0) throw FormatError("manifest line_size_bytes must be positive");
        }
    }

    std::string line;
    if (!std::getline(csv, line)) throw EmptyInputError("curve file is empty");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    {
        std::vector<std::string> cols = csv::split(line);
        if (cols.size() != 3 || cols[0] != "read_ratio_pct" || cols[1] != "bandwidth_gbps" ||
            cols[2] != "latency_ns")
            throw FormatError(std::string("expected header '") + kCurveHeader + "', got '" + line + "'");
    }

    uint64_t row = 0;
    std::set<std::pair<int, double>> seen;
    bool duplicate_warned = false;
    while (std::getline(csv, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (csv::trim(line).empty()) continue;
        ++row;
        std::vector<std::string> cols = csv::split(line);
        if (cols.size() != 3) throw FormatError("row " + std::to_string(row) + ": expected 3 columns");

        double ratio_raw = csv::parse_number(cols[0], row, "read_ratio_pct");
        double bw = csv::parse_number(cols[1], row, "bandwidth_gbps");
        double lat = csv::parse_number(cols[2], row, "latency_ns");

        if (ratio_raw != std::floor(ratio_raw) || ratio_raw < 0.0 || ratio_raw > 100.0)
            throw ValueError(row, "read_ratio_pct must be an integer in [0, 100]");
        if (bw < 0.0) throw ValueError(row, "bandwidth_gbps must be non-negative");
        if (lat <= 0.0) throw ValueError(row, "latency_ns must be positive");

        int ratio = static_cast<int>(ratio_raw);
        Curve& curve = family.curves.try_emplace(ratio, Curve{ratio, {}, {}}).first->second;
        if (!seen.insert({ratio, bw}).second && !duplicate_warned) {
            family.warnings.push_back("duplicate (read_ratio, bandwidth) points; envelope keeps the lowest latency");
            duplicate_warned = true;
        }
        curve.points.push_back({bw, lat});
    }
    if (family.curves.empty()) throw EmptyInputError("curve file has no data rows");

    for (auto& [ratio, curve] : family.curves) {
        curve.rebuild_envelope();
        if (family.theoretical_max_bandwidth_gbps &&
            curve.max_bandwidth() > *family.theoretical_max_bandwidth_gbps)
            family.exceeds_theoretical_max = true;
    }
    if (family.exceeds_theoretical_max)
        family.warnings.push_back("measured bandwidth exceeds the declared theoretical maximum");
    return family;
}

CurveFamily load_family(const std::filesystem::path& csv_path) {
    std::ifstream csv(csv_path);
    if (!csv) throw FormatError("cannot open curve file: " + csv_path.string());

    std::filesystem::path mpath = manifest_path_for(csv_path);
    if (std::filesystem::exists(mpath)) {
        std::ifstream manifest(mpath);
        if (!manifest) throw FormatError("cannot open manifest: " + mpath.string());
        return load_family(csv, &manifest);
    }
    return load_family(csv, nullptr);
}

void save_family_csv(const CurveFamily& family, std::ostream& csv) {
    csv << kCurveHeader << "\n";
    for (const auto& [ratio, curve] : family.curves)
        for (const CurvePoint& p : curve.points)
            csv << ratio << ',' << format_double(p.bandwidth_gbps) << ',' << format_double(p.latency_ns)
                << "\n";
}

void save_family_manifest(const CurveFamily& family, std::ostream& manifest) {
    nlohmann::ordered_json j;
    j["platform_name"] = family.platform_name;
    if (family.theoretical_max_bandwidth_gbps)
        j["theoretical_max_bandwidth_gbps"] = *family.theoretical_max_bandwidth_gbps;
    else
        j["theoretical_max_bandwidth_gbps"] = nullptr;
    j["line_size_bytes"] = family.line_size_bytes;
    manifest << j.dump(2) << "\n";
}

void save_family(const CurveFamily& family, const std::filesystem::path& csv_path) {
    std::ofstream csv(csv_path, std::ios::binary);
    if (!csv) throw FormatError("cannot write curve file: " + csv_path.string());
    save_family_csv(family, csv);

    std::ofstream manifest(manifest_path_for(csv_path), std::ios::binary);
    if (!manifest) throw FormatError("cannot write manifest: " + manifest_path_for(csv_path).string());
    save_family_manifest(family, manifest);
}

} // namespace mess
