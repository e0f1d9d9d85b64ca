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

#include "mess/metrics.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <limits>

namespace mess {

double unloaded_latency(const CurveFamily& family) {
    assert(!family.empty());
    return family.min_raw_latency();
}

std::pair<double, double> max_latency_range(const CurveFamily& family) {
    assert(!family.empty());
    double lo = std::numeric_limits<double>::infinity();
    double hi = 0.0;
    for (const auto& [ratio, curve] : family.curves) {
        double m = curve.max_raw_latency();
        lo = std::min(lo, m);
        hi = std::max(hi, m);
    }
    return {lo, hi};
}

SaturationOnset saturation_onset(const Curve& curve, double unloaded_ns) {
    assert(!curve.envelope.empty());
    assert(unloaded_ns > 0.0);
    double threshold = 2.0 * unloaded_ns;

    const auto& env = curve.envelope;
    if (env.front().latency_ns >= threshold) return {env.front().bandwidth_gbps, true};
    for (size_t i = 1; i < env.size(); ++i) {
        if (env[i].latency_ns < threshold) continue;
        if (env[i].latency_ns == threshold) return {env[i].bandwidth_gbps, true};
        // Crossing inside the segment (i-1, i).
        const CurvePoint& a = env[i - 1];
        const CurvePoint& b = env[i];
        double t = (threshold - a.latency_ns) / (b.latency_ns - a.latency_ns);
        return {a.bandwidth_gbps + t * (b.bandwidth_gbps - a.bandwidth_gbps), true};
    }
    return {env.back().bandwidth_gbps, false};
}

std::pair<double, double> saturated_bandwidth_range(const CurveFamily& family) {
    assert(!family.empty());
    double unloaded = unloaded_latency(family);
    double lo = std::numeric_limits<double>::infinity();
    double hi = 0.0;
    for (const auto& [ratio, curve] : family.curves) {
        lo = std::min(lo, saturation_onset(curve, unloaded).bandwidth_gbps);
        hi = std::max(hi, curve.max_bandwidth());
    }
    return {lo, hi};
}

std::vector<WaveSegment> wave_segments(const Curve& curve, double noise_epsilon) {
    std::vector<WaveSegment> segments;
    const auto& pts = curve.points;
    size_t start = 0;
    bool in_run = false;
    for (size_t i = 1; i < pts.size(); ++i) {
        bool declining = pts[i].bandwidth_gbps < pts[i - 1].bandwidth_gbps * (1.0 - noise_epsilon) &&
                         pts[i].latency_ns > pts[i - 1].latency_ns * (1.0 + noise_epsilon);
        if (declining && !in_run) {
            start = i - 1;
            in_run = true;
        } else if (!declining && in_run) {
            segments.push_back({start, i - 1});
            in_run = false;
        }
    }
    if (in_run) segments.push_back({start, pts.size() - 1});
    return segments;
}

FamilyMetrics compute_metrics(const CurveFamily& family, double noise_epsilon) {
    FamilyMetrics m;
    m.unloaded_latency_ns = unloaded_latency(family);
    m.max_latency_range_ns = max_latency_range(family);
    m.saturated_bandwidth_range_gbps = saturated_bandwidth_range(family);
    for (const auto& [ratio, curve] : family.curves) {
        SaturationOnset onset = saturation_onset(curve, m.unloaded_latency_ns);
        m.any_curve_saturates = m.any_curve_saturates || onset.saturates;
        m.saturation_onset_per_ratio[ratio] = onset;
        m.wave_segments_per_ratio[ratio] = wave_segments(curve, noise_epsilon);
    }
    return m;
}

} // namespace mess
