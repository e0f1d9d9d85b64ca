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

#include "mess/fixtures.hpp"

#include <cassert>
#include <cmath>

namespace mess {

CurveFamily make_analytic_family(double l0_ns, double k_ns, double bmax_gbps,
                                 const std::vector<int>& ratios, int points, double penalty) {
    if (!(l0_ns > 0.0) || !(k_ns > 0.0) || !(bmax_gbps > 0.0))
        throw SimulationError("analytic family parameters must be positive");
    if (points < 1) throw SimulationError("need at least one point per curve");
    if (ratios.empty()) throw SimulationError("need at least one read ratio");

    CurveFamily family;
    family.platform_name = "analytic";
    family.theoretical_max_bandwidth_gbps = bmax_gbps;
    for (int ratio : ratios) {
        if (ratio < 0 || ratio > 100) throw SimulationError("read ratio must be in [0, 100]");
        double factor = 1.0 + penalty * (100.0 - ratio) / 50.0;
        Curve curve{ratio, {}, {}};
        for (int i = 0; i < points; ++i) {
            double b = points == 1 ? 0.0 : 0.98 * bmax_gbps * i / (points - 1);
            double lat = (l0_ns + k_ns * b / (bmax_gbps - b)) * factor;
            curve.points.push_back({b, lat});
        }
        curve.rebuild_envelope();
        family.curves.emplace(ratio, std::move(curve));
    }
    return family;
}

const PlatformShape& platform_shape(const std::string& name) {
    static const PlatformShape kShapes[] = {
        // 6-channel DDR4-2666 class parts
        {"skylake", 128.0, 89.0, 242.0, 391.0, 0.72, 0.91, 0.10},
        {"cascadelake", 128.0, 85.0, 182.0, 303.0, 0.68, 0.87, 0.10},
    };
    for (const PlatformShape& s : kShapes)
        if (s.name == name) return s;
    throw FormatError("unknown platform shape: " + name);
}

CurveFamily make_platform_family(const PlatformShape& shape) {
    constexpr int kRiseSamples = 18;
    constexpr int kTailSamples = 6;
    constexpr double kFirstBandwidth = 2.0;
    constexpr double kRiseSharpness = 32.0; // latency stays near-flat early, then climbs
    constexpr double kWritePenalty = 0.05;  // unloaded-latency spread across ratios
    constexpr double kNarrowTail = 0.04;    // tail width of the 50%-read curve, GB/s

    CurveFamily family;
    family.platform_name = shape.name;
    family.theoretical_max_bandwidth_gbps = shape.theoretical_bw_gbps;

    double threshold = 2.0 * shape.unloaded_ns;
    double onset_top = shape.theoretical_bw_gbps * (shape.sat_low_frac + shape.onset_spread_frac);
    double wide_tail = shape.theoretical_bw_gbps * shape.sat_high_frac - onset_top;
    assert(wide_tail > kNarrowTail);

    for (int ratio = 50; ratio <= 100; ratio += 10) {
        double x = (ratio - 50) / 50.0;
        double first_latency = shape.unloaded_ns * (1.0 + kWritePenalty * (1.0 - x));
        double onset = shape.theoretical_bw_gbps * (shape.sat_low_frac + shape.onset_spread_frac * x);
        double tail_width = kNarrowTail + (wide_tail - kNarrowTail) * x;
        double top_latency =
            shape.max_latency_low_ns + (shape.max_latency_high_ns - shape.max_latency_low_ns) * x;

        Curve curve{ratio, {}, {}};
        // Rise: near-flat start, exponential climb, hitting exactly twice the
        // unloaded latency at the saturation onset.
        for (int i = 0; i < kRiseSamples; ++i) {
            double u = static_cast<double>(i) / (kRiseSamples - 1);
            double b = kFirstBandwidth + (onset - kFirstBandwidth) * u;
            double lat = i == kRiseSamples - 1
                             ? threshold
                             : first_latency + (threshold - first_latency) *
                                                   (std::pow(kRiseSharpness, u) - 1.0) /
                                                   (kRiseSharpness - 1.0);
            curve.points.push_back({b, lat});
        }
        // Tail: the saturated shoulder past the onset.
        for (int j = 1; j <= kTailSamples; ++j) {
            double v = static_cast<double>(j) / kTailSamples;
            double b = onset + tail_width * v;
            double lat =
                j == kTailSamples ? top_latency : threshold + (top_latency - threshold) * std::pow(v, 0.7);
            curve.points.push_back({b, lat});
        }
        curve.rebuild_envelope();
        family.curves.emplace(ratio, std::move(curve));
    }
    return family;
}

CurveFamily make_platform_family(const std::string& name) {
    return make_platform_family(platform_shape(name));
}

} // namespace mess
