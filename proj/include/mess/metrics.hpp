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

#pragma once

#include <cstddef>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "mess/curves.hpp"

namespace mess {

/// Bandwidth at which a curve's latency reaches twice the unloaded latency.
/// `saturates` is false when the curve never gets there; the bandwidth is
/// then the envelope's top.
struct SaturationOnset {
    double bandwidth_gbps = 0.0;
    bool saturates = false;
};

/// Index range [first, last] into a curve's raw points where bandwidth
/// strictly declines while latency keeps rising.
using WaveSegment = std::pair<size_t, size_t>;

/// Quantitative summary of a curve family.
struct FamilyMetrics {
    double unloaded_latency_ns = 0.0;
    std::pair<double, double> max_latency_range_ns;
    std::pair<double, double> saturated_bandwidth_range_gbps;
    bool any_curve_saturates = false;
    std::map<int, SaturationOnset> saturation_onset_per_ratio;
    std::map<int, std::vector<WaveSegment>> wave_segments_per_ratio;
};

/// Minimum latency over all raw points of all curves.
double unloaded_latency(const CurveFamily& family);

/// (min, max) over curves of each curve's maximum raw latency.
std::pair<double, double> max_latency_range(const CurveFamily& family);

/// Smallest envelope bandwidth where the piecewise-linear latency reaches
/// 2x the given unloaded latency.
SaturationOnset saturation_onset(const Curve& curve, double unloaded_ns);

/// (earliest saturation onset across ratios, highest achieved bandwidth
/// across ratios).
std::pair<double, double> saturated_bandwidth_range(const CurveFamily& family);

/// Maximal runs of consecutive raw points where bandwidth strictly decreases
/// while latency strictly increases, in measurement order. `noise_epsilon`
/// is a relative tolerance: a step counts as declining only if it moves by
/// more than that fraction.
std::vector<WaveSegment> wave_segments(const Curve& curve, double noise_epsilon = 0.0);

FamilyMetrics compute_metrics(const CurveFamily& family, double noise_epsilon = 0.0);

} // namespace mess
