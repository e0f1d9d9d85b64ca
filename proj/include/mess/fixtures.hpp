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

#include <string>
#include <vector>

#include "mess/curves.hpp"

namespace mess {

/// Curve family sampled from the closed form latency(b) = L0 + k*b/(Bmax-b),
/// with a per-ratio latency penalty factor (1 + penalty*(100-ratio)/50).
/// `points` samples per curve span [0, 0.98*Bmax].
CurveFamily make_analytic_family(double l0_ns, double k_ns, double bmax_gbps,
                                 const std::vector<int>& ratios, int points,
                                 double penalty = 0.3);

/// Reference platform shapes for synthetic families. The headline numbers
/// (theoretical bandwidth, unloaded latency, latency maxima, saturated
/// bandwidth bounds as fractions of the theoretical peak) pin the family's
/// metrics; the interior of each curve is a smooth rise to the saturation
/// knee followed by a steep tail.
struct PlatformShape {
    std::string name;
    double theoretical_bw_gbps;
    double unloaded_ns;
    double max_latency_low_ns;  // most write-heavy curve's top latency
    double max_latency_high_ns; // most read-heavy curve's top latency
    double sat_low_frac;        // earliest saturation onset / theoretical bw
    double sat_high_frac;       // highest achieved bandwidth / theoretical bw
    double onset_spread_frac = 0.10; // onset growth from 50%- to 100%-read
};

/// Known shapes: "skylake" and "cascadelake". Throws FormatError otherwise.
const PlatformShape& platform_shape(const std::string& name);

/// Six-curve family (read ratios 50..100 step 10) reproducing the shape's
/// metrics: its minimum latency, per-curve latency maxima bounds and
/// saturated-bandwidth bounds land exactly on the requested values.
CurveFamily make_platform_family(const PlatformShape& shape);
CurveFamily make_platform_family(const std::string& name);

} // namespace mess
