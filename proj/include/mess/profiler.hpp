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

#include <iosfwd>
#include <vector>

#include "mess/curves.hpp"

namespace mess {

/// One timestamped bandwidth observation of a running application.
struct ProfileSample {
    double timestamp_us = 0.0;
    double total_bw_gbps = 0.0;
    double read_ratio_pct = 100.0;
};

enum class Bucket { green, yellow, red };

/// A sample positioned on the curve family and scored.
struct ProfilePoint {
    ProfileSample sample;
    double latency_ns = 0.0;
    double stress_score = 0.0;
    Bucket bucket = Bucket::green;
    bool saturated = false;
};

struct StressWeights {
    double w_latency = 0.5;
    double w_slope = 0.5;

    void validate() const; // both >= 0, summing to 1
};

/// Memory stress score in [0, 1]: a weighted sum of normalized latency and
/// normalized curve inclination at the operating point. 0 corresponds to the
/// unloaded memory system, 1 to the right-most end of the steepest curve
/// area. The slope term uses the running maximum of the envelope segment
/// slopes up to the operating point, so the score is monotone along a curve.
/// A degenerate family (flat everywhere) scores 0.
double stress_score(const CurveFamily& family, double read_ratio_pct, double bandwidth_gbps,
                    StressWeights weights = {});

/// True when the family carries no latency contrast (constant latency).
bool degenerate_for_scoring(const CurveFamily& family);

Bucket bucket_for(double score);

/// Scores a batch of samples, preserving their order.
std::vector<ProfilePoint> profile(const CurveFamily& family,
                                  const std::vector<ProfileSample>& samples,
                                  StressWeights weights = {});

/// Sample CSV input. Canonical header `timestamp_us,total_bw_gbps,read_ratio_pct`;
/// the alternative `timestamp_us,read_bw_gbps,write_bw_gbps` is auto-detected
/// and converted (ratio = 100*read/(read+write), 100 when idle). Timestamps
/// must be non-decreasing; bandwidths non-negative.
std::vector<ProfileSample> load_samples(std::istream& in);
std::vector<ProfileSample> load_samples(const std::filesystem::path& path);

/// Scored CSV: canonical input columns + `latency_ns,stress_score,bucket,saturated`.
void save_profile(const std::vector<ProfilePoint>& points, std::ostream& out);

} // namespace mess
