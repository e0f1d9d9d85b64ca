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

#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "mess/errors.hpp"

namespace mess {

/// One measured point of a bandwidth--latency curve.
struct CurvePoint {
    double bandwidth_gbps = 0.0; // >= 0, finite
    double latency_ns = 0.0;     // > 0, finite

    friend bool operator==(const CurvePoint&, const CurvePoint&) = default;
};

/// Result of a latency lookup. `saturated` is set when the requested
/// bandwidth lies beyond the top of a bracketing curve.
struct LatencyLookup {
    double latency_ns = 0.0;
    bool saturated = false;
};

/// Pareto envelope of a point set under the dominance order
/// "p dominates q iff p.bandwidth >= q.bandwidth and p.latency <= q.latency,
/// with at least one strict". The result is a subset of the input, sorted by
/// ascending bandwidth, with strictly increasing bandwidth and non-decreasing
/// latency. Multivalued "wave" regions collapse onto their best points; the
/// raw points stay available for metrics and plotting.
std::vector<CurvePoint> build_envelope(const std::vector<CurvePoint>& points);

/// A bandwidth--latency curve for one read/write traffic composition.
/// `points` keeps the measurement order (increasing generator pressure);
/// `envelope` is the derived single-valued latency(bandwidth) map.
struct Curve {
    int read_ratio_pct = 100; // percent of reads, 0..100
    std::vector<CurvePoint> points;
    std::vector<CurvePoint> envelope;

    /// Rebuilds `envelope` from `points`.
    void rebuild_envelope() { envelope = build_envelope(points); }

    /// Piecewise-linear latency on the envelope. Bandwidth below the first
    /// envelope point returns the first point's latency (treated as
    /// unloaded); bandwidth above the last point returns the last point's
    /// latency with `saturated` set.
    LatencyLookup envelope_latency(double bandwidth_gbps) const;

    /// Bandwidth of the last envelope point.
    double max_bandwidth() const { return envelope.back().bandwidth_gbps; }

    /// Latency of the first envelope point (the unloaded estimate).
    double min_latency() const { return envelope.front().latency_ns; }

    /// Maximum latency over the raw points.
    double max_raw_latency() const;
};

/// A family of bandwidth--latency curves keyed by read ratio: the full
/// characterization of one memory system. Immutable after load; safe to
/// share across threads.
struct CurveFamily {
    std::string platform_name = "unknown";
    std::optional<double> theoretical_max_bandwidth_gbps;
    int line_size_bytes = 64;
    std::map<int, Curve> curves;

    /// Set when a measured bandwidth exceeds the declared theoretical
    /// maximum. Simulated memory systems are known to do this, so it is a
    /// warning, not an error.
    bool exceeds_theoretical_max = false;
    std::vector<std::string> warnings;

    bool empty() const { return curves.empty(); }

    /// Bilinear latency lookup: the read ratio is clamped into the family's
    /// key range and resolved against the two bracketing curves; each curve
    /// answers via its envelope; the two latencies are blended linearly in
    /// the ratio. `saturated` is set if either bracketing curve was clamped
    /// at its top.
    LatencyLookup lookup_latency(double read_ratio_pct, double bandwidth_gbps) const;

    /// Maximum measured bandwidth at a read ratio, interpolated linearly
    /// between the bracketing curves' envelope tops.
    double max_bandwidth(double read_ratio_pct) const;

    /// Global minimum raw latency.
    double min_raw_latency() const;

    /// Global maximum raw latency.
    double max_raw_latency() const;

    /// Highest latency any lookup can return: the maximum envelope-top
    /// latency across curves. Below max_raw_latency() when wave regions put
    /// raw points above the envelope.
    double max_envelope_latency() const;

private:
    // Bracketing curves and blend weight for a (clamped) read ratio.
    struct Bracket {
        const Curve* lo;
        const Curve* hi;
        double t; // 0 -> lo, 1 -> hi
    };
    Bracket bracket(double read_ratio_pct) const;
};

/// Loads a curve family from the curve file format: a UTF-8 CSV with header
/// `read_ratio_pct,bandwidth_gbps,latency_ns`, one row per measured point,
/// plus an optional sidecar JSON manifest next to it (same path with the
/// extension replaced by `.json`) carrying platform_name,
/// theoretical_max_bandwidth_gbps and line_size_bytes.
///
/// Throws FormatError (bad header / column count), ValueError (non-finite,
/// negative or out-of-range values, with the 1-based data row number),
/// EmptyInputError (no data rows). Duplicate (read_ratio, bandwidth) points
/// with differing latency are kept; the envelope resolves them (minimum
/// latency wins) and a warning is recorded on the family.
CurveFamily load_family(const std::filesystem::path& csv_path);
CurveFamily load_family(std::istream& csv, std::istream* manifest);

/// Writes the family back in the curve file format (CSV + sidecar manifest).
/// Numeric fields use shortest round-trip formatting, so
/// save_family(load_family(f)) reproduces an identical family.
void save_family(const CurveFamily& family, const std::filesystem::path& csv_path);
void save_family_csv(const CurveFamily& family, std::ostream& csv);
void save_family_manifest(const CurveFamily& family, std::ostream& manifest);

/// Sidecar manifest path for a given curve CSV path.
std::filesystem::path manifest_path_for(const std::filesystem::path& csv_path);

/// Shortest round-trip decimal form of a double (the numeric text used by
/// every CSV/JSON emitter in the toolkit).
std::string format_double(double value);

} // namespace mess
