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
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "mess/curves.hpp"
#include "mess/frontend.hpp"

namespace mess::test {

/// Scratch directory removed on destruction.
class TempDir {
public:
    TempDir() {
        auto base = std::filesystem::temp_directory_path();
        for (int i = 0; i < 10000; ++i) {
            auto candidate = base / ("mess_test_" + std::to_string(std::random_device{}()));
            std::error_code ec;
            if (std::filesystem::create_directory(candidate, ec)) {
                path_ = candidate;
                return;
            }
        }
        throw std::runtime_error("cannot create temp dir");
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    std::filesystem::path file(const std::string& name) const { return path_ / name; }
    const std::filesystem::path& path() const { return path_; }

private:
    std::filesystem::path path_;
};

inline void write_file(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    out << text;
}

inline std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

/// Random points with deliberate bandwidth/latency ties (small grids) to
/// stress the dominance rules.
inline std::vector<CurvePoint> random_points(std::mt19937_64& rng, size_t max_points = 40) {
    std::uniform_int_distribution<size_t> n_dist(1, max_points);
    std::uniform_int_distribution<int> bw_grid(0, 60);
    std::uniform_int_distribution<int> lat_grid(1, 80);
    size_t n = n_dist(rng);
    std::vector<CurvePoint> pts;
    pts.reserve(n);
    for (size_t i = 0; i < n; ++i)
        pts.push_back({bw_grid(rng) * 2.5, lat_grid(rng) * 5.0});
    return pts;
}

/// Random curve that mostly rises, with occasional wave-like wiggles.
inline Curve random_curve(std::mt19937_64& rng, int ratio) {
    std::uniform_int_distribution<int> n_dist(2, 24);
    std::uniform_real_distribution<double> step(0.5, 8.0);
    std::uniform_real_distribution<double> lat_step(0.0, 30.0);
    std::uniform_real_distribution<double> u01(0.0, 1.0);

    Curve curve{ratio, {}, {}};
    double bw = step(rng);
    double lat = 60.0 + lat_step(rng);
    int n = n_dist(rng);
    for (int i = 0; i < n; ++i) {
        curve.points.push_back({bw, lat});
        if (u01(rng) < 0.2) {
            bw = std::max(0.1, bw - step(rng)); // wave: pressure up, bandwidth down
            lat += 1.0 + lat_step(rng);
        } else {
            bw += step(rng);
            lat += lat_step(rng);
        }
    }
    curve.rebuild_envelope();
    return curve;
}

inline CurveFamily random_family(std::mt19937_64& rng, size_t max_curves = 5) {
    std::uniform_int_distribution<size_t> n_dist(1, max_curves);
    std::uniform_int_distribution<int> ratio_dist(0, 100);
    CurveFamily family;
    family.platform_name = "random";
    size_t n = n_dist(rng);
    while (family.curves.size() < n) {
        int ratio = ratio_dist(rng);
        family.curves.emplace(ratio, random_curve(rng, ratio));
    }
    return family;
}

/// Coefficient of determination of the least-squares line through (x, y).
inline double r_squared(const std::vector<double>& x, const std::vector<double>& y) {
    size_t n = x.size();
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (size_t i = 0; i < n; ++i) {
        sx += x[i];
        sy += y[i];
        sxx += x[i] * x[i];
        sxy += x[i] * y[i];
    }
    double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    double intercept = (sy - slope * sx) / n;
    double ss_res = 0, ss_tot = 0;
    double mean = sy / n;
    for (size_t i = 0; i < n; ++i) {
        double fit = slope * x[i] + intercept;
        ss_res += (y[i] - fit) * (y[i] - fit);
        ss_tot += (y[i] - mean) * (y[i] - mean);
    }
    return ss_tot == 0.0 ? 1.0 : 1.0 - ss_res / ss_tot;
}

/// Constant-rate read trace in DRAMsim3 style: one read every `period`
/// cycles, starting at `period`.
inline std::vector<TraceRecord> constant_rate_trace(uint64_t ops, uint64_t period_cycles) {
    std::vector<TraceRecord> t;
    t.reserve(ops);
    for (uint64_t i = 0; i < ops; ++i) {
        TraceRecord r;
        r.kind = OpKind::read;
        r.address = 0x10000 + i * 64;
        r.arrival_cycle = (i + 1) * period_cycles;
        t.push_back(r);
    }
    return t;
}

} // namespace mess::test
