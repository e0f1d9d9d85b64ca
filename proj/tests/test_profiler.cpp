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

#include <doctest.h>

#include <sstream>

#include "mess/fixtures.hpp"
#include "mess/metrics.hpp"
#include "mess/profiler.hpp"
#include "support.hpp"

using namespace mess;

namespace {

Curve make_curve(int ratio, std::vector<CurvePoint> pts) {
    Curve c{ratio, std::move(pts), {}};
    c.rebuild_envelope();
    return c;
}

} // namespace

TEST_CASE("stress weights must be a convex pair") {
    CurveFamily skl = make_platform_family("skylake");
    CHECK_THROWS_AS(stress_score(skl, 100, 10, {0.7, 0.7}), SimulationError);
    CHECK_THROWS_AS(stress_score(skl, 100, 10, {-0.5, 1.5}), SimulationError);
    CHECK(stress_score(skl, 100, 10, {1.0, 0.0}) >= 0.0);
}

TEST_CASE("score anchors: 0 when unloaded, 1 at the right-most extreme") {
    CurveFamily skl = make_platform_family("skylake");
    CHECK(stress_score(skl, 100, 0.0) == 0.0);

    // right-most extreme: top of the curve holding the family's peak latency
    double top_bw = skl.curves.at(100).max_bandwidth();
    CHECK(stress_score(skl, 100, top_bw) == 1.0);
    CHECK(stress_score(skl, 100, top_bw + 50.0) == 1.0); // clamped beyond
}

TEST_CASE("score is the weighted sum of the two normalized terms") {
    // envelope (0,100),(15,160),(23,200): at b=15 lat_norm = 0.6,
    // slope_norm = 4 / 5 = 0.8
    CurveFamily fam;
    fam.curves.emplace(100, make_curve(100, {{0, 100}, {15, 160}, {23, 200}}));
    CHECK(stress_score(fam, 100, 15.0, {0.5, 0.5}) == doctest::Approx(0.7).epsilon(1e-12));
    CHECK(stress_score(fam, 100, 15.0, {1.0, 0.0}) == doctest::Approx(0.6).epsilon(1e-12));
    CHECK(stress_score(fam, 100, 15.0, {0.0, 1.0}) == doctest::Approx(0.8).epsilon(1e-12));
}

TEST_CASE("degenerate flat family scores zero everywhere") {
    CurveFamily flat;
    flat.curves.emplace(100, make_curve(100, {{0, 89}, {340, 89}}));
    CHECK(degenerate_for_scoring(flat));
    for (double b : {0.0, 50.0, 340.0, 500.0}) CHECK(stress_score(flat, 100, b) == 0.0);
}

TEST_CASE("buckets tile [0,1] with half-open thirds") {
    CHECK(bucket_for(0.0) == Bucket::green);
    CHECK(bucket_for(0.3299) == Bucket::green);
    CHECK(bucket_for(0.33) == Bucket::yellow);
    CHECK(bucket_for(0.6599) == Bucket::yellow);
    CHECK(bucket_for(0.66) == Bucket::red);
    CHECK(bucket_for(1.0) == Bucket::red);

    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int i = 0; i < 1000; ++i) {
        double s = u(rng);
        int hits = (s < 0.33) + (s >= 0.33 && s < 0.66) + (s >= 0.66);
        CHECK(hits == 1);
    }
}

TEST_CASE("score is monotone in bandwidth along a curve") {
    std::mt19937_64 rng(22);
    std::uniform_real_distribution<double> u(0.0, 1.2);
    for (int iter = 0; iter < 1000; ++iter) {
        CurveFamily fam = test::random_family(rng);
        if (degenerate_for_scoring(fam)) continue;
        for (const auto& [ratio, curve] : fam.curves) {
            double top = curve.max_bandwidth();
            double b1 = u(rng) * top;
            double b2 = u(rng) * top;
            if (b1 > b2) std::swap(b1, b2);
            CHECK(stress_score(fam, ratio, b1) <= stress_score(fam, ratio, b2) + 1e-12);
        }
    }
}

TEST_CASE("profiling maps samples in order and flags saturated ones") {
    CurveFamily skl = make_platform_family("skylake");

    SUBCASE("empty input gives empty output") {
        CHECK(profile(skl, {}).empty());
    }
    SUBCASE("idle sample is green at the unloaded point") {
        auto pts = profile(skl, {{0.0, 0.0, 100.0}});
        REQUIRE(pts.size() == 1);
        CHECK(pts[0].latency_ns == 89.0);
        CHECK(pts[0].stress_score == 0.0);
        CHECK(pts[0].bucket == Bucket::green);
        CHECK(!pts[0].saturated);
    }
    SUBCASE("sample beyond the curve top clamps and carries the flag") {
        double top = skl.curves.at(100).max_bandwidth();
        auto pts = profile(skl, {{0.0, top + 10.0, 100.0}});
        REQUIRE(pts.size() == 1);
        CHECK(pts[0].saturated);
        CHECK(pts[0].latency_ns == skl.curves.at(100).envelope.back().latency_ns);
    }
    SUBCASE("profiling is pure") {
        std::vector<ProfileSample> samples{{0, 40, 90}, {10000, 80, 70}, {20000, 104, 95}};
        auto a = profile(skl, samples);
        auto b = profile(skl, samples);
        REQUIRE(a.size() == b.size());
        for (size_t i = 0; i < a.size(); ++i) {
            CHECK(a[i].latency_ns == b[i].latency_ns);
            CHECK(a[i].stress_score == b[i].stress_score);
        }
    }
}

TEST_CASE("saturated-region samples on the reference shape peak in the red band") {
    CurveFamily cl = make_platform_family("cascadelake");
    // memory-hammering phase: read-heavy samples pushing past saturation
    std::vector<ProfileSample> samples;
    for (int i = 0; i <= 30; ++i)
        samples.push_back({i * 10000.0, 75.0 + i, 90.0});
    auto pts = profile(cl, samples);

    double peak_latency = 0.0;
    double peak_score = 0.0;
    for (const ProfilePoint& p : pts) {
        peak_latency = std::max(peak_latency, p.latency_ns);
        peak_score = std::max(peak_score, p.stress_score);
    }
    CHECK(peak_latency >= 260.0);
    CHECK(peak_latency <= 290.0);
    CHECK(bucket_for(peak_score) == Bucket::red);
}

TEST_CASE("sample CSV loads both header forms") {
    SUBCASE("canonical form") {
        std::istringstream in("timestamp_us,total_bw_gbps,read_ratio_pct\n"
                              "0,40,90\n"
                              "10000,80.5,70\n");
        auto s = load_samples(in);
        REQUIRE(s.size() == 2);
        CHECK(s[1].total_bw_gbps == 80.5);
        CHECK(s[1].read_ratio_pct == 70.0);
    }
    SUBCASE("read/write split form derives the ratio") {
        std::istringstream in("timestamp_us,read_bw_gbps,write_bw_gbps\n"
                              "0,30,10\n"
                              "10000,0,0\n");
        auto s = load_samples(in);
        REQUIRE(s.size() == 2);
        CHECK(s[0].total_bw_gbps == 40.0);
        CHECK(s[0].read_ratio_pct == 75.0);
        CHECK(s[1].read_ratio_pct == 100.0); // idle defaults to reads
    }
    SUBCASE("timestamps must not regress") {
        std::istringstream in("timestamp_us,total_bw_gbps,read_ratio_pct\n"
                              "10,40,90\n"
                              "5,40,90\n");
        CHECK_THROWS_AS(load_samples(in), ValueError);
    }
    SUBCASE("unknown header is a format error") {
        std::istringstream in("time,bw\n1,2\n");
        CHECK_THROWS_AS(load_samples(in), FormatError);
    }
}

TEST_CASE("scored CSV carries canonical columns plus the scoring fields") {
    CurveFamily skl = make_platform_family("skylake");
    auto pts = profile(skl, {{0.0, 0.0, 100.0}});
    std::ostringstream out;
    save_profile(pts, out);
    CHECK(out.str() ==
          "timestamp_us,total_bw_gbps,read_ratio_pct,latency_ns,stress_score,bucket,saturated\n"
          "0,0,100,89,0,green,0\n");
}
