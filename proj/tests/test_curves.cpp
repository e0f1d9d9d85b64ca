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

#include <algorithm>
#include <sstream>

#include "mess/curves.hpp"
#include "support.hpp"

using namespace mess;

namespace {

bool dominates(const CurvePoint& p, const CurvePoint& q) {
    return p.bandwidth_gbps >= q.bandwidth_gbps && p.latency_ns <= q.latency_ns &&
           (p.bandwidth_gbps > q.bandwidth_gbps || p.latency_ns < q.latency_ns);
}

Curve make_curve(int ratio, std::vector<CurvePoint> pts) {
    Curve c{ratio, std::move(pts), {}};
    c.rebuild_envelope();
    return c;
}

} // namespace

TEST_CASE("envelope drops wave points dominated by the recovery point") {
    auto env = build_envelope({{50, 120}, {90, 300}, {95, 260}, {100, 200}});
    REQUIRE(env.size() == 2);
    CHECK(env[0] == CurvePoint{50, 120});
    CHECK(env[1] == CurvePoint{100, 200});
}

TEST_CASE("envelope of a single point is itself") {
    auto env = build_envelope({{10, 90}});
    REQUIRE(env.size() == 1);
    CHECK(env[0] == CurvePoint{10, 90});
}

TEST_CASE("duplicate bandwidth keeps the minimum latency") {
    auto env = build_envelope({{10, 90}, {10, 95}, {20, 100}});
    REQUIRE(env.size() == 2);
    CHECK(env[0] == CurvePoint{10, 90});
    CHECK(env[1] == CurvePoint{20, 100});
}

TEST_CASE("envelope dominance, membership and monotonicity over random point sets") {
    std::mt19937_64 rng(12345);
    for (int iter = 0; iter < 1000; ++iter) {
        auto pts = test::random_points(rng);
        auto env = build_envelope(pts);
        REQUIRE(!env.empty());
        for (size_t i = 0; i < env.size(); ++i) {
            // member of the raw set
            CHECK(std::find(pts.begin(), pts.end(), env[i]) != pts.end());
            // not dominated by any raw point
            for (const auto& p : pts) CHECK(!dominates(p, env[i]));
            if (i > 0) {
                CHECK(env[i].bandwidth_gbps > env[i - 1].bandwidth_gbps);
                CHECK(env[i].latency_ns >= env[i - 1].latency_ns);
            }
        }
        // every raw point is on the envelope or dominated by an envelope point
        for (const auto& p : pts) {
            bool covered = std::find(env.begin(), env.end(), p) != env.end();
            for (const auto& e : env) covered = covered || dominates(e, p);
            CHECK(covered);
        }
    }
}

TEST_CASE("lookup interpolates linearly along one curve") {
    CurveFamily fam;
    fam.curves.emplace(100, make_curve(100, {{10, 90}, {20, 100}}));
    auto r = fam.lookup_latency(100, 15);
    CHECK(r.latency_ns == doctest::Approx(95.0).epsilon(1e-12));
    CHECK(!r.saturated);
}

TEST_CASE("lookup interpolates linearly between read-ratio curves") {
    CurveFamily fam;
    fam.curves.emplace(70, make_curve(70, {{0, 110}, {80, 110}}));
    fam.curves.emplace(80, make_curve(80, {{0, 100}, {80, 100}}));
    auto r = fam.lookup_latency(75, 40);
    CHECK(r.latency_ns == doctest::Approx(105.0).epsilon(1e-12));
    CHECK(!r.saturated);
}

TEST_CASE("lookup clamps above the envelope top and flags saturation") {
    CurveFamily fam;
    fam.curves.emplace(100, make_curve(100, {{10, 90}, {116, 391}}));
    auto r = fam.lookup_latency(100, 130);
    CHECK(r.latency_ns == 391.0);
    CHECK(r.saturated);
    CHECK(!fam.lookup_latency(100, 116).saturated); // exactly at the top
}

TEST_CASE("lookup below the first envelope point returns the unloaded estimate") {
    CurveFamily fam;
    fam.curves.emplace(100, make_curve(100, {{5, 104}, {50, 150}}));
    CHECK(fam.lookup_latency(100, 0).latency_ns == 104.0);
    CHECK(fam.lookup_latency(100, 2).latency_ns == 104.0);
}

TEST_CASE("read ratios outside the family keys clamp to the nearest curve") {
    CurveFamily fam;
    fam.curves.emplace(50, make_curve(50, {{0, 120}, {90, 240}}));
    fam.curves.emplace(100, make_curve(100, {{0, 90}, {110, 390}}));
    CHECK(fam.lookup_latency(0, 10).latency_ns == fam.lookup_latency(50, 10).latency_ns);
    CHECK(fam.lookup_latency(100, 0).latency_ns == 90.0);
}

TEST_CASE("lookup monotonicity in bandwidth for a fixed ratio") {
    std::mt19937_64 rng(777);
    std::uniform_real_distribution<double> ratio_dist(0, 100);
    for (int iter = 0; iter < 1000; ++iter) {
        CurveFamily fam = test::random_family(rng);
        double ratio = ratio_dist(rng);
        double span = fam.max_bandwidth(ratio) * 1.3 + 1.0;
        std::uniform_real_distribution<double> bw_dist(0.0, span);
        double b1 = bw_dist(rng);
        double b2 = bw_dist(rng);
        if (b1 > b2) std::swap(b1, b2);
        CHECK(fam.lookup_latency(ratio, b1).latency_ns <=
              fam.lookup_latency(ratio, b2).latency_ns + 1e-12);
    }
}

TEST_CASE("lookup is exact at every envelope knot") {
    std::mt19937_64 rng(31337);
    for (int iter = 0; iter < 1000; ++iter) {
        CurveFamily fam = test::random_family(rng);
        for (const auto& [ratio, curve] : fam.curves)
            for (const CurvePoint& p : curve.envelope) {
                auto r = fam.lookup_latency(ratio, p.bandwidth_gbps);
                CHECK(r.latency_ns == p.latency_ns);
                CHECK(!r.saturated);
            }
    }
}

TEST_CASE("max_bandwidth interpolates the envelope tops") {
    CurveFamily fam;
    fam.curves.emplace(50, make_curve(50, {{0, 120}, {92.2, 242}}));
    fam.curves.emplace(100, make_curve(100, {{0, 90}, {116.5, 391}}));
    CHECK(fam.max_bandwidth(50) == doctest::Approx(92.2));
    CHECK(fam.max_bandwidth(100) == doctest::Approx(116.5));
    CHECK(fam.max_bandwidth(75) == doctest::Approx(0.5 * (92.2 + 116.5)));

    CurveFamily single;
    single.curves.emplace(80, make_curve(80, {{0, 100}, {40, 200}}));
    for (double ratio : {0.0, 50.0, 80.0, 100.0}) CHECK(single.max_bandwidth(ratio) == 40.0);
}

TEST_CASE("curve file loads: basic parse") {
    std::istringstream csv("read_ratio_pct,bandwidth_gbps,latency_ns\n"
                           "100,10,90\n"
                           "100,20,100\n");
    CurveFamily fam = load_family(csv, nullptr);
    REQUIRE(fam.curves.size() == 1);
    REQUIRE(fam.curves.count(100) == 1);
    CHECK(fam.curves.at(100).points.size() == 2);
    CHECK(fam.platform_name == "unknown");
    CHECK(!fam.theoretical_max_bandwidth_gbps);
    CHECK(fam.line_size_bytes == 64);
}

TEST_CASE("curve file loads: negative bandwidth is rejected with the row number") {
    std::istringstream csv("read_ratio_pct,bandwidth_gbps,latency_ns\n"
                           "100, -5, 90\n");
    try {
        load_family(csv, nullptr);
        FAIL("expected ValueError");
    } catch (const ValueError& e) {
        CHECK(e.row() == 1);
    }
}

TEST_CASE("curve file loads: six ratios give six curves") {
    std::ostringstream csv;
    csv << "read_ratio_pct,bandwidth_gbps,latency_ns\n";
    for (int ratio = 50; ratio <= 100; ratio += 10)
        csv << ratio << ",10,90\n" << ratio << ",50,180\n";
    std::istringstream in(csv.str());
    CHECK(load_family(in, nullptr).curves.size() == 6);
}

TEST_CASE("curve file loads: error taxonomy") {
    SUBCASE("empty file") {
        std::istringstream in("");
        CHECK_THROWS_AS(load_family(in, nullptr), EmptyInputError);
    }
    SUBCASE("header only") {
        std::istringstream in("read_ratio_pct,bandwidth_gbps,latency_ns\n");
        CHECK_THROWS_AS(load_family(in, nullptr), EmptyInputError);
    }
    SUBCASE("bad header") {
        std::istringstream in("bandwidth,latency\n1,2\n");
        CHECK_THROWS_AS(load_family(in, nullptr), FormatError);
    }
    SUBCASE("missing column") {
        std::istringstream in("read_ratio_pct,bandwidth_gbps,latency_ns\n100,10\n");
        CHECK_THROWS_AS(load_family(in, nullptr), FormatError);
    }
    SUBCASE("non-finite latency") {
        std::istringstream in("read_ratio_pct,bandwidth_gbps,latency_ns\n100,10,inf\n");
        CHECK_THROWS_AS(load_family(in, nullptr), ValueError);
    }
    SUBCASE("fractional ratio") {
        std::istringstream in("read_ratio_pct,bandwidth_gbps,latency_ns\n99.5,10,90\n");
        CHECK_THROWS_AS(load_family(in, nullptr), ValueError);
    }
    SUBCASE("zero latency") {
        std::istringstream in("read_ratio_pct,bandwidth_gbps,latency_ns\n100,10,0\n");
        CHECK_THROWS_AS(load_family(in, nullptr), ValueError);
    }
}

TEST_CASE("duplicate (ratio, bandwidth) points are kept and resolved by the envelope") {
    std::istringstream in("read_ratio_pct,bandwidth_gbps,latency_ns\n"
                          "100,10,95\n"
                          "100,10,90\n"
                          "100,20,100\n");
    CurveFamily fam = load_family(in, nullptr);
    const Curve& c = fam.curves.at(100);
    CHECK(c.points.size() == 3);
    REQUIRE(c.envelope.size() == 2);
    CHECK(c.envelope[0].latency_ns == 90.0);
    CHECK(!fam.warnings.empty());
}

TEST_CASE("manifest is honored and bandwidth overshoot only warns") {
    std::istringstream csv("read_ratio_pct,bandwidth_gbps,latency_ns\n100,150,90\n");
    std::istringstream manifest(
        R"({"platform_name":"x","theoretical_max_bandwidth_gbps":128,"line_size_bytes":32})");
    CurveFamily fam = load_family(csv, &manifest);
    CHECK(fam.platform_name == "x");
    CHECK(fam.line_size_bytes == 32);
    CHECK(fam.exceeds_theoretical_max);
}

TEST_CASE("save/load round trip reproduces an identical family") {
    std::mt19937_64 rng(999);
    test::TempDir dir;
    for (int iter = 0; iter < 200; ++iter) {
        CurveFamily fam = test::random_family(rng);
        fam.platform_name = "roundtrip";
        if (iter % 2) fam.theoretical_max_bandwidth_gbps = 123.456;

        auto path = dir.file("fam.csv");
        save_family(fam, path);
        CurveFamily back = load_family(path);

        REQUIRE(back.curves.size() == fam.curves.size());
        CHECK(back.platform_name == fam.platform_name);
        CHECK(back.theoretical_max_bandwidth_gbps == fam.theoretical_max_bandwidth_gbps);
        for (const auto& [ratio, curve] : fam.curves) {
            REQUIRE(back.curves.count(ratio) == 1);
            const Curve& b = back.curves.at(ratio);
            REQUIRE(b.points.size() == curve.points.size());
            for (size_t i = 0; i < curve.points.size(); ++i) CHECK(b.points[i] == curve.points[i]);
            REQUIRE(b.envelope.size() == curve.envelope.size());
        }

        // saving the re-loaded family is byte-identical
        auto path2 = dir.file("fam2.csv");
        save_family(back, path2);
        CHECK(test::read_file(path) == test::read_file(path2));
        CHECK(test::read_file(manifest_path_for(path)) == test::read_file(manifest_path_for(path2)));
    }
}
