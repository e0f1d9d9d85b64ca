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

#include "mess/frontend.hpp"

#include <algorithm>
#include <atomic>
#include <cassert>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <numeric>
#include <queue>
#include <thread>

namespace mess {

namespace {

std::vector<std::string_view> split_ws(std::string_view line) {
    std::vector<std::string_view> out;
    size_t i = 0;
    while (i < line.size()) {
        while (i < line.size() && (line[i] == ' ' || line[i] == '\t')) ++i;
        size_t start = i;
        while (i < line.size() && line[i] != ' ' && line[i] != '\t') ++i;
        if (i > start) out.push_back(line.substr(start, i - start));
    }
    return out;
}

uint64_t parse_uint(std::string_view tok, uint64_t line_no, const char* what, int base = 10) {
    if (base == 16 && tok.size() > 2 && tok[0] == '0' && (tok[1] == 'x' || tok[1] == 'X'))
        tok.remove_prefix(2);
    uint64_t v = 0;
    auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v, base);
    if (ec != std::errc() || ptr != tok.data() + tok.size())
        throw ParseError(line_no, std::string("cannot parse ") + what + " '" + std::string(tok) + "'");
    return v;
}

} // namespace

std::vector<TraceRecord> parse_trace(std::istream& in, TraceStyle style) {
    std::vector<TraceRecord> records;
    std::string line;
    uint64_t line_no = 0;
    uint64_t prev_arrival = 0;
    bool have_prev = false;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        std::vector<std::string_view> tok = split_ws(line);
        if (tok.empty() || tok[0][0] == '#') continue;
        if (tok.size() != 3) throw ParseError(line_no, "expected 3 fields");

        TraceRecord rec;
        if (style == TraceStyle::ramulator) {
            rec.nonmem_instructions = parse_uint(tok[0], line_no, "instruction count");
            if (tok[1] == "R")
                rec.kind = OpKind::read;
            else if (tok[1] == "W")
                rec.kind = OpKind::write;
            else
                throw ParseError(line_no, "operation must be R or W");
            rec.address = parse_uint(tok[2], line_no, "address", 16);
        } else {
            rec.address = parse_uint(tok[0], line_no, "address", 16);
            if (tok[1] == "READ")
                rec.kind = OpKind::read;
            else if (tok[1] == "WRITE")
                rec.kind = OpKind::write;
            else
                throw ParseError(line_no, "operation must be READ or WRITE");
            rec.arrival_cycle = parse_uint(tok[2], line_no, "cycle");
            if (have_prev && rec.arrival_cycle < prev_arrival)
                throw ParseError(line_no, "arrival cycle regressed");
            prev_arrival = rec.arrival_cycle;
            have_prev = true;
        }
        records.push_back(rec);
    }
    return records;
}

std::vector<TraceRecord> parse_trace(const std::filesystem::path& path, TraceStyle style) {
    std::ifstream in(path);
    if (!in) throw FormatError("cannot open trace: " + path.string());
    return parse_trace(in, style);
}

void serialize_trace(const std::vector<TraceRecord>& records, TraceStyle style, std::ostream& out) {
    char addr[32];
    for (const TraceRecord& rec : records) {
        std::snprintf(addr, sizeof(addr), "0x%llx", static_cast<unsigned long long>(rec.address));
        if (style == TraceStyle::ramulator)
            out << rec.nonmem_instructions << ' ' << (rec.kind == OpKind::read ? 'R' : 'W') << ' '
                << addr << '\n';
        else
            out << addr << ' ' << (rec.kind == OpKind::read ? "READ" : "WRITE") << ' '
                << rec.arrival_cycle << '\n';
    }
}

void CoreConfig::validate() const {
    if (!(frequency_ghz > 0.0)) throw SimulationError("core frequency must be positive");
    if (!(ipc_nonmem > 0.0)) throw SimulationError("non-memory IPC must be positive");
    if (mshr_entries < 1) throw SimulationError("mshr_entries must be at least 1");
    if (line_size_bytes <= 0) throw SimulationError("line size must be positive");
}

void GeneratorConfig::validate() const {
    if (read_ratio_pct < 0 || read_ratio_pct > 100)
        throw SimulationError("read ratio must be in [0, 100]");
}

namespace {

uint64_t latency_cycles(double latency_ns, const CoreConfig& core) {
    double cycles = std::ceil(latency_ns * core.frequency_ghz);
    return std::max<uint64_t>(1, static_cast<uint64_t>(cycles));
}

using MinHeap = std::priority_queue<uint64_t, std::vector<uint64_t>, std::greater<uint64_t>>;

} // namespace

CoreRunStats run_trace_core(const std::vector<TraceRecord>& records, TraceStyle style,
                            const CoreConfig& core, MemoryDevice& memory, bool collect_per_op) {
    core.validate();
    CoreRunStats stats;
    if (collect_per_op) stats.issue_complete.reserve(records.size());
    stats.latencies_ns.reserve(records.size());

    MinHeap outstanding;
    uint64_t clock = 0;
    double latency_sum = 0.0;

    for (const TraceRecord& rec : records) {
        uint64_t issue;
        if (style == TraceStyle::ramulator) {
            clock += static_cast<uint64_t>(std::ceil(rec.nonmem_instructions / core.ipc_nonmem));
            while (!outstanding.empty() && outstanding.top() <= clock) outstanding.pop();
            if (outstanding.size() >= core.mshr_entries) {
                clock = outstanding.top();
                while (!outstanding.empty() && outstanding.top() <= clock) outstanding.pop();
            }
            issue = clock;
        } else {
            issue = rec.arrival_cycle;
            while (!outstanding.empty() && outstanding.top() <= issue) outstanding.pop();
            if (outstanding.size() >= core.mshr_entries) {
                issue = std::max(issue, outstanding.top());
                outstanding.pop();
            }
        }

        double lat_ns = memory.latency_ns({rec.kind, rec.address, issue});
        uint64_t completion = issue + latency_cycles(lat_ns, core);
        outstanding.push(completion);

        if (style == TraceStyle::ramulator && core.reads_blocking && rec.kind == OpKind::read)
            clock = completion;

        stats.total_cycles = std::max(stats.total_cycles, completion);
        if (rec.kind == OpKind::read)
            ++stats.reads;
        else
            ++stats.writes;
        latency_sum += lat_ns;
        stats.latencies_ns.push_back(lat_ns);
        if (collect_per_op) stats.issue_complete.push_back({issue, completion});
    }

    if (!records.empty()) {
        stats.mean_latency_ns = latency_sum / records.size();
        double span_ns = stats.total_cycles * core.cycle_time_ns();
        stats.achieved_bandwidth_gbps =
            stats.ops() * static_cast<double>(core.line_size_bytes) / span_ns;
    }
    return stats;
}

namespace {

// Deterministic read/write interleaving: over each pattern period the issued
// mix realizes the configured ratio exactly, reads first.
struct RatioPattern {
    uint32_t period;
    uint32_t reads;

    explicit RatioPattern(int read_ratio_pct) {
        uint32_t g = std::gcd<uint32_t>(static_cast<uint32_t>(read_ratio_pct), 100u);
        period = 100u / g;
        reads = static_cast<uint32_t>(read_ratio_pct) / g;
    }
    OpKind kind_at(uint64_t op_index) const {
        return (op_index % period) < reads ? OpKind::read : OpKind::write;
    }
};

struct StreamState {
    uint64_t next_nominal = 0; // last issue + gap
    uint64_t ops_issued = 0;
    MinHeap outstanding;
};

constexpr uint64_t kNoEvent = std::numeric_limits<uint64_t>::max();

} // namespace

LoadLoopStats run_load_loop(MemoryDevice& memory, const GeneratorConfig& gen,
                            const CoreConfig& core, uint64_t probe_ops, uint64_t warmup_ops) {
    core.validate();
    gen.validate();

    LoadLoopStats stats;
    RatioPattern pattern(gen.read_ratio_pct);
    std::vector<StreamState> streams(gen.streams);

    // The earliest cycle at which a stream may issue: its pacing gap, pushed
    // back by MSHR occupancy. Candidates only move forward, so the device
    // sees non-decreasing arrivals.
    auto stream_candidate = [&](const StreamState& s) -> uint64_t {
        uint64_t t = s.next_nominal;
        if (s.outstanding.size() >= core.mshr_entries) t = std::max(t, s.outstanding.top());
        return t;
    };

    auto earliest_stream = [&]() -> std::pair<size_t, uint64_t> {
        size_t best = 0;
        uint64_t best_t = kNoEvent;
        for (size_t i = 0; i < streams.size(); ++i) {
            uint64_t t = stream_candidate(streams[i]);
            if (t < best_t) {
                best_t = t;
                best = i;
            }
        }
        return {best, best_t};
    };

    auto issue_stream_op = [&](size_t idx, uint64_t now) {
        StreamState& s = streams[idx];
        while (!s.outstanding.empty() && s.outstanding.top() <= now) s.outstanding.pop();
        OpKind kind = pattern.kind_at(s.ops_issued);
        uint64_t address = (static_cast<uint64_t>(idx + 1) << 40) +
                           s.ops_issued * static_cast<uint64_t>(core.line_size_bytes);
        double lat_ns = memory.latency_ns({kind, address, now});
        s.outstanding.push(now + latency_cycles(lat_ns, core));
        stats.stream_max_outstanding =
            std::max<uint32_t>(stats.stream_max_outstanding, static_cast<uint32_t>(s.outstanding.size()));
        s.next_nominal = now + gen.inter_request_gap_cycles;
        ++s.ops_issued;
        if (kind == OpKind::read)
            ++stats.generator_reads;
        else
            ++stats.generator_writes;
        ++stats.total_ops;
    };

    // Warmup: generators only, not measured.
    uint64_t measure_start = 0;
    if (!streams.empty()) {
        for (uint64_t done = 0; done < warmup_ops; ++done) {
            auto [idx, t] = earliest_stream();
            issue_stream_op(idx, t);
            measure_start = t;
        }
    }

    if (probe_ops == 0) {
        // Generator-only run: each stream issues duration_ops further ops.
        if (streams.empty()) return stats;
        std::vector<uint64_t> base(streams.size());
        for (size_t i = 0; i < streams.size(); ++i) base[i] = streams[i].ops_issued;

        uint64_t measured_bytes = 0;
        uint64_t end_cycle = measure_start;
        while (true) {
            size_t best = 0;
            uint64_t best_t = kNoEvent;
            for (size_t i = 0; i < streams.size(); ++i) {
                if (streams[i].ops_issued - base[i] >= gen.duration_ops) continue;
                uint64_t t = stream_candidate(streams[i]);
                if (t < best_t) {
                    best_t = t;
                    best = i;
                }
            }
            if (best_t == kNoEvent) break;
            issue_stream_op(best, best_t);
            measured_bytes += core.line_size_bytes;
        }
        for (StreamState& s : streams)
            while (!s.outstanding.empty()) {
                end_cycle = std::max(end_cycle, s.outstanding.top());
                s.outstanding.pop();
            }
        double span_ns = (end_cycle - measure_start) * core.cycle_time_ns();
        if (span_ns > 0.0) stats.measured_bandwidth_gbps = measured_bytes / span_ns;
        return stats;
    }

    // Probe phase: a dependent-load chain (strictly one outstanding access)
    // interleaved with the open-ended generator streams in simulated-time
    // order; ties favor the probe.
    uint64_t probe_next = measure_start;
    uint64_t prev_completion = measure_start;
    uint64_t probe_done = 0;
    uint64_t probe_end = measure_start;
    uint64_t measured_bytes = 0;
    double probe_latency_sum = 0.0;
    constexpr uint64_t kProbeBase = 1ull << 60;

    while (probe_done < probe_ops) {
        auto [stream_idx, stream_t] = earliest_stream();
        if (probe_next <= stream_t) {
            assert(probe_next >= prev_completion);
            stats.probe_max_outstanding = std::max<uint32_t>(stats.probe_max_outstanding, 1);
            double lat_ns = memory.latency_ns(
                {OpKind::read, kProbeBase + probe_done * core.line_size_bytes, probe_next});
            probe_latency_sum += lat_ns;
            uint64_t completion = probe_next + latency_cycles(lat_ns, core);
            prev_completion = completion;
            probe_end = completion;
            probe_next = completion;
            ++probe_done;
            ++stats.total_ops;
            measured_bytes += core.line_size_bytes;
        } else {
            issue_stream_op(stream_idx, stream_t);
            measured_bytes += core.line_size_bytes;
        }
    }

    // Generator traffic issued before the probe's last completion still
    // belongs to the measured interval.
    if (!streams.empty()) {
        while (true) {
            auto [idx, t] = earliest_stream();
            if (t >= probe_end) break;
            issue_stream_op(idx, t);
            measured_bytes += core.line_size_bytes;
        }
    }

    stats.probe_ops = probe_done;
    stats.probe_mean_latency_ns = probe_latency_sum / probe_done;
    double span_ns = (probe_end - measure_start) * core.cycle_time_ns();
    if (span_ns > 0.0) stats.measured_bandwidth_gbps = measured_bytes / span_ns;
    return stats;
}

double run_probe(MemoryDevice& memory, const CoreConfig& core, uint64_t duration_ops) {
    assert(duration_ops >= 1);
    GeneratorConfig no_load;
    no_load.streams = 0;
    return run_load_loop(memory, no_load, core, duration_ops, 0).probe_mean_latency_ns;
}

double run_generator(MemoryDevice& memory, const GeneratorConfig& gen, const CoreConfig& core) {
    return run_load_loop(memory, gen, core, 0, 0).measured_bandwidth_gbps;
}

namespace {

int sweep_thread_count(int requested, size_t points) {
    int n = requested > 0 ? requested : static_cast<int>(std::thread::hardware_concurrency());
    if (n < 1) n = 1;
    if (const char* env = std::getenv("MESS_THREADS")) {
        int cap = std::atoi(env);
        if (cap >= 1) n = std::min(n, cap);
    }
    return static_cast<int>(std::min<size_t>(n, std::max<size_t>(points, 1)));
}

} // namespace

CurveFamily characterize(const DeviceFactory& make_device, const CharacterizeConfig& cfg,
                         const CoreConfig& core) {
    if (cfg.ratios.empty() || cfg.pressure_sweep_gaps.empty())
        throw SimulationError("characterization needs at least one ratio and one pressure value");

    struct Point {
        int ratio;
        uint64_t gap;
    };
    std::vector<Point> points;
    for (int ratio : cfg.ratios)
        for (uint64_t gap : cfg.pressure_sweep_gaps) points.push_back({ratio, gap});

    std::vector<std::optional<CurvePoint>> results(points.size());
    std::vector<std::string> errors(points.size());

    auto run_point = [&](size_t idx) {
        GeneratorConfig gen;
        gen.streams = cfg.streams;
        gen.read_ratio_pct = points[idx].ratio;
        gen.inter_request_gap_cycles = points[idx].gap;
        std::unique_ptr<MemoryDevice> device = make_device();
        try {
            LoadLoopStats s = run_load_loop(*device, gen, core, cfg.probe_ops, cfg.warmup_ops);
            results[idx] = CurvePoint{s.measured_bandwidth_gbps, s.probe_mean_latency_ns};
        } catch (const SaturationError& e) {
            errors[idx] = e.what();
        }
    };

    int threads = sweep_thread_count(cfg.max_threads, points.size());
    if (threads <= 1) {
        for (size_t i = 0; i < points.size(); ++i) run_point(i);
    } else {
        std::atomic<size_t> next{0};
        std::vector<std::thread> pool;
        pool.reserve(threads);
        for (int t = 0; t < threads; ++t)
            pool.emplace_back([&] {
                for (size_t i = next.fetch_add(1); i < points.size(); i = next.fetch_add(1))
                    run_point(i);
            });
        for (std::thread& t : pool) t.join();
    }

    CurveFamily family;
    family.platform_name = cfg.platform_name;
    family.line_size_bytes = core.line_size_bytes;
    for (size_t i = 0; i < points.size(); ++i) {
        if (!results[i]) {
            family.warnings.push_back("skipped ratio " + std::to_string(points[i].ratio) + " gap " +
                                      std::to_string(points[i].gap) + ": " + errors[i]);
            continue;
        }
        Curve& curve =
            family.curves.try_emplace(points[i].ratio, Curve{points[i].ratio, {}, {}}).first->second;
        curve.points.push_back(*results[i]);
    }
    for (auto& [ratio, curve] : family.curves) curve.rebuild_envelope();
    return family;
}

} // namespace mess
