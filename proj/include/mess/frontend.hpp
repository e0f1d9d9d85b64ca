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

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <vector>

#include "mess/curves.hpp"
#include "mess/devices.hpp"

namespace mess {

enum class TraceStyle { ramulator, dramsim3 };

/// One trace record. Ramulator-style records carry the number of non-memory
/// instructions since the previous memory operation; DRAMsim3-style records
/// carry the cycle at which the request reaches the memory controller.
/// Exactly one of the two fields is meaningful, per trace style.
struct TraceRecord {
    OpKind kind = OpKind::read;
    uint64_t address = 0;
    uint64_t nonmem_instructions = 0; // ramulator style
    uint64_t arrival_cycle = 0;       // dramsim3 style

    friend bool operator==(const TraceRecord&, const TraceRecord&) = default;
};

/// Line grammars:
///   ramulator:  <nonmem:int> <R|W> <addr:hex>
///   dramsim3:   <addr:hex> <READ|WRITE> <cycle:int>
/// Blank lines and lines starting with '#' are skipped. Malformed lines and
/// DRAMsim3 cycle regressions raise ParseError with the 1-based line number.
std::vector<TraceRecord> parse_trace(std::istream& in, TraceStyle style);
std::vector<TraceRecord> parse_trace(const std::filesystem::path& path, TraceStyle style);

/// Canonical form: single spaces, lowercase 0x-prefixed addresses, LF line
/// endings. parse_trace(serialize_trace(t)) == t, and serializing the parse
/// of a canonical trace is byte-identical.
void serialize_trace(const std::vector<TraceRecord>& records, TraceStyle style, std::ostream& out);

/// Minimal core model: in-order issue, MSHR-bounded memory concurrency.
struct CoreConfig {
    double frequency_ghz = 2.0;
    double ipc_nonmem = 1.0;
    uint32_t mshr_entries = 10;
    int line_size_bytes = 64;
    bool reads_blocking = false;

    double cycle_time_ns() const { return 1.0 / frequency_ghz; }
    void validate() const;
};

struct CoreRunStats {
    uint64_t total_cycles = 0;
    uint64_t reads = 0;
    uint64_t writes = 0;
    double achieved_bandwidth_gbps = 0.0;
    double mean_latency_ns = 0.0;
    std::vector<double> latencies_ns;                        // per op, issue order
    std::vector<std::pair<uint64_t, uint64_t>> issue_complete; // per op, when collected

    uint64_t ops() const { return reads + writes; }
};

/// Replays a trace against a memory device.
///
/// Ramulator style: the clock first advances by ceil(nonmem / ipc) cycles,
/// then the operation issues as soon as an MSHR slot is free (the core
/// stalls otherwise). A request occupies its slot for ceil(latency * f)
/// cycles; with reads_blocking, a read additionally stalls retirement until
/// it completes. DRAMsim3 style: requests issue at
/// max(arrival_cycle, first free MSHR cycle).
CoreRunStats run_trace_core(const std::vector<TraceRecord>& records, TraceStyle style,
                            const CoreConfig& core, MemoryDevice& memory,
                            bool collect_per_op = false);

/// Traffic generator: `streams` independent sequential streams, each issuing
/// one operation every `inter_request_gap_cycles`, read/write interleaved in
/// a fixed pattern that realizes `read_ratio_pct` exactly over each pattern
/// period, MSHR-bounded per stream.
struct GeneratorConfig {
    uint32_t streams = 1;
    int read_ratio_pct = 100;
    uint64_t inter_request_gap_cycles = 0;
    uint64_t duration_ops = 10000; // per stream

    void validate() const;
};

/// Dependent-load latency probe: duration_ops strictly serialized reads
/// (never more than one outstanding). Returns the arithmetic mean of the
/// observed latencies.
double run_probe(MemoryDevice& memory, const CoreConfig& core, uint64_t duration_ops);

/// Runs the generator alone and returns the aggregate achieved bandwidth.
double run_generator(MemoryDevice& memory, const GeneratorConfig& gen, const CoreConfig& core);

/// One characterization sweep: for every (read ratio, gap) pair, run the
/// latency probe concurrently with the traffic generators against a fresh
/// device instance and record (total achieved bandwidth, probe mean latency)
/// as one curve point. Generators run alone for `warmup_ops` device accesses
/// before the probe starts sampling.
struct CharacterizeConfig {
    std::vector<int> ratios;
    std::vector<uint64_t> pressure_sweep_gaps; // measurement order: lowest pressure first
    uint32_t streams = 8;
    uint64_t probe_ops = 1000;
    uint64_t warmup_ops = 30000;
    std::string platform_name = "characterized";
    int max_threads = 0; // 0: hardware concurrency, capped by MESS_THREADS
};

CurveFamily characterize(const DeviceFactory& make_device, const CharacterizeConfig& cfg,
                         const CoreConfig& core);

/// Scheduler instrumentation shared by probe/generator runs; used by the
/// property suites.
struct LoadLoopStats {
    double probe_mean_latency_ns = 0.0;
    uint64_t probe_ops = 0;
    uint32_t probe_max_outstanding = 0;
    uint32_t stream_max_outstanding = 0;
    uint64_t total_ops = 0;
    uint64_t generator_reads = 0;
    uint64_t generator_writes = 0;
    double measured_bandwidth_gbps = 0.0; // all traffic, probe included
};

/// The shared probe+generator event loop. `probe_ops == 0` runs generators
/// alone for their configured duration; `gen.streams == 0` runs the probe
/// alone. Device saturation errors propagate to the caller.
LoadLoopStats run_load_loop(MemoryDevice& memory, const GeneratorConfig& gen,
                            const CoreConfig& core, uint64_t probe_ops, uint64_t warmup_ops);

} // namespace mess
