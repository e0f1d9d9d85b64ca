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
#include <functional>
#include <memory>
#include <vector>

#include "mess/errors.hpp"

namespace mess {

enum class OpKind : uint8_t { read, write };

/// One memory operation as seen by a device. `issue_cycle` is in core
/// clock cycles and must be non-decreasing per issuing stream.
struct MemoryRequest {
    OpKind kind = OpKind::read;
    uint64_t address = 0;
    uint64_t issue_cycle = 0;
};

/// The pluggable memory-device contract: anything that can answer "what is
/// the latency of this request, now". Devices convert cycles to wall time
/// with the cycle period they were constructed with. A device instance is
/// owned by a single simulation; concurrent sweeps use one instance each.
class MemoryDevice {
public:
    virtual ~MemoryDevice() = default;
    virtual double latency_ns(const MemoryRequest& request) = 0;
};

using DeviceFactory = std::function<std::unique_ptr<MemoryDevice>()>;

/// Parameters for the reference devices.
struct DeviceConfig {
    double fixed_latency_ns = 89.0;      // fixed-latency device
    double service_bandwidth_gbps = 128; // M/D/1 server rate
    double base_latency_ns = 89.0;       // M/D/1 latency floor
    double l0_ns = 89.0;                 // analytic device: unloaded latency
    double k_ns = 31.2;                  // analytic device: contention scale
    double bmax_gbps = 128.0;            // analytic device: bandwidth pole
};

/// Constant latency regardless of load. Characterizing it yields a flat
/// curve whose achieved bandwidth is limited only by frontend concurrency.
class FixedLatencyDevice final : public MemoryDevice {
public:
    explicit FixedLatencyDevice(double latency_ns) : latency_ns_(latency_ns) {}
    double latency_ns(const MemoryRequest&) override { return latency_ns_; }

private:
    double latency_ns_;
};

/// Single-server FIFO queue with deterministic service time
/// D = line_size / service_bandwidth. Reads and writes share the server.
class Md1Device final : public MemoryDevice {
public:
    Md1Device(double service_bandwidth_gbps, double base_latency_ns, int line_size_bytes,
              double cycle_time_ns);

    /// base + wait + service; throws ProtocolError on arrival regression.
    double latency_ns(const MemoryRequest& request) override;

    double service_time_ns() const { return service_time_ns_; }

private:
    double base_latency_ns_;
    double service_time_ns_;
    double cycle_time_ns_;
    double last_arrival_ns_ = -1.0;
    double last_completion_ns_ = 0.0;
};

/// Closed-form loaded-latency model latency(b) = L0 + k*b / (Bmax - b),
/// strictly increasing and convex on [0, Bmax). In a simulation loop it
/// estimates its offered bandwidth from recent arrivals and answers with the
/// closed form at that point, which makes it an independent oracle for the
/// feedback controller.
class AnalyticDevice final : public MemoryDevice {
public:
    AnalyticDevice(double l0_ns, double k_ns, double bmax_gbps, int line_size_bytes,
                   double cycle_time_ns, size_t rate_window = 64);

    /// The closed form itself; throws SaturationError for b >= Bmax.
    double latency_at(double bandwidth_gbps) const;

    double latency_ns(const MemoryRequest& request) override;

    double bmax_gbps() const { return bmax_gbps_; }

private:
    double offered_bandwidth() const;

    double l0_ns_;
    double k_ns_;
    double bmax_gbps_;
    int line_size_bytes_;
    double cycle_time_ns_;
    size_t rate_window_;
    std::vector<double> arrivals_ns_; // ring buffer of recent arrival times
    size_t arrival_count_ = 0;
};

} // namespace mess
