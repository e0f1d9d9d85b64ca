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

#include "mess/devices.hpp"

#include <algorithm>
#include <cassert>

namespace mess {

Md1Device::Md1Device(double service_bandwidth_gbps, double base_latency_ns, int line_size_bytes,
                     double cycle_time_ns)
    : base_latency_ns_(base_latency_ns),
      service_time_ns_(line_size_bytes / service_bandwidth_gbps),
      cycle_time_ns_(cycle_time_ns) {
    assert(service_bandwidth_gbps > 0.0 && base_latency_ns > 0.0 && line_size_bytes > 0);
}

double Md1Device::latency_ns(const MemoryRequest& request) {
    double arrival_ns = request.issue_cycle * cycle_time_ns_;
    if (arrival_ns < last_arrival_ns_)
        throw ProtocolError("request arrival regressed: queue requires non-decreasing issue cycles");
    last_arrival_ns_ = arrival_ns;

    double completion_ns = std::max(arrival_ns, last_completion_ns_) + service_time_ns_;
    last_completion_ns_ = completion_ns;
    return base_latency_ns_ + (completion_ns - arrival_ns);
}

AnalyticDevice::AnalyticDevice(double l0_ns, double k_ns, double bmax_gbps, int line_size_bytes,
                               double cycle_time_ns, size_t rate_window)
    : l0_ns_(l0_ns),
      k_ns_(k_ns),
      bmax_gbps_(bmax_gbps),
      line_size_bytes_(line_size_bytes),
      cycle_time_ns_(cycle_time_ns),
      rate_window_(std::max<size_t>(rate_window, 2)) {
    assert(l0_ns > 0.0 && k_ns > 0.0 && bmax_gbps > 0.0 && line_size_bytes > 0);
    arrivals_ns_.resize(rate_window_);
}

double AnalyticDevice::latency_at(double bandwidth_gbps) const {
    assert(bandwidth_gbps >= 0.0);
    if (bandwidth_gbps >= bmax_gbps_)
        throw SaturationError("bandwidth at or beyond the device pole");
    return l0_ns_ + k_ns_ * bandwidth_gbps / (bmax_gbps_ - bandwidth_gbps);
}

double AnalyticDevice::offered_bandwidth() const {
    size_t n = std::min(arrival_count_, rate_window_);
    if (n < 2) return 0.0;
    double newest = arrivals_ns_[(arrival_count_ - 1) % rate_window_];
    double oldest = arrivals_ns_[(arrival_count_ - n) % rate_window_];
    double span_ns = newest - oldest;
    if (span_ns <= 0.0) {
        // A partially filled window of simultaneous arrivals carries no rate
        // information yet; a full window of them is a sustained burst.
        return n < rate_window_ ? 0.0 : bmax_gbps_;
    }
    return (n - 1) * static_cast<double>(line_size_bytes_) / span_ns;
}

double AnalyticDevice::latency_ns(const MemoryRequest& request) {
    double arrival_ns = request.issue_cycle * cycle_time_ns_;
    arrivals_ns_[arrival_count_ % rate_window_] = arrival_ns;
    ++arrival_count_;
    return latency_at(offered_bandwidth());
}

} // namespace mess
