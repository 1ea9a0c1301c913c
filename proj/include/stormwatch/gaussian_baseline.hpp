#pragma once

#include <array>
#include <span>
#include <stdexcept>
#include <vector>

#include "stormwatch/detector.hpp"
#include "stormwatch/traffic.hpp"

namespace stormwatch::gauss {

constexpr int kPeriodsPerDay = 12; // two-hour slots
constexpr int kPeriodSeconds = 7200;

struct InsufficientData : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Static mean + 3*stddev thresholds per two-hour slot of the day.
struct PeriodThresholds {
    std::array<double, kPeriodsPerDay> mean{};
    std::array<double, kPeriodsPerDay> stddev{};
    std::array<double, kPeriodsPerDay> threshold{};

    int slot_of(std::int64_t ts) const {
        return static_cast<int>((ts % synth::kSecondsPerDay) / kPeriodSeconds);
    }
};

// Fits the twelve slots from one reference day of samples (anomalous
// seconds already removed by the caller). Every slot needs at least two
// samples for the sample standard deviation.
PeriodThresholds fit_baseline(std::span<const synth::TrafficSample> reference_day);

// Msg3-only static-threshold detector with the same confirmation buffering
// as the adaptive detector; alerts carry no attack/high-load verdict.
struct StaticResult {
    std::vector<detect::Decision> decisions;
    std::vector<detect::Alert> alerts;
};

StaticResult detect_static(const PeriodThresholds& th,
                           std::span<const synth::TrafficSample> trace,
                           int confirm_count);

} // namespace stormwatch::gauss
