#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "stormwatch/rng.hpp"
#include "stormwatch/storm_model.hpp"

namespace stormwatch::synth {

constexpr int kBinSeconds = 900;
constexpr int kSecondsPerDay = 86400;

// 2025-01-07 00:00 UTC, a Tuesday; four weekdays fit before the weekend.
constexpr std::int64_t kDefaultStartTs = 1736208000;

struct TrafficSample {
    std::int64_t ts = 0;
    int msg3 = 0;
    int msg5 = 0;
    int n_bue = 0;
};

struct AggregateBin {
    std::int64_t start = 0;
    long msg3_total = 0;
    long msg5_total = 0;
    double n_bue_avg = 0.0;
};

enum class PeriodKind { Normal, Attack, HighLoad };

struct ScenarioLabel {
    std::int64_t period_start = 0;
    PeriodKind kind = PeriodKind::Normal;
    double rate = 0.0; // injected Msg3/s, 0 for normal periods
};

// Two-bump weekday rate curve over a nighttime floor. Amplitudes were fitted
// once against the target whole-trace statistics (see config defaults); the
// same curve scaled by `ue_per_rate` drives the connected-UE count.
struct DiurnalProfile {
    double floor_rate = 0.55;
    double morning_amp = 7.2;
    double morning_center_h = 8.8;
    double morning_width_h = 1.25;
    double evening_amp = 8.4;
    double evening_center_h = 19.6;
    double evening_width_h = 1.6;
    double scale = 1.0;
    double ue_per_rate = 18.0;
    int ue_cap = 175;
    double failure_per_msg3 = 0.0032;
    // day-to-day amplitude variation; each synthesized day draws one factor
    // uniformly from [1-day_jitter, 1+day_jitter]
    double day_jitter = 0.05;

    double rate_at(double hour_of_day) const;
};

// Truncated-Poisson resampling of one 15-minute aggregate into 900
// per-second counts: mean msg3_total/900, upper bound 2x the mean rounded
// up, out-of-range draws rejected.
std::vector<int> resample_msg3(const AggregateBin& bin, Rng& rng);

// (msg3_total - msg5_total) / 900, clamped to [0,1].
double failure_probability(const AggregateBin& bin);

// Per second at most one failed procedure: msg5 = msg3 - Bernoulli(p_fail),
// forced to msg3 when msg3 == 0.
std::vector<int> resample_msg5(std::span<const int> msg3_series, double p_fail, Rng& rng);

struct Baseline {
    std::vector<TrafficSample> samples;
    std::vector<AggregateBin> bins;
};

// Builds `days` days of 15-minute aggregates from the profile and resamples
// them to seconds.
Baseline synth_baseline(const DiurnalProfile& profile, int days, Rng& rng,
                        std::int64_t start_ts = kDefaultStartTs);

enum class RatePolicy {
    UniformMinMax,      // U[min overload rate, rate_max]
    TargetAvailability, // rate that degrades availability to the target
    FractionOfMin,      // U[lo, hi] x min overload rate
};

struct ScenarioConfig {
    int days = 4;
    int period_len_s = 300;

    // Target label counts, matched in expectation after the adjacency repair.
    int target_normal = 737;
    int target_attack = 211;
    int target_highload = 204;

    // Leading periods kept clean so detectors can bootstrap on them.
    int clean_lead_periods = 61;

    RatePolicy rate_policy = RatePolicy::UniformMinMax;
    double rate_max = 100.0;
    double target_availability = 0.95;
    double min_frac_lo = 0.5;
    double min_frac_hi = 1.0;
    bool attacks_only = false;

    model::GnbParams gnb;

    // When set, ignores the random labelling and injects exactly this one.
    std::optional<model::EpisodeSpec> single_episode;
};

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct Scenario {
    std::vector<TrafficSample> trace;
    std::vector<ScenarioLabel> labels;
};

// Labels 5-minute periods, draws per-episode rates, renders the storm-model
// overlays and merges them onto the baseline.
Scenario build_scenario(const Baseline& baseline, const ScenarioConfig& cfg, Rng& rng);

} // namespace stormwatch::synth
