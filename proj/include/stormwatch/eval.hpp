#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "stormwatch/detector.hpp"
#include "stormwatch/traffic.hpp"

namespace stormwatch::eval {

struct RangeMismatch : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct EventOutcome {
    std::int64_t period_start = 0;
    synth::PeriodKind kind = synth::PeriodKind::Normal;
    double rate = 0.0;
    bool detected = false;
    std::int64_t detect_ts = 0;
    double latency_s = 0.0;
    detect::Verdict verdict = detect::Verdict::Pending;
};

struct EvalReport {
    long tp = 0, fp = 0, tn = 0, fn = 0;
    double accuracy = 0.0;
    double precision = 1.0;
    bool precision_defined = false;
    double recall = 1.0;
    bool recall_defined = false;
    double mean_latency_s = 0.0;
    bool latency_defined = false;
    long attack_as_highload = 0;
    long highload_as_attack = 0;
    long scored_periods = 0;

    // per-second diagnostics
    long sec_positive_in_anomalous = 0;
    long sec_positive_in_normal = 0;
    long sec_anomalous = 0;
    long sec_normal = 0;

    std::vector<EventOutcome> events;
};

struct ScoreConfig {
    // Periods starting before this timestamp are not scored (0 = score all);
    // used to keep detector warm-up and baseline fit data out of the metrics.
    std::int64_t score_from_ts = 0;
};

// Period-level scoring. An anomalous period counts as detected when an
// alert's anomalous span overlaps it; a normal period only counts as a
// false positive when the overlapping alert is not explained by an adjacent
// anomalous period (detection tails crossing a boundary attribute to the
// episode that caused them). Latency is measured from the period start to
// the confirming detection.
EvalReport score(std::span<const synth::ScenarioLabel> labels,
                 std::span<const detect::Decision> decisions,
                 std::span<const detect::Alert> alerts,
                 const ScoreConfig& cfg = {});

} // namespace stormwatch::eval
