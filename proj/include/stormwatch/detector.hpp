#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "stormwatch/evt.hpp"
#include "stormwatch/traffic.hpp"

namespace stormwatch::detect {

enum class Verdict { Pending, Attack, HighLoad };

std::string to_string(Verdict v);

struct DetectorConfig {
    evt::PotConfig msg3_pot;
    evt::PotConfig r1_pot;
    int confirm_count = 2;
    double r2_highload_level = 0.99;
    int r2_horizon_s = 30;
    int n_max = 300;
    // Samples seen while an alert is open stay out of both windows so a
    // plateau cannot drag the thresholds toward the attack.
    bool exclude_during_alert = true;

    static DetectorConfig defaults();
    void validate() const;
};

struct Alert {
    int id = 0;
    std::int64_t onset_ts = 0;         // first second of the confirming run
    std::int64_t detect_ts = 0;        // second the confirmation completed
    std::int64_t last_positive_ts = 0; // end of the anomalous span
    std::optional<std::int64_t> close_ts;
    Verdict verdict = Verdict::Pending;
    std::vector<std::pair<std::int64_t, double>> r2_series;
};

// Attack vs high-load decision over the utilisation series of one alert.
// High-load when r2 climbs monotonically to the level within the horizon;
// attack provisionally once the horizon passes, upgradable if the level is
// still reached while the alert is open.
class R2Differentiator {
public:
    R2Differentiator(double level, int horizon_s, std::int64_t onset_ts)
        : level_(level), horizon_s_(horizon_s), onset_ts_(onset_ts) {}

    void feed(std::int64_t ts, double r2);
    // Pending collapses to Attack when the alert closes.
    Verdict close() const {
        return verdict_ == Verdict::Pending ? Verdict::Attack : verdict_;
    }
    Verdict verdict() const { return verdict_; }

private:
    double level_;
    int horizon_s_;
    std::int64_t onset_ts_;
    double high_water_ = -1.0;
    bool monotone_ = true;
    Verdict verdict_ = Verdict::Pending;
};

// Convenience wrapper over a complete series (onset taken from the first
// element).
Verdict differentiate(const DetectorConfig& cfg,
                      std::span<const std::pair<std::int64_t, double>> r2_series);

struct Decision {
    std::int64_t ts = 0;
    int msg3 = 0;
    double r1 = 1.0;
    double th_msg3 = 0.0;
    double th_r1 = 0.0;
    bool bootstrap = false;
    evt::SampleClass msg3_class = evt::SampleClass::Normal;
    evt::SampleClass r1_class = evt::SampleClass::Normal;
    bool positive = false;
    int alert_id = -1;
    Verdict verdict = Verdict::Pending;
};

// Streaming two-feature detector: a second is positive only when the Msg3
// count and the completion ratio are both classified anomalous, an alert
// needs confirm_count consecutive positives to open and the same number of
// negatives to close, and an open alert is classified attack vs high-load
// from the connected-UE utilisation.
class Detector {
public:
    explicit Detector(DetectorConfig cfg);

    Decision step(const synth::TrafficSample& s);

    // Closes a still-open alert at end of stream.
    void finish(std::int64_t last_ts);

    bool bootstrapped() const { return msg3_pot_.ready() && r1_pot_.ready(); }
    const std::vector<Alert>& alerts() const { return alerts_; }
    const evt::PotEstimator& msg3_estimator() const { return msg3_pot_; }
    const evt::PotEstimator& r1_estimator() const { return r1_pot_; }

private:
    void open_alert(std::int64_t ts);
    void close_alert(std::int64_t ts);

    DetectorConfig cfg_;
    evt::PotEstimator msg3_pot_;
    evt::PotEstimator r1_pot_;

    int run_pos_ = 0;
    int run_neg_ = 0;
    std::int64_t run_start_ts_ = 0;
    std::vector<std::pair<std::int64_t, double>> run_r2_;

    int active_ = -1; // index into alerts_
    std::optional<R2Differentiator> differ_;
    std::vector<Alert> alerts_;
};

} // namespace stormwatch::detect
