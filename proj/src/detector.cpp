#include "stormwatch/detector.hpp"

#include <algorithm>

namespace stormwatch::detect {

std::string to_string(Verdict v) {
    switch (v) {
    case Verdict::Attack: return "attack";
    case Verdict::HighLoad: return "highload";
    default: return "pending";
    }
}

DetectorConfig DetectorConfig::defaults() {
    DetectorConfig cfg;
    cfg.msg3_pot.window_len = 180;
    cfg.msg3_pot.gap_len = 30;
    cfg.msg3_pot.q = 3e-4;
    cfg.msg3_pot.init_quantile = 0.98;
    cfg.msg3_pot.direction = evt::TailDirection::UpperTail;

    cfg.r1_pot.window_len = 18000;
    cfg.r1_pot.gap_len = 60;
    cfg.r1_pot.q = 1e-5;
    cfg.r1_pot.init_quantile = 0.001;
    cfg.r1_pot.direction = evt::TailDirection::LowerTail;
    cfg.r1_pot.domain_min = 0.0;
    cfg.r1_pot.domain_max = 1.0;
    return cfg;
}

void DetectorConfig::validate() const {
    msg3_pot.validate();
    r1_pot.validate();
    if (confirm_count < 1) throw std::invalid_argument("confirm_count must be >= 1");
    if (!(r2_highload_level > 0.0 && r2_highload_level <= 1.0))
        throw std::invalid_argument("r2_highload_level must lie in (0,1]");
    if (n_max <= 0) throw std::invalid_argument("n_max must be positive");
}

void R2Differentiator::feed(std::int64_t ts, double r2) {
    if (r2 < high_water_ - 1e-12) monotone_ = false;
    high_water_ = std::max(high_water_, r2);

    const bool level_reached = r2 >= level_;
    const bool within_horizon = ts - onset_ts_ <= horizon_s_;
    switch (verdict_) {
    case Verdict::Pending:
        if (level_reached && (monotone_ || !within_horizon)) {
            verdict_ = Verdict::HighLoad;
        } else if (!within_horizon) {
            verdict_ = Verdict::Attack;
        }
        break;
    case Verdict::Attack:
        if (level_reached) verdict_ = Verdict::HighLoad;
        break;
    case Verdict::HighLoad:
        break;
    }
}

Verdict differentiate(const DetectorConfig& cfg,
                      std::span<const std::pair<std::int64_t, double>> r2_series) {
    if (r2_series.empty()) return Verdict::Attack;
    R2Differentiator d(cfg.r2_highload_level, cfg.r2_horizon_s, r2_series.front().first);
    for (const auto& [ts, r2] : r2_series) d.feed(ts, r2);
    return d.close();
}

Detector::Detector(DetectorConfig cfg)
    : cfg_(cfg), msg3_pot_(cfg.msg3_pot), r1_pot_(cfg.r1_pot) {
    cfg_.validate();
}

Decision Detector::step(const synth::TrafficSample& s) {
    Decision d;
    d.ts = s.ts;
    d.msg3 = s.msg3;
    d.r1 = evt::completion_ratio(s.msg3, s.msg5);

    if (!bootstrapped()) {
        msg3_pot_.observe(static_cast<double>(s.msg3));
        // zero ratios stay out of the baseline from the start
        if (d.r1 > 0.0) r1_pot_.observe(d.r1);
        d.bootstrap = !bootstrapped();
        if (d.bootstrap) return d;
        // Both machines became ready on this sample; fall through so the
        // thresholds appear in the log, but the sample itself was bootstrap
        // data and gets no classification.
        d.th_msg3 = msg3_pot_.anomaly_threshold();
        d.th_r1 = r1_pot_.anomaly_threshold();
        d.bootstrap = true;
        return d;
    }

    const bool alert_open = active_ >= 0;
    const bool excluding = alert_open && cfg_.exclude_during_alert;
    evt::SampleClass c3;
    const evt::SampleClass cr = r1_pot_.classify(d.r1);
    if (excluding) {
        c3 = msg3_pot_.classify(static_cast<double>(s.msg3));
    } else {
        c3 = *msg3_pot_.observe(static_cast<double>(s.msg3));
    }
    const bool positive_now = c3 == evt::SampleClass::Anomaly && cr == evt::SampleClass::Anomaly;
    // The anomaly verdict is the conjunction of both features, so a second
    // where only the ratio dips keeps feeding the ratio baseline; without
    // this the near-saturated ratio window loses its entire lower tail to
    // exclusion and the threshold can never come back down. Fully failed
    // seconds (ratio exactly zero) are the storm signature itself and are
    // never ingested.
    if (!excluding && !positive_now && d.r1 > 0.0) r1_pot_.observe_unfiltered(d.r1);

    d.th_msg3 = msg3_pot_.anomaly_threshold();
    d.th_r1 = r1_pot_.anomaly_threshold();
    d.msg3_class = c3;
    d.r1_class = cr;
    d.positive = positive_now;

    const double r2 = std::min(1.0, static_cast<double>(s.n_bue) / cfg_.n_max);

    if (d.positive) {
        run_neg_ = 0;
        if (run_pos_ == 0) {
            run_start_ts_ = s.ts;
            run_r2_.clear();
        }
        ++run_pos_;
        run_r2_.emplace_back(s.ts, r2);
        if (active_ < 0 && run_pos_ >= cfg_.confirm_count) open_alert(s.ts);
        if (active_ >= 0) alerts_[static_cast<std::size_t>(active_)].last_positive_ts = s.ts;
    } else {
        run_pos_ = 0;
        if (active_ >= 0) {
            ++run_neg_;
            if (run_neg_ >= cfg_.confirm_count) close_alert(s.ts);
        } else {
            run_neg_ = 0;
        }
    }

    if (active_ >= 0) {
        auto& alert = alerts_[static_cast<std::size_t>(active_)];
        if (alert.r2_series.empty() || alert.r2_series.back().first < s.ts) {
            alert.r2_series.emplace_back(s.ts, r2);
            differ_->feed(s.ts, r2);
            alert.verdict = differ_->verdict();
        }
        d.alert_id = alert.id;
        d.verdict = alert.verdict;
    }
    return d;
}

void Detector::open_alert(std::int64_t ts) {
    Alert a;
    a.id = static_cast<int>(alerts_.size()) + 1;
    a.onset_ts = run_start_ts_;
    a.detect_ts = ts;
    a.last_positive_ts = ts;
    alerts_.push_back(std::move(a));
    active_ = static_cast<int>(alerts_.size()) - 1;
    differ_.emplace(cfg_.r2_highload_level, cfg_.r2_horizon_s, run_start_ts_);
    auto& alert = alerts_.back();
    for (const auto& [rts, r2] : run_r2_) {
        alert.r2_series.emplace_back(rts, r2);
        differ_->feed(rts, r2);
    }
    alert.verdict = differ_->verdict();
}

void Detector::close_alert(std::int64_t ts) {
    auto& alert = alerts_[static_cast<std::size_t>(active_)];
    alert.close_ts = ts;
    alert.verdict = differ_->close();
    active_ = -1;
    differ_.reset();
    run_neg_ = 0;
}

void Detector::finish(std::int64_t last_ts) {
    if (active_ >= 0) close_alert(last_ts);
}

} // namespace stormwatch::detect
