#include "stormwatch/gaussian_baseline.hpp"

#include <cmath>
#include <limits>

namespace stormwatch::gauss {

PeriodThresholds fit_baseline(std::span<const synth::TrafficSample> reference_day) {
    std::array<double, kPeriodsPerDay> sum{};
    std::array<double, kPeriodsPerDay> sum_sq{};
    std::array<long, kPeriodsPerDay> count{};

    PeriodThresholds th;
    for (const auto& s : reference_day) {
        const int slot = th.slot_of(s.ts);
        sum[static_cast<std::size_t>(slot)] += s.msg3;
        sum_sq[static_cast<std::size_t>(slot)] += static_cast<double>(s.msg3) * s.msg3;
        ++count[static_cast<std::size_t>(slot)];
    }
    for (int p = 0; p < kPeriodsPerDay; ++p) {
        const auto i = static_cast<std::size_t>(p);
        if (count[i] < 2)
            throw InsufficientData("slot " + std::to_string(p) + " has fewer than 2 samples");
        const double n = static_cast<double>(count[i]);
        const double mu = sum[i] / n;
        const double var = std::max(0.0, (sum_sq[i] - n * mu * mu) / (n - 1.0));
        th.mean[i] = mu;
        th.stddev[i] = std::sqrt(var);
        th.threshold[i] = mu + 3.0 * th.stddev[i];
    }
    return th;
}

StaticResult detect_static(const PeriodThresholds& th,
                           std::span<const synth::TrafficSample> trace,
                           int confirm_count) {
    StaticResult res;
    res.decisions.reserve(trace.size());

    int run_pos = 0;
    int run_neg = 0;
    std::int64_t run_start = 0;
    int active = -1;

    for (const auto& s : trace) {
        const double limit = th.threshold[static_cast<std::size_t>(th.slot_of(s.ts))];
        detect::Decision d;
        d.ts = s.ts;
        d.msg3 = s.msg3;
        d.r1 = evt::completion_ratio(s.msg3, s.msg5);
        d.th_msg3 = limit;
        d.th_r1 = std::numeric_limits<double>::quiet_NaN();
        d.positive = s.msg3 > limit;
        d.msg3_class = d.positive ? evt::SampleClass::Anomaly : evt::SampleClass::Normal;

        if (d.positive) {
            run_neg = 0;
            if (run_pos == 0) run_start = s.ts;
            ++run_pos;
            if (active < 0 && run_pos >= confirm_count) {
                detect::Alert a;
                a.id = static_cast<int>(res.alerts.size()) + 1;
                a.onset_ts = run_start;
                a.detect_ts = s.ts;
                a.last_positive_ts = s.ts;
                res.alerts.push_back(a);
                active = static_cast<int>(res.alerts.size()) - 1;
            }
            if (active >= 0)
                res.alerts[static_cast<std::size_t>(active)].last_positive_ts = s.ts;
        } else {
            run_pos = 0;
            if (active >= 0 && ++run_neg >= confirm_count) {
                res.alerts[static_cast<std::size_t>(active)].close_ts = s.ts;
                active = -1;
                run_neg = 0;
            }
        }
        if (active >= 0) d.alert_id = res.alerts[static_cast<std::size_t>(active)].id;
        res.decisions.push_back(d);
    }
    if (active >= 0) res.alerts[static_cast<std::size_t>(active)].close_ts = trace.back().ts;
    return res;
}

} // namespace stormwatch::gauss
