#include "stormwatch/traffic.hpp"

#include <algorithm>
#include <cmath>

namespace stormwatch::synth {

double DiurnalProfile::rate_at(double hour_of_day) const {
    auto bump = [](double h, double center, double width) {
        const double z = (h - center) / width;
        return std::exp(-0.5 * z * z);
    };
    const double lam = floor_rate +
                       morning_amp * bump(hour_of_day, morning_center_h, morning_width_h) +
                       evening_amp * bump(hour_of_day, evening_center_h, evening_width_h);
    return scale * lam;
}

std::vector<int> resample_msg3(const AggregateBin& bin, Rng& rng) {
    std::vector<int> out(kBinSeconds, 0);
    if (bin.msg3_total <= 0) return out;
    const double lambda = static_cast<double>(bin.msg3_total) / kBinSeconds;
    const int bound = static_cast<int>(std::ceil(2.0 * lambda));
    for (int& v : out) v = rng.truncated_poisson(lambda, bound);
    return out;
}

double failure_probability(const AggregateBin& bin) {
    const double p = static_cast<double>(bin.msg3_total - bin.msg5_total) / kBinSeconds;
    return std::clamp(p, 0.0, 1.0);
}

std::vector<int> resample_msg5(std::span<const int> msg3_series, double p_fail, Rng& rng) {
    std::vector<int> out(msg3_series.size(), 0);
    for (std::size_t i = 0; i < msg3_series.size(); ++i) {
        const int m = msg3_series[i];
        if (m == 0) {
            out[i] = 0;
            continue;
        }
        out[i] = m - (rng.bernoulli(p_fail) ? 1 : 0);
    }
    return out;
}

Baseline synth_baseline(const DiurnalProfile& profile, int days, Rng& rng,
                        std::int64_t start_ts) {
    if (days <= 0) throw std::invalid_argument("days must be positive");
    Baseline base;
    const int bins_per_day = kSecondsPerDay / kBinSeconds;
    base.bins.reserve(static_cast<std::size_t>(days) * bins_per_day);
    base.samples.reserve(static_cast<std::size_t>(days) * kSecondsPerDay);

    for (int d = 0; d < days; ++d) {
        const double day_factor =
            1.0 + profile.day_jitter * rng.uniform(-1.0, 1.0);
        for (int b = 0; b < bins_per_day; ++b) {
            AggregateBin bin;
            bin.start = start_ts + static_cast<std::int64_t>(d) * kSecondsPerDay +
                        static_cast<std::int64_t>(b) * kBinSeconds;
            const double hour = (b + 0.5) * kBinSeconds / 3600.0;
            const double lam = profile.rate_at(hour) * day_factor;
            bin.msg3_total = std::lround(lam * kBinSeconds);
            const double expected_failures = profile.failure_per_msg3 *
                                             static_cast<double>(bin.msg3_total);
            long failures = std::min<long>(rng.poisson(expected_failures), bin.msg3_total);
            bin.msg5_total = bin.msg3_total - failures;
            bin.n_bue_avg = std::min<double>(profile.ue_cap, profile.ue_per_rate * lam);
            base.bins.push_back(bin);

            const auto msg3 = resample_msg3(bin, rng);
            const auto msg5 = resample_msg5(msg3, failure_probability(bin), rng);
            const int n_bue = static_cast<int>(std::lround(bin.n_bue_avg));
            for (int s = 0; s < kBinSeconds; ++s) {
                TrafficSample ts;
                ts.ts = bin.start + s;
                ts.msg3 = msg3[static_cast<std::size_t>(s)];
                ts.msg5 = msg5[static_cast<std::size_t>(s)];
                ts.n_bue = n_bue;
                base.samples.push_back(ts);
            }
        }
    }
    return base;
}

namespace {

// Load snapshot for a trace second; the Msg3 rate comes from the bin so the
// overlay cycle math is not driven by single-second noise.
model::BaselineSecond load_at(const Baseline& base, std::size_t idx) {
    const auto& s = base.samples[idx];
    const std::size_t bin_idx = idx / kBinSeconds;
    model::BaselineSecond b;
    b.ts = s.ts;
    b.state.n_bue = s.n_bue;
    b.state.r_bue = static_cast<double>(base.bins[bin_idx].msg3_total) / kBinSeconds;
    return b;
}

double draw_rate(const ScenarioConfig& cfg, const model::LoadState& st, Rng& rng) {
    const double r_min = model::min_overload_rate(cfg.gnb, st);
    switch (cfg.rate_policy) {
    case RatePolicy::UniformMinMax:
        return rng.uniform(std::min(r_min, cfg.rate_max), cfg.rate_max);
    case RatePolicy::TargetAvailability:
        return model::rate_for_target_availability(cfg.gnb, st, cfg.target_availability);
    case RatePolicy::FractionOfMin:
        return std::max(1.0, rng.uniform(cfg.min_frac_lo, cfg.min_frac_hi) * r_min);
    }
    return cfg.rate_max;
}

void apply_overlay(std::vector<TrafficSample>& trace, std::size_t offset,
                   std::span<const model::OverlaySample> overlay) {
    for (const auto& o : overlay) {
        auto& s = trace[offset++];
        s.msg3 += o.msg3_extra;
        s.msg5 = o.rejecting ? 0 : s.msg5 + o.msg5_extra;
        if (o.n_bue_override) s.n_bue = *o.n_bue_override;
    }
}

} // namespace

Scenario build_scenario(const Baseline& baseline, const ScenarioConfig& cfg, Rng& rng) {
    const std::size_t total_s = baseline.samples.size();
    if (cfg.period_len_s <= 0 || total_s % static_cast<std::size_t>(cfg.period_len_s) != 0)
        throw ConfigError("trace length is not a whole number of periods");
    const std::size_t n_periods = total_s / static_cast<std::size_t>(cfg.period_len_s);
    const std::int64_t ts0 = baseline.samples.front().ts;

    Scenario sc;
    sc.trace = baseline.samples;
    sc.labels.resize(n_periods);
    for (std::size_t i = 0; i < n_periods; ++i) {
        sc.labels[i].period_start = ts0 + static_cast<std::int64_t>(i) * cfg.period_len_s;
        sc.labels[i].kind = PeriodKind::Normal;
    }

    if (cfg.single_episode) {
        const auto& ep = *cfg.single_episode;
        const std::int64_t off = ep.start - ts0;
        if (off < 0 || off % cfg.period_len_s != 0 ||
            ep.duration_s % cfg.period_len_s != 0 ||
            static_cast<std::size_t>(off + ep.duration_s) > total_s)
            throw ConfigError("single episode must align with whole periods inside the trace");
        std::vector<model::BaselineSecond> slice;
        slice.reserve(static_cast<std::size_t>(ep.duration_s));
        for (int k = 0; k < ep.duration_s; ++k)
            slice.push_back(load_at(baseline, static_cast<std::size_t>(off + k)));
        const auto overlay = model::render_overlay(cfg.gnb, slice, ep);
        apply_overlay(sc.trace, static_cast<std::size_t>(off), overlay);
        const auto kind = ep.kind == model::EpisodeKind::Attack ? PeriodKind::Attack
                                                                : PeriodKind::HighLoad;
        for (int k = 0; k < ep.duration_s / cfg.period_len_s; ++k) {
            auto& lab = sc.labels[static_cast<std::size_t>(off / cfg.period_len_s + k)];
            lab.kind = kind;
            lab.rate = ep.rate;
        }
        return sc;
    }

    // Random labelling. Draw probabilities are inflated so that the expected
    // counts after the later-of-two-adjacent demotion match the targets:
    // with i.i.d. anomaly probability a, the kept fraction is a/(1+a).
    const int total_target = cfg.target_normal + cfg.target_attack + cfg.target_highload;
    if (total_target <= 0) throw ConfigError("label targets must be positive");
    const double anom_target =
        static_cast<double>(cfg.target_attack + cfg.target_highload) / total_target;
    const std::size_t lead = std::min<std::size_t>(
        static_cast<std::size_t>(std::max(cfg.clean_lead_periods, 1)), n_periods);
    const double usable = static_cast<double>(n_periods - lead);
    if (usable <= 0.0) throw ConfigError("no periods left after the clean lead");
    const double kept = anom_target * static_cast<double>(n_periods) / usable;
    if (kept >= 0.5)
        throw ConfigError("anomaly proportion cannot satisfy the adjacency constraint");
    const double draw_anom = kept / (1.0 - kept);
    const double attack_share =
        static_cast<double>(cfg.target_attack) /
        static_cast<double>(cfg.target_attack + cfg.target_highload);

    for (std::size_t i = lead; i < n_periods; ++i) {
        const double u = rng.uniform01();
        if (u < draw_anom) {
            const bool attack = cfg.attacks_only || rng.uniform01() < attack_share;
            sc.labels[i].kind = attack ? PeriodKind::Attack : PeriodKind::HighLoad;
        }
    }
    // Demote the later of two adjacent anomalies; one ascending pass settles.
    for (std::size_t i = 1; i < n_periods; ++i) {
        if (sc.labels[i].kind != PeriodKind::Normal &&
            sc.labels[i - 1].kind != PeriodKind::Normal)
            sc.labels[i].kind = PeriodKind::Normal;
    }
    if (sc.labels.back().kind != PeriodKind::Normal)
        sc.labels.back().kind = PeriodKind::Normal;

    for (std::size_t i = lead; i < n_periods; ++i) {
        if (sc.labels[i].kind == PeriodKind::Normal) continue;
        const std::size_t off = i * static_cast<std::size_t>(cfg.period_len_s);
        model::EpisodeSpec ep;
        ep.kind = sc.labels[i].kind == PeriodKind::Attack ? model::EpisodeKind::Attack
                                                          : model::EpisodeKind::HighLoad;
        ep.start = sc.labels[i].period_start;
        ep.duration_s = cfg.period_len_s;
        ep.rate = draw_rate(cfg, load_at(baseline, off).state, rng);
        sc.labels[i].rate = ep.rate;

        std::vector<model::BaselineSecond> slice;
        slice.reserve(static_cast<std::size_t>(ep.duration_s));
        for (int k = 0; k < ep.duration_s; ++k)
            slice.push_back(load_at(baseline, off + static_cast<std::size_t>(k)));
        const auto overlay = model::render_overlay(cfg.gnb, slice, ep);
        apply_overlay(sc.trace, off, overlay);
    }
    return sc;
}

} // namespace stormwatch::synth
