#include "stormwatch/eval.hpp"

#include <algorithm>

namespace stormwatch::eval {

namespace {

bool overlaps(const detect::Alert& a, std::int64_t lo, std::int64_t hi) {
    return a.onset_ts <= hi && a.last_positive_ts >= lo;
}

} // namespace

EvalReport score(std::span<const synth::ScenarioLabel> labels,
                 std::span<const detect::Decision> decisions,
                 std::span<const detect::Alert> alerts,
                 const ScoreConfig& cfg) {
    if (labels.empty()) throw RangeMismatch("no labels");
    const std::int64_t period_len =
        labels.size() > 1 ? labels[1].period_start - labels[0].period_start
                          : synth::kSecondsPerDay;
    if (period_len <= 0) throw RangeMismatch("labels are not in ascending order");
    const std::int64_t labels_end = labels.back().period_start + period_len;
    if (!decisions.empty()) {
        if (decisions.front().ts < labels.front().period_start ||
            decisions.back().ts >= labels_end)
            throw RangeMismatch("decision log does not match the label range");
    }

    EvalReport rep;
    for (std::size_t i = 0; i < labels.size(); ++i) {
        const auto& lab = labels[i];
        if (lab.period_start < cfg.score_from_ts) continue;
        const std::int64_t lo = lab.period_start;
        const std::int64_t hi = lo + period_len - 1;
        ++rep.scored_periods;

        const detect::Alert* first_hit = nullptr;
        for (const auto& a : alerts) {
            if (!overlaps(a, lo, hi)) continue;
            if (!first_hit || a.onset_ts < first_hit->onset_ts) first_hit = &a;
        }

        if (lab.kind != synth::PeriodKind::Normal) {
            EventOutcome ev;
            ev.period_start = lo;
            ev.kind = lab.kind;
            ev.rate = lab.rate;
            if (first_hit) {
                ++rep.tp;
                ev.detected = true;
                ev.detect_ts = first_hit->detect_ts;
                ev.latency_s = static_cast<double>(
                    std::max<std::int64_t>(0, first_hit->detect_ts - lo));
                ev.verdict = first_hit->verdict;
                if (lab.kind == synth::PeriodKind::Attack &&
                    ev.verdict == detect::Verdict::HighLoad)
                    ++rep.attack_as_highload;
                if (lab.kind == synth::PeriodKind::HighLoad &&
                    ev.verdict == detect::Verdict::Attack)
                    ++rep.highload_as_attack;
            } else {
                ++rep.fn;
            }
            rep.events.push_back(ev);
        } else {
            bool unexplained = false;
            for (const auto& a : alerts) {
                if (!overlaps(a, lo, hi)) continue;
                bool explained = false;
                if (i > 0 && labels[i - 1].kind != synth::PeriodKind::Normal &&
                    overlaps(a, lo - period_len, lo - 1))
                    explained = true;
                if (i + 1 < labels.size() &&
                    labels[i + 1].kind != synth::PeriodKind::Normal &&
                    overlaps(a, hi + 1, hi + period_len))
                    explained = true;
                if (!explained) {
                    unexplained = true;
                    break;
                }
            }
            if (unexplained)
                ++rep.fp;
            else
                ++rep.tn;
        }
    }

    // per-second diagnostics over the scored range
    for (const auto& d : decisions) {
        if (d.ts < cfg.score_from_ts || d.bootstrap) continue;
        const auto idx = static_cast<std::size_t>(
            (d.ts - labels.front().period_start) / period_len);
        if (idx >= labels.size()) continue;
        const bool anomalous = labels[idx].kind != synth::PeriodKind::Normal;
        if (anomalous) {
            ++rep.sec_anomalous;
            if (d.positive) ++rep.sec_positive_in_anomalous;
        } else {
            ++rep.sec_normal;
            if (d.positive) ++rep.sec_positive_in_normal;
        }
    }

    const long total = rep.tp + rep.fp + rep.tn + rep.fn;
    rep.accuracy = total > 0 ? static_cast<double>(rep.tp + rep.tn) / total : 1.0;
    if (rep.tp + rep.fp > 0) {
        rep.precision = static_cast<double>(rep.tp) / (rep.tp + rep.fp);
        rep.precision_defined = true;
    }
    if (rep.tp + rep.fn > 0) {
        rep.recall = static_cast<double>(rep.tp) / (rep.tp + rep.fn);
        rep.recall_defined = true;
    }
    double lat_sum = 0.0;
    long lat_n = 0;
    for (const auto& ev : rep.events) {
        if (ev.detected) {
            lat_sum += ev.latency_s;
            ++lat_n;
        }
    }
    if (lat_n > 0) {
        rep.mean_latency_s = lat_sum / static_cast<double>(lat_n);
        rep.latency_defined = true;
    }
    return rep;
}

} // namespace stormwatch::eval
