#include "stormwatch/storm_model.hpp"

#include <algorithm>
#include <cmath>

namespace stormwatch::model {

namespace {

// Emits integer per-second amounts whose running sum tracks a real rate.
class CarryQuantizer {
public:
    int emit(double amount) {
        acc_ += amount;
        const int whole = static_cast<int>(std::floor(acc_));
        acc_ -= whole;
        return whole;
    }

private:
    double acc_ = 0.0;
};

} // namespace

AcceptReject accept_reject_durations(const GnbParams& p, const LoadState& s, double r_att) {
    const double total_rate = r_att + s.r_bue;
    if (!(total_rate > 0.0)) throw std::invalid_argument("no arrivals");
    AcceptReject d;
    d.t_a = static_cast<double>(p.n_max - s.n_bue) / total_rate;
    d.t_r = std::max(0.0, p.t_w - d.t_a);
    return d;
}

double availability(double t_a, double t_r) {
    if (!(t_a + t_r > 0.0)) throw std::invalid_argument("empty cycle");
    return t_a / (t_a + t_r);
}

double min_overload_rate(const GnbParams& p, const LoadState& s) {
    const double raw = static_cast<double>(p.n_max - s.n_bue) / p.t_w - s.r_bue;
    return std::max(0.0, raw);
}

double rate_for_target_availability(const GnbParams& p, const LoadState& s, double r_avai) {
    if (!(r_avai > 0.0 && r_avai <= 1.0))
        throw std::invalid_argument("availability target must lie in (0,1]");
    const double floor_rate = min_overload_rate(p, s);
    if (r_avai == 1.0) return floor_rate;
    const double rate = static_cast<double>(p.n_max - s.n_bue) / (r_avai * p.t_w) - s.r_bue;
    if (rate <= 0.0) throw InfeasibleTarget{};
    return std::max(rate, floor_rate);
}

double utilization_ratio(int n_bue, int n_max) {
    if (n_max <= 0) throw std::invalid_argument("n_max must be positive");
    if (n_bue < 0 || n_bue > n_max) throw std::invalid_argument("n_bue out of range");
    return static_cast<double>(n_bue) / static_cast<double>(n_max);
}

std::vector<OverlaySample> render_overlay(const GnbParams& p,
                                          std::span<const BaselineSecond> baseline,
                                          const EpisodeSpec& spec) {
    if (spec.duration_s <= 0 || spec.rate <= 0.0)
        throw std::invalid_argument("episode needs positive rate and duration");
    if (baseline.size() < static_cast<std::size_t>(spec.duration_s) ||
        baseline.front().ts != spec.start)
        throw std::invalid_argument("baseline slice does not cover the episode");

    std::vector<OverlaySample> out(static_cast<std::size_t>(spec.duration_s));
    CarryQuantizer rate_q;

    if (spec.kind == EpisodeKind::Attack) {
        const int n0 = baseline.front().state.n_bue;
        CarryQuantizer accept_q, reject_q;
        int accept_left = 0, reject_left = 0;
        for (int k = 0; k < spec.duration_s; ++k) {
            if (accept_left == 0 && reject_left == 0) {
                // new cycle from the current load
                LoadState st{n0, baseline[static_cast<std::size_t>(k)].state.r_bue};
                const AcceptReject d = accept_reject_durations(p, st, spec.rate);
                accept_left = accept_q.emit(std::min(d.t_a, p.t_w));
                reject_left = reject_q.emit(d.t_r);
                if (accept_left == 0 && reject_left == 0) accept_left = 1;
            }
            auto& o = out[static_cast<std::size_t>(k)];
            o.ts = spec.start + k;
            o.msg3_extra = rate_q.emit(spec.rate);
            o.msg5_extra = 0;
            o.n_bue_override = n0;
            if (accept_left > 0) {
                --accept_left;
            } else {
                --reject_left;
                o.rejecting = true;
            }
        }
    } else {
        int n = baseline.front().state.n_bue;
        bool full = false;
        for (int k = 0; k < spec.duration_s; ++k) {
            auto& o = out[static_cast<std::size_t>(k)];
            o.ts = spec.start + k;
            const int extra = rate_q.emit(spec.rate);
            o.msg3_extra = extra;
            if (!full) {
                const double inflow =
                    spec.rate + baseline[static_cast<std::size_t>(k)].state.r_bue;
                const int admitted = std::min(static_cast<int>(std::llround(inflow)),
                                              p.n_max - n);
                n += admitted;
                o.msg5_extra = extra;
                if (n >= p.n_max) {
                    n = p.n_max;
                    full = true;
                }
            } else {
                o.msg5_extra = 0;
                o.rejecting = true;
            }
            o.n_bue_override = n;
        }
    }
    return out;
}

} // namespace stormwatch::model
