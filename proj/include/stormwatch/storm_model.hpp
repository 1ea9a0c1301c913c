#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

namespace stormwatch::model {

struct GnbParams {
    double t_w = 5.0; // seconds an RRC resource is held awaiting Msg5
    int n_max = 300;  // simultaneous UE capacity
};

struct LoadState {
    int n_bue = 0;      // currently connected UEs
    double r_bue = 0.0; // legitimate Msg3 arrival rate per second
};

enum class EpisodeKind { Attack, HighLoad };

struct EpisodeSpec {
    EpisodeKind kind = EpisodeKind::Attack;
    double rate = 0.0; // Msg3/s injected on top of the baseline
    std::int64_t start = 0;
    int duration_s = 0;
};

struct OverlaySample {
    std::int64_t ts = 0;
    int msg3_extra = 0;
    int msg5_extra = 0;
    std::optional<int> n_bue_override;
    bool rejecting = false; // total Msg5 output forced to 0 this second
};

struct InfeasibleTarget : std::runtime_error {
    InfeasibleTarget() : std::runtime_error("availability target requires a negative rate") {}
};

struct AcceptReject {
    double t_a = 0.0;
    double t_r = 0.0;
};

// t_a = (n_max - n_bue)/(r_att + r_bue); t_r = max(0, t_w - t_a).
AcceptReject accept_reject_durations(const GnbParams& p, const LoadState& s, double r_att);

// t_a / (t_a + t_r)
double availability(double t_a, double t_r);

// Smallest rate that still overloads the cell, floored at 0.
double min_overload_rate(const GnbParams& p, const LoadState& s);

// Rate whose accept/reject cycle yields the requested availability.
double rate_for_target_availability(const GnbParams& p, const LoadState& s, double r_avai);

// Connected-UE utilisation in [0,1].
double utilization_ratio(int n_bue, int n_max);

// Per-second load snapshot of the baseline trace covering an episode.
struct BaselineSecond {
    std::int64_t ts = 0;
    LoadState state;
};

// Renders the per-second overlay for one injected episode.
//
// Attack: accept/reject cycles per the waiting-time model, recomputed at
// each cycle start from the then-current load; fractional durations carry
// across cycles so the long-run accept:reject split is exact. Legitimate
// Msg5s pass during accept and are zeroed during reject; the connected-UE
// count holds at its episode-start value.
//
// HighLoad: the injected requests complete, so Msg5s rise with the rate and
// connected UEs climb until the cell is full, after which it rejects for
// the rest of the episode.
std::vector<OverlaySample> render_overlay(const GnbParams& p,
                                          std::span<const BaselineSecond> baseline,
                                          const EpisodeSpec& spec);

} // namespace stormwatch::model
