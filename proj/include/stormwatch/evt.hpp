#pragma once

#include <cstddef>
#include <deque>
#include <limits>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

namespace stormwatch::evt {

enum class TailDirection { UpperTail, LowerTail };
enum class SampleClass { Normal, Extreme, Anomaly };

// Fitted shape/scale of the excess distribution.
struct GpdParams {
    double gamma = 0.0;
    double sigma = 0.0;
};

struct DegenerateSample : std::runtime_error {
    DegenerateSample() : std::runtime_error("zero-variance excess sample") {}
};
struct MomentViolation : std::runtime_error {
    explicit MomentViolation(double gamma)
        : std::runtime_error("fitted shape " + std::to_string(gamma) +
                             " violates the variance moment condition") {}
};
struct NumericOverflow : std::runtime_error {
    NumericOverflow() : std::runtime_error("threshold power term is not finite") {}
};

// Method-of-moments fit over positive excess magnitudes.
// gamma_hat = (1 - mean^2/var)/2, sigma_hat = mean*(1 + mean^2/var)/2,
// with the unbiased (n-1) variance.
GpdParams estimate_gpd_mom(std::span<const double> excesses);

// Quantile-extrapolated threshold offset from the peak threshold t.
// UpperTail: t + (sigma/gamma)*((q*n/n_peaks)^-gamma - 1); LowerTail mirrors
// downward. |gamma| < 1e-6 switches to the exponential-limit form.
// Returns the raw value; callers clamp to the feature domain.
double anomaly_threshold(double t, const GpdParams& params, double q,
                         std::size_t n_total, std::size_t n_peaks,
                         TailDirection direction);

// Nearest-rank quantile of the window (sorted ascending, index
// floor(p*n) clamped to the ends).
double initial_threshold(std::span<const double> window, double init_quantile,
                         TailDirection direction);

// Msg5/Msg3 completion ratio clamped to [0,1]; 1.0 when msg3 == 0
// (no requests means nothing failed).
double completion_ratio(double msg3, double msg5);

struct PotConfig {
    std::size_t window_len = 180;
    std::size_t gap_len = 30;
    double q = 3e-4;
    double init_quantile = 0.98;
    TailDirection direction = TailDirection::UpperTail;

    // Fit robustness knobs (see PotEstimator notes).
    std::size_t min_peaks = 10;
    double quantile_step = 0.01;

    // Feature domain; thresholds are clamped into it. R1 uses [0,1].
    double domain_min = -std::numeric_limits<double>::infinity();
    double domain_max = std::numeric_limits<double>::infinity();

    void validate() const;
};

// Windowed peaks-over-threshold estimator.
//
// The window holds the last window_len values admitted for threshold
// computation; the most recent gap_len admitted values sit in a buffer and
// are not used yet. Values classified Anomaly never enter either structure.
// Thresholds are recomputed when a value beyond the peak threshold leaves
// the gap and joins the window, at most once per sample.
//
// Fit guards, applied at every refit:
//  - the peak quantile is stepped toward the median until at least
//    min_peaks excesses exist (or the median is reached);
//  - a zero-variance excess set keeps the previous thresholds; during the
//    bootstrap fit, where there is no previous value, the tail is treated
//    as exponential (gamma=0, sigma=mean);
//  - the upper-tail threshold never sits inside the admitted window range:
//    anomaly exclusion censors the window at the threshold, so a threshold
//    below the window maximum feeds on its own censoring and ratchets
//    downward;
//  - on the lower tail, moment fits with gamma <= -1 (near-degenerate
//    lattice excess sets) are replaced by the exponential form, and a
//    threshold at or below domain_min would make the anomaly region empty,
//    so the deepest excess stratum is dropped and the tail refitted; with
//    no excesses left the threshold rests at the peak threshold itself.
class PotEstimator {
public:
    explicit PotEstimator(PotConfig cfg);

    // Bootstrap consumes the first window_len + gap_len samples and returns
    // nullopt for them; afterwards returns the classification. Anomalous
    // values are not ingested.
    std::optional<SampleClass> observe(double value);

    // Ingests regardless of classification (diagnostic path used to compare
    // against the exclusion behaviour).
    std::optional<SampleClass> observe_unfiltered(double value);

    SampleClass classify(double value) const;

    bool ready() const { return ready_; }
    double peak_threshold() const { return t_; }
    double anomaly_threshold() const { return t_anomaly_; }
    std::size_t peak_count() const { return n_peaks_; }
    std::size_t fit_failures() const { return fit_failures_; }
    const PotConfig& config() const { return cfg_; }

    nlohmann::json to_json() const;
    static PotEstimator from_json(const nlohmann::json& j);

private:
    void push_through(double value);
    void admit(double value);
    void refit(bool bootstrap_fit);
    bool beyond_peak(double value) const;

    PotConfig cfg_;
    std::deque<double> window_;
    std::deque<double> gap_;
    double t_ = 0.0;
    double t_anomaly_ = 0.0;
    std::size_t n_peaks_ = 0;
    std::size_t fit_failures_ = 0;
    bool ready_ = false;
};

} // namespace stormwatch::evt
