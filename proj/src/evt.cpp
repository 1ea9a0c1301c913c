#include "stormwatch/evt.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace stormwatch::evt {

namespace {

constexpr double kGammaZeroEps = 1e-6;

double mean_of(std::span<const double> xs) {
    return std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
}

} // namespace

GpdParams estimate_gpd_mom(std::span<const double> excesses) {
    if (excesses.size() < 2)
        throw std::invalid_argument("need at least 2 excesses for a moment fit");
    const double n = static_cast<double>(excesses.size());
    const double mu = mean_of(excesses);
    double ss = 0.0;
    for (double y : excesses) ss += (y - mu) * (y - mu);
    const double var = ss / (n - 1.0);
    if (var <= 0.0) throw DegenerateSample{};

    const double ratio = mu * mu / var;
    GpdParams p;
    p.gamma = 0.5 * (1.0 - ratio);
    p.sigma = 0.5 * mu * (1.0 + ratio);
    if (p.gamma >= 0.5) throw MomentViolation{p.gamma};
    if (!(p.sigma > 0.0)) throw DegenerateSample{};
    return p;
}

double anomaly_threshold(double t, const GpdParams& params, double q,
                         std::size_t n_total, std::size_t n_peaks,
                         TailDirection direction) {
    if (n_peaks == 0 || n_total < n_peaks)
        throw std::invalid_argument("invalid peak counts");
    const double ratio = q * static_cast<double>(n_total) / static_cast<double>(n_peaks);
    double offset;
    if (std::abs(params.gamma) < kGammaZeroEps) {
        // exponential limit of the quantile formula
        offset = params.sigma * std::log(1.0 / ratio);
    } else {
        offset = params.sigma / params.gamma * (std::pow(ratio, -params.gamma) - 1.0);
    }
    if (!std::isfinite(offset)) throw NumericOverflow{};
    return direction == TailDirection::UpperTail ? t + offset : t - offset;
}

double initial_threshold(std::span<const double> window, double init_quantile,
                         TailDirection /*direction*/) {
    if (window.empty())
        throw std::invalid_argument("empty window");
    std::vector<double> sorted(window.begin(), window.end());
    std::sort(sorted.begin(), sorted.end());
    const auto n = sorted.size();
    auto idx = static_cast<std::size_t>(
        std::floor(init_quantile * static_cast<double>(n)));
    if (idx >= n) idx = n - 1;
    return sorted[idx];
}

double completion_ratio(double msg3, double msg5) {
    if (msg3 <= 0.0) return 1.0;
    return std::clamp(msg5 / msg3, 0.0, 1.0);
}

void PotConfig::validate() const {
    if (window_len == 0) throw std::invalid_argument("window_len must be positive");
    if (!(q > 0.0 && q < 1.0)) throw std::invalid_argument("q must lie in (0,1)");
    if (!(init_quantile > 0.0 && init_quantile < 1.0))
        throw std::invalid_argument("init_quantile must lie in (0,1)");
    if (!(quantile_step > 0.0)) throw std::invalid_argument("quantile_step must be positive");
    // the probability mass on the peak-threshold side must stay below 1-q
    const double t_side = direction == TailDirection::UpperTail ? init_quantile
                                                                : 1.0 - init_quantile;
    if (!(t_side < 1.0 - q))
        throw std::invalid_argument("init_quantile leaves no room for the risk level q");
}

PotEstimator::PotEstimator(PotConfig cfg) : cfg_(cfg) { cfg_.validate(); }

bool PotEstimator::beyond_peak(double value) const {
    return cfg_.direction == TailDirection::UpperTail ? value > t_ : value < t_;
}

SampleClass PotEstimator::classify(double value) const {
    if (cfg_.direction == TailDirection::UpperTail) {
        if (value > t_anomaly_) return SampleClass::Anomaly;
        if (value > t_) return SampleClass::Extreme;
        return SampleClass::Normal;
    }
    if (value < t_anomaly_) return SampleClass::Anomaly;
    if (value < t_) return SampleClass::Extreme;
    return SampleClass::Normal;
}

std::optional<SampleClass> PotEstimator::observe(double value) {
    if (!ready_) {
        if (window_.size() < cfg_.window_len) {
            window_.push_back(value);
        } else {
            gap_.push_back(value);
        }
        if (window_.size() == cfg_.window_len && gap_.size() == cfg_.gap_len) {
            refit(true);
            ready_ = true;
        }
        return std::nullopt;
    }
    const SampleClass cls = classify(value);
    if (cls == SampleClass::Anomaly) return cls;
    push_through(value);
    return cls;
}

std::optional<SampleClass> PotEstimator::observe_unfiltered(double value) {
    if (!ready_) return observe(value);
    const SampleClass cls = classify(value);
    push_through(value);
    return cls;
}

void PotEstimator::push_through(double value) {
    gap_.push_back(value);
    if (gap_.size() > cfg_.gap_len) {
        const double aged = gap_.front();
        gap_.pop_front();
        admit(aged);
    }
}

void PotEstimator::admit(double value) {
    window_.push_back(value);
    bool excesses_changed = beyond_peak(value);
    if (window_.size() > cfg_.window_len) {
        // an aged-out excess also invalidates the fit, and without the
        // eviction trigger the thresholds can only ratchet toward the
        // extreme side and freeze there over purely normal stretches
        if (beyond_peak(window_.front())) excesses_changed = true;
        window_.pop_front();
    }
    if (excesses_changed) refit(false);
}

void PotEstimator::refit(bool bootstrap_fit) {
    std::vector<double> sorted(window_.begin(), window_.end());
    std::sort(sorted.begin(), sorted.end());
    const std::size_t n = sorted.size();
    const bool upper = cfg_.direction == TailDirection::UpperTail;

    // Peak threshold at the configured quantile, widened toward the median
    // until enough excesses exist.
    double p = cfg_.init_quantile;
    double t = 0.0;
    std::size_t n_exc = 0;
    for (;;) {
        auto idx = static_cast<std::size_t>(std::floor(p * static_cast<double>(n)));
        if (idx >= n) idx = n - 1;
        t = sorted[idx];
        if (upper) {
            auto it = std::upper_bound(sorted.begin(), sorted.end(), t);
            n_exc = static_cast<std::size_t>(sorted.end() - it);
        } else {
            auto it = std::lower_bound(sorted.begin(), sorted.end(), t);
            n_exc = static_cast<std::size_t>(it - sorted.begin());
        }
        if (n_exc >= cfg_.min_peaks) break;
        if (upper) {
            if (p <= 0.5) break;
            p = std::max(0.5, p - cfg_.quantile_step);
        } else {
            if (p >= 0.5) break;
            p = std::min(0.5, p + cfg_.quantile_step);
        }
    }

    std::vector<double> excesses;
    excesses.reserve(n_exc);
    for (double v : sorted) {
        if (upper ? v > t : v < t) excesses.push_back(upper ? v - t : t - v);
    }

    // Fit/threshold chain with the guards described in the header. A failed
    // fit keeps the previous threshold value (the window-consistency bounds
    // below still apply to it).
    double th = t;
    while (!excesses.empty()) {
        GpdParams params;
        bool fitted = false;
        if (excesses.size() >= 2) {
            try {
                params = estimate_gpd_mom(excesses);
                fitted = true;
            } catch (const DegenerateSample&) {
            } catch (const MomentViolation&) {
            }
            if (!fitted) {
                if (!bootstrap_fit) {
                    ++fit_failures_;
                    th = t_anomaly_;
                    break;
                }
                params = GpdParams{0.0, mean_of(excesses)};
                fitted = true;
            }
        } else {
            params = GpdParams{0.0, excesses.front()};
            fitted = true;
        }
        // Lattice-like excess sets drive the moment shape below -1, where
        // the bounded-support extrapolation pins the threshold to the sample
        // edge and stalls adaptation under drift. Cap the shape mid-range
        // and rescale through the mean relation sigma = mu * (1 - gamma).
        if (params.gamma <= -1.0)
            params = GpdParams{-0.5, 1.5 * mean_of(excesses)};

        try {
            th = evt::anomaly_threshold(t, params, cfg_.q, n, excesses.size(), cfg_.direction);
        } catch (const NumericOverflow&) {
            if (!bootstrap_fit) {
                ++fit_failures_;
                th = t_anomaly_;
            } else {
                th = t;
            }
            break;
        }

        if (!upper && th <= cfg_.domain_min) {
            // Anomaly region would be empty; drop the deepest stratum.
            const double deepest = *std::max_element(excesses.begin(), excesses.end());
            std::erase_if(excesses, [&](double y) { return y == deepest; });
            th = t;
            continue;
        }
        break;
    }

    t_ = t;
    n_peaks_ = excesses.size();
    if (upper) {
        // The q-quantile lies beyond every admitted value whenever q*N < 1;
        // a threshold inside the window range only censors the window's own
        // tail and ratchets itself downward.
        th = std::max(th, sorted.back());
    } else if (std::isfinite(cfg_.domain_min)) {
        // Domain-bounded ratios take values on a lattice; every threshold in
        // the gap between the domain floor and the smallest admitted value
        // flags exactly the same observable events, so take the gap's top
        // rather than an extrapolated point inside it.
        th = std::max(th, sorted.front());
    }
    th = std::clamp(th, cfg_.domain_min, cfg_.domain_max);
    t_anomaly_ = upper ? std::max(th, t_) : std::min(th, t_);
}

nlohmann::json PotEstimator::to_json() const {
    nlohmann::json j;
    j["config"] = {
        {"window_len", cfg_.window_len},
        {"gap_len", cfg_.gap_len},
        {"q", cfg_.q},
        {"init_quantile", cfg_.init_quantile},
        {"direction", cfg_.direction == TailDirection::UpperTail ? "upper" : "lower"},
        {"min_peaks", cfg_.min_peaks},
        {"quantile_step", cfg_.quantile_step},
        {"domain_min", cfg_.domain_min},
        {"domain_max", cfg_.domain_max},
    };
    j["t"] = t_;
    j["t_anomaly"] = t_anomaly_;
    j["window"] = std::vector<double>(window_.begin(), window_.end());
    j["gap"] = std::vector<double>(gap_.begin(), gap_.end());
    std::vector<double> excesses;
    for (double v : window_) {
        if (beyond_peak(v))
            excesses.push_back(cfg_.direction == TailDirection::UpperTail ? v - t_ : t_ - v);
    }
    j["excesses"] = excesses;
    j["ready"] = ready_;
    j["n_peaks"] = n_peaks_;
    j["fit_failures"] = fit_failures_;
    return j;
}

PotEstimator PotEstimator::from_json(const nlohmann::json& j) {
    PotConfig cfg;
    const auto& jc = j.at("config");
    cfg.window_len = jc.at("window_len").get<std::size_t>();
    cfg.gap_len = jc.at("gap_len").get<std::size_t>();
    cfg.q = jc.at("q").get<double>();
    cfg.init_quantile = jc.at("init_quantile").get<double>();
    cfg.direction = jc.at("direction").get<std::string>() == "upper"
                        ? TailDirection::UpperTail
                        : TailDirection::LowerTail;
    cfg.min_peaks = jc.at("min_peaks").get<std::size_t>();
    cfg.quantile_step = jc.at("quantile_step").get<double>();
    if (jc.at("domain_min").is_number()) cfg.domain_min = jc.at("domain_min").get<double>();
    if (jc.at("domain_max").is_number()) cfg.domain_max = jc.at("domain_max").get<double>();

    PotEstimator est(cfg);
    for (double v : j.at("window").get<std::vector<double>>()) est.window_.push_back(v);
    for (double v : j.at("gap").get<std::vector<double>>()) est.gap_.push_back(v);
    est.t_ = j.at("t").get<double>();
    est.t_anomaly_ = j.at("t_anomaly").get<double>();
    est.ready_ = j.at("ready").get<bool>();
    est.n_peaks_ = j.at("n_peaks").get<std::size_t>();
    est.fit_failures_ = j.at("fit_failures").get<std::size_t>();
    return est;
}

} // namespace stormwatch::evt
