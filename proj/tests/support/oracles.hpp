#pragma once

// Test-side oracles, deliberately independent of the library's own
// implementation paths.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

#include "stormwatch/rng.hpp"

namespace oracles {

// GPD draw by CDF inversion: y = sigma/gamma * ((1-u)^-gamma - 1),
// exponential when gamma == 0.
inline double gpd_inverse_cdf(double u, double gamma, double sigma) {
    if (gamma == 0.0) return -sigma * std::log(1.0 - u);
    return sigma / gamma * (std::pow(1.0 - u, -gamma) - 1.0);
}

inline std::vector<double> gpd_sample(stormwatch::Rng& rng, std::size_t n, double gamma,
                                      double sigma) {
    std::vector<double> out(n);
    for (auto& y : out) y = gpd_inverse_cdf(rng.uniform01(), gamma, sigma);
    return out;
}

// Exact truncated-Poisson pmf over {0..bound} by direct summation.
struct TruncatedPoisson {
    std::vector<double> pmf;
    double mean = 0.0;

    TruncatedPoisson(double lambda, int bound) {
        pmf.resize(static_cast<std::size_t>(bound) + 1);
        double term = std::exp(-lambda); // P(0)
        double total = 0.0;
        for (int k = 0; k <= bound; ++k) {
            pmf[static_cast<std::size_t>(k)] = term;
            total += term;
            term *= lambda / (k + 1);
        }
        for (auto& p : pmf) p /= total;
        for (int k = 0; k <= bound; ++k) mean += k * pmf[static_cast<std::size_t>(k)];
    }
};

// Nearest-rank quantile by explicit sort-and-index.
inline double nearest_rank(std::vector<double> values, double p) {
    std::sort(values.begin(), values.end());
    auto idx = static_cast<std::size_t>(std::floor(p * static_cast<double>(values.size())));
    if (idx >= values.size()) idx = values.size() - 1;
    return values[idx];
}

// Count of window elements strictly below v.
inline std::size_t rank_below(const std::vector<double>& values, double v) {
    return static_cast<std::size_t>(
        std::count_if(values.begin(), values.end(), [&](double x) { return x < v; }));
}

} // namespace oracles
