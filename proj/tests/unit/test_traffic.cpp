#include <doctest.h>

#include <cmath>
#include <numeric>

#include "stormwatch/traffic.hpp"
#include "support/oracles.hpp"

using namespace stormwatch;
using synth::PeriodKind;

TEST_CASE("msg3 resampling honours the truncation bound and the bin mean") {
    synth::AggregateBin bin;
    bin.start = 0;
    bin.msg3_total = 2826; // 3.14/s
    bin.msg5_total = 2826;

    const double lambda = 2826.0 / 900.0;
    const int bound = static_cast<int>(std::ceil(2.0 * lambda)); // 7

    Rng rng(1);
    double sum = 0.0;
    const int reps = 96; // a day's worth of bins
    for (int r = 0; r < reps; ++r) {
        const auto series = synth::resample_msg3(bin, rng);
        REQUIRE(series.size() == 900);
        for (int v : series) {
            REQUIRE(v >= 0);
            REQUIRE(v <= bound);
        }
        sum += std::accumulate(series.begin(), series.end(), 0.0);
    }
    const double mean = sum / (900.0 * reps);
    // the truncated distribution's own mean, from the exact pmf
    const oracles::TruncatedPoisson tp(lambda, bound);
    CHECK(std::abs(mean - tp.mean) < 0.05);
    CHECK(std::abs(mean - lambda) / lambda < 0.15);
}

TEST_CASE("msg3 resampling of an empty bin is all zeros") {
    synth::AggregateBin bin;
    bin.msg3_total = 0;
    Rng rng(5);
    const auto series = synth::resample_msg3(bin, rng);
    for (int v : series) CHECK(v == 0);
}

TEST_CASE("resampling is deterministic under a fixed seed") {
    synth::AggregateBin bin;
    bin.msg3_total = 1800;
    bin.msg5_total = 1791;
    Rng a(77), b(77);
    CHECK(synth::resample_msg3(bin, a) == synth::resample_msg3(bin, b));
}

TEST_CASE("failure probability follows the bin counts") {
    synth::AggregateBin bin;
    bin.msg3_total = 900;
    bin.msg5_total = 891;
    CHECK(synth::failure_probability(bin) == doctest::Approx(0.01));
    bin.msg5_total = 900;
    CHECK(synth::failure_probability(bin) == 0.0);
    bin.msg5_total = 0;
    CHECK(synth::failure_probability(bin) == doctest::Approx(1.0));
}

TEST_CASE("msg5 resampling: at most one failure per second, zero stays zero") {
    Rng rng(9);
    std::vector<int> msg3(9000);
    for (auto& v : msg3) v = rng.poisson(3.0);

    SUBCASE("no failures") {
        Rng r2(1);
        CHECK(synth::resample_msg5(msg3, 0.0, r2) == msg3);
    }
    SUBCASE("binomial concentration") {
        Rng r2(2);
        long failures = 0;
        const int reps = 100;
        for (int rep = 0; rep < reps; ++rep) {
            const auto msg5 = synth::resample_msg5(msg3, 0.01, r2);
            for (std::size_t i = 0; i < msg3.size(); ++i) {
                REQUIRE(msg5[i] >= 0);
                REQUIRE(msg3[i] - msg5[i] <= 1);
                if (msg3[i] == 0) REQUIRE(msg5[i] == 0);
                failures += msg3[i] - msg5[i];
            }
        }
        // ~0.01 * #nonzero-seconds; +-10% band over 9e5 draws
        long nonzero = std::count_if(msg3.begin(), msg3.end(), [](int v) { return v > 0; });
        const double expect = 0.01 * static_cast<double>(nonzero) * reps;
        CHECK(std::abs(failures - expect) < 0.10 * expect);
    }
}

TEST_CASE("baseline synthesis hits the calibration bands") {
    synth::DiurnalProfile profile;
    Rng rng(1);
    const auto base = synth::synth_baseline(profile, 4, rng);

    REQUIRE(base.samples.size() == 4u * 86400u);
    REQUIRE(base.bins.size() == 4u * 96u);

    double sum3 = 0.0, sum_ue = 0.0;
    int max_ue = 0;
    for (const auto& s : base.samples) {
        REQUIRE(s.msg5 <= s.msg3);
        REQUIRE(s.msg5 >= 0);
        sum3 += s.msg3;
        sum_ue += s.n_bue;
        max_ue = std::max(max_ue, s.n_bue);
    }
    const double mean3 = sum3 / static_cast<double>(base.samples.size());
    CHECK(mean3 > 2.5);
    CHECK(mean3 < 3.8);
    const double mean_ue = sum_ue / static_cast<double>(base.samples.size());
    CHECK(mean_ue > 0.8 * 56.51);
    CHECK(mean_ue < 1.2 * 56.51);
    CHECK(max_ue <= 175);

    // scale contract is linear
    synth::DiurnalProfile scaled = profile;
    scaled.scale = 1.5;
    Rng rng2(1);
    const auto busy = synth::synth_baseline(scaled, 1, rng2);
    double busy_sum = 0.0;
    for (const auto& s : busy.samples) busy_sum += s.msg3;
    double day1_sum = 0.0;
    for (std::size_t i = 0; i < 86400; ++i) day1_sum += base.samples[i].msg3;
    CHECK(busy_sum / day1_sum == doctest::Approx(1.5).epsilon(0.05));
}

TEST_CASE("re-aggregating per-second data recovers each bin total") {
    synth::DiurnalProfile profile;
    Rng rng(17);
    const auto base = synth::synth_baseline(profile, 1, rng);
    for (std::size_t b = 0; b < base.bins.size(); ++b) {
        const auto& bin = base.bins[b];
        long sum = 0;
        for (int s = 0; s < 900; ++s)
            sum += base.samples[b * 900 + static_cast<std::size_t>(s)].msg3;
        const double lambda = static_cast<double>(bin.msg3_total) / 900.0;
        if (bin.msg3_total == 0) {
            CHECK(sum == 0);
            continue;
        }
        const int bound = static_cast<int>(std::ceil(2.0 * lambda));
        const oracles::TruncatedPoisson tp(lambda, bound);
        double var = 0.0;
        for (int k = 0; k <= bound; ++k)
            var += (k - tp.mean) * (k - tp.mean) * tp.pmf[static_cast<std::size_t>(k)];
        const double bias = 900.0 * (lambda - tp.mean);
        const double sigma_bin = std::sqrt(900.0 * var);
        CHECK(std::abs(static_cast<double>(sum) - bin.msg3_total + bias) <=
              4.0 * sigma_bin + 1.0);
    }
}

TEST_CASE("scenario labelling: proportions, adjacency, lead and determinism") {
    synth::DiurnalProfile profile;
    Rng rng(1);
    const auto base = synth::synth_baseline(profile, 4, rng);

    synth::ScenarioConfig cfg;
    Rng label_rng(2);
    const auto sc = synth::build_scenario(base, cfg, label_rng);

    REQUIRE(sc.labels.size() == 1152);
    int attacks = 0, highloads = 0;
    for (std::size_t i = 0; i < sc.labels.size(); ++i) {
        const auto kind = sc.labels[i].kind;
        if (kind != PeriodKind::Normal) {
            REQUIRE(i > 0);
            REQUIRE(sc.labels[i - 1].kind == PeriodKind::Normal);
            if (i + 1 < sc.labels.size())
                REQUIRE(sc.labels[i + 1].kind == PeriodKind::Normal);
            if (kind == PeriodKind::Attack) ++attacks;
            else ++highloads;
            REQUIRE(sc.labels[i].rate > 0.0);
        }
    }
    for (int i = 0; i < cfg.clean_lead_periods; ++i)
        REQUIRE(sc.labels[static_cast<std::size_t>(i)].kind == PeriodKind::Normal);

    // within 10% of the 211/204 targets
    CHECK(attacks > 189);
    CHECK(attacks < 233);
    CHECK(highloads > 183);
    CHECK(highloads < 225);

    // determinism: identical seeds, identical outputs
    Rng rng_b(1);
    const auto base_b = synth::synth_baseline(profile, 4, rng_b);
    Rng label_b(2);
    const auto sc_b = synth::build_scenario(base_b, cfg, label_b);
    REQUIRE(sc.trace.size() == sc_b.trace.size());
    for (std::size_t i = 0; i < sc.trace.size(); ++i) {
        REQUIRE(sc.trace[i].msg3 == sc_b.trace[i].msg3);
        REQUIRE(sc.trace[i].msg5 == sc_b.trace[i].msg5);
        REQUIRE(sc.trace[i].n_bue == sc_b.trace[i].n_bue);
    }
}

TEST_CASE("zero anomaly proportion reproduces the baseline") {
    synth::DiurnalProfile profile;
    Rng rng(4);
    const auto base = synth::synth_baseline(profile, 1, rng);
    synth::ScenarioConfig cfg;
    cfg.target_attack = 0;
    cfg.target_highload = 0;
    Rng r2(9);
    const auto sc = synth::build_scenario(base, cfg, r2);
    for (std::size_t i = 0; i < base.samples.size(); ++i) {
        REQUIRE(sc.trace[i].msg3 == base.samples[i].msg3);
        REQUIRE(sc.trace[i].msg5 == base.samples[i].msg5);
    }
    for (const auto& l : sc.labels) REQUIRE(l.kind == PeriodKind::Normal);
}

TEST_CASE("overlays keep the merge invariants") {
    synth::DiurnalProfile profile;
    Rng rng(6);
    const auto base = synth::synth_baseline(profile, 4, rng);
    synth::ScenarioConfig cfg;
    Rng r2(6);
    const auto sc = synth::build_scenario(base, cfg, r2);

    for (std::size_t i = 0; i < sc.trace.size(); ++i) {
        const auto idx = i / static_cast<std::size_t>(cfg.period_len_s);
        const auto kind = sc.labels[idx].kind;
        if (kind == PeriodKind::Attack) {
            // attacks never add completed procedures
            REQUIRE(sc.trace[i].msg5 <= base.samples[i].msg5);
        } else if (kind == PeriodKind::HighLoad) {
            // high-loads never reduce requests
            REQUIRE(sc.trace[i].msg3 >= base.samples[i].msg3);
        } else {
            REQUIRE(sc.trace[i].msg3 == base.samples[i].msg3);
        }
        REQUIRE(sc.trace[i].msg5 >= 0);
    }
}

TEST_CASE("infeasible anomaly proportion is rejected") {
    synth::DiurnalProfile profile;
    Rng rng(4);
    const auto base = synth::synth_baseline(profile, 1, rng);
    synth::ScenarioConfig cfg;
    cfg.target_normal = 115;
    cfg.target_attack = 600;
    cfg.target_highload = 437; // 90% anomalous
    Rng r2(1);
    CHECK_THROWS_AS(synth::build_scenario(base, cfg, r2), synth::ConfigError);
}
