#include <doctest.h>

#include <cmath>

#include "stormwatch/gaussian_baseline.hpp"
#include "stormwatch/scenarios.hpp"

using namespace stormwatch;

namespace {

std::vector<synth::TrafficSample> flat_day(int msg3, std::int64_t ts0 = 0) {
    std::vector<synth::TrafficSample> day(86400);
    for (int s = 0; s < 86400; ++s) day[static_cast<std::size_t>(s)] = {ts0 + s, msg3, msg3, 50};
    return day;
}

} // namespace

TEST_CASE("fit: mu + 3 sigma per two-hour slot") {
    // alternating 1/5 within every slot: mean 3, stddev ~2.0000116
    auto day = flat_day(0);
    for (std::size_t i = 0; i < day.size(); ++i) day[i].msg3 = (i % 2 == 0) ? 1 : 5;
    const auto th = gauss::fit_baseline(day);
    for (int p = 0; p < gauss::kPeriodsPerDay; ++p) {
        CHECK(th.mean[static_cast<std::size_t>(p)] == doctest::Approx(3.0));
        CHECK(th.threshold[static_cast<std::size_t>(p)] ==
              doctest::Approx(3.0 + 3.0 * 2.0).epsilon(1e-3));
        CHECK(th.threshold[static_cast<std::size_t>(p)] >=
              th.mean[static_cast<std::size_t>(p)]);
    }
}

TEST_CASE("fit: table-style example values") {
    // a slot with mean 3.14 and stddev 2.73 thresholds at 11.33; approximate
    // with a two-point distribution having those exact moments
    auto day = flat_day(0);
    for (std::size_t i = 0; i < day.size(); ++i)
        day[i].msg3 = 0; // placeholder, replaced below
    // two-point {a,b} with mean m, sd s: a = m - s, b = m + s (n even)
    // integer counts are not needed by the fit itself, so emulate by scaling:
    // use msg3 in {1, 6}: mean 3.5, sd 2.5000145; checks formula rather than
    // the exact table numbers
    for (std::size_t i = 0; i < day.size(); ++i) day[i].msg3 = (i % 2 == 0) ? 1 : 6;
    const auto th = gauss::fit_baseline(day);
    CHECK(th.threshold[0] == doctest::Approx(3.5 + 3.0 * 2.5).epsilon(1e-3));
}

TEST_CASE("constant traffic gives threshold equal to the mean") {
    const auto th = gauss::fit_baseline(flat_day(4));
    for (int p = 0; p < gauss::kPeriodsPerDay; ++p) {
        CHECK(th.stddev[static_cast<std::size_t>(p)] == 0.0);
        CHECK(th.threshold[static_cast<std::size_t>(p)] == doctest::Approx(4.0));
    }
}

TEST_CASE("slots with too few samples are rejected") {
    std::vector<synth::TrafficSample> partial(100);
    for (int s = 0; s < 100; ++s) partial[static_cast<std::size_t>(s)] = {s, 3, 3, 50};
    CHECK_THROWS_AS(gauss::fit_baseline(partial), gauss::InsufficientData);
}

TEST_CASE("static detector: quiet traffic raises nothing, storms everything") {
    const auto day = flat_day(3);
    const auto th = gauss::fit_baseline(day);

    auto quiet = flat_day(3, 86400);
    auto res = gauss::detect_static(th, quiet, 2);
    CHECK(res.alerts.empty());

    auto stormy = flat_day(3, 86400);
    for (int s = 1000; s < 1300; ++s) stormy[static_cast<std::size_t>(s)].msg3 = 103;
    res = gauss::detect_static(th, stormy, 2);
    REQUIRE(res.alerts.size() == 1);
    CHECK(res.alerts.front().onset_ts == 86400 + 1000);
    CHECK(res.alerts.front().detect_ts == 86400 + 1001);

    // threshold column is constant within a slot
    double limit = res.decisions[0].th_msg3;
    for (int s = 0; s < gauss::kPeriodSeconds; ++s)
        REQUIRE(res.decisions[static_cast<std::size_t>(s)].th_msg3 == limit);
}

TEST_CASE("synthetic day fit: twelve thresholds, each above its mean") {
    auto def = eval::suite_scenario("clean");
    Rng rng(1);
    const auto base = synth::synth_baseline(def.app.profile, 1, rng, def.app.start_ts);
    synth::Scenario sc{base.samples, {}};
    sc.labels.resize(288);
    for (std::size_t i = 0; i < sc.labels.size(); ++i) {
        sc.labels[i].period_start = def.app.start_ts + static_cast<std::int64_t>(i) * 300;
        sc.labels[i].kind = synth::PeriodKind::Normal;
    }
    const auto ref = eval::reference_day(sc, 300);
    REQUIRE(ref.size() == 86400);
    const auto th = gauss::fit_baseline(ref);
    for (int p = 0; p < gauss::kPeriodsPerDay; ++p)
        CHECK(th.threshold[static_cast<std::size_t>(p)] >
              th.mean[static_cast<std::size_t>(p)]);
}
