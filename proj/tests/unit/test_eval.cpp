#include <doctest.h>

#include <map>

#include "stormwatch/eval.hpp"
#include "stormwatch/scenarios.hpp"

using namespace stormwatch;
using synth::PeriodKind;

namespace {

std::vector<synth::ScenarioLabel> make_labels(int n, int period_len,
                                              const std::map<int, PeriodKind>& kinds) {
    std::vector<synth::ScenarioLabel> labels(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        labels[static_cast<std::size_t>(i)].period_start =
            static_cast<std::int64_t>(i) * period_len;
        auto it = kinds.find(i);
        if (it != kinds.end()) {
            labels[static_cast<std::size_t>(i)].kind = it->second;
            labels[static_cast<std::size_t>(i)].rate = 50.0;
        }
    }
    return labels;
}

detect::Alert alert_at(int id, std::int64_t onset, std::int64_t last_pos,
                       detect::Verdict v = detect::Verdict::Attack) {
    detect::Alert a;
    a.id = id;
    a.onset_ts = onset;
    a.detect_ts = onset + 1;
    a.last_positive_ts = last_pos;
    a.close_ts = last_pos + 2;
    a.verdict = v;
    return a;
}

} // namespace

TEST_CASE("all normal, zero alerts: accuracy 1, undefined ratios flagged") {
    const auto labels = make_labels(10, 300, {});
    const auto rep = eval::score(labels, {}, {});
    CHECK(rep.accuracy == 1.0);
    CHECK_FALSE(rep.precision_defined);
    CHECK_FALSE(rep.recall_defined);
    CHECK_FALSE(rep.latency_defined);
    CHECK(rep.precision == 1.0);
    CHECK(rep.tn == 10);
}

TEST_CASE("ten detected episodes plus one stray alert") {
    std::map<int, PeriodKind> kinds;
    for (int i = 1; i <= 19; i += 2) kinds[i] = PeriodKind::Attack;
    const auto labels = make_labels(21, 300, kinds);

    std::vector<detect::Alert> alerts;
    int id = 1;
    for (int i = 1; i <= 19; i += 2)
        alerts.push_back(alert_at(id++, i * 300 + 2, i * 300 + 200));
    // stray alert well inside the final normal period
    alerts.push_back(alert_at(id, 20 * 300 + 50, 20 * 300 + 60));

    const auto rep = eval::score(labels, {}, alerts);
    CHECK(rep.tp == 10);
    CHECK(rep.fp == 1);
    CHECK(rep.fn == 0);
    CHECK(rep.recall == doctest::Approx(1.0));
    CHECK(rep.precision == doctest::Approx(10.0 / 11.0));
    CHECK(rep.mean_latency_s == doctest::Approx(3.0)); // detect at +3 each
}

TEST_CASE("alert tail crossing into the next normal period is not a false positive") {
    std::map<int, PeriodKind> kinds{{3, PeriodKind::Attack}};
    const auto labels = make_labels(8, 300, kinds);
    // alert spans the episode and 40 s of the next period
    const auto a = alert_at(1, 3 * 300 + 1, 4 * 300 + 40);
    const auto rep = eval::score(labels, {}, {&a, 1});
    CHECK(rep.tp == 1);
    CHECK(rep.fp == 0);
    CHECK(rep.tn == 7);
}

TEST_CASE("verdict confusion is counted per detected event") {
    std::map<int, PeriodKind> kinds{{2, PeriodKind::Attack}, {5, PeriodKind::HighLoad}};
    const auto labels = make_labels(8, 300, kinds);
    std::vector<detect::Alert> alerts{
        alert_at(1, 2 * 300 + 1, 2 * 300 + 250, detect::Verdict::HighLoad),
        alert_at(2, 5 * 300 + 1, 5 * 300 + 250, detect::Verdict::Attack)};
    const auto rep = eval::score(labels, {}, alerts);
    CHECK(rep.attack_as_highload == 1);
    CHECK(rep.highload_as_attack == 1);
}

TEST_CASE("tp + fn equals anomalous periods; fp + tn equals normal periods") {
    std::map<int, PeriodKind> kinds{{1, PeriodKind::Attack},
                                    {4, PeriodKind::HighLoad},
                                    {6, PeriodKind::Attack}};
    const auto labels = make_labels(9, 300, kinds);
    const auto a = alert_at(1, 4 * 300 + 3, 4 * 300 + 100, detect::Verdict::HighLoad);
    const auto rep = eval::score(labels, {}, {&a, 1});
    CHECK(rep.tp + rep.fn == 3);
    CHECK(rep.fp + rep.tn == 6);
    CHECK(rep.fn == 2);
}

TEST_CASE("score_from_ts restricts the scored range") {
    std::map<int, PeriodKind> kinds{{1, PeriodKind::Attack}, {5, PeriodKind::Attack}};
    const auto labels = make_labels(8, 300, kinds);
    eval::ScoreConfig cfg;
    cfg.score_from_ts = 3 * 300;
    const auto rep = eval::score(labels, {}, {}, cfg);
    CHECK(rep.scored_periods == 5);
    CHECK(rep.fn == 1); // only the second episode is in range
}

TEST_CASE("mismatched decision range is rejected") {
    const auto labels = make_labels(4, 300, {});
    std::vector<detect::Decision> decisions(1);
    decisions[0].ts = 4 * 300 + 10; // outside the label range
    CHECK_THROWS_AS(eval::score(labels, decisions, {}), eval::RangeMismatch);
}

TEST_CASE("scoring is deterministic") {
    std::map<int, PeriodKind> kinds{{2, PeriodKind::Attack}};
    const auto labels = make_labels(6, 300, kinds);
    const auto a = alert_at(1, 2 * 300 + 1, 2 * 300 + 250);
    const auto r1 = eval::score(labels, {}, {&a, 1});
    const auto r2 = eval::score(labels, {}, {&a, 1});
    CHECK(r1.tp == r2.tp);
    CHECK(r1.accuracy == r2.accuracy);
    CHECK(r1.mean_latency_s == r2.mean_latency_s);
}

TEST_CASE("suite definitions bind the documented scenario parameters") {
    const auto suite = eval::default_suite();
    REQUIRE(suite.size() == 5);

    const auto& single = suite[0];
    CHECK(single.name == "single");
    REQUIRE(single.app.scenario.single_episode.has_value());
    CHECK(single.app.scenario.single_episode->rate == 100.0);
    CHECK(single.app.scenario.single_episode->duration_s == 900);
    CHECK(single.app.days == 1);

    const auto& low_unavail = suite[2];
    CHECK(low_unavail.app.scenario.rate_policy == synth::RatePolicy::TargetAvailability);
    CHECK(low_unavail.app.scenario.target_availability == 0.95);
    CHECK(low_unavail.app.scenario.attacks_only);

    const auto& low_rate = suite[3];
    CHECK(low_rate.app.scenario.rate_policy == synth::RatePolicy::FractionOfMin);
    CHECK(low_rate.app.scenario.min_frac_lo == 0.5);

    const auto& busy = suite[4];
    CHECK(busy.app.profile.scale == doctest::Approx(1.5));

    // paper-default detector constants survive into every scenario
    for (const auto& def : suite) {
        CHECK(def.app.detector.msg3_pot.window_len == 180);
        CHECK(def.app.detector.msg3_pot.gap_len == 30);
        CHECK(def.app.detector.msg3_pot.q == doctest::Approx(3e-4));
        CHECK(def.app.detector.r1_pot.window_len == 18000);
        CHECK(def.app.detector.r1_pot.gap_len == 60);
        CHECK(def.app.detector.r1_pot.q == doctest::Approx(1e-5));
        CHECK(def.app.detector.confirm_count == 2);
        CHECK(def.app.scenario.gnb.t_w == 5.0);
        CHECK(def.app.scenario.gnb.n_max == 300);
        CHECK(def.app.scenario.rate_max == 100.0);
    }
}

TEST_CASE("suite runner emits one row per scenario, seed and method") {
    // two tiny scenarios to keep runtime sane: clean control, one seed
    std::vector<eval::ScenarioDef> suite;
    auto def = eval::suite_scenario("clean");
    def.app.days = 1;
    def.app.scenario.days = 1;
    def.name = "clean";
    suite.push_back(def);

    const std::uint64_t seeds[] = {1, 2};
    const auto runs = eval::run_suite(suite, seeds, 2);
    REQUIRE(runs.size() == 4); // 1 scenario x 2 seeds x 2 methods
    const auto csv = eval::suite_csv(runs);
    CHECK(csv.find("clean,1,evt") != std::string::npos);
    CHECK(csv.find("clean,2,gaussian") != std::string::npos);
}
