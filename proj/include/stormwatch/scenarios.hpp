#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "stormwatch/config.hpp"
#include "stormwatch/eval.hpp"
#include "stormwatch/gaussian_baseline.hpp"

namespace stormwatch::eval {

// One named evaluation scenario: a synthesis config plus how to score it.
struct ScenarioDef {
    std::string name;
    cfg::AppConfig app;
    bool run_gaussian = true;
};

// The five standard scenarios (single attack, random multi, low
// unavailability, low rate, busy cell) plus the anomaly-free control.
std::vector<ScenarioDef> default_suite();
ScenarioDef suite_scenario(const std::string& name);

// In-memory synth -> detect pipeline used by the suite runner and tests.
struct PipelineRun {
    synth::Scenario scenario;
    std::vector<detect::Decision> decisions;
    std::vector<detect::Alert> alerts;
};

PipelineRun run_evt_pipeline(const cfg::AppConfig& app, std::uint64_t seed);
PipelineRun run_gaussian_pipeline(const cfg::AppConfig& app, std::uint64_t seed);

// Samples of the first trace day whose periods are labelled normal; feeds
// the static baseline fit.
std::vector<synth::TrafficSample> reference_day(const synth::Scenario& sc,
                                                int period_len_s);

struct SuiteRun {
    std::string scenario;
    std::uint64_t seed = 0;
    std::string method; // "evt" | "gaussian"
    EvalReport report;
};

// Runs every (scenario, seed) pair for both methods; pairs fan out across
// up to `threads` workers, each owning its detector.
std::vector<SuiteRun> run_suite(std::span<const ScenarioDef> suite,
                                std::span<const std::uint64_t> seeds,
                                unsigned threads = 0);

// Table-shaped comparison (scenario x seed x method x metrics) as CSV text.
std::string suite_csv(std::span<const SuiteRun> runs);
std::string suite_summary(std::span<const SuiteRun> runs);

} // namespace stormwatch::eval
