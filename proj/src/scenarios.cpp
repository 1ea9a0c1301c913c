#include "stormwatch/scenarios.hpp"

#include <algorithm>
#include <cstdio>
#include <future>
#include <sstream>
#include <thread>

namespace stormwatch::eval {

std::vector<ScenarioDef> default_suite() {
    std::vector<ScenarioDef> suite;
    for (const char* name : {"single", "multi", "low_unavail", "low_rate", "busy"})
        suite.push_back(suite_scenario(name));
    return suite;
}

ScenarioDef suite_scenario(const std::string& name) {
    ScenarioDef def;
    def.name = name;
    const auto kv = cfg::KeyValues::parse_text("[scenario]\nkind = " + name + "\n", "<suite>");
    def.app = cfg::load_app_config(kv);
    return def;
}

std::vector<synth::TrafficSample> reference_day(const synth::Scenario& sc,
                                                int period_len_s) {
    const std::int64_t ts0 = sc.trace.front().ts;
    const std::int64_t day_end = ts0 + synth::kSecondsPerDay;
    std::vector<synth::TrafficSample> out;
    out.reserve(synth::kSecondsPerDay);
    for (const auto& s : sc.trace) {
        if (s.ts >= day_end) break;
        const auto idx = static_cast<std::size_t>((s.ts - ts0) / period_len_s);
        if (idx < sc.labels.size() && sc.labels[idx].kind != synth::PeriodKind::Normal)
            continue;
        out.push_back(s);
    }
    return out;
}

PipelineRun run_evt_pipeline(const cfg::AppConfig& app, std::uint64_t seed) {
    PipelineRun run;
    Rng rng(seed);
    const auto base = synth::synth_baseline(app.profile, app.days, rng, app.start_ts);
    run.scenario = synth::build_scenario(base, app.scenario, rng);

    detect::Detector det(app.detector);
    run.decisions.reserve(run.scenario.trace.size());
    for (const auto& s : run.scenario.trace) run.decisions.push_back(det.step(s));
    det.finish(run.scenario.trace.back().ts);
    run.alerts = det.alerts();
    return run;
}

PipelineRun run_gaussian_pipeline(const cfg::AppConfig& app, std::uint64_t seed) {
    PipelineRun run;
    Rng rng(seed);
    const auto base = synth::synth_baseline(app.profile, app.days, rng, app.start_ts);
    run.scenario = synth::build_scenario(base, app.scenario, rng);

    const auto ref = reference_day(run.scenario, app.scenario.period_len_s);
    const auto th = gauss::fit_baseline(ref);
    auto res = gauss::detect_static(th, run.scenario.trace, app.detector.confirm_count);
    run.decisions = std::move(res.decisions);
    run.alerts = std::move(res.alerts);
    return run;
}

std::vector<SuiteRun> run_suite(std::span<const ScenarioDef> suite,
                                std::span<const std::uint64_t> seeds,
                                unsigned threads) {
    struct Job {
        const ScenarioDef* def;
        std::uint64_t seed;
        bool gaussian;
    };
    std::vector<Job> jobs;
    for (const auto& def : suite) {
        for (auto seed : seeds) {
            jobs.push_back({&def, seed, false});
            if (def.run_gaussian) jobs.push_back({&def, seed, true});
        }
    }
    if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());

    std::vector<SuiteRun> results(jobs.size());
    std::size_t next = 0;
    while (next < jobs.size()) {
        const std::size_t batch = std::min<std::size_t>(threads, jobs.size() - next);
        std::vector<std::future<SuiteRun>> futs;
        futs.reserve(batch);
        for (std::size_t k = 0; k < batch; ++k) {
            const Job job = jobs[next + k];
            futs.push_back(std::async(std::launch::async, [job]() {
                const auto run = job.gaussian ? run_gaussian_pipeline(job.def->app, job.seed)
                                              : run_evt_pipeline(job.def->app, job.seed);
                ScoreConfig sc;
                sc.score_from_ts = job.def->app.start_ts + job.def->app.score_from_offset_s;
                SuiteRun out;
                out.scenario = job.def->name;
                out.seed = job.seed;
                out.method = job.gaussian ? "gaussian" : "evt";
                out.report = score(run.scenario.labels, run.decisions, run.alerts, sc);
                return out;
            }));
        }
        for (std::size_t k = 0; k < batch; ++k) results[next + k] = futs[k].get();
        next += batch;
    }
    return results;
}

std::string suite_csv(std::span<const SuiteRun> runs) {
    std::ostringstream out;
    out << "scenario,seed,method,scored_periods,tp,fp,tn,fn,accuracy,precision,recall,"
           "mean_latency_s,attack_as_highload,highload_as_attack\n";
    auto num = [](double v, bool defined) {
        if (!defined) return std::string("");
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.6f", v);
        return std::string(buf);
    };
    for (const auto& r : runs) {
        const auto& rep = r.report;
        out << r.scenario << ',' << r.seed << ',' << r.method << ',' << rep.scored_periods
            << ',' << rep.tp << ',' << rep.fp << ',' << rep.tn << ',' << rep.fn << ','
            << num(rep.accuracy, true) << ',' << num(rep.precision, rep.precision_defined)
            << ',' << num(rep.recall, rep.recall_defined) << ','
            << num(rep.mean_latency_s, rep.latency_defined) << ',' << rep.attack_as_highload
            << ',' << rep.highload_as_attack << '\n';
    }
    return out.str();
}

std::string suite_summary(std::span<const SuiteRun> runs) {
    std::ostringstream out;
    out << "scenario           method    seeds  precision  recall   accuracy  latency(s)\n";
    std::vector<std::pair<std::string, std::string>> keys;
    for (const auto& r : runs) {
        std::pair<std::string, std::string> k{r.scenario, r.method};
        if (std::find(keys.begin(), keys.end(), k) == keys.end()) keys.push_back(k);
    }
    for (const auto& [scen, method] : keys) {
        int n = 0;
        double prec = 0, rec = 0, acc = 0, lat = 0;
        int lat_n = 0;
        for (const auto& r : runs) {
            if (r.scenario != scen || r.method != method) continue;
            ++n;
            prec += r.report.precision;
            rec += r.report.recall;
            acc += r.report.accuracy;
            if (r.report.latency_defined) {
                lat += r.report.mean_latency_s;
                ++lat_n;
            }
        }
        if (n == 0) continue;
        char buf[160];
        std::snprintf(buf, sizeof buf, "%-18s %-9s %5d  %8.4f  %7.4f  %8.4f  %9.2f\n",
                      scen.c_str(), method.c_str(), n, prec / n, rec / n, acc / n,
                      lat_n ? lat / lat_n : 0.0);
        out << buf;
    }
    return out.str();
}

} // namespace stormwatch::eval
