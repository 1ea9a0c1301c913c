// stormwatch: synthesize RRC traffic, run the storm detectors, evaluate.
//
// Exit codes: 0 ok, 2 config/usage error, 3 malformed data, 4 run
// consistency (manifest) mismatch.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "stormwatch/config.hpp"
#include "stormwatch/detector.hpp"
#include "stormwatch/eval.hpp"
#include "stormwatch/gaussian_baseline.hpp"
#include "stormwatch/io.hpp"
#include "stormwatch/scenarios.hpp"

namespace fs = std::filesystem;
using namespace stormwatch;

namespace {

struct Timer {
    std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();
    double ms() const {
        return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() -
                                                         start)
            .count();
    }
};

std::string resolve_out_dir(std::string out) {
    if (out.empty()) {
        if (const char* root = std::getenv("STORMWATCH_OUT")) out = root;
    }
    if (out.empty())
        throw cfg::ParseError("no output directory: pass --out or set STORMWATCH_OUT");
    fs::create_directories(out);
    return out;
}

cfg::AppConfig load_config(const std::string& path, std::uint64_t* seed_override,
                           std::string* canonical) {
    cfg::KeyValues kv;
    if (!path.empty()) kv = cfg::KeyValues::parse_file(path);
    auto app = cfg::load_app_config(kv);
    if (seed_override && *seed_override != 0) app.seed = *seed_override;
    if (canonical) *canonical = cfg::dump_app_config(app).canonical();
    return app;
}

int cmd_synth(const std::string& config_path, std::uint64_t seed_flag,
              const std::string& out_flag) {
    Timer timer;
    std::uint64_t seed = seed_flag;
    std::string canonical;
    const auto app = load_config(config_path, &seed, &canonical);
    const auto out = resolve_out_dir(out_flag);

    Rng rng(app.seed);
    const auto base = synth::synth_baseline(app.profile, app.days, rng, app.start_ts);
    const auto scenario = synth::build_scenario(base, app.scenario, rng);

    const auto trace_path = (fs::path(out) / "trace.csv").string();
    const auto labels_path = (fs::path(out) / "labels.csv").string();
    io::write_trace_csv(trace_path, scenario.trace);
    io::write_labels_csv(labels_path, scenario.labels);

    io::Manifest m;
    m.command = "synth";
    m.config_hash = io::hash_hex(io::fnv1a64({canonical.data(), canonical.size()}));
    m.seed = app.seed;
    m.outputs["trace.csv"] = io::hash_hex(io::fnv1a64_file(trace_path));
    m.outputs["labels.csv"] = io::hash_hex(io::fnv1a64_file(labels_path));
    m.duration_ms = timer.ms();
    io::write_manifest(out, m);

    std::cout << "wrote " << scenario.trace.size() << " samples, " << scenario.labels.size()
              << " periods to " << out << "\n";
    return 0;
}

int cmd_detect(const std::string& trace_path, const std::string& method,
               const std::string& config_path, const std::string& reference_day_labels,
               const std::string& out_flag) {
    Timer timer;
    std::string canonical;
    const auto app = load_config(config_path, nullptr, &canonical);
    const auto out = resolve_out_dir(out_flag);
    const auto decisions_path = (fs::path(out) / "decisions.csv").string();
    const auto alerts_path = (fs::path(out) / "alerts.json").string();

    std::vector<detect::Alert> alerts;
    if (method == "evt") {
        // Streaming: bounded by the POT windows, not the trace length.
        io::TraceReader reader(trace_path);
        io::DecisionWriter writer(decisions_path);
        detect::Detector det(app.detector);
        std::int64_t last_ts = 0;
        while (auto s = reader.next()) {
            writer.write(det.step(*s));
            last_ts = s->ts;
        }
        det.finish(last_ts);
        writer.close();
        alerts = det.alerts();
    } else if (method == "gaussian") {
        if (reference_day_labels.empty())
            throw cfg::ParseError("--method gaussian requires --reference-day <labels.csv>");
        const auto labels = io::read_labels_csv(reference_day_labels);
        const auto trace = io::read_trace_csv(trace_path);
        if (trace.empty()) throw io::DataError(trace_path + ": no samples");
        synth::Scenario sc{trace, labels};
        const auto ref = eval::reference_day(sc, app.scenario.period_len_s);
        const auto th = gauss::fit_baseline(ref);
        auto res = gauss::detect_static(th, trace, app.detector.confirm_count);
        io::DecisionWriter writer(decisions_path);
        for (const auto& d : res.decisions) writer.write(d);
        writer.close();
        alerts = std::move(res.alerts);
    } else {
        throw cfg::ParseError("unknown method '" + method + "' (expected evt or gaussian)");
    }
    io::write_alerts_json(alerts_path, alerts);

    io::Manifest m;
    m.command = "detect";
    m.config_hash = io::hash_hex(io::fnv1a64({canonical.data(), canonical.size()}));
    m.inputs["trace.csv"] = io::hash_hex(io::fnv1a64_file(trace_path));
    m.outputs["decisions.csv"] = io::hash_hex(io::fnv1a64_file(decisions_path));
    m.outputs["alerts.json"] = io::hash_hex(io::fnv1a64_file(alerts_path));
    m.duration_ms = timer.ms();
    io::write_manifest(out, m);

    std::cout << "wrote decisions and " << alerts.size() << " alerts to " << out << "\n";
    return 0;
}

nlohmann::json report_json(const eval::EvalReport& rep) {
    nlohmann::json j;
    j["scored_periods"] = rep.scored_periods;
    j["tp"] = rep.tp;
    j["fp"] = rep.fp;
    j["tn"] = rep.tn;
    j["fn"] = rep.fn;
    j["accuracy"] = rep.accuracy;
    j["precision"] = rep.precision;
    j["precision_defined"] = rep.precision_defined;
    j["recall"] = rep.recall;
    j["recall_defined"] = rep.recall_defined;
    if (rep.latency_defined) j["mean_latency_s"] = rep.mean_latency_s;
    j["latency_defined"] = rep.latency_defined;
    j["attack_as_highload"] = rep.attack_as_highload;
    j["highload_as_attack"] = rep.highload_as_attack;
    j["seconds"] = {{"anomalous", rep.sec_anomalous},
                    {"normal", rep.sec_normal},
                    {"positive_in_anomalous", rep.sec_positive_in_anomalous},
                    {"positive_in_normal", rep.sec_positive_in_normal}};
    return j;
}

void write_report_files(const std::string& out, const eval::EvalReport& rep) {
    nlohmann::json j = report_json(rep);
    io::write_file_atomic((fs::path(out) / "report.json").string(), j.dump(2) + "\n");

    std::ostringstream csv;
    csv << "period_start,kind,rate,detected,detect_ts,latency_s,verdict\n";
    for (const auto& ev : rep.events) {
        csv << ev.period_start << ','
            << (ev.kind == synth::PeriodKind::Attack ? "attack" : "highload") << ',';
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.6f", ev.rate);
        csv << buf << ',' << (ev.detected ? 1 : 0) << ',';
        if (ev.detected) csv << ev.detect_ts;
        csv << ',';
        if (ev.detected) {
            std::snprintf(buf, sizeof buf, "%.1f", ev.latency_s);
            csv << buf;
        }
        csv << ',' << (ev.detected ? detect::to_string(ev.verdict) : "") << '\n';
    }
    io::write_file_atomic((fs::path(out) / "events.csv").string(), csv.str());
}

// Plot-data extracts from the decision log: the feature series with their
// thresholds, and r2 during alerts.
void write_plot_data(const std::string& out, const std::vector<detect::Decision>& decisions,
                     const std::vector<detect::Alert>& alerts) {
    std::ostringstream m3;
    m3 << "ts,msg3,th_msg3\n";
    std::ostringstream r1;
    r1 << "ts,r1,th_r1\n";
    auto fmt = [](double v) {
        if (!std::isfinite(v)) return std::string("");
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.6f", v);
        return std::string(buf);
    };
    for (const auto& d : decisions) {
        m3 << d.ts << ',' << d.msg3 << ',' << (d.bootstrap ? "" : fmt(d.th_msg3)) << '\n';
        r1 << d.ts << ',' << fmt(d.r1) << ',' << (d.bootstrap ? "" : fmt(d.th_r1)) << '\n';
    }
    io::write_file_atomic((fs::path(out) / "plot_msg3.csv").string(), m3.str());
    io::write_file_atomic((fs::path(out) / "plot_r1.csv").string(), r1.str());

    std::ostringstream r2;
    r2 << "alert_id,ts,r2\n";
    for (const auto& a : alerts)
        for (const auto& [ts, v] : a.r2_series)
            r2 << a.id << ',' << ts << ',' << fmt(v) << '\n';
    io::write_file_atomic((fs::path(out) / "plot_r2.csv").string(), r2.str());
}

int cmd_eval(const std::string& decisions_path, const std::string& alerts_path,
             const std::string& labels_path, const std::string& config_path,
             const std::string& out_flag) {
    Timer timer;
    std::string canonical;
    const auto app = load_config(config_path, nullptr, &canonical);
    const auto out = resolve_out_dir(out_flag);

    // Inputs must come from the same run when manifests are present.
    const auto detect_manifest = io::read_manifest(fs::path(decisions_path).parent_path().string());
    const auto synth_manifest = io::read_manifest(fs::path(labels_path).parent_path().string());
    if (detect_manifest && synth_manifest) {
        const auto it_in = detect_manifest->inputs.find("trace.csv");
        const auto it_out = synth_manifest->outputs.find("trace.csv");
        if (it_in != detect_manifest->inputs.end() && it_out != synth_manifest->outputs.end() &&
            it_in->second != it_out->second)
            throw io::ConsistencyError("decisions were produced from a different trace than "
                                       "these labels (manifest hash mismatch)");
    }

    const auto labels = io::read_labels_csv(labels_path);
    const auto decisions = io::read_decisions_csv(decisions_path);
    const auto alerts = io::read_alerts_json(alerts_path);

    eval::ScoreConfig sc;
    if (!labels.empty()) sc.score_from_ts = labels.front().period_start + app.score_from_offset_s;
    const auto rep = eval::score(labels, decisions, alerts, sc);
    write_report_files(out, rep);
    write_plot_data(out, decisions, alerts);

    io::Manifest m;
    m.command = "eval";
    m.config_hash = io::hash_hex(io::fnv1a64({canonical.data(), canonical.size()}));
    m.inputs["decisions.csv"] = io::hash_hex(io::fnv1a64_file(decisions_path));
    m.inputs["alerts.json"] = io::hash_hex(io::fnv1a64_file(alerts_path));
    m.inputs["labels.csv"] = io::hash_hex(io::fnv1a64_file(labels_path));
    m.outputs["report.json"] = io::hash_hex(io::fnv1a64_file((fs::path(out) / "report.json").string()));
    m.duration_ms = timer.ms();
    io::write_manifest(out, m);

    char buf[160];
    std::snprintf(buf, sizeof buf,
                  "accuracy %.4f  precision %.4f  recall %.4f  latency %.2fs\n", rep.accuracy,
                  rep.precision, rep.recall, rep.latency_defined ? rep.mean_latency_s : 0.0);
    std::cout << buf;
    return 0;
}

int cmd_suite(const std::string& seeds_arg, const std::string& scenarios_arg,
              const std::string& out_flag, unsigned threads) {
    const auto out = resolve_out_dir(out_flag);

    std::vector<std::uint64_t> seeds;
    std::istringstream ss(seeds_arg);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        if (tok.empty()) continue;
        try {
            seeds.push_back(std::stoull(tok));
        } catch (const std::exception&) {
            throw cfg::ParseError("bad seed '" + tok + "'");
        }
    }
    if (seeds.empty()) seeds = {1};

    std::vector<eval::ScenarioDef> suite;
    if (scenarios_arg.empty()) {
        suite = eval::default_suite();
    } else {
        std::istringstream sc(scenarios_arg);
        while (std::getline(sc, tok, ',')) {
            if (!tok.empty()) suite.push_back(eval::suite_scenario(tok));
        }
    }

    const auto runs = eval::run_suite(suite, seeds, threads);
    io::write_file_atomic((fs::path(out) / "suite.csv").string(), eval::suite_csv(runs));
    const auto summary = eval::suite_summary(runs);
    io::write_file_atomic((fs::path(out) / "suite.txt").string(), summary);
    std::cout << summary;
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"RRC signaling storm detection toolkit.\n"
                 "Exit codes: 0 ok, 2 config/usage error, 3 malformed data, "
                 "4 run-consistency mismatch."};
    app.require_subcommand(1);

    std::string config_path, out_dir, trace_path, method = "evt", reference_day;
    std::string decisions_path, alerts_path, labels_path, seeds = "1", scenarios_arg;
    std::uint64_t seed = 0;
    unsigned threads = 0;

    auto* synth_cmd = app.add_subcommand("synth", "synthesize a labelled traffic scenario");
    synth_cmd->add_option("--config", config_path, "config file (key = value sections)");
    synth_cmd->add_option("--seed", seed, "RNG seed (overrides config)");
    synth_cmd->add_option("--out", out_dir, "output directory (default $STORMWATCH_OUT)");

    auto* detect_cmd = app.add_subcommand("detect", "run a detector over a trace");
    detect_cmd->add_option("--trace", trace_path, "trace.csv input")->required();
    detect_cmd->add_option("--method", method, "evt | gaussian");
    detect_cmd->add_option("--config", config_path, "config file");
    detect_cmd->add_option("--reference-day", reference_day,
                           "labels.csv marking anomalies to exclude from the gaussian fit day");
    detect_cmd->add_option("--out", out_dir, "output directory");

    auto* eval_cmd = app.add_subcommand("eval", "score decisions against labels");
    eval_cmd->add_option("--decisions", decisions_path, "decisions.csv");
    eval_cmd->add_option("--alerts", alerts_path, "alerts.json");
    eval_cmd->add_option("--labels", labels_path, "labels.csv");
    eval_cmd->add_option("--config", config_path, "config file");
    eval_cmd->add_option("--out", out_dir, "output directory");
    bool run_suite_flag = false;
    eval_cmd->add_flag("--suite", run_suite_flag, "run the named scenario suite end to end");
    eval_cmd->add_option("--seeds", seeds, "comma-separated seeds for --suite");
    eval_cmd->add_option("--scenarios", scenarios_arg,
                         "comma-separated scenario names for --suite (default: all)");
    eval_cmd->add_option("--threads", threads, "worker threads for --suite (default: hw)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (synth_cmd->parsed()) return cmd_synth(config_path, seed, out_dir);
        if (detect_cmd->parsed())
            return cmd_detect(trace_path, method, config_path, reference_day, out_dir);
        if (eval_cmd->parsed()) {
            if (run_suite_flag) return cmd_suite(seeds, scenarios_arg, out_dir, threads);
            if (decisions_path.empty() || alerts_path.empty() || labels_path.empty())
                throw cfg::ParseError("eval needs --decisions, --alerts and --labels "
                                      "(or --suite)");
            return cmd_eval(decisions_path, alerts_path, labels_path, config_path, out_dir);
        }
    } catch (const cfg::ParseError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const synth::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const io::DataError& e) {
        std::cerr << "data error: " << e.what() << "\n";
        return 3;
    } catch (const io::ConsistencyError& e) {
        std::cerr << "consistency error: " << e.what() << "\n";
        return 4;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
