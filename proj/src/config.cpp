#include "stormwatch/config.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>

namespace stormwatch::cfg {

namespace {

std::string trim(const std::string& s) {
    auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

} // namespace

KeyValues KeyValues::parse_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open config file: " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_text(ss.str(), path);
}

KeyValues KeyValues::parse_text(const std::string& text, const std::string& origin) {
    KeyValues kv;
    kv.origin_ = origin;
    std::istringstream in(text);
    std::string line;
    std::string section;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']')
                throw ParseError(origin + ":" + std::to_string(lineno) +
                                 ": unterminated section header");
            section = trim(line.substr(1, line.size() - 2));
            if (section.empty())
                throw ParseError(origin + ":" + std::to_string(lineno) + ": empty section name");
            continue;
        }
        auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ParseError(origin + ":" + std::to_string(lineno) +
                             ": expected 'key = value', got '" + line + "'");
        std::string key = trim(line.substr(0, eq));
        std::string value = trim(line.substr(eq + 1));
        if (key.empty())
            throw ParseError(origin + ":" + std::to_string(lineno) + ": empty key");
        std::string full = section.empty() ? key : section + "." + key;
        kv.values_[full] = value;
        kv.lines_[full] = lineno;
    }
    return kv;
}

void KeyValues::fail(const std::string& key, const std::string& what) const {
    auto it = lines_.find(key);
    std::string where = origin_;
    if (it != lines_.end()) where += ":" + std::to_string(it->second);
    throw ParseError(where + ": field '" + key + "': " + what);
}

std::string KeyValues::get_string(const std::string& key, const std::string& fallback) const {
    auto it = values_.find(key);
    return it == values_.end() ? fallback : it->second;
}

double KeyValues::get_double(const std::string& key, double fallback) const {
    auto it = values_.find(key);
    if (it == values_.end()) return fallback;
    try {
        std::size_t pos = 0;
        double v = std::stod(it->second, &pos);
        if (pos != it->second.size()) fail(key, "trailing characters in number");
        return v;
    } catch (const ParseError&) {
        throw;
    } catch (const std::exception&) {
        fail(key, "not a number: '" + it->second + "'");
    }
}

std::int64_t KeyValues::get_int(const std::string& key, std::int64_t fallback) const {
    auto it = values_.find(key);
    if (it == values_.end()) return fallback;
    try {
        std::size_t pos = 0;
        long long v = std::stoll(it->second, &pos);
        if (pos != it->second.size()) fail(key, "trailing characters in integer");
        return v;
    } catch (const ParseError&) {
        throw;
    } catch (const std::exception&) {
        fail(key, "not an integer: '" + it->second + "'");
    }
}

std::string KeyValues::canonical() const {
    std::ostringstream out;
    for (const auto& [k, v] : values_) out << k << " = " << v << "\n";
    return out.str();
}

ScenarioKind scenario_kind_from(const std::string& name) {
    if (name == "single") return ScenarioKind::Single;
    if (name == "multi") return ScenarioKind::Multi;
    if (name == "low_unavail") return ScenarioKind::LowUnavailability;
    if (name == "low_rate") return ScenarioKind::LowRate;
    if (name == "busy") return ScenarioKind::Busy;
    if (name == "clean") return ScenarioKind::Clean;
    throw ParseError("unknown scenario kind: '" + name + "'");
}

std::string to_string(ScenarioKind kind) {
    switch (kind) {
    case ScenarioKind::Single: return "single";
    case ScenarioKind::Multi: return "multi";
    case ScenarioKind::LowUnavailability: return "low_unavail";
    case ScenarioKind::LowRate: return "low_rate";
    case ScenarioKind::Busy: return "busy";
    case ScenarioKind::Clean: return "clean";
    }
    return "multi";
}

AppConfig default_app_config() {
    AppConfig cfg;
    cfg.detector = detect::DetectorConfig::defaults();
    return cfg;
}

AppConfig load_app_config(const KeyValues& kv) {
    AppConfig cfg = default_app_config();

    cfg.seed = static_cast<std::uint64_t>(kv.get_int("synth.seed", static_cast<std::int64_t>(cfg.seed)));
    cfg.days = static_cast<int>(kv.get_int("synth.days", cfg.days));
    cfg.start_ts = kv.get_int("synth.start_ts", cfg.start_ts);
    cfg.kind = scenario_kind_from(kv.get_string("scenario.kind", to_string(cfg.kind)));

    auto& pr = cfg.profile;
    pr.floor_rate = kv.get_double("profile.floor", pr.floor_rate);
    pr.morning_amp = kv.get_double("profile.morning_amp", pr.morning_amp);
    pr.morning_center_h = kv.get_double("profile.morning_center", pr.morning_center_h);
    pr.morning_width_h = kv.get_double("profile.morning_width", pr.morning_width_h);
    pr.evening_amp = kv.get_double("profile.evening_amp", pr.evening_amp);
    pr.evening_center_h = kv.get_double("profile.evening_center", pr.evening_center_h);
    pr.evening_width_h = kv.get_double("profile.evening_width", pr.evening_width_h);
    pr.scale = kv.get_double("synth.scale", pr.scale);
    pr.ue_per_rate = kv.get_double("profile.ue_per_rate", pr.ue_per_rate);
    pr.ue_cap = static_cast<int>(kv.get_int("profile.ue_cap", pr.ue_cap));
    pr.failure_per_msg3 = kv.get_double("profile.failure_per_msg3", pr.failure_per_msg3);
    pr.day_jitter = kv.get_double("profile.day_jitter", pr.day_jitter);

    auto& sc = cfg.scenario;
    sc.days = cfg.days;
    sc.period_len_s = static_cast<int>(kv.get_int("scenario.period_len", sc.period_len_s));
    sc.target_normal = static_cast<int>(kv.get_int("scenario.target_normal", sc.target_normal));
    sc.target_attack = static_cast<int>(kv.get_int("scenario.target_attack", sc.target_attack));
    sc.target_highload =
        static_cast<int>(kv.get_int("scenario.target_highload", sc.target_highload));
    sc.clean_lead_periods =
        static_cast<int>(kv.get_int("scenario.clean_lead_periods", sc.clean_lead_periods));
    sc.rate_max = kv.get_double("attack.rate_max", sc.rate_max);
    sc.target_availability =
        kv.get_double("scenario.target_availability", sc.target_availability);
    sc.min_frac_lo = kv.get_double("scenario.min_frac_lo", sc.min_frac_lo);
    sc.min_frac_hi = kv.get_double("scenario.min_frac_hi", sc.min_frac_hi);
    sc.gnb.t_w = kv.get_double("gnb.waiting_time", sc.gnb.t_w);
    sc.gnb.n_max = static_cast<int>(kv.get_int("gnb.n_max", sc.gnb.n_max));

    auto& det = cfg.detector;
    det.confirm_count = static_cast<int>(kv.get_int("detector.confirm", det.confirm_count));
    det.r2_highload_level = kv.get_double("detector.r2_level", det.r2_highload_level);
    det.r2_horizon_s = static_cast<int>(kv.get_int("detector.r2_horizon", det.r2_horizon_s));
    det.n_max = sc.gnb.n_max;
    auto load_pot = [&](evt::PotConfig& pot, const std::string& prefix) {
        pot.window_len = static_cast<std::size_t>(
            kv.get_int(prefix + ".window", static_cast<std::int64_t>(pot.window_len)));
        pot.gap_len = static_cast<std::size_t>(
            kv.get_int(prefix + ".gap", static_cast<std::int64_t>(pot.gap_len)));
        pot.q = kv.get_double(prefix + ".q", pot.q);
        pot.init_quantile = kv.get_double(prefix + ".init_quantile", pot.init_quantile);
        pot.min_peaks = static_cast<std::size_t>(
            kv.get_int(prefix + ".min_peaks", static_cast<std::int64_t>(pot.min_peaks)));
        pot.quantile_step = kv.get_double(prefix + ".quantile_step", pot.quantile_step);
    };
    load_pot(det.msg3_pot, "detector.msg3");
    load_pot(det.r1_pot, "detector.r1");

    cfg.score_from_offset_s = kv.get_int("eval.score_from_offset", cfg.score_from_offset_s);

    // Scenario-kind presets; explicit keys above still win where they apply.
    switch (cfg.kind) {
    case ScenarioKind::Single: {
        cfg.days = static_cast<int>(kv.get_int("synth.days", 1));
        sc.days = cfg.days;
        model::EpisodeSpec ep;
        ep.kind = model::EpisodeKind::Attack;
        ep.rate = kv.get_double("scenario.single_rate", 100.0);
        ep.start = cfg.start_ts + kv.get_int("scenario.single_offset", 15 * 3600 + 15 * 60);
        ep.duration_s = static_cast<int>(kv.get_int("scenario.single_duration", 900));
        sc.single_episode = ep;
        cfg.score_from_offset_s = kv.get_int("eval.score_from_offset", 0);
        break;
    }
    case ScenarioKind::Multi:
        break;
    case ScenarioKind::LowUnavailability:
        sc.attacks_only = true;
        sc.rate_policy = synth::RatePolicy::TargetAvailability;
        break;
    case ScenarioKind::LowRate:
        sc.rate_policy = synth::RatePolicy::FractionOfMin;
        break;
    case ScenarioKind::Busy:
        pr.scale = kv.get_double("synth.scale", 1.5);
        break;
    case ScenarioKind::Clean:
        sc.target_attack = 0;
        sc.target_highload = 0;
        cfg.score_from_offset_s = kv.get_int("eval.score_from_offset", 0);
        break;
    }
    return cfg;
}

KeyValues dump_app_config(const AppConfig& cfg) {
    KeyValues kv;
    auto set_num = [&](const std::string& k, double v) {
        std::ostringstream ss;
        ss << v;
        kv.set(k, ss.str());
    };
    auto set_int = [&](const std::string& k, std::int64_t v) { kv.set(k, std::to_string(v)); };

    set_int("synth.seed", static_cast<std::int64_t>(cfg.seed));
    set_int("synth.days", cfg.days);
    set_int("synth.start_ts", cfg.start_ts);
    set_num("synth.scale", cfg.profile.scale);
    kv.set("scenario.kind", to_string(cfg.kind));

    set_num("profile.floor", cfg.profile.floor_rate);
    set_num("profile.morning_amp", cfg.profile.morning_amp);
    set_num("profile.morning_center", cfg.profile.morning_center_h);
    set_num("profile.morning_width", cfg.profile.morning_width_h);
    set_num("profile.evening_amp", cfg.profile.evening_amp);
    set_num("profile.evening_center", cfg.profile.evening_center_h);
    set_num("profile.evening_width", cfg.profile.evening_width_h);
    set_num("profile.ue_per_rate", cfg.profile.ue_per_rate);
    set_int("profile.ue_cap", cfg.profile.ue_cap);
    set_num("profile.failure_per_msg3", cfg.profile.failure_per_msg3);
    set_num("profile.day_jitter", cfg.profile.day_jitter);

    set_int("scenario.period_len", cfg.scenario.period_len_s);
    set_int("scenario.target_normal", cfg.scenario.target_normal);
    set_int("scenario.target_attack", cfg.scenario.target_attack);
    set_int("scenario.target_highload", cfg.scenario.target_highload);
    set_int("scenario.clean_lead_periods", cfg.scenario.clean_lead_periods);
    set_num("attack.rate_max", cfg.scenario.rate_max);
    set_num("scenario.target_availability", cfg.scenario.target_availability);
    set_num("scenario.min_frac_lo", cfg.scenario.min_frac_lo);
    set_num("scenario.min_frac_hi", cfg.scenario.min_frac_hi);
    if (cfg.scenario.single_episode) {
        set_num("scenario.single_rate", cfg.scenario.single_episode->rate);
        set_int("scenario.single_offset", cfg.scenario.single_episode->start - cfg.start_ts);
        set_int("scenario.single_duration", cfg.scenario.single_episode->duration_s);
    }

    set_num("gnb.waiting_time", cfg.scenario.gnb.t_w);
    set_int("gnb.n_max", cfg.scenario.gnb.n_max);

    set_int("detector.confirm", cfg.detector.confirm_count);
    set_num("detector.r2_level", cfg.detector.r2_highload_level);
    set_int("detector.r2_horizon", cfg.detector.r2_horizon_s);
    auto dump_pot = [&](const evt::PotConfig& pot, const std::string& prefix) {
        set_int(prefix + ".window", static_cast<std::int64_t>(pot.window_len));
        set_int(prefix + ".gap", static_cast<std::int64_t>(pot.gap_len));
        set_num(prefix + ".q", pot.q);
        set_num(prefix + ".init_quantile", pot.init_quantile);
        set_int(prefix + ".min_peaks", static_cast<std::int64_t>(pot.min_peaks));
        set_num(prefix + ".quantile_step", pot.quantile_step);
    };
    dump_pot(cfg.detector.msg3_pot, "detector.msg3");
    dump_pot(cfg.detector.r1_pot, "detector.r1");

    set_int("eval.score_from_offset", cfg.score_from_offset_s);
    return kv;
}

} // namespace stormwatch::cfg
