#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>

#include "stormwatch/detector.hpp"
#include "stormwatch/traffic.hpp"

namespace stormwatch::cfg {

struct ParseError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Key/value text with [section] and [section.sub] headers, '#' comments.
// Keys flatten to "section.sub.key".
class KeyValues {
public:
    static KeyValues parse_file(const std::string& path);
    static KeyValues parse_text(const std::string& text, const std::string& origin);

    bool has(const std::string& key) const { return values_.count(key) > 0; }
    std::string get_string(const std::string& key, const std::string& fallback) const;
    double get_double(const std::string& key, double fallback) const;
    std::int64_t get_int(const std::string& key, std::int64_t fallback) const;

    void set(const std::string& key, const std::string& value) { values_[key] = value; }

    // Sorted canonical "key = value" dump; hashed into run manifests.
    std::string canonical() const;

private:
    std::map<std::string, std::string> values_;
    std::map<std::string, int> lines_;
    std::string origin_;

    [[noreturn]] void fail(const std::string& key, const std::string& what) const;
};

enum class ScenarioKind { Single, Multi, LowUnavailability, LowRate, Busy, Clean };

ScenarioKind scenario_kind_from(const std::string& name);
std::string to_string(ScenarioKind kind);

struct AppConfig {
    std::uint64_t seed = 1;
    int days = 4;
    std::int64_t start_ts = synth::kDefaultStartTs;
    ScenarioKind kind = ScenarioKind::Multi;
    synth::DiurnalProfile profile;
    synth::ScenarioConfig scenario;
    detect::DetectorConfig detector;
    // Scoring starts this many seconds into the trace (keeps warm-up and the
    // baseline's reference day out of the metrics).
    std::int64_t score_from_offset_s = synth::kSecondsPerDay;
};

// Applies file values over the built-in defaults; every tuning constant is
// addressable here.
AppConfig load_app_config(const KeyValues& kv);
AppConfig default_app_config();

// The config as key/values (defaults merged), for hashing and the manifest.
KeyValues dump_app_config(const AppConfig& cfg);

} // namespace stormwatch::cfg
