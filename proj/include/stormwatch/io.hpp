#pragma once

#include <cstdint>
#include <fstream>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "stormwatch/detector.hpp"
#include "stormwatch/traffic.hpp"

namespace stormwatch::io {

inline constexpr const char* kToolVersion = "1.0.0";

struct DataError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct ConsistencyError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// FNV-1a over a byte stream; used for config and file fingerprints.
std::uint64_t fnv1a64(std::span<const char> bytes);
std::uint64_t fnv1a64_file(const std::string& path);
std::string hash_hex(std::uint64_t h);

// Writes to <path>.tmp then renames.
void write_file_atomic(const std::string& path, const std::string& content);

// trace.csv: "ts,msg3,msg5,n_bue", epoch-second integers.
void write_trace_csv(const std::string& path, std::span<const synth::TrafficSample> samples);
std::vector<synth::TrafficSample> read_trace_csv(const std::string& path);

// Streaming reader; enforces the header, integer fields and strictly
// +1-second timestamps, reporting the offending row.
class TraceReader {
public:
    explicit TraceReader(const std::string& path);
    std::optional<synth::TrafficSample> next();

private:
    std::ifstream in_;
    std::string path_;
    long row_ = 0;
    std::optional<std::int64_t> last_ts_;
};

// labels.csv: "period_start,kind,rate" with kind in {normal,attack,highload};
// rate is empty for normal periods.
void write_labels_csv(const std::string& path, std::span<const synth::ScenarioLabel> labels);
std::vector<synth::ScenarioLabel> read_labels_csv(const std::string& path);

// decisions.csv: "ts,msg3,r1,th_msg3,th_r1,class,alert_id,verdict".
// class is boot|normal|msg3|r1|positive (which side(s) flagged the second);
// thresholds print with 6 decimals, empty when undefined.
class DecisionWriter {
public:
    explicit DecisionWriter(const std::string& path);
    void write(const detect::Decision& d);
    void close();

private:
    std::ofstream out_;
    std::string path_, tmp_;
};

std::vector<detect::Decision> read_decisions_csv(const std::string& path);

void write_alerts_json(const std::string& path, std::span<const detect::Alert> alerts);
std::vector<detect::Alert> read_alerts_json(const std::string& path);

struct Manifest {
    std::string command;
    std::string config_hash;
    std::uint64_t seed = 0;
    std::string version = kToolVersion;
    std::map<std::string, std::string> inputs;  // name -> content hash
    std::map<std::string, std::string> outputs; // file -> content hash
    double duration_ms = 0.0;
};

void write_manifest(const std::string& dir, const Manifest& m);
std::optional<Manifest> read_manifest(const std::string& dir);

} // namespace stormwatch::io
