#include "stormwatch/io.hpp"

#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <limits>
#include <sstream>

namespace stormwatch::io {

namespace fs = std::filesystem;

std::uint64_t fnv1a64(std::span<const char> bytes) {
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (char c : bytes) {
        h ^= static_cast<unsigned char>(c);
        h *= 0x100000001b3ull;
    }
    return h;
}

std::uint64_t fnv1a64_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open file for hashing: " + path);
    std::uint64_t h = 0xcbf29ce484222325ull;
    char buf[1 << 16];
    while (in.read(buf, sizeof buf) || in.gcount() > 0) {
        const auto n = static_cast<std::size_t>(in.gcount());
        for (std::size_t i = 0; i < n; ++i) {
            h ^= static_cast<unsigned char>(buf[i]);
            h *= 0x100000001b3ull;
        }
    }
    return h;
}

std::string hash_hex(std::uint64_t h) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016" PRIx64, h);
    return buf;
}

void write_file_atomic(const std::string& path, const std::string& content) {
    const std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw DataError("cannot write: " + tmp);
        out << content;
    }
    fs::rename(tmp, path);
}

void write_trace_csv(const std::string& path, std::span<const synth::TrafficSample> samples) {
    std::ostringstream out;
    out << "ts,msg3,msg5,n_bue\n";
    for (const auto& s : samples)
        out << s.ts << ',' << s.msg3 << ',' << s.msg5 << ',' << s.n_bue << '\n';
    write_file_atomic(path, out.str());
}

namespace {

std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : line) {
        if (c == ',') {
            out.push_back(cur);
            cur.clear();
        } else if (c != '\r') {
            cur.push_back(c);
        }
    }
    out.push_back(cur);
    return out;
}

long parse_long(const std::string& s, const std::string& path, long row) {
    try {
        std::size_t pos = 0;
        long v = std::stol(s, &pos);
        if (pos != s.size()) throw std::invalid_argument("trailing");
        return v;
    } catch (const std::exception&) {
        throw DataError(path + ": row " + std::to_string(row) + ": bad integer '" + s + "'");
    }
}

double parse_double(const std::string& s, const std::string& path, long row) {
    try {
        std::size_t pos = 0;
        double v = std::stod(s, &pos);
        if (pos != s.size()) throw std::invalid_argument("trailing");
        return v;
    } catch (const std::exception&) {
        throw DataError(path + ": row " + std::to_string(row) + ": bad number '" + s + "'");
    }
}

} // namespace

TraceReader::TraceReader(const std::string& path) : in_(path), path_(path) {
    if (!in_) throw DataError("cannot open trace: " + path);
    std::string header;
    if (!std::getline(in_, header)) throw DataError(path + ": empty file");
    if (!header.empty() && header.back() == '\r') header.pop_back();
    if (header != "ts,msg3,msg5,n_bue")
        throw DataError(path + ": row 1: expected header 'ts,msg3,msg5,n_bue'");
    row_ = 1;
}

std::optional<synth::TrafficSample> TraceReader::next() {
    std::string line;
    if (!std::getline(in_, line)) return std::nullopt;
    ++row_;
    const auto f = split_csv(line);
    if (f.size() != 4)
        throw DataError(path_ + ": row " + std::to_string(row_) + ": expected 4 fields");
    synth::TrafficSample s;
    s.ts = parse_long(f[0], path_, row_);
    s.msg3 = static_cast<int>(parse_long(f[1], path_, row_));
    s.msg5 = static_cast<int>(parse_long(f[2], path_, row_));
    s.n_bue = static_cast<int>(parse_long(f[3], path_, row_));
    if (s.msg3 < 0 || s.msg5 < 0 || s.n_bue < 0)
        throw DataError(path_ + ": row " + std::to_string(row_) + ": negative count");
    if (last_ts_ && s.ts != *last_ts_ + 1)
        throw DataError(path_ + ": row " + std::to_string(row_) +
                        ": timestamps must increase by 1s");
    last_ts_ = s.ts;
    return s;
}

std::vector<synth::TrafficSample> read_trace_csv(const std::string& path) {
    TraceReader reader(path);
    std::vector<synth::TrafficSample> out;
    while (auto s = reader.next()) out.push_back(*s);
    return out;
}

void write_labels_csv(const std::string& path, std::span<const synth::ScenarioLabel> labels) {
    std::ostringstream out;
    out << "period_start,kind,rate\n";
    for (const auto& l : labels) {
        out << l.period_start << ',';
        switch (l.kind) {
        case synth::PeriodKind::Normal: out << "normal,"; break;
        case synth::PeriodKind::Attack: out << "attack,"; break;
        case synth::PeriodKind::HighLoad: out << "highload,"; break;
        }
        if (l.kind != synth::PeriodKind::Normal) {
            char buf[32];
            std::snprintf(buf, sizeof buf, "%.6f", l.rate);
            out << buf;
        }
        out << '\n';
    }
    write_file_atomic(path, out.str());
}

std::vector<synth::ScenarioLabel> read_labels_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open labels: " + path);
    std::string line;
    if (!std::getline(in, line)) throw DataError(path + ": empty file");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != "period_start,kind,rate")
        throw DataError(path + ": row 1: expected header 'period_start,kind,rate'");
    std::vector<synth::ScenarioLabel> out;
    long row = 1;
    while (std::getline(in, line)) {
        ++row;
        const auto f = split_csv(line);
        if (f.size() != 3)
            throw DataError(path + ": row " + std::to_string(row) + ": expected 3 fields");
        synth::ScenarioLabel l;
        l.period_start = parse_long(f[0], path, row);
        if (f[1] == "normal") l.kind = synth::PeriodKind::Normal;
        else if (f[1] == "attack") l.kind = synth::PeriodKind::Attack;
        else if (f[1] == "highload") l.kind = synth::PeriodKind::HighLoad;
        else throw DataError(path + ": row " + std::to_string(row) + ": bad kind '" + f[1] + "'");
        l.rate = f[2].empty() ? 0.0 : parse_double(f[2], path, row);
        out.push_back(l);
    }
    return out;
}

namespace {

std::string class_code(const detect::Decision& d) {
    if (d.bootstrap) return "boot";
    if (d.positive) return "positive";
    const bool m = d.msg3_class == evt::SampleClass::Anomaly;
    const bool r = d.r1_class == evt::SampleClass::Anomaly;
    if (m) return "msg3";
    if (r) return "r1";
    return "normal";
}

std::string fmt6(double v) {
    if (!std::isfinite(v)) return "";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6f", v);
    return buf;
}

} // namespace

DecisionWriter::DecisionWriter(const std::string& path)
    : path_(path), tmp_(path + ".tmp") {
    out_.open(tmp_, std::ios::binary | std::ios::trunc);
    if (!out_) throw DataError("cannot write: " + tmp_);
    out_ << "ts,msg3,r1,th_msg3,th_r1,class,alert_id,verdict\n";
}

void DecisionWriter::write(const detect::Decision& d) {
    out_ << d.ts << ',' << d.msg3 << ',' << fmt6(d.r1) << ',';
    if (!d.bootstrap) out_ << fmt6(d.th_msg3);
    out_ << ',';
    if (!d.bootstrap) out_ << fmt6(d.th_r1);
    out_ << ',' << class_code(d) << ',';
    if (d.alert_id >= 0) out_ << d.alert_id;
    out_ << ',';
    if (d.alert_id >= 0) out_ << detect::to_string(d.verdict);
    out_ << '\n';
}

void DecisionWriter::close() {
    if (!out_.is_open()) return;
    out_.close();
    fs::rename(tmp_, path_);
}

std::vector<detect::Decision> read_decisions_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open decisions: " + path);
    std::string line;
    if (!std::getline(in, line)) throw DataError(path + ": empty file");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != "ts,msg3,r1,th_msg3,th_r1,class,alert_id,verdict")
        throw DataError(path + ": row 1: unexpected header");
    std::vector<detect::Decision> out;
    long row = 1;
    while (std::getline(in, line)) {
        ++row;
        const auto f = split_csv(line);
        if (f.size() != 8)
            throw DataError(path + ": row " + std::to_string(row) + ": expected 8 fields");
        detect::Decision d;
        d.ts = parse_long(f[0], path, row);
        d.msg3 = static_cast<int>(parse_long(f[1], path, row));
        d.r1 = parse_double(f[2], path, row);
        d.th_msg3 = f[3].empty() ? std::numeric_limits<double>::quiet_NaN()
                                 : parse_double(f[3], path, row);
        d.th_r1 = f[4].empty() ? std::numeric_limits<double>::quiet_NaN()
                               : parse_double(f[4], path, row);
        d.bootstrap = f[5] == "boot";
        d.positive = f[5] == "positive";
        if (f[5] == "msg3" || f[5] == "positive") d.msg3_class = evt::SampleClass::Anomaly;
        if (f[5] == "r1" || f[5] == "positive") d.r1_class = evt::SampleClass::Anomaly;
        d.alert_id = f[6].empty() ? -1 : static_cast<int>(parse_long(f[6], path, row));
        if (f[7] == "attack") d.verdict = detect::Verdict::Attack;
        else if (f[7] == "highload") d.verdict = detect::Verdict::HighLoad;
        out.push_back(d);
    }
    return out;
}

void write_alerts_json(const std::string& path, std::span<const detect::Alert> alerts) {
    nlohmann::json j;
    j["alerts"] = nlohmann::json::array();
    for (const auto& a : alerts) {
        nlohmann::json ja;
        ja["alert_id"] = a.id;
        ja["onset_ts"] = a.onset_ts;
        ja["detect_ts"] = a.detect_ts;
        ja["last_positive_ts"] = a.last_positive_ts;
        if (a.close_ts) ja["close_ts"] = *a.close_ts;
        ja["verdict"] = detect::to_string(a.verdict);
        nlohmann::json r2 = nlohmann::json::array();
        for (const auto& [ts, v] : a.r2_series) r2.push_back({ts, v});
        ja["r2"] = std::move(r2);
        j["alerts"].push_back(std::move(ja));
    }
    write_file_atomic(path, j.dump(2) + "\n");
}

std::vector<detect::Alert> read_alerts_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open alerts: " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw DataError(path + ": " + e.what());
    }
    std::vector<detect::Alert> out;
    for (const auto& ja : j.at("alerts")) {
        detect::Alert a;
        a.id = ja.at("alert_id").get<int>();
        a.onset_ts = ja.at("onset_ts").get<std::int64_t>();
        a.detect_ts = ja.at("detect_ts").get<std::int64_t>();
        a.last_positive_ts = ja.at("last_positive_ts").get<std::int64_t>();
        if (ja.contains("close_ts")) a.close_ts = ja.at("close_ts").get<std::int64_t>();
        const auto v = ja.at("verdict").get<std::string>();
        a.verdict = v == "attack"    ? detect::Verdict::Attack
                    : v == "highload" ? detect::Verdict::HighLoad
                                      : detect::Verdict::Pending;
        for (const auto& p : ja.at("r2"))
            a.r2_series.emplace_back(p.at(0).get<std::int64_t>(), p.at(1).get<double>());
        out.push_back(std::move(a));
    }
    return out;
}

void write_manifest(const std::string& dir, const Manifest& m) {
    nlohmann::json j;
    j["command"] = m.command;
    j["config_hash"] = m.config_hash;
    j["seed"] = m.seed;
    j["version"] = m.version;
    j["inputs"] = m.inputs;
    j["outputs"] = m.outputs;
    j["duration_ms"] = m.duration_ms;
    write_file_atomic((fs::path(dir) / "manifest.json").string(), j.dump(2) + "\n");
}

std::optional<Manifest> read_manifest(const std::string& dir) {
    const auto path = fs::path(dir) / "manifest.json";
    std::ifstream in(path);
    if (!in) return std::nullopt;
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw DataError(path.string() + ": " + e.what());
    }
    Manifest m;
    m.command = j.value("command", "");
    m.config_hash = j.value("config_hash", "");
    m.seed = j.value("seed", 0ull);
    m.version = j.value("version", "");
    if (j.contains("inputs"))
        m.inputs = j.at("inputs").get<std::map<std::string, std::string>>();
    if (j.contains("outputs"))
        m.outputs = j.at("outputs").get<std::map<std::string, std::string>>();
    m.duration_ms = j.value("duration_ms", 0.0);
    return m;
}

} // namespace stormwatch::io
