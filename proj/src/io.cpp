#include "meshtrack/io.hpp"

#include <algorithm>
#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <set>
#include <sstream>

#include "meshtrack/errors.hpp"

namespace meshtrack {

uint64_t fnv1a64(const std::string& data) {
    uint64_t h = 1469598103934665603ull;
    for (unsigned char c : data) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

std::string to_hex(uint64_t v) {
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016" PRIx64, v);
    return buf;
}

std::string RunManifest::to_line() const {
    std::ostringstream os;
    os << "tool=" << tool << ";seed=" << seed << ";digest=" << config_digest;
    os << ";inputs=";
    for (size_t i = 0; i < inputs.size(); ++i) os << (i ? "|" : "") << inputs[i];
    os << ";outputs=";
    for (size_t i = 0; i < outputs.size(); ++i) os << (i ? "|" : "") << outputs[i];
    return os.str();
}

RunManifest RunManifest::from_line(const std::string& line) {
    RunManifest m;
    std::stringstream ss(line);
    std::string field;
    auto split_list = [](const std::string& s) {
        std::vector<std::string> out;
        std::stringstream ls(s);
        std::string item;
        while (std::getline(ls, item, '|'))
            if (!item.empty()) out.push_back(item);
        return out;
    };
    while (std::getline(ss, field, ';')) {
        const auto eq = field.find('=');
        if (eq == std::string::npos) continue;
        const std::string key = field.substr(0, eq);
        const std::string val = field.substr(eq + 1);
        if (key == "tool") m.tool = val;
        else if (key == "seed") m.seed = std::strtoull(val.c_str(), nullptr, 10);
        else if (key == "digest") m.config_digest = val;
        else if (key == "inputs") m.inputs = split_list(val);
        else if (key == "outputs") m.outputs = split_list(val);
    }
    return m;
}

// ---- structured text parsing ----

namespace {

struct DocLine {
    int number = 0;
    std::string key;
    std::string value;
};

class Doc {
public:
    Doc(const std::string& path, std::istream& in) : path_(path) {
        std::string line;
        int num = 0;
        while (std::getline(in, line)) {
            ++num;
            const auto hash = line.find('#');
            if (hash != std::string::npos) line.erase(hash);
            const auto colon = line.find(':');
            if (colon == std::string::npos) {
                if (line.find_first_not_of(" \t\r") != std::string::npos) {
                    throw ConfigError(path_ + ":" + std::to_string(num) +
                                      ": expected 'key: value'");
                }
                continue;
            }
            DocLine dl;
            dl.number = num;
            dl.key = trim(line.substr(0, colon));
            dl.value = trim(line.substr(colon + 1));
            lines_.push_back(std::move(dl));
        }
    }

    static std::string trim(const std::string& s) {
        const auto b = s.find_first_not_of(" \t\r");
        if (b == std::string::npos) return "";
        const auto e = s.find_last_not_of(" \t\r");
        return s.substr(b, e - b + 1);
    }

    bool has(const std::string& key) const {
        return std::any_of(lines_.begin(), lines_.end(),
                           [&](const DocLine& l) { return l.key == key; });
    }

    const DocLine* find(const std::string& key) {
        consumed_.insert(key);
        for (const DocLine& l : lines_) {
            if (l.key == key) return &l;
        }
        return nullptr;
    }

    std::vector<const DocLine*> find_all(const std::string& key) {
        consumed_.insert(key);
        std::vector<const DocLine*> out;
        for (const DocLine& l : lines_) {
            if (l.key == key) out.push_back(&l);
        }
        return out;
    }

    std::string get_string(const std::string& key, const std::string& fallback) {
        const DocLine* l = find(key);
        return l ? l->value : fallback;
    }

    std::string require_string(const std::string& key) {
        const DocLine* l = find(key);
        if (!l) throw ConfigError(path_ + ": missing required field '" + key + "'");
        return l->value;
    }

    double get_number(const std::string& key, double fallback) {
        const DocLine* l = find(key);
        return l ? parse_number(*l) : fallback;
    }

    double require_number(const std::string& key) {
        const DocLine* l = find(key);
        if (!l) throw ConfigError(path_ + ": missing required field '" + key + "'");
        return parse_number(*l);
    }

    std::vector<double> require_numbers(const std::string& key, size_t count) {
        const DocLine* l = find(key);
        if (!l) throw ConfigError(path_ + ": missing required field '" + key + "'");
        return parse_numbers(*l, count);
    }

    double parse_number(const DocLine& l) const {
        return parse_numbers(l, 1)[0];
    }

    std::vector<double> parse_numbers(const DocLine& l, size_t count) const {
        std::stringstream ss(l.value);
        std::vector<double> out;
        double v;
        while (ss >> v) out.push_back(v);
        if (out.size() != count) {
            throw ConfigError(path_ + ":" + std::to_string(l.number) + ": field '" + l.key +
                              "' expects " + std::to_string(count) + " number(s)");
        }
        return out;
    }

    void reject_unknown() const {
        for (const DocLine& l : lines_) {
            if (!consumed_.count(l.key)) {
                throw ConfigError(path_ + ":" + std::to_string(l.number) + ": unknown field '" +
                                  l.key + "'");
            }
        }
    }

private:
    std::string path_;
    std::vector<DocLine> lines_;
    std::set<std::string> consumed_;
};

Doc open_doc(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path);
    return Doc(path, in);
}

std::string format_g17(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::string format_g9(float v) {
    char buf[24];
    std::snprintf(buf, sizeof(buf), "%.9g", static_cast<double>(v));
    return buf;
}

}  // namespace

AntennaLayout read_layout(const std::string& path) {
    Doc doc = open_doc(path);
    AntennaLayout layout;
    const auto tx = doc.require_numbers("tx", 2);
    layout.tx = {tx[0], tx[1]};
    const char* names[2] = {"rx1", "rx2"};
    for (int r = 0; r < 2; ++r) {
        const auto v = doc.require_numbers(names[r], 6);
        for (int i = 0; i < 3; ++i) layout.rx[r][i] = {v[2 * i], v[2 * i + 1]};
    }
    layout.monitor_side = static_cast<int>(doc.get_number("monitor_side", 1.0));
    layout.spacing = doc.get_number("spacing", 0.2);
    doc.reject_unknown();
    layout.validate();
    return layout;
}

void write_layout(const std::string& path, const AntennaLayout& layout) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write " + path);
    out << "# meshtrack layout\n";
    out << "tx: " << format_g17(layout.tx.x) << " " << format_g17(layout.tx.y) << "\n";
    const char* names[2] = {"rx1", "rx2"};
    for (int r = 0; r < 2; ++r) {
        out << names[r] << ":";
        for (int i = 0; i < 3; ++i) {
            out << " " << format_g17(layout.rx[r][i].x) << " " << format_g17(layout.rx[r][i].y);
        }
        out << "\n";
    }
    out << "monitor_side: " << layout.monitor_side << "\n";
    out << "spacing: " << format_g17(layout.spacing) << "\n";
}

PathSpec read_path_spec(const std::string& path) {
    Doc doc = open_doc(path);
    PathSpec spec;
    spec.kind = path_kind_from_string(doc.require_string("kind"));
    const auto b = doc.require_numbers("bbox", 4);
    spec.bbox = {b[0], b[1], b[2], b[3]};
    spec.speed = doc.require_number("speed");
    spec.margin_s = doc.get_number("margin", 0.0);
    doc.reject_unknown();
    return spec;
}

void apply_scene_overrides(Scene& scene, const std::string& path) {
    Doc doc = open_doc(path);
    scene.noise_sigma = doc.get_number("noise_sigma", scene.noise_sigma);
    scene.los_amplitude = doc.get_number("los_amplitude", scene.los_amplitude);
    scene.constant_phase = doc.get_number("constant_phase", scene.constant_phase);
    const double carrier = doc.get_number("carrier_hz", scene.carrier_center_hz);
    if (carrier != scene.carrier_center_hz) {
        scene.carrier_center_hz = carrier;
        scene.subcarriers_hz = Scene::default_subcarriers(carrier);
    }
    if (doc.has("human_model")) {
        std::stringstream ss(doc.require_string("human_model"));
        std::string kind;
        double value = 0.0;
        ss >> kind >> value;
        if (kind == "constant") scene.human = {HumanAmplitudeModel::Kind::Constant, value};
        else if (kind == "inverse_square")
            scene.human = {HumanAmplitudeModel::Kind::InverseSquare, value};
        else throw ConfigError(path + ": human_model must be 'constant' or 'inverse_square'");
    }
    const auto scatterers = doc.find_all("scatterer");
    if (!scatterers.empty()) {
        scene.scatterers.clear();
        for (const auto* l : scatterers) {
            const auto v = doc.parse_numbers(*l, 4);
            scene.scatterers.push_back({{v[0], v[1]}, v[2], v[3]});
        }
    }
    doc.reject_unknown();
    scene.validate();
}

TrackerConfig read_tracker_config(const std::string& path, const TrackerConfig& defaults) {
    Doc doc = open_doc(path);
    TrackerConfig cfg = defaults;
    cfg.voter.period_ms = doc.get_number("period_ms", cfg.voter.period_ms);
    cfg.voter.window_ms = doc.get_number("window_ms", cfg.voter.window_ms);
    cfg.voter.window_count =
        static_cast<int>(doc.get_number("window_count", cfg.voter.window_count));
    cfg.voter.packet_delay =
        static_cast<int>(doc.get_number("packet_delay", cfg.voter.packet_delay));
    cfg.voter.kappa_threshold = doc.get_number("kappa_threshold", cfg.voter.kappa_threshold);
    cfg.sgf.window = static_cast<int>(doc.get_number("sgf_window", cfg.sgf.window));
    cfg.sgf.order = static_cast<int>(doc.get_number("sgf_order", cfg.sgf.order));
    cfg.pair_separation =
        static_cast<int>(doc.get_number("pair_separation", cfg.pair_separation));
    cfg.max_lag = static_cast<int>(doc.get_number("max_lag", cfg.max_lag));
    cfg.arrival_step = static_cast<int>(doc.get_number("arrival_step", cfg.arrival_step));
    cfg.omega = doc.get_number("omega", cfg.omega);
    cfg.flat_margin = doc.get_number("flat_margin", cfg.flat_margin);
    if (doc.has("initial")) {
        const auto v = doc.require_numbers("initial", 2);
        cfg.initial = {v[0], v[1]};
    }
    cfg.geometry_correction =
        doc.get_number("geometry_correction", cfg.geometry_correction ? 1.0 : 0.0) != 0.0;
    doc.reject_unknown();
    cfg.validate();
    return cfg;
}

std::string tracker_config_canonical(const TrackerConfig& cfg) {
    std::ostringstream os;
    os << "period_ms=" << format_g17(cfg.voter.period_ms)
       << ";window_ms=" << format_g17(cfg.voter.window_ms)
       << ";window_count=" << cfg.voter.window_count
       << ";packet_delay=" << cfg.voter.packet_delay
       << ";kappa_threshold=" << format_g17(cfg.voter.kappa_threshold)
       << ";sgf_window=" << cfg.sgf.window << ";sgf_order=" << cfg.sgf.order
       << ";pair_separation=" << cfg.pair_separation << ";max_lag=" << cfg.max_lag
       << ";arrival_step=" << cfg.arrival_step << ";omega=" << format_g17(cfg.omega)
       << ";flat_margin=" << format_g17(cfg.flat_margin)
       << ";initial=" << format_g17(cfg.initial.x) << "," << format_g17(cfg.initial.y)
       << ";geometry_correction=" << (cfg.geometry_correction ? 1 : 0);
    return os.str();
}

// ---- CSI traces ----

namespace {

bool has_extension(const std::string& path, const char* ext) {
    const auto dot = path.find_last_of('.');
    if (dot == std::string::npos) return false;
    return path.substr(dot) == ext;
}

uint64_t packet_timestamp_ns(size_t packet, uint32_t rate_hz) {
    return static_cast<uint64_t>(
        std::llround(static_cast<double>(packet) * 1e9 / static_cast<double>(rate_hz)));
}

template <typename T>
void put(std::ostream& out, T v) {
    out.write(reinterpret_cast<const char*>(&v), sizeof(v));
}

template <typename T>
T take(std::istream& in, const std::string& path) {
    T v{};
    in.read(reinterpret_cast<char*>(&v), sizeof(v));
    if (!in) {
        in.clear();
        throw IoError(path + ": truncated at byte offset " +
                      std::to_string(static_cast<long long>(in.tellg())));
    }
    return v;
}

void write_trace_binary(const std::string& path, const CsiTrace& trace,
                        const RunManifest& manifest) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write " + path);
    out.write("WVLO", 4);
    put<uint16_t>(out, 1);
    put<uint32_t>(out, trace.header.rate_hz);
    put<uint8_t>(out, trace.header.antennas);
    put<uint8_t>(out, static_cast<uint8_t>(trace.header.subcarriers_hz.size()));
    for (double f : trace.header.subcarriers_hz) put<double>(out, f);
    const std::string m = manifest.to_line();
    put<uint32_t>(out, static_cast<uint32_t>(m.size()));
    out.write(m.data(), static_cast<std::streamsize>(m.size()));
    const size_t packets = trace.packets();
    for (size_t p = 0; p < packets; ++p) {
        for (int a = 0; a < trace.header.antennas; ++a) {
            put<uint64_t>(out, packet_timestamp_ns(p, trace.header.rate_hz));
            put<uint8_t>(out, static_cast<uint8_t>(a));
            for (const auto& c : trace.frame(p, a)) {
                put<float>(out, c.real());
                put<float>(out, c.imag());
            }
        }
    }
    if (!out) throw IoError("write failed for " + path);
}

CsiTrace read_trace_binary(const std::string& path, RunManifest* manifest) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path);
    char magic[4];
    in.read(magic, 4);
    if (!in || std::memcmp(magic, "WVLO", 4) != 0) {
        throw IoError(path + ": not a WVLO trace (bad magic)");
    }
    const auto version = take<uint16_t>(in, path);
    if (version != 1) throw IoError(path + ": unsupported trace version");
    CsiTrace trace;
    trace.header.rate_hz = take<uint32_t>(in, path);
    trace.header.antennas = take<uint8_t>(in, path);
    const int subs = take<uint8_t>(in, path);
    trace.header.subcarriers_hz.resize(subs);
    for (int s = 0; s < subs; ++s) trace.header.subcarriers_hz[s] = take<double>(in, path);
    const auto mlen = take<uint32_t>(in, path);
    std::string mline(mlen, '\0');
    in.read(mline.data(), mlen);
    if (!in) throw IoError(path + ": truncated manifest");
    if (manifest) *manifest = RunManifest::from_line(mline);

    while (true) {
        uint64_t ts;
        in.read(reinterpret_cast<char*>(&ts), sizeof(ts));
        if (in.eof() && in.gcount() == 0) break;
        if (!in) {
            in.clear();
            throw IoError(path + ": truncated at byte offset " +
                          std::to_string(static_cast<long long>(in.tellg())));
        }
        const auto ant = take<uint8_t>(in, path);
        std::vector<std::complex<float>> frame(subs);
        for (int s = 0; s < subs; ++s) {
            const float re = take<float>(in, path);
            const float im = take<float>(in, path);
            frame[s] = {re, im};
        }
        (void)ts;
        if (ant >= trace.header.antennas) throw IoError(path + ": antenna index out of range");
        trace.frames.push_back(std::move(frame));
    }
    if (trace.header.antennas == 0 || trace.frames.size() % trace.header.antennas != 0) {
        throw IoError(path + ": record count does not cover all antennas");
    }
    return trace;
}

void write_trace_text(const std::string& path, const CsiTrace& trace,
                      const RunManifest& manifest) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write " + path);
    out << "# WVLO-TEXT v1\n";
    out << "# rate_hz: " << trace.header.rate_hz << "\n";
    out << "# antennas: " << static_cast<int>(trace.header.antennas) << "\n";
    out << "# subcarriers: " << trace.header.subcarriers_hz.size() << "\n";
    out << "# freqs_hz:";
    for (double f : trace.header.subcarriers_hz) out << " " << format_g17(f);
    out << "\n";
    out << "# manifest: " << manifest.to_line() << "\n";
    const size_t packets = trace.packets();
    for (size_t p = 0; p < packets; ++p) {
        for (int a = 0; a < trace.header.antennas; ++a) {
            out << packet_timestamp_ns(p, trace.header.rate_hz) << "," << a;
            for (const auto& c : trace.frame(p, a)) {
                out << "," << format_g9(c.real()) << "," << format_g9(c.imag());
            }
            out << "\n";
        }
    }
    if (!out) throw IoError("write failed for " + path);
}

CsiTrace read_trace_text(const std::string& path, RunManifest* manifest) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path);
    CsiTrace trace;
    int subs = -1;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        if (line[0] == '#') {
            const auto colon = line.find(':');
            if (colon == std::string::npos) continue;
            const std::string key = Doc::trim(line.substr(1, colon - 1));
            const std::string val = Doc::trim(line.substr(colon + 1));
            if (key == "rate_hz") trace.header.rate_hz = std::strtoul(val.c_str(), nullptr, 10);
            else if (key == "antennas")
                trace.header.antennas = static_cast<uint8_t>(std::strtoul(val.c_str(), nullptr, 10));
            else if (key == "subcarriers") subs = std::atoi(val.c_str());
            else if (key == "freqs_hz") {
                std::stringstream ss(val);
                double f;
                while (ss >> f) trace.header.subcarriers_hz.push_back(f);
            } else if (key == "manifest" && manifest) {
                *manifest = RunManifest::from_line(val);
            }
            continue;
        }
        std::stringstream ss(line);
        std::string cell;
        std::vector<std::string> cells;
        while (std::getline(ss, cell, ',')) cells.push_back(cell);
        if (subs < 0) subs = static_cast<int>(trace.header.subcarriers_hz.size());
        if (static_cast<int>(cells.size()) != 2 + 2 * subs) {
            throw IoError(path + ":" + std::to_string(lineno) + ": malformed record");
        }
        std::vector<std::complex<float>> frame(subs);
        for (int s = 0; s < subs; ++s) {
            frame[s] = {std::strtof(cells[2 + 2 * s].c_str(), nullptr),
                        std::strtof(cells[3 + 2 * s].c_str(), nullptr)};
        }
        trace.frames.push_back(std::move(frame));
    }
    if (trace.header.antennas == 0 || trace.frames.size() % trace.header.antennas != 0) {
        throw IoError(path + ": record count does not cover all antennas");
    }
    if (trace.header.subcarriers_hz.empty()) throw IoError(path + ": missing freqs_hz header");
    return trace;
}

}  // namespace

void write_trace(const std::string& path, const CsiTrace& trace, const RunManifest& manifest) {
    if (has_extension(path, ".wvlo")) write_trace_binary(path, trace, manifest);
    else write_trace_text(path, trace, manifest);
}

CsiTrace read_trace(const std::string& path, RunManifest* manifest) {
    if (has_extension(path, ".wvlo")) return read_trace_binary(path, manifest);
    return read_trace_text(path, manifest);
}

// ---- trajectories ----

void write_trajectory(const std::string& path, const TrajectoryDoc& doc) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write " + path);
    out << "# meshtrack trajectory v1\n";
    out << "# manifest: " << doc.manifest.to_line() << "\n";
    for (const auto& [k, v] : doc.meta) out << "# meta " << k << ": " << v << "\n";
    out << "# columns: t_s x_m y_m speed_mps trend1 trend2\n";
    for (size_t i = 0; i < doc.vertices.size(); ++i) {
        out << format_g17(doc.vertices[i].t) << " " << format_g17(doc.vertices[i].p.x) << " "
            << format_g17(doc.vertices[i].p.y) << " "
            << format_g17(i < doc.speeds.size() ? doc.speeds[i] : 0.0) << " "
            << (i < doc.trends1.size() ? doc.trends1[i] : 0) << " "
            << (i < doc.trends2.size() ? doc.trends2[i] : 0) << "\n";
    }
    if (!out) throw IoError("write failed for " + path);
}

TrajectoryDoc read_trajectory(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path);
    TrajectoryDoc doc;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        if (line[0] == '#') {
            const auto colon = line.find(':');
            if (colon == std::string::npos) continue;
            std::string key = Doc::trim(line.substr(1, colon - 1));
            const std::string val = Doc::trim(line.substr(colon + 1));
            if (key == "manifest") doc.manifest = RunManifest::from_line(val);
            else if (key.rfind("meta ", 0) == 0) doc.meta[key.substr(5)] = val;
            continue;
        }
        std::stringstream ss(line);
        double t, x, y, speed;
        int t1, t2;
        if (!(ss >> t >> x >> y >> speed >> t1 >> t2)) {
            throw IoError(path + ":" + std::to_string(lineno) + ": malformed vertex");
        }
        doc.vertices.push_back({t, {x, y}});
        doc.speeds.push_back(speed);
        doc.trends1.push_back(t1);
        doc.trends2.push_back(t2);
    }
    if (doc.vertices.empty()) throw IoError(path + ": empty trajectory document");
    return doc;
}

TrajectoryDoc trajectory_doc_from_result(const TrackResult& result, const RunManifest& manifest) {
    TrajectoryDoc doc;
    doc.manifest = manifest;
    doc.vertices = result.trajectory.vertices;
    doc.speeds.push_back(0.0);
    doc.trends1.push_back(0);
    doc.trends2.push_back(0);
    for (const auto& step : result.trajectory.steps) {
        doc.speeds.push_back(step.speed_mps);
        doc.trends1.push_back(static_cast<int>(step.trend1));
        doc.trends2.push_back(static_cast<int>(step.trend2));
    }
    return doc;
}

TrajectoryDoc trajectory_doc_from_path(const GroundTruthPath& path, const RunManifest& manifest) {
    TrajectoryDoc doc;
    doc.manifest = manifest;
    for (const auto& w : path.waypoints) {
        doc.vertices.push_back({w.t, w.p});
        doc.speeds.push_back(0.0);
        doc.trends1.push_back(0);
        doc.trends2.push_back(0);
    }
    return doc;
}

// ---- metrics ----

void write_metrics(const std::string& path, const MetricsDoc& doc) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write " + path);
    out << "# meshtrack metrics v1\n";
    out << "# manifest: " << doc.manifest.to_line() << "\n";
    out << "dtw_m: " << format_g17(doc.dtw_m) << "\n";
    out << "samples: " << doc.samples << "\n";
    out << "window: " << doc.window << "\n";
    for (const auto& [k, v] : doc.keys) out << "key " << k << ": " << v << "\n";
    if (!out) throw IoError("write failed for " + path);
}

MetricsDoc read_metrics(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path);
    MetricsDoc doc;
    std::string line;
    bool have_dtw = false;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        if (line[0] == '#') {
            const auto colon = line.find(':');
            if (colon != std::string::npos &&
                Doc::trim(line.substr(1, colon - 1)) == "manifest") {
                doc.manifest = RunManifest::from_line(Doc::trim(line.substr(colon + 1)));
            }
            continue;
        }
        const auto colon = line.find(':');
        if (colon == std::string::npos) throw IoError(path + ": malformed metrics line");
        const std::string key = Doc::trim(line.substr(0, colon));
        const std::string val = Doc::trim(line.substr(colon + 1));
        if (key == "dtw_m") {
            doc.dtw_m = std::strtod(val.c_str(), nullptr);
            have_dtw = true;
        } else if (key == "samples") doc.samples = std::atoi(val.c_str());
        else if (key == "window") doc.window = std::atoi(val.c_str());
        else if (key.rfind("key ", 0) == 0) doc.keys[key.substr(4)] = val;
        else throw IoError(path + ": unknown metrics field '" + key + "'");
    }
    if (!have_dtw) throw IoError(path + ": missing dtw_m");
    return doc;
}

void write_report(const std::string& path, const ErrorReport& report,
                  const RunManifest& manifest) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write " + path);
    out << "# meshtrack report v1\n";
    out << "# manifest: " << manifest.to_line() << "\n";
    out << "# columns: group count median_m p90_m\n";
    out << "all - " << format_g17(report.median) << " " << format_g17(report.p90) << "\n";
    for (const auto& [key, g] : report.groups) {
        out << key << " " << g.count << " " << format_g17(g.median) << " " << format_g17(g.p90)
            << "\n";
    }
    out << "# cdf: percentile value_m\n";
    for (size_t p = 0; p < report.cdf.size(); ++p) {
        out << "cdf " << p << " " << format_g17(report.cdf[p]) << "\n";
    }
    if (!out) throw IoError("write failed for " + path);
}

}  // namespace meshtrack
