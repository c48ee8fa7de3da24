// Command-line front end: simulate | track | eval | report.

#include <cstdlib>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "meshtrack/errors.hpp"
#include "meshtrack/io.hpp"

namespace {

using namespace meshtrack;

std::string out_path(const std::string& path) {
    const char* dir = std::getenv("MESHTRACK_OUT_DIR");
    if (!dir || path.empty() || path.front() == '/') return path;
    return std::string(dir) + "/" + path;
}

std::map<std::string, std::string> parse_keys(const std::string& spec) {
    std::map<std::string, std::string> keys;
    std::stringstream ss(spec);
    std::string item;
    while (std::getline(ss, item, ',')) {
        const auto eq = item.find('=');
        if (eq == std::string::npos) throw ConfigError("--keys expects k=v[,k=v...]");
        keys[item.substr(0, eq)] = item.substr(eq + 1);
    }
    return keys;
}

int cmd_simulate(const std::string& layout_file, const std::string& path_file,
                 const std::string& scene_file, uint64_t seed, double noise_override,
                 bool has_noise, double rate, const std::string& out,
                 const std::string& truth_out) {
    const AntennaLayout layout = read_layout(layout_file);
    const PathSpec spec = read_path_spec(path_file);

    Scene scene = Scene::default_scene(layout, seed);
    if (!scene_file.empty()) apply_scene_overrides(scene, scene_file);
    if (has_noise) scene.noise_sigma = noise_override;

    GroundTruthPath path = make_path(spec.kind, spec.bbox, spec.speed);
    if (spec.margin_s > 0.0) path = path.shifted(spec.margin_s);
    const double duration = path.duration() + 2.0 * spec.margin_s;

    std::ostringstream canon;
    canon << "layout=" << layout_file << ";kind=" << to_string(spec.kind) << ";bbox="
          << spec.bbox.x0 << "," << spec.bbox.y0 << "," << spec.bbox.x1 << "," << spec.bbox.y1
          << ";speed=" << spec.speed << ";margin=" << spec.margin_s
          << ";noise=" << scene.noise_sigma << ";seed=" << seed << ";rate=" << rate;

    RunManifest manifest;
    manifest.seed = seed;
    manifest.config_digest = to_hex(fnv1a64(canon.str()));
    manifest.inputs = {layout_file, path_file};
    manifest.outputs = {out};

    const CsiTrace trace = synthesize(scene, path, rate, duration, seed);
    write_trace(out_path(out), trace, manifest);

    TrajectoryDoc truth = trajectory_doc_from_path(path, manifest);
    truth.meta["kind"] = to_string(spec.kind);
    write_trajectory(out_path(truth_out.empty() ? out + ".truth" : truth_out), truth);
    return 0;
}

int cmd_track(const std::string& layout_file, const std::string& trace_file,
              const std::string& config_file, const std::string& initial_spec,
              const std::string& out) {
    const AntennaLayout layout = read_layout(layout_file);

    TrackerConfig cfg;
    if (!config_file.empty()) cfg = read_tracker_config(config_file, cfg);
    if (!initial_spec.empty()) {
        std::stringstream ss(initial_spec);
        if (!(ss >> cfg.initial.x >> cfg.initial.y)) {
            throw ConfigError("--initial expects 'x y'");
        }
    }

    RunManifest trace_manifest;
    const CsiTrace trace = read_trace(trace_file, &trace_manifest);

    RunManifest manifest;
    manifest.seed = trace_manifest.seed;
    manifest.config_digest = to_hex(fnv1a64(tracker_config_canonical(cfg)));
    manifest.inputs = {layout_file, trace_file};
    manifest.outputs = {out};

    try {
        const TrackResult result = run(trace, layout, cfg);
        TrajectoryDoc doc = trajectory_doc_from_result(result, manifest);
        write_trajectory(out_path(out), doc);
        size_t failed = 0;
        for (const auto& d : result.diagnostics) {
            if (d.status != "moving" && d.status != "stationary") ++failed;
        }
        if (failed > 0) {
            std::cerr << "meshtrack: " << failed << " of " << result.diagnostics.size()
                      << " windows degraded (see statuses)\n";
        }
        return 0;
    } catch (const DegenerateMesh& e) {
        std::cerr << "meshtrack: tracking failed at window " << e.window_index << ": "
                  << e.what() << "\n";
        return 4;
    }
}

int cmd_eval(const std::string& pred_file, const std::string& truth_file, int samples,
             int window, const std::string& keys_spec, const std::string& out) {
    const TrajectoryDoc pred = read_trajectory(pred_file);
    const TrajectoryDoc truth = read_trajectory(truth_file);

    std::vector<Point2> a, b;
    for (const auto& v : pred.vertices) a.push_back(v.p);
    for (const auto& v : truth.vertices) b.push_back(v.p);
    const double err = dtw_error(resample(a, samples), resample(b, samples), window);

    MetricsDoc doc;
    doc.manifest = pred.manifest;
    doc.manifest.inputs = {pred_file, truth_file};
    doc.manifest.outputs = {out};
    doc.dtw_m = err;
    doc.samples = samples;
    doc.window = window;
    doc.keys = parse_keys(keys_spec.empty() ? "" : keys_spec);
    for (const auto& [k, v] : truth.meta) {
        if (!doc.keys.count(k)) doc.keys[k] = v;
    }
    write_metrics(out_path(out), doc);
    std::cout << err << "\n";
    return 0;
}

int cmd_report(const std::vector<std::string>& metric_files, const std::string& group_by,
               const std::string& out) {
    if (metric_files.empty()) throw ConfigError("report needs at least one metrics file");
    std::vector<double> errors;
    std::vector<std::string> keys;
    for (const auto& f : metric_files) {
        const MetricsDoc doc = read_metrics(f);
        errors.push_back(doc.dtw_m);
        if (!group_by.empty()) {
            std::string key;
            std::stringstream ss(group_by);
            std::string g;
            while (std::getline(ss, g, ',')) {
                const auto it = doc.keys.find(g);
                if (!key.empty()) key += ",";
                key += g + "=" + (it == doc.keys.end() ? "?" : it->second);
            }
            keys.push_back(key);
        }
    }
    const ErrorReport report = summarize(errors, keys);
    RunManifest manifest;
    manifest.config_digest = to_hex(fnv1a64(group_by));
    manifest.inputs = metric_files;
    manifest.outputs = {out};
    write_report(out_path(out), report, manifest);
    std::cout << "median " << report.median << " p90 " << report.p90 << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Wi-Fi passive tracking over ellipse-mesh velocity estimation"};
    app.require_subcommand(1);

    std::string layout_file, path_file, scene_file, trace_file, config_file;
    std::string initial_spec, keys_spec, group_by, out, truth_out;
    std::string pred_file, truth_file;
    std::vector<std::string> metric_files;
    uint64_t seed = 1;
    double noise = 0.0, rate = 1000.0;
    int samples = 50, window = 50;

    auto* sim = app.add_subcommand("simulate", "Synthesize a CSI trace for a walk");
    sim->add_option("--layout", layout_file, "layout document")->required();
    sim->add_option("--path", path_file, "path spec document")->required();
    sim->add_option("--scene", scene_file, "scene overrides document");
    sim->add_option("--seed", seed, "noise / scatterer seed");
    auto* noise_opt = sim->add_option("--noise", noise, "measurement noise sigma");
    sim->add_option("--rate", rate, "packet rate Hz");
    sim->add_option("--out", out, "output trace (.wvlo binary, else text)")->required();
    sim->add_option("--truth", truth_out, "ground-truth sidecar path");

    auto* trk = app.add_subcommand("track", "Recover a trajectory from a trace");
    trk->add_option("--layout", layout_file, "layout document")->required();
    trk->add_option("--trace", trace_file, "input CSI trace")->required();
    trk->add_option("--config", config_file, "tracker config document");
    trk->add_option("--initial", initial_spec, "initial position 'x y'");
    trk->add_option("--out", out, "output trajectory document")->required();

    auto* ev = app.add_subcommand("eval", "DTW error between two trajectories");
    ev->add_option("pred", pred_file, "recovered trajectory")->required();
    ev->add_option("truth", truth_file, "ground-truth trajectory")->required();
    ev->add_option("--samples", samples, "resample count");
    ev->add_option("--window", window, "DTW band");
    ev->add_option("--keys", keys_spec, "extra grouping keys k=v[,k=v]");
    ev->add_option("--out", out, "output metrics document")->required();

    auto* rep = app.add_subcommand("report", "Aggregate metrics documents");
    rep->add_option("metrics", metric_files, "metrics documents")->required();
    rep->add_option("--group-by", group_by, "comma-separated key names");
    rep->add_option("--out", out, "output report document")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (sim->parsed()) {
            return cmd_simulate(layout_file, path_file, scene_file, seed, noise,
                                noise_opt->count() > 0, rate, out, truth_out);
        }
        if (trk->parsed()) {
            return cmd_track(layout_file, trace_file, config_file, initial_spec, out);
        }
        if (ev->parsed()) {
            return cmd_eval(pred_file, truth_file, samples, window, keys_spec, out);
        }
        if (rep->parsed()) {
            return cmd_report(metric_files, group_by, out);
        }
    } catch (const ConfigError& e) {
        std::cerr << "meshtrack: config error: " << e.what() << "\n";
        return 2;
    } catch (const IoError& e) {
        std::cerr << "meshtrack: io error: " << e.what() << "\n";
        return 3;
    } catch (const Error& e) {
        std::cerr << "meshtrack: error: " << e.what() << "\n";
        return 4;
    }
    return 1;
}
