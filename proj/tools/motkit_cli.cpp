// motkit command-line front end: evaluate | refine | simulate | sweep | report
#include <algorithm>
#include <chrono>
#include <cstdint>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "motkit/counting.hpp"
#include "motkit/errors.hpp"
#include "motkit/metrics.hpp"
#include "motkit/mot_io.hpp"
#include "motkit/refine.hpp"
#include "motkit/report.hpp"
#include "motkit/simulator.hpp"
#include "motkit/track.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitValidation = 1;
constexpr int kExitUndefinedMetric = 2;

struct NamedSequence {
    std::string id;
    motkit::SequenceTracks seq;
};

motkit::SequenceMeta meta_for(const fs::path& track_file, const std::string& global_meta) {
    // Per-sequence sidecar <stem>.meta wins over the global --meta file.
    const fs::path sidecar = fs::path(track_file).replace_extension(".meta");
    fs::path meta_path;
    if (fs::exists(sidecar)) {
        meta_path = sidecar;
    } else if (!global_meta.empty()) {
        meta_path = global_meta;
    } else {
        motkit::SequenceMeta meta;
        meta.sequence_id = track_file.stem().string();
        return meta;
    }
    std::ifstream in(meta_path);
    if (!in) throw motkit::ValidationError("cannot open meta file " + meta_path.string());
    motkit::SequenceMeta meta = motkit::load_meta(in);
    if (meta.sequence_id == "seq") meta.sequence_id = track_file.stem().string();
    return meta;
}

std::vector<NamedSequence> load_sequences(const std::string& path,
                                          const std::string& global_meta) {
    std::vector<fs::path> files;
    if (fs::is_directory(path)) {
        for (const auto& entry : fs::directory_iterator(path)) {
            if (entry.path().extension() == ".txt") files.push_back(entry.path());
        }
        std::sort(files.begin(), files.end());
        if (files.empty()) {
            throw motkit::ValidationError("no .txt track files in directory " + path);
        }
    } else {
        if (!fs::exists(path)) throw motkit::ValidationError("no such file: " + path);
        files.push_back(path);
    }
    std::vector<NamedSequence> out;
    for (const fs::path& f : files) {
        const motkit::SequenceMeta meta = meta_for(f, global_meta);
        std::ifstream in(f);
        if (!in) throw motkit::ValidationError("cannot open " + f.string());
        std::vector<std::string> warnings;
        try {
            motkit::SequenceTracks seq = motkit::parse_mot_file(in, meta, &warnings);
            for (const std::string& w : warnings) {
                std::cerr << "warning: " << f.string() << ": " << w << "\n";
            }
            out.push_back({seq.sequence_id(), std::move(seq)});
        } catch (const motkit::ParseError& e) {
            throw motkit::ParseError(f.string() + ": " + e.what());
        }
    }
    return out;
}

// Pair gt and pred sequences by id; unmatched ids are an error.
void pair_sequences(std::vector<NamedSequence>& gt, std::vector<NamedSequence>& pred,
                    std::vector<motkit::SequenceTracks>& gt_out,
                    std::vector<motkit::SequenceTracks>& pred_out) {
    if (gt.size() == 1 && pred.size() == 1) {
        // single-file mode: pair regardless of id, prediction inherits gt metadata
        gt_out.push_back(gt[0].seq);
        pred_out.push_back(motkit::SequenceTracks(
            gt[0].seq.sequence_id(), gt[0].seq.image_width(), gt[0].seq.image_height(),
            gt[0].seq.fps(), pred[0].seq.tracks()));
        return;
    }
    std::map<std::string, const NamedSequence*> pred_by_id;
    for (const NamedSequence& p : pred) pred_by_id[p.id] = &p;
    std::vector<std::string> unmatched;
    for (const NamedSequence& g : gt) {
        const auto it = pred_by_id.find(g.id);
        if (it == pred_by_id.end()) {
            unmatched.push_back(g.id);
            continue;
        }
        gt_out.push_back(g.seq);
        pred_out.push_back(it->second->seq);
        pred_by_id.erase(it);
    }
    for (const auto& [id, _] : pred_by_id) unmatched.push_back(id);
    if (!unmatched.empty()) {
        std::string msg = "unmatched sequence ids:";
        for (const std::string& id : unmatched) msg += " " + id;
        throw motkit::ValidationError(msg);
    }
}

void write_text(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw motkit::ValidationError("cannot write " + path);
    out << content;
}

// Timestamps are kept out of report files so reruns are byte-identical; the
// sidecar log carries them instead.
void write_sidecar_log(const std::string& output_path, const std::string& command) {
    const std::time_t now = std::time(nullptr);
    char ts[64];
    std::strftime(ts, sizeof(ts), "%Y-%m-%dT%H:%M:%S", std::gmtime(&now));
    std::ofstream log(output_path + ".log");
    log << ts << "Z " << command << " -> " << output_path << "\n";
}

struct HeuristicFlags {
    motkit::HeuristicConfig cfg;
    bool disable_h1 = false, disable_h2 = false, disable_h3 = false;
    double max_gap_seconds = -1.0;

    void add_to(CLI::App* app) {
        app->add_option("--h1-min-duration", cfg.min_duration,
                        "H1: minimum track duration in frames (default 15)");
        app->add_option("--h2-max-gap", cfg.max_gap,
                        "H2: maximum merge gap in frames (default 20)");
        app->add_option("--h2-max-gap-seconds", max_gap_seconds,
                        "H2: maximum merge gap in seconds (converted via fps)");
        app->add_option("--h3-max-dist", cfg.max_center_dist,
                        "H3: maximum center distance in normalized units (default 0.10)");
        app->add_flag("--disable-h1", disable_h1, "skip the duration filter");
        app->add_flag("--disable-h2", disable_h2, "skip temporal merging");
        app->add_flag("--disable-h3", disable_h3, "merge without the spatial constraint");
    }

    motkit::HeuristicConfig resolve(double fps) {
        motkit::HeuristicConfig out = cfg;
        if (max_gap_seconds >= 0.0) {
            out.max_gap = static_cast<int>(max_gap_seconds * fps + 0.5);
        }
        out.enable_h1 = !disable_h1;
        out.enable_h2 = !disable_h2;
        out.enable_h3 = !disable_h3 && out.enable_h2;
        return out;
    }

    std::string label() const {
        if (disable_h1 && disable_h2) return "baseline";
        std::string s;
        if (!disable_h1) s = "H1";
        if (!disable_h2) s += s.empty() ? "H2" : "+H2";
        if (!disable_h2 && !disable_h3) s += "+H3";
        return s.empty() ? "baseline" : s;
    }
};

// ---- evaluate ----

int run_evaluate(const std::string& gt_path, const std::string& pred_path,
                 const std::string& meta_path, double iou_threshold,
                 const std::string& format, const std::string& output, int bootstrap_n,
                 std::uint64_t seed, bool aggregate, bool do_refine, HeuristicFlags& hflags,
                 const std::string& label) {
    std::vector<NamedSequence> gt = load_sequences(gt_path, meta_path);
    std::vector<NamedSequence> pred = load_sequences(pred_path, meta_path);
    std::vector<motkit::SequenceTracks> gts, preds;
    pair_sequences(gt, pred, gts, preds);

    motkit::EvalOptions opts;
    opts.iou_threshold = iou_threshold;
    opts.bootstrap_n = bootstrap_n;
    opts.bootstrap_seed = seed;
    opts.aggregate_classes = aggregate;
    opts.label = !label.empty() ? label : (do_refine ? hflags.label() : "baseline");

    motkit::HeuristicConfig hcfg;
    if (do_refine) {
        for (motkit::SequenceTracks& p : preds) {
            hcfg = hflags.resolve(p.fps());
            p = motkit::refine_pipeline(p, hcfg);
        }
    }

    motkit::EvalReport rep = motkit::build_eval_report(gts, preds, opts);
    rep.heuristics = hcfg;
    rep.heuristics_applied = do_refine;

    std::string text;
    if (format == "json") {
        text = motkit::report_to_json(rep).dump(2) + "\n";
    } else if (format == "csv") {
        text = motkit::report_to_csv(rep);
    } else if (format == "markdown") {
        text = motkit::report_to_markdown(rep);
    } else {
        throw motkit::ValidationError("unknown format '" + format + "'");
    }
    if (output.empty()) {
        std::cout << text;
    } else {
        write_text(output, text);
        write_sidecar_log(output, "evaluate");
    }
    return kExitOk;
}

// ---- refine ----

int run_refine(const std::string& pred_path, const std::string& meta_path,
               const std::string& out_path, HeuristicFlags& hflags) {
    std::vector<NamedSequence> pred = load_sequences(pred_path, meta_path);
    if (pred.size() != 1) {
        throw motkit::ValidationError("refine expects a single prediction file");
    }
    const motkit::HeuristicConfig cfg = hflags.resolve(pred[0].seq.fps());
    motkit::RefineStats stats;
    const motkit::SequenceTracks refined =
        motkit::refine_pipeline(pred[0].seq, cfg, &stats);
    write_text(out_path, motkit::write_mot_string(refined));
    std::cout << "tracks-removed: " << stats.tracks_removed << "\n"
              << "merges-performed: " << stats.merges_performed << "\n";
    return kExitOk;
}

// ---- simulate ----

int run_simulate(const std::string& preset, const std::string& config_path,
                 const std::string& out_dir, std::optional<std::uint64_t> seed) {
    motkit::SimConfig cfg;
    if (!preset.empty()) {
        cfg = motkit::preset_scenario(preset);
    } else if (!config_path.empty()) {
        std::ifstream in(config_path);
        if (!in) throw motkit::ValidationError("cannot open config " + config_path);
        json j;
        in >> j;
        cfg = motkit::sim_config_from_json(j);
    } else {
        throw motkit::ValidationError("simulate needs --preset or --config");
    }
    if (seed) cfg.seed = *seed;
    cfg.validate();

    fs::create_directories(out_dir);
    const motkit::SequenceTracks gt = motkit::generate_scene(cfg);
    const motkit::SequenceTracks pred = motkit::corrupt(gt, cfg.noise, cfg.seed + 1);

    write_text((fs::path(out_dir) / "gt.txt").string(), motkit::write_mot_string(gt));
    write_text((fs::path(out_dir) / "pred.txt").string(), motkit::write_mot_string(pred));
    motkit::SequenceMeta meta;
    meta.sequence_id = cfg.sequence_id;
    meta.image_width = cfg.image_width;
    meta.image_height = cfg.image_height;
    meta.fps = cfg.fps;
    std::ostringstream meta_text;
    motkit::save_meta(meta, meta_text);
    write_text((fs::path(out_dir) / "meta.txt").string(), meta_text.str());
    write_text((fs::path(out_dir) / "sim_config.json").string(),
               motkit::sim_config_to_json(cfg).dump(2) + "\n");
    std::cout << "sequence " << cfg.sequence_id << ": " << gt.tracks().size()
              << " gt tracks, " << pred.tracks().size() << " predicted tracks\n";
    return kExitOk;
}

// ---- sweep ----

template <typename T>
std::vector<T> parse_grid(const std::string& s) {
    std::vector<T> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item.empty()) continue;
        out.push_back(static_cast<T>(std::stod(item)));
    }
    return out;
}

int run_sweep(const std::string& gt_path, const std::string& pred_path,
              const std::string& meta_path, const std::string& h1_grid,
              const std::string& h2_grid, const std::string& h3_grid,
              const std::string& output, bool aggregate) {
    const std::vector<int> durations = parse_grid<int>(h1_grid);
    const std::vector<int> gaps = parse_grid<int>(h2_grid);
    const std::vector<double> dists = parse_grid<double>(h3_grid);
    if (durations.empty() || gaps.empty() || dists.empty()) {
        throw motkit::ValidationError("sweep: all three grids must be non-empty");
    }

    std::vector<NamedSequence> gt = load_sequences(gt_path, meta_path);
    std::vector<NamedSequence> pred = load_sequences(pred_path, meta_path);
    std::vector<motkit::SequenceTracks> gts, preds;
    pair_sequences(gt, pred, gts, preds);

    motkit::CountVector gt_counts;
    for (const auto& g : gts) {
        motkit::CountVector c = motkit::count_tracks(g);
        if (aggregate) c = motkit::aggregate_classes(c);
        for (const auto& [k, n] : c) gt_counts[k] += n;
    }

    struct Result {
        int min_duration;
        int max_gap;
        double max_center_dist;
        double mae;
    };
    std::vector<Result> results;
    for (int d : durations) {
        for (int g : gaps) {
            for (double x : dists) {
                motkit::HeuristicConfig cfg;
                cfg.min_duration = d;
                cfg.max_gap = g;
                cfg.max_center_dist = x;
                motkit::CountVector pred_counts;
                for (const auto& p : preds) {
                    motkit::CountVector c =
                        motkit::count_tracks(motkit::refine_pipeline(p, cfg));
                    if (aggregate) c = motkit::aggregate_classes(c);
                    for (const auto& [k, n] : c) pred_counts[k] += n;
                }
                results.push_back(
                    {d, g, x, motkit::counting_errors(gt_counts, pred_counts).mae});
            }
        }
    }
    // rank by MAE; ties go to the most conservative configuration
    std::stable_sort(results.begin(), results.end(), [](const Result& a, const Result& b) {
        if (a.mae != b.mae) return a.mae < b.mae;
        if (a.max_gap != b.max_gap) return a.max_gap < b.max_gap;
        if (a.min_duration != b.min_duration) return a.min_duration > b.min_duration;
        return a.max_center_dist < b.max_center_dist;
    });

    std::string csv = "rank,min_duration,max_gap,max_center_dist,mae\n";
    for (std::size_t i = 0; i < results.size(); ++i) {
        const Result& r = results[i];
        csv += std::to_string(i + 1) + "," + std::to_string(r.min_duration) + "," +
               std::to_string(r.max_gap) + "," + motkit::format_fixed(r.max_center_dist, 4) +
               "," + motkit::format_fixed(r.mae, 6) + "\n";
    }
    if (output.empty()) {
        std::cout << csv;
    } else {
        write_text(output, csv);
    }
    const Result& best = results.front();
    std::cout << "best: min_duration=" << best.min_duration << " max_gap=" << best.max_gap
              << " max_center_dist=" << motkit::format_fixed(best.max_center_dist, 4)
              << " mae=" << motkit::format_fixed(best.mae, 6) << "\n";
    return kExitOk;
}

// ---- report ----

int run_report(const std::vector<std::string>& inputs, const std::string& format,
               const std::string& output) {
    if (inputs.empty()) throw motkit::ValidationError("report needs at least one input");
    std::vector<motkit::EvalReport> reps;
    for (const std::string& path : inputs) {
        std::ifstream in(path);
        if (!in) throw motkit::ValidationError("cannot open " + path);
        json j;
        in >> j;
        motkit::EvalReport rep = motkit::report_from_json(j);
        if (rep.label.empty()) rep.label = fs::path(path).stem().string();
        reps.push_back(std::move(rep));
    }

    const bool compare = reps.size() > 1;
    const double base_mae = reps.front().counting.mae;
    const double base_sad = static_cast<double>(reps.front().counting.sad);

    std::string text;
    auto reduction = [](double before, double now) {
        return motkit::format_fixed(motkit::relative_reduction(before, now), 1) + "%";
    };
    if (format == "markdown") {
        text += "| Experiment | MOTA | IDF1 | HOTA | DetA | AssA | MAE | SAD | RMSE | MAPE |";
        text += compare ? " MAE reduction | SAD reduction |\n" : "\n";
        text += "|---|---|---|---|---|---|---|---|---|---|";
        text += compare ? "---|---|\n" : "\n";
        for (std::size_t i = 0; i < reps.size(); ++i) {
            const motkit::EvalReport& r = reps[i];
            text += "| " + r.label + " | " + motkit::format_percent(r.pooled_clear.mota) +
                    " | " + motkit::format_percent(r.pooled_ident.idf1) + " | " +
                    motkit::format_percent(r.pooled_hota.hota) + " | " +
                    motkit::format_percent(r.pooled_hota.deta) + " | " +
                    motkit::format_percent(r.pooled_hota.assa) + " | " +
                    motkit::format_fixed(r.counting.mae, 2) + " | " +
                    std::to_string(r.counting.sad) + " | " +
                    motkit::format_fixed(r.counting.rmse, 2) + " | " +
                    motkit::format_fixed(r.counting.mape, 2) + "% |";
            if (compare) {
                if (i == 0) {
                    text += " - | - |";
                } else {
                    text += " " + reduction(base_mae, r.counting.mae) + " | " +
                            reduction(base_sad, static_cast<double>(r.counting.sad)) + " |";
                }
            }
            text += "\n";
        }
    } else if (format == "csv") {
        text = "label,mota,idf1,hota,deta,assa,mae,sad,rmse,mape_percent";
        text += compare ? ",mae_reduction_percent,sad_reduction_percent\n" : "\n";
        for (std::size_t i = 0; i < reps.size(); ++i) {
            const motkit::EvalReport& r = reps[i];
            text += r.label + "," + motkit::format_fixed(r.pooled_clear.mota, 6) + "," +
                    motkit::format_fixed(r.pooled_ident.idf1, 6) + "," +
                    motkit::format_fixed(r.pooled_hota.hota, 6) + "," +
                    motkit::format_fixed(r.pooled_hota.deta, 6) + "," +
                    motkit::format_fixed(r.pooled_hota.assa, 6) + "," +
                    motkit::format_fixed(r.counting.mae, 6) + "," +
                    std::to_string(r.counting.sad) + "," +
                    motkit::format_fixed(r.counting.rmse, 6) + "," +
                    motkit::format_fixed(r.counting.mape, 6);
            if (compare) {
                if (i == 0) {
                    text += ",,";
                } else {
                    text +=
                        "," +
                        motkit::format_fixed(
                            motkit::relative_reduction(base_mae, r.counting.mae), 1) +
                        "," +
                        motkit::format_fixed(motkit::relative_reduction(
                                                 base_sad,
                                                 static_cast<double>(r.counting.sad)),
                                             1);
                }
            }
            text += "\n";
        }
    } else {
        throw motkit::ValidationError("unknown format '" + format + "'");
    }
    if (output.empty()) {
        std::cout << text;
    } else {
        write_text(output, text);
        write_sidecar_log(output, "report");
    }
    return kExitOk;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"multi-object tracking refinement and evaluation toolkit"};
    app.require_subcommand(1);

    // evaluate
    auto* eval = app.add_subcommand("evaluate", "compute tracking and counting metrics");
    std::string ev_gt, ev_pred, ev_meta, ev_format = "json", ev_output, ev_label;
    double ev_iou = 0.5;
    int ev_boot = 10;
    std::uint64_t ev_seed = 42;
    bool ev_aggregate = false, ev_refine = false;
    HeuristicFlags ev_hflags;
    eval->add_option("--gt", ev_gt, "ground-truth MOT file or directory")->required();
    eval->add_option("--pred", ev_pred, "prediction MOT file or directory")->required();
    eval->add_option("--meta", ev_meta, "sequence metadata file (key=value)");
    eval->add_option("--iou-threshold", ev_iou, "matching IoU threshold (default 0.5)");
    eval->add_option("--format", ev_format, "json | csv | markdown");
    eval->add_option("--output", ev_output, "output file (default stdout)");
    eval->add_option("--bootstrap", ev_boot, "bootstrap resamples (default 10)");
    eval->add_option("--seed", ev_seed, "bootstrap seed (default 42)");
    eval->add_option("--label", ev_label, "experiment label in the report");
    eval->add_flag("--aggregate-classes", ev_aggregate,
                   "sum counts per sequence before differencing");
    eval->add_flag("--refine", ev_refine, "apply the heuristic pipeline to predictions first");
    ev_hflags.add_to(eval);

    // refine
    auto* refine = app.add_subcommand("refine", "apply the heuristic pipeline to a track file");
    std::string rf_pred, rf_meta, rf_out;
    HeuristicFlags rf_hflags;
    refine->add_option("--pred", rf_pred, "prediction MOT file")->required();
    refine->add_option("--out", rf_out, "refined output MOT file")->required();
    refine->add_option("--meta", rf_meta, "sequence metadata file");
    rf_hflags.add_to(refine);

    // simulate
    auto* sim = app.add_subcommand("simulate", "generate a synthetic street pass");
    std::string sm_preset, sm_config, sm_out;
    std::uint64_t sm_seed = 0;
    bool sm_seed_set = false;
    sim->add_option("--preset", sm_preset,
                    "fragmentation | sequential_same_class | clutter");
    sim->add_option("--config", sm_config, "SimConfig JSON file");
    sim->add_option("--out-dir", sm_out, "output directory")->required();
    sim->add_option("--seed", sm_seed, "override the config seed")
        ->each([&](const std::string&) { sm_seed_set = true; });

    // sweep
    auto* sweep = app.add_subcommand("sweep", "grid-search heuristic thresholds on counting MAE");
    std::string sw_gt, sw_pred, sw_meta, sw_h1, sw_h2, sw_h3, sw_output, sw_objective = "mae";
    bool sw_aggregate = false;
    sweep->add_option("--gt", sw_gt)->required();
    sweep->add_option("--pred", sw_pred)->required();
    sweep->add_option("--meta", sw_meta);
    sweep->add_option("--h1-grid", sw_h1, "comma-separated min_duration values")->required();
    sweep->add_option("--h2-grid", sw_h2, "comma-separated max_gap values")->required();
    sweep->add_option("--h3-grid", sw_h3, "comma-separated max_center_dist values")->required();
    sweep->add_option("--objective", sw_objective, "only 'mae' is supported");
    sweep->add_option("--output", sw_output, "ranked CSV output file (default stdout)");
    sweep->add_flag("--aggregate-classes", sw_aggregate);

    // report
    auto* report = app.add_subcommand("report", "compare evaluation reports");
    std::vector<std::string> rp_inputs;
    std::string rp_format = "markdown", rp_output;
    bool rp_compare = false;
    report->add_option("inputs", rp_inputs, "evaluation report JSON files")->required();
    report->add_option("--format", rp_format, "markdown | csv");
    report->add_option("--output", rp_output, "output file (default stdout)");
    report->add_flag("--compare", rp_compare,
                     "side-by-side comparison (implied with multiple inputs)");

    try {
        app.parse(argc, argv);
        if (eval->parsed()) {
            return run_evaluate(ev_gt, ev_pred, ev_meta, ev_iou, ev_format, ev_output,
                                ev_boot, ev_seed, ev_aggregate, ev_refine, ev_hflags,
                                ev_label);
        }
        if (refine->parsed()) return run_refine(rf_pred, rf_meta, rf_out, rf_hflags);
        if (sim->parsed()) {
            return run_simulate(sm_preset, sm_config, sm_out,
                                sm_seed_set ? std::optional<std::uint64_t>(sm_seed)
                                            : std::nullopt);
        }
        if (sweep->parsed()) {
            if (sw_objective != "mae") {
                throw motkit::ValidationError("sweep: unsupported objective '" + sw_objective +
                                              "'");
            }
            return run_sweep(sw_gt, sw_pred, sw_meta, sw_h1, sw_h2, sw_h3, sw_output,
                             sw_aggregate);
        }
        if (report->parsed()) return run_report(rp_inputs, rp_format, rp_output);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    } catch (const motkit::UndefinedMetricError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUndefinedMetric;
    } catch (const motkit::ParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitValidation;
    } catch (const motkit::ValidationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitValidation;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitValidation;
    }
    return kExitOk;
}
