#pragma once

#include <cstdio>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "motkit/counting.hpp"
#include "motkit/errors.hpp"
#include "motkit/metrics.hpp"
#include "motkit/refine.hpp"
#include "motkit/simulator.hpp"
#include "motkit/track.hpp"

namespace motkit {

constexpr const char* kToolVersion = "0.1.0";
constexpr const char* kEvalReportSchema = "motkit-eval-report/1";
constexpr const char* kSimConfigSchema = "motkit-sim-config/1";

struct SequenceEval {
    std::string sequence_id;
    ClearMotResult clear;
    IdentityResult ident;
    HotaResult hota;
    CountingErrors counting;
};

// Full evaluation output. Every metric carries the configuration it was
// computed under so any row is reproducible from the report alone.
struct EvalReport {
    std::string schema = kEvalReportSchema;
    std::string tool_version = kToolVersion;
    std::string label; // experiment label, e.g. heuristic regime
    double iou_threshold = 0.5;
    int bootstrap_n = 10;
    std::uint64_t bootstrap_seed = 42;
    bool aggregate_classes = false;
    HeuristicConfig heuristics;
    bool heuristics_applied = false;
    std::vector<SequenceEval> per_sequence;
    ClearMotResult pooled_clear;
    IdentityResult pooled_ident;
    HotaResult pooled_hota;
    CountingErrors counting; // over all (sequence, class) pairs
    // metric name -> bootstrap (mean, std) over per-sequence values
    std::map<std::string, std::pair<double, double>> bootstrap;
};

struct EvalOptions {
    double iou_threshold = 0.5;
    int bootstrap_n = 10;
    std::uint64_t bootstrap_seed = 42;
    bool aggregate_classes = false;
    std::string label = "baseline";
};

// Evaluates paired sequences (same order in both vectors), pools counts
// across sequences and bootstraps the per-sequence metric values.
inline EvalReport build_eval_report(const std::vector<SequenceTracks>& gt,
                                    const std::vector<SequenceTracks>& pred,
                                    const EvalOptions& opts) {
    if (gt.size() != pred.size() || gt.empty()) {
        throw ValidationError("build_eval_report: need equally many gt and pred sequences");
    }
    EvalReport rep;
    rep.label = opts.label;
    rep.iou_threshold = opts.iou_threshold;
    rep.bootstrap_n = opts.bootstrap_n;
    rep.bootstrap_seed = opts.bootstrap_seed;
    rep.aggregate_classes = opts.aggregate_classes;

    CountVector gt_counts, pred_counts;
    std::vector<ClearMotResult> clears;
    std::vector<IdentityResult> idents;
    std::vector<HotaResult> hotas;
    for (std::size_t i = 0; i < gt.size(); ++i) {
        SequenceEval se;
        se.sequence_id = gt[i].sequence_id();
        se.clear = clear_mot(gt[i], pred[i], opts.iou_threshold);
        se.ident = idf1(gt[i], pred[i], opts.iou_threshold);
        se.hota = hota(gt[i], pred[i]);
        CountVector g = count_tracks(gt[i]);
        CountVector p = count_tracks(pred[i]);
        if (opts.aggregate_classes) {
            g = aggregate_classes(g);
            p = aggregate_classes(p);
        }
        se.counting = counting_errors(g, p);
        for (const auto& [k, n] : g) gt_counts[k] += n;
        for (const auto& [k, n] : p) pred_counts[k] += n;
        clears.push_back(se.clear);
        idents.push_back(se.ident);
        hotas.push_back(se.hota);
        rep.per_sequence.push_back(std::move(se));
    }
    rep.pooled_clear = pool_clear_mot(clears);
    rep.pooled_ident = pool_identity(idents);
    rep.pooled_hota = pool_hota(hotas);
    rep.counting = counting_errors(gt_counts, pred_counts);

    auto boot = [&](const std::string& name, auto getter) {
        std::vector<double> values;
        for (const SequenceEval& se : rep.per_sequence) values.push_back(getter(se));
        rep.bootstrap[name] =
            bootstrap_summary(values, rep.bootstrap_n, rep.bootstrap_seed);
    };
    boot("mota", [](const SequenceEval& s) { return s.clear.mota; });
    boot("idf1", [](const SequenceEval& s) { return s.ident.idf1; });
    boot("hota", [](const SequenceEval& s) { return s.hota.hota; });
    boot("deta", [](const SequenceEval& s) { return s.hota.deta; });
    boot("assa", [](const SequenceEval& s) { return s.hota.assa; });
    boot("mae", [](const SequenceEval& s) { return s.counting.mae; });
    return rep;
}

// ---- JSON ----

inline nlohmann::json counting_to_json(const CountingErrors& c) {
    return {{"mae", c.mae},       {"sad", c.sad},
            {"rmse", c.rmse},     {"mape_percent", c.mape},
            {"pairs", c.pairs},   {"mape_pairs", c.mape_pairs},
            {"mape_excluded", c.mape_excluded}};
}

inline CountingErrors counting_from_json(const nlohmann::json& j) {
    CountingErrors c;
    c.mae = j.at("mae").get<double>();
    c.sad = j.at("sad").get<long long>();
    c.rmse = j.at("rmse").get<double>();
    c.mape = j.at("mape_percent").get<double>();
    c.pairs = j.value("pairs", 0);
    c.mape_pairs = j.value("mape_pairs", 0);
    c.mape_excluded = j.value("mape_excluded", 0);
    return c;
}

inline nlohmann::json report_to_json(const EvalReport& rep) {
    nlohmann::json j;
    j["schema"] = rep.schema;
    j["tool_version"] = rep.tool_version;
    j["label"] = rep.label;
    j["config"] = {
        {"iou_threshold", rep.iou_threshold},
        {"bootstrap_n", rep.bootstrap_n},
        {"bootstrap_seed", rep.bootstrap_seed},
        {"aggregate_classes", rep.aggregate_classes},
        {"heuristics_applied", rep.heuristics_applied},
        {"heuristics",
         {{"min_duration", rep.heuristics.min_duration},
          {"max_gap", rep.heuristics.max_gap},
          {"max_center_dist", rep.heuristics.max_center_dist},
          {"enable_h1", rep.heuristics.enable_h1},
          {"enable_h2", rep.heuristics.enable_h2},
          {"enable_h3", rep.heuristics.enable_h3}}},
    };
    auto clear_json = [](const ClearMotResult& c) {
        return nlohmann::json{{"mota", c.mota},
                              {"fp", c.fp},
                              {"fn", c.fn},
                              {"idsw", c.idsw},
                              {"gt_total", c.gt_total}};
    };
    auto ident_json = [](const IdentityResult& r) {
        return nlohmann::json{
            {"idf1", r.idf1}, {"idtp", r.idtp}, {"idfp", r.idfp}, {"idfn", r.idfn}};
    };
    auto hota_json = [](const HotaResult& h) {
        nlohmann::json per_alpha = nlohmann::json::array();
        for (const HotaAlpha& a : h.per_alpha) {
            per_alpha.push_back({{"alpha", a.alpha},
                                 {"hota", a.hota},
                                 {"deta", a.deta},
                                 {"assa", a.assa},
                                 {"tp", a.tp},
                                 {"fn", a.fn},
                                 {"fp", a.fp}});
        }
        return nlohmann::json{
            {"hota", h.hota}, {"deta", h.deta}, {"assa", h.assa}, {"per_alpha", per_alpha}};
    };

    j["per_sequence"] = nlohmann::json::array();
    for (const SequenceEval& se : rep.per_sequence) {
        j["per_sequence"].push_back({{"sequence_id", se.sequence_id},
                                     {"clear_mot", clear_json(se.clear)},
                                     {"identity", ident_json(se.ident)},
                                     {"hota", hota_json(se.hota)},
                                     {"counting", counting_to_json(se.counting)}});
    }
    j["pooled"] = {{"clear_mot", clear_json(rep.pooled_clear)},
                   {"identity", ident_json(rep.pooled_ident)},
                   {"hota", hota_json(rep.pooled_hota)}};
    j["counting"] = counting_to_json(rep.counting);
    j["bootstrap"] = nlohmann::json::object();
    for (const auto& [name, ms] : rep.bootstrap) {
        j["bootstrap"][name] = {{"mean", ms.first}, {"std", ms.second}};
    }
    return j;
}

// Reads back the fields cmd_report needs for comparisons.
inline EvalReport report_from_json(const nlohmann::json& j) {
    if (j.value("schema", "") != kEvalReportSchema) {
        throw ValidationError("report: unexpected schema '" + j.value("schema", "") + "'");
    }
    EvalReport rep;
    rep.label = j.value("label", "");
    rep.tool_version = j.value("tool_version", "");
    if (j.contains("config")) {
        rep.iou_threshold = j["config"].value("iou_threshold", 0.5);
    }
    const auto& pooled = j.at("pooled");
    rep.pooled_clear.mota = pooled.at("clear_mot").at("mota").get<double>();
    rep.pooled_ident.idf1 = pooled.at("identity").at("idf1").get<double>();
    rep.pooled_hota.hota = pooled.at("hota").at("hota").get<double>();
    rep.pooled_hota.deta = pooled.at("hota").at("deta").get<double>();
    rep.pooled_hota.assa = pooled.at("hota").at("assa").get<double>();
    rep.counting = counting_from_json(j.at("counting"));
    return rep;
}

// ---- markdown / csv, mirroring the tracking and counting table layout ----

inline std::string format_percent(double fraction) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.2f%%", 100.0 * fraction);
    return buf;
}

inline std::string format_fixed(double v, int decimals) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.*f", decimals, v);
    return buf;
}

inline std::string report_to_markdown(const EvalReport& rep) {
    std::string out;
    out += "## Tracking (IoU threshold " + format_fixed(rep.iou_threshold, 2) + ")\n\n";
    out += "| Experiment | MOTA | IDF1 | HOTA | DetA | AssA |\n";
    out += "|---|---|---|---|---|---|\n";
    out += "| " + rep.label + " | " + format_percent(rep.pooled_clear.mota) + " | " +
           format_percent(rep.pooled_ident.idf1) + " | " +
           format_percent(rep.pooled_hota.hota) + " | " +
           format_percent(rep.pooled_hota.deta) + " | " +
           format_percent(rep.pooled_hota.assa) + " |\n\n";
    out += "## Counting\n\n";
    out += "| Experiment | MAE | SAD | RMSE | MAPE |\n";
    out += "|---|---|---|---|---|\n";
    out += "| " + rep.label + " | " + format_fixed(rep.counting.mae, 2) + " | " +
           std::to_string(rep.counting.sad) + " | " + format_fixed(rep.counting.rmse, 2) +
           " | " + format_fixed(rep.counting.mape, 2) + "% |\n\n";
    out += "Bootstrap (n=" + std::to_string(rep.bootstrap_n) + ", seed " +
           std::to_string(rep.bootstrap_seed) + "), mean +/- std over sequences:\n\n";
    for (const auto& [name, ms] : rep.bootstrap) {
        out += "- " + name + ": " + format_fixed(ms.first, 4) + " +/- " +
               format_fixed(ms.second, 4) + "\n";
    }
    return out;
}

inline std::string report_to_csv(const EvalReport& rep) {
    std::string out =
        "scope,sequence_id,mota,idf1,hota,deta,assa,mae,sad,rmse,mape_percent\n";
    auto row = [&](const std::string& scope, const std::string& id, double mota, double idf1v,
                   const HotaResult& h, const CountingErrors& c) {
        out += scope + "," + id + "," + format_fixed(mota, 6) + "," + format_fixed(idf1v, 6) +
               "," + format_fixed(h.hota, 6) + "," + format_fixed(h.deta, 6) + "," +
               format_fixed(h.assa, 6) + "," + format_fixed(c.mae, 6) + "," +
               std::to_string(c.sad) + "," + format_fixed(c.rmse, 6) + "," +
               format_fixed(c.mape, 6) + "\n";
    };
    for (const SequenceEval& se : rep.per_sequence) {
        row("sequence", se.sequence_id, se.clear.mota, se.ident.idf1, se.hota, se.counting);
    }
    row("pooled", "all", rep.pooled_clear.mota, rep.pooled_ident.idf1, rep.pooled_hota,
        rep.counting);
    return out;
}

// ---- SimConfig file format ----

inline nlohmann::json sim_config_to_json(const SimConfig& cfg) {
    nlohmann::json j;
    j["schema"] = kSimConfigSchema;
    j["seed"] = cfg.seed;
    j["sequence_id"] = cfg.sequence_id;
    j["image_width"] = cfg.image_width;
    j["image_height"] = cfg.image_height;
    j["fps"] = cfg.fps;
    j["vehicle_speed"] = cfg.vehicle_speed;
    j["visibility_window"] = cfg.visibility_window;
    j["cluster_spacing_m"] = cfg.cluster_spacing_m;
    j["containers"] = nlohmann::json::array();
    for (const ContainerSpec& c : cfg.containers) {
        j["containers"].push_back({{"class_id", c.class_id},
                                   {"street_position_m", c.street_position_m},
                                   {"same_class_cluster", c.same_class_cluster}});
    }
    j["noise"] = {{"dropout_p", cfg.noise.dropout_p},
                  {"fragment_p", cfg.noise.fragment_p},
                  {"fragment_gap_min", cfg.noise.fragment_gap_min},
                  {"fragment_gap_max", cfg.noise.fragment_gap_max},
                  {"clutter_rate", cfg.noise.clutter_rate},
                  {"clutter_duration_min", cfg.noise.clutter_duration_min},
                  {"clutter_duration_max", cfg.noise.clutter_duration_max},
                  {"jitter_sigma", cfg.noise.jitter_sigma}};
    return j;
}

inline SimConfig sim_config_from_json(const nlohmann::json& j) {
    if (j.value("schema", "") != kSimConfigSchema) {
        throw ValidationError("sim config: unexpected schema '" + j.value("schema", "") + "'");
    }
    SimConfig cfg;
    cfg.seed = j.value("seed", cfg.seed);
    cfg.sequence_id = j.value("sequence_id", cfg.sequence_id);
    cfg.image_width = j.value("image_width", cfg.image_width);
    cfg.image_height = j.value("image_height", cfg.image_height);
    cfg.fps = j.value("fps", cfg.fps);
    cfg.vehicle_speed = j.value("vehicle_speed", cfg.vehicle_speed);
    cfg.visibility_window = j.value("visibility_window", cfg.visibility_window);
    cfg.cluster_spacing_m = j.value("cluster_spacing_m", cfg.cluster_spacing_m);
    cfg.containers.clear();
    for (const auto& c : j.value("containers", nlohmann::json::array())) {
        ContainerSpec spec;
        spec.class_id = c.at("class_id").get<int>();
        spec.street_position_m = c.at("street_position_m").get<double>();
        spec.same_class_cluster = c.value("same_class_cluster", 1);
        cfg.containers.push_back(spec);
    }
    if (j.contains("noise")) {
        const auto& n = j["noise"];
        cfg.noise.dropout_p = n.value("dropout_p", 0.0);
        cfg.noise.fragment_p = n.value("fragment_p", 0.0);
        cfg.noise.fragment_gap_min = n.value("fragment_gap_min", cfg.noise.fragment_gap_min);
        cfg.noise.fragment_gap_max = n.value("fragment_gap_max", cfg.noise.fragment_gap_max);
        cfg.noise.clutter_rate = n.value("clutter_rate", 0.0);
        cfg.noise.clutter_duration_min =
            n.value("clutter_duration_min", cfg.noise.clutter_duration_min);
        cfg.noise.clutter_duration_max =
            n.value("clutter_duration_max", cfg.noise.clutter_duration_max);
        cfg.noise.jitter_sigma = n.value("jitter_sigma", 0.0);
    }
    cfg.validate();
    return cfg;
}

} // namespace motkit
