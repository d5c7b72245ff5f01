// End-to-end acceptance checks. Runs as: acceptance <path-to-motkit-cli>
// Prints one [PASS]/[FAIL] line per criterion and exits nonzero on any failure.
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "micro_instances.hpp"
#include "motkit/assignment.hpp"
#include "motkit/counting.hpp"
#include "motkit/metrics.hpp"
#include "motkit/mot_io.hpp"
#include "motkit/refine.hpp"
#include "motkit/report.hpp"
#include "motkit/simulator.hpp"
#include "oracles.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

int g_failures = 0;

void report(int n, bool ok, const std::string& what) {
    std::cout << (ok ? "[PASS]" : "[FAIL]") << " criterion " << n << ": " << what << "\n";
    if (!ok) g_failures++;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

int run_cli(const std::string& cli, const std::string& args, const fs::path& stdout_file) {
    const std::string cmd =
        "\"" + cli + "\" " + args + " > \"" + stdout_file.string() + "\" 2>/dev/null";
    return std::system(cmd.c_str());
}

motkit::SequenceTracks relabel(const motkit::SequenceTracks& seq, int offset) {
    std::vector<motkit::Track> tracks;
    for (const motkit::Track& t : seq.tracks()) {
        tracks.emplace_back(t.track_id() + offset, t.class_id(), t.detections());
    }
    return seq.with_tracks(std::move(tracks));
}

motkit::Track run_track(int id, int cls, int start, int duration, double x, double y) {
    std::vector<motkit::Detection> dets;
    for (int f = start; f < start + duration; ++f) {
        motkit::Detection d;
        d.frame = f;
        d.box = {x, y, 40.0, 40.0};
        d.class_id = cls;
        dets.push_back(d);
    }
    return motkit::Track(id, cls, std::move(dets));
}

// Hungarian solver against exhaustive enumeration, 500 random instances.
void criterion_1() {
    const auto t0 = std::chrono::steady_clock::now();
    motkit::Rng rng(101);
    bool ok = true;
    for (int i = 0; i < 500 && ok; ++i) {
        const std::size_t rows = static_cast<std::size_t>(rng.uniform_int(1, 7));
        const std::size_t cols = static_cast<std::size_t>(rng.uniform_int(1, 7));
        motkit::CostMatrix m(rows, cols, 0.0);
        for (std::size_t r = 0; r < rows; ++r) {
            for (std::size_t c = 0; c < cols; ++c) m.at(r, c) = rng.uniform(-10.0, 10.0);
        }
        for (motkit::AssignMode mode :
             {motkit::AssignMode::Minimize, motkit::AssignMode::Maximize}) {
            const auto fast = motkit::solve_assignment(m, mode);
            const auto slow = motkit::exhaustive_assignment(m, mode);
            const double a = motkit::assignment_total(m, fast);
            const double b = motkit::assignment_total(m, slow);
            if (fast.size() != slow.size() || std::abs(a - b) > 1e-9) ok = false;
        }
    }
    const double dt = seconds_since(t0);
    report(1, ok && dt < 10.0,
           "500 random assignment instances match exhaustive search (" +
               std::to_string(dt).substr(0, 4) + "s)");
}

// Metric implementations against enumeration oracles, 300 micro-instances.
void criterion_2() {
    const auto t0 = std::chrono::steady_clock::now();
    motkit::Rng rng(202);
    bool ok = true;
    for (int i = 0; i < 300 && ok; ++i) {
        const auto gt = microgen::random_micro(rng, "g");
        const auto pred = microgen::random_micro(rng, "p");
        const auto cm = motkit::clear_mot(gt, pred, 0.5);
        const auto cm_o = oracle::clear_mot(gt, pred, 0.5);
        if (cm.fn != cm_o.fn || cm.fp != cm_o.fp || cm.idsw != cm_o.idsw ||
            std::abs(cm.mota - cm_o.mota) > 1e-9) {
            ok = false;
        }
        const auto id = motkit::idf1(gt, pred, 0.5);
        const auto id_o = oracle::idf1(gt, pred, 0.5);
        if (id.idtp != id_o.idtp || std::abs(id.idf1 - id_o.idf1) > 1e-9) ok = false;
        const auto h = motkit::hota(gt, pred);
        const auto h_o = oracle::hota(gt, pred);
        if (std::abs(h.hota - h_o.hota) > 1e-9 || std::abs(h.deta - h_o.deta) > 1e-9 ||
            std::abs(h.assa - h_o.assa) > 1e-9) {
            ok = false;
        }
    }
    const double dt = seconds_since(t0);
    report(2, ok && dt < 30.0,
           "300 micro-instances agree with the metric oracles (" +
               std::to_string(dt).substr(0, 4) + "s)");
}

// A relabeled copy of the ground truth scores perfectly on every preset.
void criterion_3() {
    bool ok = true;
    for (const char* name : {"fragmentation", "sequential_same_class", "clutter"}) {
        const auto gt = motkit::generate_scene(motkit::preset_scenario(name));
        const auto pred = relabel(gt, 1000);
        const auto cm = motkit::clear_mot(gt, pred, 0.5);
        const auto id = motkit::idf1(gt, pred, 0.5);
        const auto h = motkit::hota(gt, pred);
        if (cm.mota != 1.0 || id.idf1 != 1.0 || std::abs(h.hota - 1.0) > 1e-12 ||
            std::abs(h.deta - 1.0) > 1e-12 || std::abs(h.assa - 1.0) > 1e-12) {
            ok = false;
        }
        const auto err =
            motkit::counting_errors(motkit::count_tracks(gt), motkit::count_tracks(pred));
        if (err.mae != 0.0 || err.sad != 0 || err.rmse != 0.0 || err.mape != 0.0) ok = false;
    }
    report(3, ok, "perfect predictions score 1.0 tracking / 0.0 counting on all presets");
}

// Clutter preset: the baseline overcounts, the duration filter restores counts.
void criterion_4() {
    const auto cfg = motkit::preset_scenario("clutter");
    const auto gt = motkit::generate_scene(cfg);
    const auto pred = motkit::corrupt(gt, cfg.noise, cfg.seed + 1);
    const auto gt_counts = motkit::count_tracks(gt);
    const double before = motkit::counting_errors(gt_counts, motkit::count_tracks(pred)).mae;
    const double after =
        motkit::counting_errors(gt_counts,
                                motkit::count_tracks(motkit::apply_h1(pred, 15)))
            .mae;
    report(4, before > 0.0 && after == 0.0,
           "clutter preset: baseline MAE > 0, MAE 0 after the duration filter");
}

// Fragmentation preset: duration filter plus temporal merge recovers the exact
// counts, a 100% MAE reduction.
void criterion_5() {
    const auto cfg = motkit::preset_scenario("fragmentation");
    const auto gt = motkit::generate_scene(cfg);
    const auto pred = motkit::corrupt(gt, cfg.noise, cfg.seed + 1);
    const auto gt_counts = motkit::count_tracks(gt);
    const double before = motkit::counting_errors(gt_counts, motkit::count_tracks(pred)).mae;
    motkit::HeuristicConfig h;
    h.enable_h3 = false;
    const auto refined = motkit::refine_pipeline(pred, h);
    const auto refined_counts = motkit::count_tracks(refined);
    const double after = motkit::counting_errors(gt_counts, refined_counts).mae;
    const bool ok =
        before > 0.0 && after == 0.0 && refined_counts == gt_counts &&
        motkit::format_fixed(motkit::relative_reduction(before, after), 1) == "100.0";
    report(5, ok, "fragmentation preset: H1+H2 restores exact counts (100% MAE reduction)");
}

// Sequential same-class preset: unconstrained merging hurts both counting and
// identity; the spatial constraint repairs it.
void criterion_6() {
    const auto cfg = motkit::preset_scenario("sequential_same_class");
    const auto gt = motkit::generate_scene(cfg);
    const auto pred = motkit::corrupt(gt, cfg.noise, cfg.seed + 1);
    const auto gt_counts = motkit::count_tracks(gt);

    motkit::HeuristicConfig h1_only;
    h1_only.enable_h2 = false;
    h1_only.enable_h3 = false;
    motkit::HeuristicConfig h12;
    h12.enable_h3 = false;
    motkit::HeuristicConfig h123;

    const auto r1 = motkit::refine_pipeline(pred, h1_only);
    const auto r12 = motkit::refine_pipeline(pred, h12);
    const auto r123 = motkit::refine_pipeline(pred, h123);

    const double mae1 = motkit::counting_errors(gt_counts, motkit::count_tracks(r1)).mae;
    const double mae12 = motkit::counting_errors(gt_counts, motkit::count_tracks(r12)).mae;
    const double idf1_1 = motkit::idf1(gt, r1, 0.5).idf1;
    const double idf1_12 = motkit::idf1(gt, r12, 0.5).idf1;
    const double idf1_123 = motkit::idf1(gt, r123, 0.5).idf1;

    const bool ok = mae12 < mae1 && idf1_12 < idf1_1 && idf1_123 > idf1_12 &&
                    motkit::count_tracks(r123) == gt_counts;
    report(6, ok,
           "sequential preset: H2 trades identity for counts, H3 recovers both");
}

// Threshold boundaries behave exactly as documented.
void criterion_7() {
    bool ok = true;
    const motkit::SequenceTracks base("b", 1000, 1000, 10, {});

    // duration: 14 removed, 15 kept
    {
        const auto seq = base.with_tracks(
            {run_track(1, 1, 0, 14, 100, 100), run_track(2, 1, 0, 15, 300, 300)});
        const auto out = motkit::apply_h1(seq, 15);
        if (out.tracks().size() != 1 || out.tracks()[0].track_id() != 2) ok = false;
    }
    // gap: exactly 20 merges, 21 does not
    {
        motkit::HeuristicConfig h;
        h.enable_h1 = false;
        h.enable_h3 = false;
        const auto at20 = motkit::refine_pipeline(
            base.with_tracks(
                {run_track(1, 1, 0, 10, 100, 100), run_track(2, 1, 29, 10, 100, 100)}),
            h);
        const auto at21 = motkit::refine_pipeline(
            base.with_tracks(
                {run_track(1, 1, 0, 10, 100, 100), run_track(2, 1, 30, 10, 100, 100)}),
            h);
        if (at20.tracks().size() != 1 || at21.tracks().size() != 2) ok = false;
    }
    // distance: exactly 0.10 merges, 0.1000001 does not (1000x1000 image)
    {
        motkit::HeuristicConfig h;
        h.enable_h1 = false;
        const auto at_limit = motkit::refine_pipeline(
            base.with_tracks(
                {run_track(1, 1, 0, 10, 480, 460), run_track(2, 1, 15, 10, 540, 540)}),
            h);
        // centers (500,480) and (560,560): dx=0.06, dy=0.08 -> dist 0.10
        motkit::HeuristicConfig tight = h;
        tight.max_center_dist = 0.0999999;
        const auto just_over = motkit::refine_pipeline(
            base.with_tracks(
                {run_track(1, 1, 0, 10, 480, 460), run_track(2, 1, 15, 10, 540, 540)}),
            tight);
        if (at_limit.tracks().size() != 1 || just_over.tracks().size() != 2) ok = false;
    }
    report(7, ok, "thresholds are inclusive at 15 frames, 20 frames and 0.10 units");
}

// Canonical serialization is a fixed point: parse(write(x)) == x as text.
void criterion_8() {
    motkit::Rng rng(808);
    bool ok = true;
    for (int i = 0; i < 100 && ok; ++i) {
        const auto seq = microgen::random_micro(rng, "fuzz");
        const std::string once = motkit::write_mot_string(seq);
        motkit::SequenceMeta meta;
        meta.sequence_id = "fuzz";
        meta.image_width = seq.image_width();
        meta.image_height = seq.image_height();
        meta.fps = seq.fps();
        const auto back = motkit::parse_mot_string(once, meta);
        if (motkit::write_mot_string(back) != once) ok = false;
    }
    report(8, ok, "100 fuzzed sequences survive write -> parse -> write unchanged");
}

// CLI determinism: same seed gives byte-identical files, new seeds differ.
void criterion_9(const std::string& cli, const fs::path& tmp) {
    const fs::path a = tmp / "sim_a";
    const fs::path b = tmp / "sim_b";
    const fs::path c = tmp / "sim_c";
    const fs::path log = tmp / "cli.out";
    bool ok = true;
    ok &= run_cli(cli, "simulate --preset clutter --out-dir \"" + a.string() + "\"", log) == 0;
    ok &= run_cli(cli, "simulate --preset clutter --out-dir \"" + b.string() + "\"", log) == 0;
    ok &= run_cli(cli,
                  "simulate --preset clutter --seed 99 --out-dir \"" + c.string() + "\"",
                  log) == 0;
    if (ok) {
        ok &= slurp(a / "gt.txt") == slurp(b / "gt.txt");
        ok &= slurp(a / "pred.txt") == slurp(b / "pred.txt");
        ok &= slurp(a / "pred.txt") != slurp(c / "pred.txt");
    }
    // evaluation (incl. bootstrap) is deterministic end to end
    const fs::path rep1 = tmp / "rep1.json";
    const fs::path rep2 = tmp / "rep2.json";
    const std::string eval_args = "evaluate --gt \"" + (a / "gt.txt").string() +
                                  "\" --pred \"" + (a / "pred.txt").string() +
                                  "\" --meta \"" + (a / "meta.txt").string() + "\" --output ";
    ok &= run_cli(cli, eval_args + "\"" + rep1.string() + "\"", log) == 0;
    ok &= run_cli(cli, eval_args + "\"" + rep2.string() + "\"", log) == 0;
    if (ok) ok &= slurp(rep1) == slurp(rep2);
    report(9, ok, "CLI simulation and evaluation are byte-identical per seed");
}

// The comparison report prints the expected relative reductions.
void criterion_10(const std::string& cli, const fs::path& tmp) {
    auto minimal_report = [](const std::string& label, double mae, long long sad) {
        json j;
        j["schema"] = "motkit-eval-report/1";
        j["label"] = label;
        j["pooled"] = {
            {"clear_mot", {{"mota", 0.9}}},
            {"identity", {{"idf1", 0.9}}},
            {"hota", {{"hota", 0.8}, {"deta", 0.8}, {"assa", 0.8}}},
        };
        j["counting"] = {{"mae", mae}, {"sad", sad}, {"rmse", mae}, {"mape_percent", 10.0}};
        return j;
    };
    const fs::path base = tmp / "base.json";
    const fs::path h12 = tmp / "h12.json";
    const fs::path h123 = tmp / "h123.json";
    std::ofstream(base) << minimal_report("baseline", 3.48, 100).dump(2);
    std::ofstream(h12) << minimal_report("H1+H2", 0.71, 20).dump(2);
    std::ofstream(h123) << minimal_report("H1+H2+H3", 0.90, 26).dump(2);

    const fs::path out = tmp / "compare.md";
    bool ok = run_cli(std::string(cli),
                      "report \"" + base.string() + "\" \"" + h12.string() + "\" \"" +
                          h123.string() + "\"",
                      out) == 0;
    const std::string text = slurp(out);
    // (3.48 - 0.71) / 3.48 = 79.6%, (3.48 - 0.90) / 3.48 = 74.1%
    ok &= text.find("79.6%") != std::string::npos;
    ok &= text.find("74.1%") != std::string::npos;

    // second pair: 6.43 -> 0.90 is an 86.0% reduction
    const fs::path base2 = tmp / "base2.json";
    const fs::path ref2 = tmp / "ref2.json";
    std::ofstream(base2) << minimal_report("baseline", 6.43, 120).dump(2);
    std::ofstream(ref2) << minimal_report("refined", 0.90, 17).dump(2);
    const fs::path out2 = tmp / "compare2.md";
    ok &= run_cli(std::string(cli),
                  "report \"" + base2.string() + "\" \"" + ref2.string() + "\"", out2) == 0;
    ok &= slurp(out2).find("86.0%") != std::string::npos;
    report(10, ok, "comparison report prints 79.6% / 74.1% / 86.0% MAE reductions");
}

} // namespace

int main(int argc, char** argv) {
    if (argc < 2) {
        std::cerr << "usage: acceptance <path-to-motkit-cli>\n";
        return 2;
    }
    const std::string cli = argv[1];
    const fs::path tmp = fs::temp_directory_path() / "motkit_acceptance";
    fs::remove_all(tmp);
    fs::create_directories(tmp);

    const auto t0 = std::chrono::steady_clock::now();
    criterion_1();
    criterion_2();
    criterion_3();
    criterion_4();
    criterion_5();
    criterion_6();
    criterion_7();
    criterion_8();
    criterion_9(cli, tmp);
    criterion_10(cli, tmp);
    const double total = seconds_since(t0);
    report(11, total < 120.0,
           "full acceptance run finishes in " + std::to_string(total).substr(0, 5) +
               "s (< 120s)");

    fs::remove_all(tmp);
    if (g_failures > 0) {
        std::cout << g_failures << " criterion(s) failed\n";
        return 1;
    }
    std::cout << "all criteria passed\n";
    return 0;
}
