#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include "motkit/errors.hpp"
#include "motkit/rng.hpp"
#include "motkit/track.hpp"

namespace motkit {

struct ContainerSpec {
    int class_id = static_cast<int>(ContainerClass::Default);
    double street_position_m = 0.0;
    int same_class_cluster = 1; // expands into N same-class containers
};

// Corruption model applied to ground truth to imitate tracker failure modes:
// per-frame dropout, track fragmentation, short clutter tracks, center jitter.
struct NoiseModel {
    double dropout_p = 0.0;
    double fragment_p = 0.0;
    int fragment_gap_min = 5;   // merge-rule gap: tail starts gap frames after head ends
    int fragment_gap_max = 15;
    double clutter_rate = 0.0;  // expected spurious tracks per sequence (Poisson)
    int clutter_duration_min = 2;
    int clutter_duration_max = 10;
    double jitter_sigma = 0.0;  // pixels, truncated at 4 sigma

    void validate() const {
        auto prob = [](double p) { return p >= 0.0 && p <= 1.0; };
        if (!prob(dropout_p) || !prob(fragment_p)) {
            throw ValidationError("NoiseModel: probabilities must lie in [0,1]");
        }
        if (fragment_gap_min < 1 || fragment_gap_max < fragment_gap_min) {
            throw ValidationError("NoiseModel: invalid fragment_gap bounds");
        }
        if (clutter_rate < 0.0) throw ValidationError("NoiseModel: clutter_rate must be >= 0");
        if (clutter_duration_min < 1 || clutter_duration_max < clutter_duration_min) {
            throw ValidationError("NoiseModel: invalid clutter_duration bounds");
        }
        if (jitter_sigma < 0.0) throw ValidationError("NoiseModel: jitter_sigma must be >= 0");
    }
};

// Street-pass geometry: the vehicle drives at constant speed past static
// containers; each container is visible while inside a window of
// visibility_window meters ending at the container position, crossing the
// frame horizontally as it passes.
struct SimConfig {
    std::uint64_t seed = 1;
    std::string sequence_id = "sim";
    double image_width = SequenceTracks::kDefaultImageWidth;
    double image_height = SequenceTracks::kDefaultImageHeight;
    double fps = SequenceTracks::kDefaultFps;
    std::vector<ContainerSpec> containers;
    double vehicle_speed = 5.0;       // m/s
    double visibility_window = 40.0;  // m
    double cluster_spacing_m = 45.0;
    NoiseModel noise;

    void validate() const {
        if (vehicle_speed <= 0.0) throw ValidationError("SimConfig: vehicle_speed must be > 0");
        if (visibility_window <= 0.0) {
            throw ValidationError("SimConfig: visibility_window must be > 0");
        }
        if (image_width <= 0.0 || image_height <= 0.0) {
            throw ValidationError("SimConfig: image dimensions must be positive");
        }
        if (fps <= 0.0) throw ValidationError("SimConfig: fps must be > 0");
        if (cluster_spacing_m <= 0.0) {
            throw ValidationError("SimConfig: cluster_spacing_m must be > 0");
        }
        for (const ContainerSpec& c : containers) {
            if (!is_valid_class_id(c.class_id)) {
                throw ValidationError("SimConfig: container class_id outside 1..7");
            }
            if (c.same_class_cluster < 1) {
                throw ValidationError("SimConfig: same_class_cluster must be >= 1");
            }
        }
        noise.validate();
    }
};

inline SequenceTracks generate_scene(const SimConfig& cfg) {
    cfg.validate();
    Rng rng(cfg.seed);

    struct Expanded {
        int class_id;
        double position;
    };
    std::vector<Expanded> expanded;
    for (const ContainerSpec& c : cfg.containers) {
        for (int k = 0; k < c.same_class_cluster; ++k) {
            expanded.push_back({c.class_id, c.street_position_m + k * cfg.cluster_spacing_m});
        }
    }
    std::sort(expanded.begin(), expanded.end(),
              [](const Expanded& a, const Expanded& b) { return a.position < b.position; });

    std::vector<Track> tracks;
    int next_id = 1;
    const double frames_per_meter = cfg.fps / cfg.vehicle_speed;
    for (const Expanded& c : expanded) {
        // per-container appearance variation, drawn before the frame loop so
        // the rng consumption order is fixed
        const double base_w = 60.0 + rng.uniform(-10.0, 10.0);
        const double y_offset = rng.uniform(-20.0, 20.0);

        const int first = static_cast<int>(
            std::ceil((c.position - cfg.visibility_window) * frames_per_meter));
        const int last = static_cast<int>(std::floor(c.position * frames_per_meter));
        if (last < 0 || last < first) continue;
        std::vector<Detection> dets;
        for (int f = std::max(0, first); f <= last; ++f) {
            const double vehicle = static_cast<double>(f) / frames_per_meter;
            const double rel =
                (vehicle - (c.position - cfg.visibility_window)) / cfg.visibility_window;
            const double scale = 0.6 + 0.8 * rel; // nearer (toward exit edge) = larger
            const double w = base_w * scale;
            const double h = 1.1 * base_w * scale;
            const double cx = rel * cfg.image_width;
            const double cy = 0.55 * cfg.image_height + y_offset;
            Detection d;
            d.frame = f;
            d.box = {cx - w / 2.0, cy - h / 2.0, w, h};
            d.confidence = 0.9;
            d.class_id = c.class_id;
            dets.push_back(d);
        }
        if (dets.empty()) continue;
        tracks.emplace_back(next_id++, c.class_id, std::move(dets));
    }
    return SequenceTracks(cfg.sequence_id, cfg.image_width, cfg.image_height, cfg.fps,
                          std::move(tracks));
}

// Applies, in order: dropout, fragmentation, clutter injection, center
// jitter. Deterministic given the seed. Fragmentation drops the detections
// between the two fragments so the tail starts exactly `gap` frames after
// the head ends (matching the merge rule's gap measure).
inline SequenceTracks corrupt(const SequenceTracks& gt, const NoiseModel& noise,
                              std::uint64_t seed) {
    noise.validate();
    Rng rng(seed);

    int next_id = 1;
    for (const Track& t : gt.tracks()) next_id = std::max(next_id, t.track_id() + 1);

    int last_frame = 0;
    for (const Track& t : gt.tracks()) last_frame = std::max(last_frame, t.end_frame());

    std::vector<Track> out;
    for (const Track& t : gt.tracks()) {
        std::vector<Detection> dets;
        for (const Detection& d : t.detections()) {
            if (noise.dropout_p > 0.0 && rng.bernoulli(noise.dropout_p)) continue;
            dets.push_back(d);
        }
        if (dets.empty()) continue;

        const int n = static_cast<int>(dets.size());
        bool fragmented = false;
        if (noise.fragment_p > 0.0 && n >= 4 && rng.bernoulli(noise.fragment_p)) {
            const int gap = rng.uniform_int(noise.fragment_gap_min, noise.fragment_gap_max);
            const int split = std::clamp(n / 2 + rng.uniform_int(-2, 2), 1, n - 1);
            const int head_end = dets[split - 1].frame;
            std::vector<Detection> head(dets.begin(), dets.begin() + split);
            std::vector<Detection> tail;
            for (int i = split; i < n; ++i) {
                if (dets[i].frame >= head_end + gap) tail.push_back(dets[i]);
            }
            if (!tail.empty()) {
                out.emplace_back(t.track_id(), t.class_id(), std::move(head));
                out.emplace_back(next_id++, t.class_id(), std::move(tail));
                fragmented = true;
            }
        }
        if (!fragmented) {
            out.emplace_back(t.track_id(), t.class_id(), std::move(dets));
        }
    }

    // clutter: short tracks at random positions, the unreliable distant
    // detections H1 targets
    const int n_clutter = rng.poisson(noise.clutter_rate);
    for (int k = 0; k < n_clutter; ++k) {
        const int dur = rng.uniform_int(noise.clutter_duration_min, noise.clutter_duration_max);
        const int start = rng.uniform_int(0, std::max(0, last_frame - dur));
        const int class_id = rng.uniform_int(1, kNumContainerClasses);
        const double size = rng.uniform(15.0, 30.0);
        const double cx = rng.uniform(0.1 * gt.image_width(), 0.9 * gt.image_width());
        const double cy = rng.uniform(0.1 * gt.image_height(), 0.9 * gt.image_height());
        std::vector<Detection> dets;
        for (int f = start; f < start + dur; ++f) {
            Detection d;
            d.frame = f;
            d.box = {cx - size / 2.0, cy - size / 2.0, size, size};
            d.confidence = 0.5;
            d.class_id = class_id;
            dets.push_back(d);
        }
        out.emplace_back(next_id++, class_id, std::move(dets));
    }

    if (noise.jitter_sigma > 0.0) {
        std::vector<Track> jittered;
        jittered.reserve(out.size());
        const std::size_t n_real = out.size() - static_cast<std::size_t>(n_clutter);
        for (std::size_t i = 0; i < out.size(); ++i) {
            if (i >= n_real) { // clutter is synthetic already, leave it alone
                jittered.push_back(out[i]);
                continue;
            }
            const Track& t = out[i];
            std::vector<Detection> dets = t.detections();
            for (Detection& d : dets) {
                const double bound = 4.0 * noise.jitter_sigma;
                const double dx =
                    std::clamp(rng.normal(0.0, noise.jitter_sigma), -bound, bound);
                const double dy =
                    std::clamp(rng.normal(0.0, noise.jitter_sigma), -bound, bound);
                d.box.x_left += dx;
                d.box.y_top += dy;
            }
            jittered.emplace_back(t.track_id(), t.class_id(), std::move(dets));
        }
        out = std::move(jittered);
    }

    return gt.with_tracks(std::move(out));
}

// Scenario presets calibrated so the heuristic effects are structural, not
// statistical: fragmentation (H2-recoverable splits), sequential_same_class
// (the trap where H2 merges distinct containers and H3 protects), clutter
// (H1 showcase).
inline SimConfig preset_scenario(const std::string& name) {
    SimConfig cfg;
    if (name == "fragmentation") {
        cfg.seed = 7;
        cfg.sequence_id = "fragmentation";
        cfg.containers = {{1, 60.0, 1}, {2, 160.0, 1}, {1, 260.0, 1}, {3, 360.0, 1}};
        cfg.noise.fragment_p = 1.0;
        cfg.noise.fragment_gap_min = 5;
        cfg.noise.fragment_gap_max = 15;
        cfg.noise.jitter_sigma = 1.0;
    } else if (name == "sequential_same_class") {
        cfg.seed = 11;
        cfg.sequence_id = "sequential_same_class";
        cfg.containers = {{1, 60.0, 4}};
        cfg.cluster_spacing_m = 45.0; // consecutive tracks 10 frames apart, far in the image
        cfg.noise.fragment_p = 1.0;
        cfg.noise.fragment_gap_min = 3;
        cfg.noise.fragment_gap_max = 5;
        cfg.noise.jitter_sigma = 0.5;
    } else if (name == "clutter") {
        cfg.seed = 13;
        cfg.sequence_id = "clutter";
        cfg.containers = {{1, 60.0, 1}, {2, 160.0, 1}, {1, 260.0, 1}};
        cfg.noise.clutter_rate = 6.0;
        cfg.noise.clutter_duration_min = 2;
        cfg.noise.clutter_duration_max = 10;
        cfg.noise.jitter_sigma = 1.0;
    } else {
        throw ValidationError("unknown preset '" + name +
                              "'; valid: fragmentation, sequential_same_class, clutter");
    }
    return cfg;
}

} // namespace motkit
