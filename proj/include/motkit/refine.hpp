#pragma once

#include <algorithm>
#include <map>
#include <utility>
#include <vector>

#include "motkit/errors.hpp"
#include "motkit/geometry.hpp"
#include "motkit/track.hpp"

namespace motkit {

// Thresholds and enable flags for the three refinement heuristics:
// H1 minimum track duration, H2 temporal gap merging, H3 spatial proximity
// constraint on H2 merges.
struct HeuristicConfig {
    int min_duration = 15;           // frames
    int max_gap = 20;                // frames
    double max_center_dist = 0.10;   // normalized image units
    bool enable_h1 = true;
    bool enable_h2 = true;
    bool enable_h3 = true;

    void validate() const {
        if (min_duration < 1) throw ValidationError("HeuristicConfig: min_duration must be >= 1");
        if (max_gap < 0) throw ValidationError("HeuristicConfig: max_gap must be >= 0");
        if (max_center_dist < 0.0) {
            throw ValidationError("HeuristicConfig: max_center_dist must be >= 0");
        }
        if (enable_h3 && !enable_h2) {
            throw ValidationError("HeuristicConfig: H3 extends H2 and requires it");
        }
    }
};

struct RefineStats {
    int tracks_removed = 0;   // by H1
    int merges_performed = 0; // by H2/H3
};

// H1: drop tracks strictly shorter than min_duration frames.
inline SequenceTracks apply_h1(const SequenceTracks& seq, int min_duration,
                               RefineStats* stats = nullptr) {
    std::vector<Track> kept;
    kept.reserve(seq.tracks().size());
    for (const Track& t : seq.tracks()) {
        if (t.duration_frames() >= min_duration) {
            kept.push_back(t);
        } else if (stats) {
            stats->tracks_removed++;
        }
    }
    return seq.with_tracks(std::move(kept));
}

namespace detail {

// Absolute tolerance on the H3 distance comparison so a distance that is
// exactly the threshold up to floating-point noise still merges.
constexpr double kCenterDistEps = 1e-9;

inline bool mergeable(const Track& a, const Track& b, const HeuristicConfig& cfg,
                      double image_width, double image_height) {
    if (a.class_id() != b.class_id()) return false;
    const int gap = b.start_frame() - a.end_frame();
    if (gap < 1 || gap > cfg.max_gap) return false; // overlap never merges
    if (cfg.enable_h3) {
        const double dist = center_distance_normalized(
            a.last_detection().box, b.first_detection().box, image_width, image_height);
        if (dist > cfg.max_center_dist + kCenterDistEps) return false;
    }
    return true;
}

inline Track merge_pair(const Track& a, const Track& b) {
    std::vector<Detection> dets = a.detections();
    dets.insert(dets.end(), b.detections().begin(), b.detections().end());
    return Track(a.track_id(), a.class_id(), std::move(dets));
}

} // namespace detail

// H2 (+H3): per class, tracks sorted by start frame are greedily chain-merged
// left to right. The earlier track keeps its id and stays eligible for further
// merges; when several candidates qualify, the earliest-starting (then lowest
// id) wins. Detections are concatenated, gaps are not interpolated.
inline SequenceTracks merge_tracks(const SequenceTracks& seq, const HeuristicConfig& cfg,
                                   RefineStats* stats = nullptr) {
    cfg.validate();
    if (!cfg.enable_h2) {
        throw ValidationError("merge_tracks: called with H2 disabled");
    }

    std::map<int, std::vector<Track>> by_class;
    for (const Track& t : seq.tracks()) by_class[t.class_id()].push_back(t);

    std::vector<Track> merged;
    merged.reserve(seq.tracks().size());
    for (auto& [cls, tracks] : by_class) {
        std::stable_sort(tracks.begin(), tracks.end(), [](const Track& a, const Track& b) {
            return std::make_pair(a.start_frame(), a.track_id()) <
                   std::make_pair(b.start_frame(), b.track_id());
        });
        std::vector<char> consumed(tracks.size(), false);
        for (std::size_t i = 0; i < tracks.size(); ++i) {
            if (consumed[i]) continue;
            Track current = tracks[i];
            bool merged_any = true;
            while (merged_any) {
                merged_any = false;
                for (std::size_t j = i + 1; j < tracks.size(); ++j) {
                    if (consumed[j]) continue;
                    if (detail::mergeable(current, tracks[j], cfg, seq.image_width(),
                                          seq.image_height())) {
                        current = detail::merge_pair(current, tracks[j]);
                        consumed[j] = true;
                        if (stats) stats->merges_performed++;
                        merged_any = true;
                        break; // end frame advanced, rescan from the front
                    }
                }
            }
            merged.push_back(std::move(current));
        }
    }
    std::stable_sort(merged.begin(), merged.end(), [](const Track& a, const Track& b) {
        return std::make_pair(a.start_frame(), a.track_id()) <
               std::make_pair(b.start_frame(), b.track_id());
    });
    return seq.with_tracks(std::move(merged));
}

// H1 first (if enabled), then H2/H3 merging. H1 is not re-applied after
// merging.
inline SequenceTracks refine_pipeline(const SequenceTracks& seq, const HeuristicConfig& cfg,
                                      RefineStats* stats = nullptr) {
    cfg.validate();
    SequenceTracks out = seq;
    if (cfg.enable_h1) out = apply_h1(out, cfg.min_duration, stats);
    if (cfg.enable_h2) out = merge_tracks(out, cfg, stats);
    return out;
}

} // namespace motkit
