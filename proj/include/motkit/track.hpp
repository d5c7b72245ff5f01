#pragma once

#include <algorithm>
#include <string>
#include <unordered_set>
#include <utility>
#include <vector>

#include "motkit/errors.hpp"
#include "motkit/geometry.hpp"

namespace motkit {

// The seven municipal container classes.
enum class ContainerClass : int {
    Default = 1,
    Green = 2,
    Blue = 3,
    Yellow = 4,
    Biodegradable = 5,
    Oil = 6,
    Battery = 7,
};

constexpr int kNumContainerClasses = 7;

inline bool is_valid_class_id(int class_id) {
    return class_id >= 1 && class_id <= kNumContainerClasses;
}

struct Detection {
    int frame = 0; // 0-based
    BoundingBox box;
    double confidence = 1.0;
    int class_id = static_cast<int>(ContainerClass::Default);
};

// One object identity: a time-ordered sequence of detections with a single
// class label. Frame indices are strictly increasing after construction.
class Track {
public:
    Track(int track_id, int class_id, std::vector<Detection> detections)
        : track_id_(track_id), class_id_(class_id), detections_(std::move(detections)) {
        if (track_id_ <= 0) {
            throw ValidationError("Track: track_id must be positive");
        }
        if (!is_valid_class_id(class_id_)) {
            throw ValidationError("Track: class_id " + std::to_string(class_id_) +
                                  " outside 1.." + std::to_string(kNumContainerClasses));
        }
        if (detections_.empty()) {
            throw ValidationError("Track: detections must be non-empty");
        }
        std::stable_sort(detections_.begin(), detections_.end(),
                         [](const Detection& a, const Detection& b) { return a.frame < b.frame; });
        for (std::size_t i = 0; i < detections_.size(); ++i) {
            const Detection& d = detections_[i];
            if (d.frame < 0) {
                throw ValidationError("Track: negative frame index");
            }
            if (!d.box.valid()) {
                throw ValidationError("Track: box width/height must be positive");
            }
            if (d.confidence < 0.0 || d.confidence > 1.0) {
                throw ValidationError("Track: confidence outside [0,1]");
            }
            if (i > 0 && detections_[i - 1].frame == d.frame) {
                throw ValidationError("Track: duplicate detection at frame " +
                                      std::to_string(d.frame));
            }
        }
    }

    int track_id() const { return track_id_; }
    int class_id() const { return class_id_; }
    const std::vector<Detection>& detections() const { return detections_; }

    int start_frame() const { return detections_.front().frame; }
    int end_frame() const { return detections_.back().frame; }
    int duration_frames() const { return static_cast<int>(detections_.size()); }

    const Detection& first_detection() const { return detections_.front(); }
    const Detection& last_detection() const { return detections_.back(); }

private:
    int track_id_;
    int class_id_;
    std::vector<Detection> detections_;
};

// All tracks of one recording plus the metadata the heuristics and metrics
// need (image size for normalization, fps for seconds-based thresholds).
class SequenceTracks {
public:
    static constexpr double kDefaultImageWidth = 1920.0;
    static constexpr double kDefaultImageHeight = 1080.0;
    static constexpr double kDefaultFps = 10.0;

    SequenceTracks(std::string sequence_id, double image_width, double image_height,
                   double fps, std::vector<Track> tracks)
        : sequence_id_(std::move(sequence_id)),
          image_width_(image_width),
          image_height_(image_height),
          fps_(fps),
          tracks_(std::move(tracks)) {
        if (image_width_ <= 0.0 || image_height_ <= 0.0) {
            throw ValidationError("SequenceTracks: image dimensions must be positive");
        }
        if (fps_ <= 0.0) {
            throw ValidationError("SequenceTracks: fps must be positive");
        }
        std::unordered_set<int> ids;
        for (const Track& t : tracks_) {
            if (!ids.insert(t.track_id()).second) {
                throw ValidationError("SequenceTracks: duplicate track id " +
                                      std::to_string(t.track_id()));
            }
            for (const Detection& d : t.detections()) {
                // Fisheye boxes may partially exit the frame; this hard bound
                // only rejects corrupt coordinates.
                if (d.box.x_left < -0.5 * image_width_ ||
                    d.box.x_right() > 1.5 * image_width_ ||
                    d.box.y_top < -0.5 * image_height_ ||
                    d.box.y_bottom() > 1.5 * image_height_) {
                    throw ValidationError("SequenceTracks: box far outside image bounds in track " +
                                          std::to_string(t.track_id()));
                }
            }
        }
    }

    const std::string& sequence_id() const { return sequence_id_; }
    double image_width() const { return image_width_; }
    double image_height() const { return image_height_; }
    double fps() const { return fps_; }
    const std::vector<Track>& tracks() const { return tracks_; }

    std::size_t total_detections() const {
        std::size_t n = 0;
        for (const Track& t : tracks_) n += t.detections().size();
        return n;
    }

    SequenceTracks with_tracks(std::vector<Track> tracks) const {
        return SequenceTracks(sequence_id_, image_width_, image_height_, fps_,
                              std::move(tracks));
    }

private:
    std::string sequence_id_;
    double image_width_;
    double image_height_;
    double fps_;
    std::vector<Track> tracks_;
};

} // namespace motkit
