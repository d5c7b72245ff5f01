#pragma once

#include <cstdio>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "motkit/errors.hpp"
#include "motkit/track.hpp"

namespace motkit {

// Sequence metadata sidecar. Stored as "key=value" lines with keys
// sequence_id, image_width, image_height, fps.
struct SequenceMeta {
    std::string sequence_id = "seq";
    double image_width = SequenceTracks::kDefaultImageWidth;
    double image_height = SequenceTracks::kDefaultImageHeight;
    double fps = SequenceTracks::kDefaultFps;
};

inline SequenceMeta load_meta(std::istream& in) {
    SequenceMeta meta;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty() || line[0] == '#') continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw ParseError("meta: expected key=value", lineno);
        }
        const std::string key = line.substr(0, eq);
        const std::string value = line.substr(eq + 1);
        try {
            if (key == "sequence_id") {
                meta.sequence_id = value;
            } else if (key == "image_width") {
                meta.image_width = std::stod(value);
            } else if (key == "image_height") {
                meta.image_height = std::stod(value);
            } else if (key == "fps") {
                meta.fps = std::stod(value);
            } else {
                throw ParseError("meta: unknown key '" + key + "'", lineno);
            }
        } catch (const std::invalid_argument&) {
            throw ParseError("meta: non-numeric value for '" + key + "'", lineno);
        }
    }
    return meta;
}

inline void save_meta(const SequenceMeta& meta, std::ostream& out) {
    char buf[64];
    out << "sequence_id=" << meta.sequence_id << "\n";
    std::snprintf(buf, sizeof(buf), "%g", meta.image_width);
    out << "image_width=" << buf << "\n";
    std::snprintf(buf, sizeof(buf), "%g", meta.image_height);
    out << "image_height=" << buf << "\n";
    std::snprintf(buf, sizeof(buf), "%g", meta.fps);
    out << "fps=" << buf << "\n";
}

// One line of the MOT Challenge text convention:
//   frame,id,bb_left,bb_top,bb_width,bb_height,conf,class,visibility
// conf, class and visibility are optional trailing fields.
struct MotRecord {
    int frame = 1; // 1-based on disk
    int id = 0;
    double bb_left = 0.0;
    double bb_top = 0.0;
    double bb_width = 0.0;
    double bb_height = 0.0;
    double conf = 1.0;
    int class_id = static_cast<int>(ContainerClass::Default);
    double visibility = 1.0;
};

namespace detail {

inline std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> fields;
    std::string cur;
    for (char ch : line) {
        if (ch == ',') {
            fields.push_back(cur);
            cur.clear();
        } else if (ch != '\r') {
            cur += ch;
        }
    }
    fields.push_back(cur);
    return fields;
}

inline double parse_number(const std::string& s, int lineno, const char* what) {
    std::size_t pos = 0;
    double v = 0.0;
    try {
        v = std::stod(s, &pos);
    } catch (const std::exception&) {
        throw ParseError(std::string("non-numeric ") + what + " '" + s + "'", lineno);
    }
    while (pos < s.size() && (s[pos] == ' ' || s[pos] == '\t')) ++pos;
    if (pos != s.size()) {
        throw ParseError(std::string("non-numeric ") + what + " '" + s + "'", lineno);
    }
    return v;
}

inline int parse_int(const std::string& s, int lineno, const char* what) {
    const double v = parse_number(s, lineno, what);
    const int i = static_cast<int>(v);
    if (static_cast<double>(i) != v) {
        throw ParseError(std::string(what) + " must be an integer, got '" + s + "'", lineno);
    }
    return i;
}

} // namespace detail

inline MotRecord parse_mot_line(const std::string& line, int lineno,
                                bool* class_missing = nullptr) {
    const auto fields = detail::split_csv(line);
    if (fields.size() < 6 || fields.size() > 10) {
        throw ParseError("expected 6-10 comma-separated fields, got " +
                             std::to_string(fields.size()),
                         lineno);
    }
    MotRecord rec;
    rec.frame = detail::parse_int(fields[0], lineno, "frame");
    rec.id = detail::parse_int(fields[1], lineno, "id");
    rec.bb_left = detail::parse_number(fields[2], lineno, "bb_left");
    rec.bb_top = detail::parse_number(fields[3], lineno, "bb_top");
    rec.bb_width = detail::parse_number(fields[4], lineno, "bb_width");
    rec.bb_height = detail::parse_number(fields[5], lineno, "bb_height");
    if (fields.size() > 6) rec.conf = detail::parse_number(fields[6], lineno, "conf");
    if (fields.size() > 7) {
        rec.class_id = detail::parse_int(fields[7], lineno, "class");
    } else if (class_missing) {
        *class_missing = true;
    }
    if (fields.size() > 8) rec.visibility = detail::parse_number(fields[8], lineno, "visibility");

    if (rec.frame < 1) throw ParseError("frame must be >= 1", lineno);
    if (rec.bb_width <= 0.0 || rec.bb_height <= 0.0) {
        throw ParseError("bb_width and bb_height must be positive", lineno);
    }
    return rec;
}

// Parses a MOT text stream into tracks. File frames are 1-based and become
// 0-based in memory; records are grouped by id, per-frame class flips are
// resolved by majority vote (ties to the lowest class id), and the resulting
// tracks are sorted by start frame.
inline SequenceTracks parse_mot_file(std::istream& in, const SequenceMeta& meta,
                                     std::vector<std::string>* warnings = nullptr) {
    struct PendingTrack {
        std::vector<Detection> detections;
        std::map<int, int> class_votes;
    };
    std::map<int, PendingTrack> by_id;
    std::map<std::pair<int, int>, int> seen; // (frame, id) -> first line
    bool warned_class = false;

    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty() || line == "\r") continue;
        bool class_missing = false;
        const MotRecord rec = parse_mot_line(line, lineno, &class_missing);
        if (class_missing && warnings && !warned_class) {
            warnings->push_back("class field missing, defaulting to class 1 (default container)");
            warned_class = true;
        }
        const auto key = std::make_pair(rec.frame, rec.id);
        const auto [it, inserted] = seen.emplace(key, lineno);
        if (!inserted) {
            throw ParseError("duplicate record for frame " + std::to_string(rec.frame) +
                                 ", id " + std::to_string(rec.id) + " (first at line " +
                                 std::to_string(it->second) + ")",
                             lineno);
        }
        PendingTrack& pt = by_id[rec.id];
        Detection det;
        det.frame = rec.frame - 1;
        det.box = {rec.bb_left, rec.bb_top, rec.bb_width, rec.bb_height};
        det.confidence = std::min(1.0, std::max(0.0, rec.conf));
        det.class_id = rec.class_id;
        pt.detections.push_back(det);
        pt.class_votes[rec.class_id]++;
    }

    std::vector<Track> tracks;
    tracks.reserve(by_id.size());
    for (auto& [id, pt] : by_id) {
        int best_class = 0, best_votes = -1;
        for (const auto& [cls, votes] : pt.class_votes) {
            if (votes > best_votes) { // map order gives lowest class on ties
                best_votes = votes;
                best_class = cls;
            }
        }
        for (Detection& d : pt.detections) d.class_id = best_class;
        tracks.emplace_back(id, best_class, std::move(pt.detections));
    }
    std::stable_sort(tracks.begin(), tracks.end(), [](const Track& a, const Track& b) {
        return std::make_pair(a.start_frame(), a.track_id()) <
               std::make_pair(b.start_frame(), b.track_id());
    });
    return SequenceTracks(meta.sequence_id, meta.image_width, meta.image_height, meta.fps,
                          std::move(tracks));
}

// Canonical formatting: records sorted by (frame, id), 1-based frames,
// coordinates and visibility with 2 decimals, confidence with 4.
inline void write_mot_file(const SequenceTracks& seq, std::ostream& out) {
    struct Row {
        int frame;
        int id;
        const Detection* det;
        int class_id;
    };
    std::vector<Row> rows;
    rows.reserve(seq.total_detections());
    for (const Track& t : seq.tracks()) {
        for (const Detection& d : t.detections()) {
            rows.push_back({d.frame + 1, t.track_id(), &d, t.class_id()});
        }
    }
    std::sort(rows.begin(), rows.end(), [](const Row& a, const Row& b) {
        return std::make_pair(a.frame, a.id) < std::make_pair(b.frame, b.id);
    });
    char buf[256];
    for (const Row& r : rows) {
        std::snprintf(buf, sizeof(buf), "%d,%d,%.2f,%.2f,%.2f,%.2f,%.4f,%d,%.2f\n", r.frame,
                      r.id, r.det->box.x_left, r.det->box.y_top, r.det->box.width,
                      r.det->box.height, r.det->confidence, r.class_id, 1.0);
        out << buf;
    }
}

inline SequenceTracks parse_mot_string(const std::string& text, const SequenceMeta& meta,
                                       std::vector<std::string>* warnings = nullptr) {
    std::istringstream in(text);
    return parse_mot_file(in, meta, warnings);
}

inline std::string write_mot_string(const SequenceTracks& seq) {
    std::ostringstream out;
    write_mot_file(seq, out);
    return out.str();
}

} // namespace motkit
