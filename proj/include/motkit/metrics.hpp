#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <set>
#include <utility>
#include <vector>

#include "motkit/assignment.hpp"
#include "motkit/errors.hpp"
#include "motkit/geometry.hpp"
#include "motkit/rng.hpp"
#include "motkit/track.hpp"

namespace motkit {

struct ClearMotResult {
    double mota = 0.0; // 1 - (fn + fp + idsw) / gt_total
    long long fp = 0;
    long long fn = 0;
    long long idsw = 0;
    long long gt_total = 0;
};

struct IdentityResult {
    double idf1 = 0.0;
    long long idtp = 0;
    long long idfp = 0;
    long long idfn = 0;
};

struct HotaAlpha {
    double alpha = 0.0;
    long long tp = 0;
    long long fn = 0;
    long long fp = 0;
    double ass_quality_sum = 0.0; // sum over TP pairs of TPA/(TPA+FNA+FPA)
    double deta = 0.0;
    double assa = 0.0;
    double hota = 0.0;
};

struct HotaResult {
    double hota = 0.0; // means over the alpha grid
    double deta = 0.0;
    double assa = 0.0;
    std::vector<HotaAlpha> per_alpha;
};

namespace detail {

// IoU tie-break weight in the HOTA per-frame score; association quality
// dominates, localization only breaks ties.
constexpr double kHotaIouEps = 1e-6;

struct FrameDet {
    std::size_t track_idx;
    const Detection* det;
    int class_id;
};

inline std::map<int, std::vector<FrameDet>> by_frame(const SequenceTracks& seq) {
    std::map<int, std::vector<FrameDet>> out;
    for (std::size_t i = 0; i < seq.tracks().size(); ++i) {
        const Track& t = seq.tracks()[i];
        for (const Detection& d : t.detections()) {
            out[d.frame].push_back({i, &d, t.class_id()});
        }
    }
    return out;
}

inline void check_compatible(const SequenceTracks& gt, const SequenceTracks& pred) {
    if (gt.image_width() != pred.image_width() || gt.image_height() != pred.image_height()) {
        throw ValidationError("metrics: sequences have differing image dimensions");
    }
}

} // namespace detail

// Frame-by-frame CLEAR-MOT matching: previous pairs still overlapping at or
// above the threshold carry over, the rest are matched optimally on IoU.
// Matching is restricted to same-class pairs.
inline ClearMotResult clear_mot(const SequenceTracks& gt, const SequenceTracks& pred,
                                double iou_threshold = 0.5) {
    if (iou_threshold <= 0.0 || iou_threshold >= 1.0) {
        throw ValidationError("clear_mot: iou_threshold must lie in (0,1)");
    }
    detail::check_compatible(gt, pred);

    const auto gt_frames = detail::by_frame(gt);
    const auto pred_frames = detail::by_frame(pred);
    std::set<int> frames;
    for (const auto& [f, _] : gt_frames) frames.insert(f);
    for (const auto& [f, _] : pred_frames) frames.insert(f);

    ClearMotResult res;
    std::map<std::size_t, std::size_t> carry;        // gt idx -> pred idx, last frame
    std::map<std::size_t, int> last_matched_pred_id; // gt idx -> pred track id, persistent

    for (int f : frames) {
        const auto git = gt_frames.find(f);
        const auto pit = pred_frames.find(f);
        const auto& gts = git != gt_frames.end() ? git->second : std::vector<detail::FrameDet>{};
        const auto& prs = pit != pred_frames.end() ? pit->second : std::vector<detail::FrameDet>{};
        res.gt_total += static_cast<long long>(gts.size());

        std::map<std::size_t, std::size_t> matches; // gt idx -> pred idx
        std::vector<char> gt_used(gts.size(), false), pred_used(prs.size(), false);

        auto find_local = [](const std::vector<detail::FrameDet>& dets, std::size_t track_idx) {
            for (std::size_t i = 0; i < dets.size(); ++i) {
                if (dets[i].track_idx == track_idx) return static_cast<long>(i);
            }
            return -1L;
        };

        // 1) carry over still-valid pairs from the previous frame
        for (const auto& [g, p] : carry) {
            const long gl = find_local(gts, g);
            const long pl = find_local(prs, p);
            if (gl < 0 || pl < 0) continue;
            if (gts[gl].class_id != prs[pl].class_id) continue;
            if (iou(gts[gl].det->box, prs[pl].det->box) < iou_threshold) continue;
            matches[g] = p;
            gt_used[gl] = true;
            pred_used[pl] = true;
        }

        // 2) optimal IoU matching for the remainder
        std::vector<std::size_t> free_gt, free_pred;
        for (std::size_t i = 0; i < gts.size(); ++i)
            if (!gt_used[i]) free_gt.push_back(i);
        for (std::size_t j = 0; j < prs.size(); ++j)
            if (!pred_used[j]) free_pred.push_back(j);
        if (!free_gt.empty() && !free_pred.empty()) {
            // eligible pairs get a constant bonus larger than any achievable
            // IoU sum, so the optimum maximizes match count first, IoU second
            const double bonus =
                static_cast<double>(free_gt.size() + free_pred.size()) + 1.0;
            CostMatrix sim(free_gt.size(), free_pred.size(), 0.0);
            for (std::size_t a = 0; a < free_gt.size(); ++a) {
                for (std::size_t b = 0; b < free_pred.size(); ++b) {
                    const auto& gd = gts[free_gt[a]];
                    const auto& pd = prs[free_pred[b]];
                    if (gd.class_id != pd.class_id) continue;
                    const double v = iou(gd.det->box, pd.det->box);
                    if (v >= iou_threshold) sim.at(a, b) = bonus + v;
                }
            }
            for (const auto& [a, b] : solve_assignment(sim, AssignMode::Maximize)) {
                if (sim.at(a, b) <= 0.0) continue;
                matches[gts[free_gt[a]].track_idx] = prs[free_pred[b]].track_idx;
            }
        }

        res.fn += static_cast<long long>(gts.size() - matches.size());
        res.fp += static_cast<long long>(prs.size() - matches.size());
        for (const auto& [g, p] : matches) {
            const int pred_id = pred.tracks()[p].track_id();
            const auto it = last_matched_pred_id.find(g);
            if (it != last_matched_pred_id.end() && it->second != pred_id) res.idsw++;
            last_matched_pred_id[g] = pred_id;
        }
        carry = matches;
    }

    if (res.gt_total == 0) {
        throw UndefinedMetricError("clear_mot: no ground-truth detections");
    }
    res.mota = 1.0 - static_cast<double>(res.fn + res.fp + res.idsw) /
                         static_cast<double>(res.gt_total);
    return res;
}

// Identity metrics via one optimal trajectory-level matching: the weight of a
// (gt id, pred id) pair is the number of frames where their boxes overlap at
// or above the threshold (same class only).
inline IdentityResult idf1(const SequenceTracks& gt, const SequenceTracks& pred,
                           double iou_threshold = 0.5) {
    if (iou_threshold <= 0.0 || iou_threshold >= 1.0) {
        throw ValidationError("idf1: iou_threshold must lie in (0,1)");
    }
    detail::check_compatible(gt, pred);
    if (gt.total_detections() == 0) {
        throw UndefinedMetricError("idf1: no ground-truth detections");
    }

    const std::size_t ng = gt.tracks().size();
    const std::size_t np = pred.tracks().size();
    IdentityResult res;
    long long idtp = 0;
    if (ng > 0 && np > 0) {
        CostMatrix weights(ng, np, 0.0);
        for (std::size_t g = 0; g < ng; ++g) {
            const Track& tg = gt.tracks()[g];
            for (std::size_t p = 0; p < np; ++p) {
                const Track& tp = pred.tracks()[p];
                if (tg.class_id() != tp.class_id()) continue;
                std::map<int, const Detection*> pd;
                for (const Detection& d : tp.detections()) pd[d.frame] = &d;
                long long w = 0;
                for (const Detection& d : tg.detections()) {
                    const auto it = pd.find(d.frame);
                    if (it != pd.end() && iou(d.box, it->second->box) >= iou_threshold) w++;
                }
                weights.at(g, p) = static_cast<double>(w);
            }
        }
        for (const auto& [g, p] : solve_assignment(weights, AssignMode::Maximize)) {
            idtp += static_cast<long long>(weights.at(g, p));
        }
    }
    res.idtp = idtp;
    res.idfn = static_cast<long long>(gt.total_detections()) - idtp;
    res.idfp = static_cast<long long>(pred.total_detections()) - idtp;
    const long long denom = 2 * res.idtp + res.idfp + res.idfn;
    res.idf1 = denom > 0 ? 2.0 * static_cast<double>(res.idtp) / static_cast<double>(denom) : 0.0;
    return res;
}

inline std::vector<double> hota_alpha_grid() {
    std::vector<double> alphas;
    for (int i = 1; i <= 19; ++i) alphas.push_back(0.05 * i);
    return alphas;
}

// HOTA over the 0.05..0.95 alpha grid. Per alpha, frames are matched
// optimally with a score that puts global association quality (Jaccard of
// co-present overlapping frames) first and IoU second; pairs must overlap at
// or above alpha. DetA, AssA and HOTA follow from the matched pairs.
inline HotaResult hota(const SequenceTracks& gt, const SequenceTracks& pred) {
    detail::check_compatible(gt, pred);
    const long long total_gt = static_cast<long long>(gt.total_detections());
    const long long total_pred = static_cast<long long>(pred.total_detections());
    if (total_gt == 0 && total_pred == 0) {
        throw UndefinedMetricError("hota: no detections in either sequence");
    }

    const std::size_t ng = gt.tracks().size();
    const std::size_t np = pred.tracks().size();

    // per-frame co-present same-class IoUs
    const auto gt_frames = detail::by_frame(gt);
    const auto pred_frames = detail::by_frame(pred);
    std::set<int> frames;
    for (const auto& [f, _] : gt_frames) frames.insert(f);

    struct FramePairs {
        std::vector<detail::FrameDet> gts, prs;
        std::vector<std::vector<double>> iou; // -1 for class mismatch
    };
    std::vector<FramePairs> frame_data;
    for (int f : frames) {
        const auto pit = pred_frames.find(f);
        FramePairs fp;
        fp.gts = gt_frames.at(f);
        if (pit != pred_frames.end()) fp.prs = pit->second;
        fp.iou.assign(fp.gts.size(), std::vector<double>(fp.prs.size(), -1.0));
        for (std::size_t a = 0; a < fp.gts.size(); ++a) {
            for (std::size_t b = 0; b < fp.prs.size(); ++b) {
                if (fp.gts[a].class_id != fp.prs[b].class_id) continue;
                fp.iou[a][b] = iou(fp.gts[a].det->box, fp.prs[b].det->box);
            }
        }
        frame_data.push_back(std::move(fp));
    }

    std::vector<long long> gt_len(ng), pred_len(np);
    for (std::size_t g = 0; g < ng; ++g)
        gt_len[g] = static_cast<long long>(gt.tracks()[g].detections().size());
    for (std::size_t p = 0; p < np; ++p)
        pred_len[p] = static_cast<long long>(pred.tracks()[p].detections().size());

    HotaResult res;
    for (double alpha : hota_alpha_grid()) {
        // potential association quality per (gt id, pred id)
        std::map<std::pair<std::size_t, std::size_t>, long long> pot;
        for (const auto& fp : frame_data) {
            for (std::size_t a = 0; a < fp.gts.size(); ++a) {
                for (std::size_t b = 0; b < fp.prs.size(); ++b) {
                    if (fp.iou[a][b] >= alpha) {
                        pot[{fp.gts[a].track_idx, fp.prs[b].track_idx}]++;
                    }
                }
            }
        }
        auto assoc_quality = [&](std::size_t g, std::size_t p) {
            const auto it = pot.find({g, p});
            if (it == pot.end()) return 0.0;
            const long long a = it->second;
            return static_cast<double>(a) / static_cast<double>(gt_len[g] + pred_len[p] - a);
        };

        // per-frame optimal matching
        std::map<std::pair<std::size_t, std::size_t>, long long> matched;
        long long tp = 0;
        for (const auto& fp : frame_data) {
            if (fp.gts.empty() || fp.prs.empty()) continue;
            // constant bonus on eligible pairs: match count dominates, then
            // association quality, then IoU as the final tie-break
            const double bonus = static_cast<double>(fp.gts.size() + fp.prs.size()) + 2.0;
            CostMatrix score(fp.gts.size(), fp.prs.size(), 0.0);
            for (std::size_t a = 0; a < fp.gts.size(); ++a) {
                for (std::size_t b = 0; b < fp.prs.size(); ++b) {
                    if (fp.iou[a][b] >= alpha) {
                        score.at(a, b) =
                            bonus + assoc_quality(fp.gts[a].track_idx, fp.prs[b].track_idx) +
                            detail::kHotaIouEps * fp.iou[a][b];
                    }
                }
            }
            for (const auto& [a, b] : solve_assignment(score, AssignMode::Maximize)) {
                if (fp.iou[a][b] < alpha) continue;
                matched[{fp.gts[a].track_idx, fp.prs[b].track_idx}]++;
                tp++;
            }
        }

        HotaAlpha ha;
        ha.alpha = alpha;
        ha.tp = tp;
        ha.fn = total_gt - tp;
        ha.fp = total_pred - tp;
        for (const auto& [pair, tpa] : matched) {
            const auto [g, p] = pair;
            const long long denom = gt_len[g] + pred_len[p] - tpa;
            ha.ass_quality_sum +=
                static_cast<double>(tpa) * static_cast<double>(tpa) / static_cast<double>(denom);
        }
        const long long det_denom = ha.tp + ha.fn + ha.fp;
        ha.deta = det_denom > 0 ? static_cast<double>(ha.tp) / static_cast<double>(det_denom) : 0.0;
        ha.assa = tp > 0 ? ha.ass_quality_sum / static_cast<double>(tp) : 0.0;
        ha.hota = std::sqrt(ha.deta * ha.assa);
        res.per_alpha.push_back(ha);
    }

    for (const HotaAlpha& ha : res.per_alpha) {
        res.hota += ha.hota;
        res.deta += ha.deta;
        res.assa += ha.assa;
    }
    const double n = static_cast<double>(res.per_alpha.size());
    res.hota /= n;
    res.deta /= n;
    res.assa /= n;
    return res;
}

// ---- cross-sequence pooling (sum counts, then recompute ratios) ----

inline ClearMotResult pool_clear_mot(const std::vector<ClearMotResult>& parts) {
    ClearMotResult out;
    for (const auto& p : parts) {
        out.fp += p.fp;
        out.fn += p.fn;
        out.idsw += p.idsw;
        out.gt_total += p.gt_total;
    }
    if (out.gt_total == 0) {
        throw UndefinedMetricError("pool_clear_mot: no ground-truth detections");
    }
    out.mota = 1.0 - static_cast<double>(out.fn + out.fp + out.idsw) /
                         static_cast<double>(out.gt_total);
    return out;
}

inline IdentityResult pool_identity(const std::vector<IdentityResult>& parts) {
    IdentityResult out;
    for (const auto& p : parts) {
        out.idtp += p.idtp;
        out.idfp += p.idfp;
        out.idfn += p.idfn;
    }
    const long long denom = 2 * out.idtp + out.idfp + out.idfn;
    if (denom == 0) throw UndefinedMetricError("pool_identity: no detections");
    out.idf1 = 2.0 * static_cast<double>(out.idtp) / static_cast<double>(denom);
    return out;
}

inline HotaResult pool_hota(const std::vector<HotaResult>& parts) {
    if (parts.empty()) throw UndefinedMetricError("pool_hota: no sequences");
    HotaResult out;
    out.per_alpha.resize(parts.front().per_alpha.size());
    for (std::size_t i = 0; i < out.per_alpha.size(); ++i) {
        out.per_alpha[i].alpha = parts.front().per_alpha[i].alpha;
    }
    for (const auto& p : parts) {
        if (p.per_alpha.size() != out.per_alpha.size()) {
            throw ValidationError("pool_hota: mismatched alpha grids");
        }
        for (std::size_t i = 0; i < out.per_alpha.size(); ++i) {
            out.per_alpha[i].tp += p.per_alpha[i].tp;
            out.per_alpha[i].fn += p.per_alpha[i].fn;
            out.per_alpha[i].fp += p.per_alpha[i].fp;
            out.per_alpha[i].ass_quality_sum += p.per_alpha[i].ass_quality_sum;
        }
    }
    for (HotaAlpha& ha : out.per_alpha) {
        const long long det_denom = ha.tp + ha.fn + ha.fp;
        ha.deta = det_denom > 0 ? static_cast<double>(ha.tp) / static_cast<double>(det_denom) : 0.0;
        ha.assa = ha.tp > 0 ? ha.ass_quality_sum / static_cast<double>(ha.tp) : 0.0;
        ha.hota = std::sqrt(ha.deta * ha.assa);
        out.hota += ha.hota;
        out.deta += ha.deta;
        out.assa += ha.assa;
    }
    const double n = static_cast<double>(out.per_alpha.size());
    out.hota /= n;
    out.deta /= n;
    out.assa /= n;
    return out;
}

// Mean and population standard deviation of resample means, drawn with a
// deterministic seeded generator.
inline std::pair<double, double> bootstrap_summary(const std::vector<double>& values,
                                                   int n_resamples = 10,
                                                   std::uint64_t seed = 42) {
    if (values.empty()) {
        throw UndefinedMetricError("bootstrap_summary: empty value list");
    }
    if (n_resamples < 1) {
        throw ValidationError("bootstrap_summary: n_resamples must be >= 1");
    }
    Rng rng(seed);
    const std::size_t n = values.size();
    std::vector<double> means;
    means.reserve(n_resamples);
    for (int r = 0; r < n_resamples; ++r) {
        double sum = 0.0;
        for (std::size_t i = 0; i < n; ++i) sum += values[rng.bounded(n)];
        means.push_back(sum / static_cast<double>(n));
    }
    double mean = 0.0;
    for (double m : means) mean += m;
    mean /= static_cast<double>(means.size());
    double var = 0.0;
    for (double m : means) var += (m - mean) * (m - mean);
    var /= static_cast<double>(means.size());
    return {mean, std::sqrt(var)};
}

} // namespace motkit
