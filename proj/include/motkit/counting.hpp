#pragma once

#include <cmath>
#include <map>
#include <set>
#include <string>
#include <utility>

#include "motkit/errors.hpp"
#include "motkit/track.hpp"

namespace motkit {

// Unique-identity counts keyed by (sequence_id, class_id). Class id 0 is used
// for class-aggregated counts.
using CountKey = std::pair<std::string, int>;
using CountVector = std::map<CountKey, long long>;

inline CountVector count_tracks(const SequenceTracks& seq) {
    CountVector counts;
    for (const Track& t : seq.tracks()) {
        counts[{seq.sequence_id(), t.class_id()}]++;
    }
    return counts;
}

// Collapse per-class counts into one per-sequence count (class id 0).
inline CountVector aggregate_classes(const CountVector& counts) {
    CountVector out;
    for (const auto& [key, n] : counts) out[{key.first, 0}] += n;
    return out;
}

struct CountingErrors {
    double mae = 0.0;
    long long sad = 0;
    double rmse = 0.0;
    double mape = 0.0;          // percent, averaged over pairs with gt > 0
    int pairs = 0;              // pairs with gt > 0 or pred > 0
    int mape_pairs = 0;         // pairs entering the MAPE average
    int mape_excluded = 0;      // gt == 0 pairs excluded from MAPE
};

// MAE/SAD/RMSE over all (sequence, class) pairs where either count is
// positive; MAPE only over pairs with gt > 0, the rest tallied as excluded.
inline CountingErrors counting_errors(const CountVector& gt, const CountVector& pred) {
    std::set<CountKey> keys;
    for (const auto& [k, n] : gt)
        if (n != 0) keys.insert(k);
    for (const auto& [k, n] : pred)
        if (n != 0) keys.insert(k);
    if (keys.empty()) {
        throw UndefinedMetricError("counting_errors: no (sequence, class) pairs in scope");
    }

    CountingErrors e;
    double sq_sum = 0.0;
    double mape_sum = 0.0;
    for (const CountKey& k : keys) {
        const auto git = gt.find(k);
        const auto pit = pred.find(k);
        const long long g = git == gt.end() ? 0 : git->second;
        const long long p = pit == pred.end() ? 0 : pit->second;
        const long long diff = std::llabs(p - g);
        e.sad += diff;
        sq_sum += static_cast<double>(diff) * static_cast<double>(diff);
        e.pairs++;
        if (g > 0) {
            mape_sum += 100.0 * static_cast<double>(diff) / static_cast<double>(g);
            e.mape_pairs++;
        } else {
            e.mape_excluded++;
        }
    }
    e.mae = static_cast<double>(e.sad) / e.pairs;
    e.rmse = std::sqrt(sq_sum / e.pairs);
    e.mape = e.mape_pairs > 0 ? mape_sum / e.mape_pairs : 0.0;
    return e;
}

// 100 * (before - after) / before, in percent.
inline double relative_reduction(double before, double after) {
    if (before <= 0.0) {
        throw ValidationError("relative_reduction: 'before' must be positive");
    }
    return 100.0 * (before - after) / before;
}

} // namespace motkit
