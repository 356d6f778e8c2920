#include "stgam/features.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "stgam/errors.hpp"

namespace stgam {

double haversine_km(double lat1, double lon1, double lat2, double lon2) {
    constexpr double deg = std::numbers::pi / 180.0;
    constexpr double radius_km = 6371.0;
    const double dlat = (lat2 - lat1) * deg;
    const double dlon = (lon2 - lon1) * deg;
    const double a = std::sin(dlat / 2) * std::sin(dlat / 2) +
                     std::cos(lat1 * deg) * std::cos(lat2 * deg) * std::sin(dlon / 2) *
                         std::sin(dlon / 2);
    return 2.0 * radius_km * std::asin(std::min(1.0, std::sqrt(a)));
}

double max_distance_in_slice(const Trace& trace, const TimeSliceSpec& spec, int t) {
    const std::int64_t begin = spec.slice_start(t);
    const std::int64_t end = begin + spec.duration;
    auto lo = std::lower_bound(trace.records.begin(), trace.records.end(), begin,
                               [](const LocationRecord& r, std::int64_t v) {
                                   return r.timestamp < v;
                               });
    auto hi = std::lower_bound(lo, trace.records.end(), end,
                               [](const LocationRecord& r, std::int64_t v) {
                                   return r.timestamp < v;
                               });
    double best = 0.0;
    for (auto a = lo; a != hi; ++a)
        for (auto b = std::next(a); b != hi; ++b)
            best = std::max(best,
                            haversine_km(a->latitude, a->longitude, b->latitude, b->longitude));
    return best;
}

FeatureTable assemble_features(const Dataset& ds,
                               const std::map<std::string, EntropySequence>& sequences,
                               Target target) {
    FeatureTable table;
    table.target = target;
    table.levels = class_levels(target);

    for (const auto& [uid, seq] : sequences) {
        auto demo = ds.demographics.find(uid);
        if (demo == ds.demographics.end()) continue;
        auto label = label_index(demo->second, target);
        if (!label) continue;
        auto trace_it = ds.traces.find(uid);
        if (trace_it == ds.traces.end()) continue;

        for (int t = 0; t < seq.spec.T; ++t) {
            if (!seq.values[t]) continue;
            CovariateRow row;
            row.user_id = uid;
            row.slice_index = t;
            row.entropy = *seq.values[t];
            row.max_distance_km = max_distance_in_slice(trace_it->second, seq.spec, t);
            row.day_of_week = day_of_week_utc(seq.spec.slice_start(t));
            row.label = *label;
            table.rows.push_back(std::move(row));
        }
    }

    std::sort(table.rows.begin(), table.rows.end(),
              [](const CovariateRow& a, const CovariateRow& b) {
                  return std::tie(a.user_id, a.slice_index) < std::tie(b.user_id, b.slice_index);
              });

    if (table.rows.empty())
        throw DataError("features.assemble_features: no rows for target " + target_name(target));

    std::vector<std::size_t> per_class(table.levels.size(), 0);
    for (const auto& r : table.rows) ++per_class[r.label];
    for (std::size_t k = 0; k < per_class.size(); ++k)
        if (per_class[k] == 0)
            table.warnings.push_back("class " + table.levels[k] + " has no rows");

    return table;
}

}  // namespace stgam
