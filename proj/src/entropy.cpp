#include "stgam/entropy.hpp"

#include <algorithm>
#include <cmath>

#include "stgam/errors.hpp"

namespace stgam {

TimeSliceSpec build_slice_spec(const Trace& trace, std::int64_t duration, Alignment alignment) {
    if (trace.records.empty())
        throw DataError("entropy.build_slice_spec: empty trace for user " + trace.user_id);
    if (duration <= 0)
        throw DataError("entropy.build_slice_spec: slice duration must be > 0");

    const std::int64_t first = trace.records.front().timestamp;
    const std::int64_t last = trace.records.back().timestamp;
    std::int64_t origin = first;
    if (alignment == Alignment::MidnightUtc) origin = (first / 86400) * 86400;

    TimeSliceSpec spec{origin, duration, 0};
    spec.T = static_cast<int>((last - origin) / duration + 1);
    return spec;
}

OccupancyMap compute_occupancy(const Trace& trace, const GridSpec& grid, const TimeSliceSpec& spec,
                               std::int64_t max_gap, ProportionMode mode) {
    if (max_gap <= 0) throw DataError("entropy.compute_occupancy: max_gap must be > 0");

    OccupancyMap occ;
    occ.slices.resize(spec.T);
    const std::int64_t span_end = spec.origin + static_cast<std::int64_t>(spec.T) * spec.duration;

    if (mode == ProportionMode::Count) {
        for (const auto& r : trace.records) {
            auto cell = try_locate(grid, r.latitude, r.longitude);
            if (!cell) {
                ++occ.dropped_fixes;
                continue;
            }
            if (r.timestamp < spec.origin || r.timestamp >= span_end) continue;
            auto t = static_cast<int>((r.timestamp - spec.origin) / spec.duration);
            occ.slices[t].dwell[*cell] += 1;
            occ.slices[t].covered += 1;
        }
        return occ;
    }

    for (std::size_t k = 0; k + 1 < trace.records.size(); ++k) {
        const auto& cur = trace.records[k];
        const auto& next = trace.records[k + 1];
        auto cell = try_locate(grid, cur.latitude, cur.longitude);
        if (!cell) {
            ++occ.dropped_fixes;
            continue;
        }
        std::int64_t begin = std::max(cur.timestamp, spec.origin);
        std::int64_t end = std::min({next.timestamp, cur.timestamp + max_gap, span_end});
        while (begin < end) {
            auto t = static_cast<int>((begin - spec.origin) / spec.duration);
            std::int64_t slice_end = spec.origin + (static_cast<std::int64_t>(t) + 1) * spec.duration;
            std::int64_t chunk = std::min(end, slice_end) - begin;
            occ.slices[t].dwell[*cell] += chunk;
            occ.slices[t].covered += chunk;
            begin += chunk;
        }
    }
    // The final fix contributes no dwell but can still be out of bounds.
    if (!trace.records.empty()) {
        const auto& lastr = trace.records.back();
        if (!try_locate(grid, lastr.latitude, lastr.longitude)) ++occ.dropped_fixes;
    }
    return occ;
}

std::optional<double> slice_entropy(const SliceOccupancy& occ, const GridSpec& grid) {
    if (occ.covered <= 0) return std::nullopt;
    const double denom = std::log(static_cast<double>(grid.n) * grid.m);
    double sum = 0.0;
    for (const auto& [cell, seconds] : occ.dwell) {
        if (seconds <= 0) continue;
        const double p = static_cast<double>(seconds) / static_cast<double>(occ.covered);
        sum += p * std::log(p);
    }
    double e = -sum / denom * 100.0;
    return std::clamp(e, 0.0, 100.0);
}

EntropySequence entropy_sequence(const Trace& trace, const GridSpec& grid,
                                 const TimeSliceSpec& spec, std::int64_t max_gap,
                                 ProportionMode mode) {
    auto occ = compute_occupancy(trace, grid, spec, max_gap, mode);
    EntropySequence seq;
    seq.user_id = trace.user_id;
    seq.spec = spec;
    seq.values.reserve(spec.T);
    for (int t = 0; t < spec.T; ++t) seq.values.push_back(slice_entropy(occ.slices[t], grid));
    return seq;
}

std::map<std::string, EntropySequence> entropy_sequences_serial(const Dataset& ds,
                                                                const GridSpec& grid,
                                                                const EntropyConfig& cfg) {
    std::map<std::string, EntropySequence> out;
    for (const auto& [uid, trace] : ds.traces) {
        if (trace.records.empty()) continue;
        auto spec = build_slice_spec(trace, cfg.slice_seconds, cfg.alignment);
        out.emplace(uid, entropy_sequence(trace, grid, spec, cfg.max_gap_seconds, cfg.mode));
    }
    return out;
}

std::map<std::string, EntropySequence> entropy_sequences(const Dataset& ds, const GridSpec& grid,
                                                         const EntropyConfig& cfg) {
    std::vector<const Trace*> traces;
    traces.reserve(ds.traces.size());
    for (const auto& [uid, trace] : ds.traces)
        if (!trace.records.empty()) traces.push_back(&trace);

    std::vector<EntropySequence> results(traces.size());
#pragma omp parallel for schedule(dynamic)
    for (std::int64_t idx = 0; idx < static_cast<std::int64_t>(traces.size()); ++idx) {
        const Trace& trace = *traces[idx];
        auto spec = build_slice_spec(trace, cfg.slice_seconds, cfg.alignment);
        results[idx] = entropy_sequence(trace, grid, spec, cfg.max_gap_seconds, cfg.mode);
    }

    std::map<std::string, EntropySequence> out;
    for (auto& seq : results) out.emplace(seq.user_id, std::move(seq));
    return out;
}

}  // namespace stgam
