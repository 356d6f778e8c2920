#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "stgam/grid.hpp"
#include "stgam/types.hpp"

namespace stgam {

enum class Alignment { MidnightUtc, FirstFix };
enum class ProportionMode { Dwell, Count };

struct TimeSliceSpec {
    std::int64_t origin;    // slice 0 starts here (epoch seconds)
    std::int64_t duration;  // seconds per slice
    int T;                  // number of slices

    std::int64_t slice_start(int t) const { return origin + t * duration; }
};

struct SliceOccupancy {
    std::map<CellIndex, std::int64_t> dwell;  // seconds (or fix counts in Count mode)
    std::int64_t covered = 0;                 // sum of dwell values
};

struct OccupancyMap {
    std::vector<SliceOccupancy> slices;
    std::int64_t dropped_fixes = 0;  // fixes outside the grid bbox
};

struct EntropySequence {
    std::string user_id;
    TimeSliceSpec spec;
    std::vector<std::optional<double>> values;  // percentages in [0, 100]
};

struct EntropyConfig {
    std::int64_t slice_seconds = 86400;
    std::int64_t max_gap_seconds = 3600;
    ProportionMode mode = ProportionMode::Dwell;
    Alignment alignment = Alignment::MidnightUtc;
};

TimeSliceSpec build_slice_spec(const Trace& trace, std::int64_t duration, Alignment alignment);

// Forward dwell attribution: each fix owns the interval up to the next fix,
// capped at max_gap, split across slice boundaries. Integer-second arithmetic
// throughout; Count mode attributes one unit per fix instead.
OccupancyMap compute_occupancy(const Trace& trace, const GridSpec& grid, const TimeSliceSpec& spec,
                               std::int64_t max_gap,
                               ProportionMode mode = ProportionMode::Dwell);

// Normalized Shannon entropy of the dwell proportions as a percentage;
// nullopt when the slice has no attributed time.
std::optional<double> slice_entropy(const SliceOccupancy& occ, const GridSpec& grid);

EntropySequence entropy_sequence(const Trace& trace, const GridSpec& grid,
                                 const TimeSliceSpec& spec, std::int64_t max_gap,
                                 ProportionMode mode = ProportionMode::Dwell);

// Per-user slice specs are built from each user's own trace. The parallel
// version runs users across OpenMP threads; the serial one is the reference
// implementation the parallel path is tested against.
std::map<std::string, EntropySequence> entropy_sequences(const Dataset& ds, const GridSpec& grid,
                                                         const EntropyConfig& cfg);
std::map<std::string, EntropySequence> entropy_sequences_serial(const Dataset& ds,
                                                                const GridSpec& grid,
                                                                const EntropyConfig& cfg);

}  // namespace stgam
