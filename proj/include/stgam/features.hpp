#pragma once

#include <map>
#include <string>
#include <vector>

#include "stgam/entropy.hpp"
#include "stgam/types.hpp"

namespace stgam {

// Great-circle distance in kilometers, R = 6371 km.
double haversine_km(double lat1, double lon1, double lat2, double lon2);

// Maximum pairwise distance among fixes inside slice t; 0 with < 2 fixes.
double max_distance_in_slice(const Trace& trace, const TimeSliceSpec& spec, int t);

struct CovariateRow {
    std::string user_id;
    int slice_index;
    double entropy;          // percentage, always present
    double max_distance_km;  // >= 0
    int day_of_week;         // 0 = Monday .. 6 = Sunday, from slice start UTC
    int label;               // index into FeatureTable::class_levels
};

struct FeatureTable {
    Target target;
    std::vector<std::string> levels;  // class levels, fixed ingest order
    std::vector<CovariateRow> rows;   // sorted by (user_id, slice_index)
    std::vector<std::string> warnings;
};

// One row per (user, slice) with a present entropy and a label for `target`.
// Throws when no rows result; a class with zero rows only records a warning.
FeatureTable assemble_features(const Dataset& ds,
                               const std::map<std::string, EntropySequence>& sequences,
                               Target target);

}  // namespace stgam
