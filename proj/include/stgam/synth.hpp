#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "stgam/grid.hpp"
#include "stgam/types.hpp"

namespace stgam {

// One demographic class's mobility regime. Fixes land on cell centers so the
// grid lookup is unambiguous; dwell proportions are Dirichlet-style draws.
struct SynthProfile {
    std::string name;
    DemographicRecord demographics;  // user_id filled in per generated user
    int cells_min = 1;
    int cells_max = 1;
    double dwell_concentration = 1.0;  // large values approach a uniform split
    double fixes_per_hour = 4.0;
    int days = 60;
    double weekend_cells_multiplier = 1.0;
};

struct SynthSpec {
    std::vector<SynthProfile> profiles;
    int users_per_profile = 100;
    std::int64_t start_epoch = 1230768000;  // 2009-01-01T00:00:00Z (a Thursday)
};

// Deterministic per (seed, user index); users are independent streams.
Dataset generate_dataset(const SynthSpec& spec, const GridSpec& grid, std::uint64_t seed);

// A bbox whose equirectangular extents give exactly n x m cells of the given
// size, anchored near Lausanne.
GridSpec make_synth_grid(int n, int m, double cell_size_m = 500.0);

// The standard benchmarks: synth-A is the separable 2-class gender set on a
// 2x2 grid; synth-3 adds a middle entropy regime over three age groups.
SynthSpec synth_a_spec(int users_per_profile = 100, int days = 60);
SynthSpec synth_3_spec(int users_per_profile = 100, int days = 60);

}  // namespace stgam
