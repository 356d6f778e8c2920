#include "stgam/synth.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <random>

#include "stgam/errors.hpp"

namespace stgam {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ull;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4b08dull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
}

std::vector<int> sample_cells(std::mt19937_64& rng, int total, int k) {
    std::vector<int> all(total);
    for (int i = 0; i < total; ++i) all[i] = i;
    for (int i = 0; i < k; ++i) {
        std::uniform_int_distribution<int> pick(i, total - 1);
        std::swap(all[i], all[pick(rng)]);
    }
    all.resize(k);
    return all;
}

std::vector<double> dirichlet_split(std::mt19937_64& rng, int k, double concentration) {
    std::gamma_distribution<double> gamma(concentration, 1.0);
    std::vector<double> w(k);
    double total = 0.0;
    for (double& v : w) {
        v = std::max(gamma(rng), 1e-12);
        total += v;
    }
    for (double& v : w) v /= total;
    return w;
}

}  // namespace

GridSpec make_synth_grid(int n, int m, double cell_size_m) {
    constexpr double deg = std::numbers::pi / 180.0;
    const double min_lat = 46.5, min_lon = 6.5;
    // Slightly under n/m cell widths so ceil() lands exactly on n and m.
    const double ns_m = (m - 0.01) * cell_size_m;
    const double ew_m = (n - 0.01) * cell_size_m;
    double max_lat = min_lat + ns_m / (kEarthRadiusMeters * deg);
    double max_lon = min_lon;
    for (int it = 0; it < 3; ++it) {
        const double mid = 0.5 * (min_lat + max_lat);
        max_lon = min_lon + ew_m / (kEarthRadiusMeters * deg * std::cos(mid * deg));
    }
    return build_grid(min_lat, min_lon, max_lat, max_lon, cell_size_m);
}

Dataset generate_dataset(const SynthSpec& spec, const GridSpec& grid, std::uint64_t seed) {
    const int total_cells = grid.n * grid.m;
    for (const auto& p : spec.profiles) {
        if (p.cells_min < 1 || p.cells_min > p.cells_max)
            throw DataError("synth.generate_dataset: bad cells_per_day range in profile " + p.name);
        if (p.cells_max > total_cells)
            throw DataError("synth.generate_dataset: profile " + p.name +
                            " needs more cells per day than the grid has");
        if (p.days < 1 || !(p.fixes_per_hour > 0.0))
            throw DataError("synth.generate_dataset: bad days or fix rate in profile " + p.name);
    }

    Dataset ds;
    int user_index = 0;
    for (const auto& profile : spec.profiles) {
        for (int u = 0; u < spec.users_per_profile; ++u, ++user_index) {
            char buf[16];
            std::snprintf(buf, sizeof(buf), "u%05d", user_index);
            const std::string uid = buf;

            std::mt19937_64 rng(splitmix64(seed) ^ splitmix64(user_index + 1));
            Trace trace;
            trace.user_id = uid;

            const auto interval =
                std::max<std::int64_t>(1, std::llround(3600.0 / profile.fixes_per_hour));

            for (int day = 0; day < profile.days; ++day) {
                const std::int64_t day_start = spec.start_epoch + day * std::int64_t{86400};
                const int dow = day_of_week_utc(day_start);
                int k = std::uniform_int_distribution<int>(profile.cells_min,
                                                           profile.cells_max)(rng);
                if (dow >= 5)
                    k = std::clamp(static_cast<int>(std::lround(k * profile.weekend_cells_multiplier)),
                                   1, total_cells);

                auto cells = sample_cells(rng, total_cells, k);
                auto split = dirichlet_split(rng, k, profile.dwell_concentration);

                // Contiguous integer-second blocks proportional to the split.
                std::vector<std::int64_t> bounds{0};
                double acc = 0.0;
                for (int b = 0; b < k; ++b) {
                    acc += split[b];
                    bounds.push_back(b + 1 == k ? 86400
                                                : std::llround(acc * 86400.0));
                }

                auto cell_at = [&](std::int64_t offset) {
                    int b = 0;
                    while (b + 1 < k && offset >= bounds[b + 1]) ++b;
                    return cells[b];
                };
                auto emit = [&](std::int64_t offset) {
                    const int cell = cell_at(offset);
                    const int ci = cell % grid.n;
                    const int cj = cell / grid.n;
                    LocationRecord rec{uid, day_start + offset, grid.cell_center_lat(cj),
                                       grid.cell_center_lon(ci)};
                    if (!trace.records.empty() &&
                        trace.records.back().timestamp >= rec.timestamp)
                        return;
                    trace.records.push_back(std::move(rec));
                };

                // Fixes on the rate grid plus one at each block start, so the
                // forward dwell attribution recovers the split exactly.
                std::vector<std::int64_t> offsets;
                for (std::int64_t o = 0; o < 86400; o += interval) offsets.push_back(o);
                for (int b = 0; b < k; ++b) offsets.push_back(bounds[b]);
                if (day + 1 == profile.days) offsets.push_back(86399);
                std::sort(offsets.begin(), offsets.end());
                offsets.erase(std::unique(offsets.begin(), offsets.end()), offsets.end());
                for (std::int64_t o : offsets) emit(o);
            }

            DemographicRecord demo = profile.demographics;
            demo.user_id = uid;
            ds.traces.emplace(uid, std::move(trace));
            ds.demographics.emplace(uid, std::move(demo));
        }
    }
    return ds;
}

SynthSpec synth_a_spec(int users_per_profile, int days) {
    SynthSpec spec;
    spec.users_per_profile = users_per_profile;

    SynthProfile low;
    low.name = "low";
    low.demographics.gender = Gender::Female;
    low.cells_min = 1;
    low.cells_max = 2;
    low.dwell_concentration = 0.3;  // concentrated dwell
    low.days = days;

    SynthProfile high;
    high.name = "high";
    high.demographics.gender = Gender::Male;
    high.cells_min = 3;
    high.cells_max = 4;
    high.dwell_concentration = 50.0;  // near-uniform dwell
    high.days = days;

    spec.profiles = {low, high};
    return spec;
}

SynthSpec synth_3_spec(int users_per_profile, int days) {
    SynthSpec spec;
    spec.users_per_profile = users_per_profile;

    SynthProfile high;
    high.name = "high";
    high.demographics.age_group = AgeGroup::Under22;
    high.cells_min = 4;
    high.cells_max = 4;
    high.dwell_concentration = 50.0;
    high.days = days;

    SynthProfile mid;
    mid.name = "mid";
    mid.demographics.age_group = AgeGroup::From22To32;
    mid.cells_min = 2;
    mid.cells_max = 2;
    mid.dwell_concentration = 50.0;
    mid.days = days;

    SynthProfile low;
    low.name = "low";
    low.demographics.age_group = AgeGroup::From33Up;
    low.cells_min = 1;
    low.cells_max = 1;
    low.dwell_concentration = 1.0;
    low.days = days;

    spec.profiles = {high, mid, low};
    return spec;
}

}  // namespace stgam
