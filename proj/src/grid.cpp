#include "stgam/grid.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "stgam/errors.hpp"

namespace stgam {

GridSpec build_grid(double min_lat, double min_lon, double max_lat, double max_lon,
                    double cell_size_m) {
    if (!(cell_size_m > 0.0))
        throw DataError("grid.build_grid: cell_size must be > 0");
    if (!(min_lat < max_lat) || !(min_lon < max_lon))
        throw DataError("grid.build_grid: degenerate bounding box");
    if (min_lat < -90.0 || max_lat > 90.0 || min_lon < -180.0 || max_lon > 180.0)
        throw DataError("grid.build_grid: bounding box outside WGS-84 bounds");

    constexpr double deg = std::numbers::pi / 180.0;
    const double mid_lat = 0.5 * (min_lat + max_lat);
    const double ew_m = (max_lon - min_lon) * deg * kEarthRadiusMeters * std::cos(mid_lat * deg);
    const double ns_m = (max_lat - min_lat) * deg * kEarthRadiusMeters;

    GridSpec g{min_lat, min_lon, max_lat, max_lon, cell_size_m, 0, 0};
    // Tolerate degree->meter roundoff so exact multiples stay exact.
    g.n = static_cast<int>(std::ceil(ew_m / cell_size_m - 1e-9));
    g.m = static_cast<int>(std::ceil(ns_m / cell_size_m - 1e-9));
    if (g.n < 1 || g.m < 1)
        throw DataError("grid.build_grid: bounding box collapses to zero cells");
    if (g.n * g.m < 2)
        throw DataError("grid.build_grid: grid has a single cell; choose a smaller cell_size");
    return g;
}

std::optional<CellIndex> try_locate(const GridSpec& grid, double lat, double lon) {
    if (lat < grid.min_lat || lat > grid.max_lat || lon < grid.min_lon || lon > grid.max_lon)
        return std::nullopt;
    int i = static_cast<int>(std::floor((lon - grid.min_lon) / grid.lon_step()));
    int j = static_cast<int>(std::floor((lat - grid.min_lat) / grid.lat_step()));
    i = std::clamp(i, 0, grid.n - 1);
    j = std::clamp(j, 0, grid.m - 1);
    return CellIndex{i, j};
}

CellIndex locate(const GridSpec& grid, double lat, double lon) {
    auto c = try_locate(grid, lat, lon);
    if (!c) throw DataError("grid.locate: point outside grid bounding box");
    return *c;
}

}  // namespace stgam
