#pragma once

#include <optional>

namespace stgam {

inline constexpr double kEarthRadiusMeters = 6371000.0;

struct GridSpec {
    double min_lat, min_lon, max_lat, max_lon;  // degrees
    double cell_size_m;
    int n;  // cells along longitude (x-axis)
    int m;  // cells along latitude (y-axis)

    double lon_step() const { return (max_lon - min_lon) / n; }
    double lat_step() const { return (max_lat - min_lat) / m; }
    double cell_center_lat(int j) const { return min_lat + (j + 0.5) * lat_step(); }
    double cell_center_lon(int i) const { return min_lon + (i + 0.5) * lon_step(); }
};

struct CellIndex {
    int i;  // [0, n)
    int j;  // [0, m)
    friend auto operator<=>(const CellIndex&, const CellIndex&) = default;
};

// Cell counts from the equirectangular metric: n = ceil(east-west meters /
// cell_size), m = ceil(north-south meters / cell_size). Throws on a degenerate
// bbox or when the result is a single cell (entropy normalization needs
// n*m >= 2).
GridSpec build_grid(double min_lat, double min_lon, double max_lat, double max_lon,
                    double cell_size_m);

// Floor-convention cell lookup; the closed max edges map to the last cell.
// Throws DataError when the point lies outside the bbox.
CellIndex locate(const GridSpec& grid, double lat, double lon);
std::optional<CellIndex> try_locate(const GridSpec& grid, double lat, double lon);

}  // namespace stgam
