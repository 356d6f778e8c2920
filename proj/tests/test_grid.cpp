#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <set>

#include "stgam/errors.hpp"
#include "stgam/grid.hpp"

using namespace stgam;

namespace {

constexpr double kDeg = std::numbers::pi / 180.0;

// Bbox with the requested equirectangular extents in meters, anchored at
// (min_lat, min_lon). Longitude extent solved against the mid-latitude.
GridSpec grid_with_extent(double ew_m, double ns_m, double cell, double min_lat = 46.0,
                          double min_lon = 6.0) {
    const double max_lat = min_lat + ns_m / (kEarthRadiusMeters * kDeg);
    const double mid = 0.5 * (min_lat + max_lat);
    const double max_lon = min_lon + ew_m / (kEarthRadiusMeters * kDeg * std::cos(mid * kDeg));
    return build_grid(min_lat, min_lon, max_lat, max_lon, cell);
}

}  // namespace

TEST_CASE("exact division: 1000m x 1000m at cell 500 gives 2x2") {
    auto g = grid_with_extent(1000.0, 1000.0, 500.0);
    CHECK(g.n == 2);
    CHECK(g.m == 2);
}

TEST_CASE("ceil: 1001m x 1000m at cell 500 gives 3x2") {
    auto g = grid_with_extent(1001.0, 1000.0, 500.0);
    CHECK(g.n == 3);
    CHECK(g.m == 2);
}

TEST_CASE("degenerate bbox is an error") {
    CHECK_THROWS_AS(build_grid(46.0, 6.0, 46.0, 6.5, 500.0), DataError);
    CHECK_THROWS_AS(build_grid(46.0, 6.0, 46.5, 6.0, 500.0), DataError);
}

TEST_CASE("single-cell grid is rejected with advice") {
    try {
        grid_with_extent(400.0, 400.0, 500.0);
        FAIL("expected DataError");
    } catch (const DataError& e) {
        CHECK(std::string(e.what()).find("cell_size") != std::string::npos);
    }
}

TEST_CASE("corner conventions") {
    auto g = grid_with_extent(1000.0, 1000.0, 500.0);
    auto origin = locate(g, g.min_lat, g.min_lon);
    CHECK(origin.i == 0);
    CHECK(origin.j == 0);
    auto far = locate(g, g.max_lat, g.max_lon);
    CHECK(far.i == g.n - 1);
    CHECK(far.j == g.m - 1);
}

TEST_CASE("bbox midpoint of a 2x2 grid maps to (1,1) by the floor convention") {
    auto g = grid_with_extent(1000.0, 1000.0, 500.0);
    auto c = locate(g, 0.5 * (g.min_lat + g.max_lat), 0.5 * (g.min_lon + g.max_lon));
    CHECK(c.i == 1);
    CHECK(c.j == 1);
}

TEST_CASE("outside point throws; try_locate returns nullopt") {
    auto g = grid_with_extent(1000.0, 1000.0, 500.0);
    CHECK_THROWS_AS(locate(g, g.max_lat + 0.1, g.min_lon), DataError);
    CHECK_FALSE(try_locate(g, g.min_lat, g.min_lon - 1e-9).has_value());
}

TEST_CASE("locate is total on the bbox and its image fills the grid") {
    auto g = grid_with_extent(1700.0, 1300.0, 500.0);  // 4 x 3
    std::set<std::pair<int, int>> seen;
    const int probes = 64;
    for (int a = 0; a <= probes; ++a) {
        for (int b = 0; b <= probes; ++b) {
            double lat = g.min_lat + (g.max_lat - g.min_lat) * a / probes;
            double lon = g.min_lon + (g.max_lon - g.min_lon) * b / probes;
            auto c = locate(g, lat, lon);
            CHECK(c.i >= 0);
            CHECK(c.i < g.n);
            CHECK(c.j >= 0);
            CHECK(c.j < g.m);
            seen.insert({c.i, c.j});
        }
    }
    CHECK(static_cast<int>(seen.size()) == g.n * g.m);
}

TEST_CASE("pure longitude translation leaves cell indices unchanged") {
    auto g = grid_with_extent(1700.0, 1300.0, 500.0);
    const double shift = 2.5;
    auto g2 = GridSpec{g.min_lat, g.min_lon + shift, g.max_lat, g.max_lon + shift,
                       g.cell_size_m, g.n, g.m};
    for (int a = 0; a <= 20; ++a) {
        for (int b = 0; b <= 20; ++b) {
            double lat = g.min_lat + (g.max_lat - g.min_lat) * a / 20;
            double lon = g.min_lon + (g.max_lon - g.min_lon) * b / 20;
            auto c1 = locate(g, lat, lon);
            auto c2 = locate(g2, lat, lon + shift);
            CHECK(c1.i == c2.i);
            CHECK(c1.j == c2.j);
        }
    }
}
