#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "stgam/errors.hpp"
#include "stgam/features.hpp"

using namespace stgam;

namespace {

Trace make_trace(const std::string& uid,
                 std::vector<std::tuple<std::int64_t, double, double>> fixes) {
    Trace t;
    t.user_id = uid;
    for (auto [ts, lat, lon] : fixes) t.records.push_back({uid, ts, lat, lon});
    return t;
}

}  // namespace

TEST_CASE("haversine: coincident points") {
    CHECK(haversine_km(46.5, 6.6, 46.5, 6.6) == doctest::Approx(0.0));
}

TEST_CASE("haversine: one degree of longitude at the equator") {
    CHECK(haversine_km(0.0, 0.0, 0.0, 1.0) == doctest::Approx(111.195).epsilon(1e-5));
}

TEST_CASE("haversine: antipodal along the equator is half the circumference") {
    CHECK(haversine_km(0.0, 0.0, 0.0, 180.0) == doctest::Approx(20015.1).epsilon(1e-5));
}

TEST_CASE("max distance: single fix gives 0") {
    auto t = make_trace("u", {{100, 0.0, 0.0}});
    TimeSliceSpec spec{0, 86400, 1};
    CHECK(max_distance_in_slice(t, spec, 0) == 0.0);
}

TEST_CASE("max distance: picks the extreme pair") {
    auto t = make_trace("u", {{100, 0.0, 0.0}, {200, 0.0, 1.0}, {300, 0.0, 0.5}});
    TimeSliceSpec spec{0, 86400, 1};
    CHECK(max_distance_in_slice(t, spec, 0) == doctest::Approx(111.195).epsilon(1e-5));
}

TEST_CASE("max distance: empty slice gives 0") {
    auto t = make_trace("u", {{100, 0.0, 0.0}});
    TimeSliceSpec spec{0, 86400, 2};
    CHECK(max_distance_in_slice(t, spec, 1) == 0.0);
}

TEST_CASE("max distance: invariant under reversing fix order") {
    auto fwd = make_trace("u", {{100, 0.1, 0.2}, {200, 0.4, 0.8}, {300, 0.9, 0.1}});
    auto rev = make_trace("u", {{100, 0.9, 0.1}, {200, 0.4, 0.8}, {300, 0.1, 0.2}});
    TimeSliceSpec spec{0, 86400, 1};
    CHECK(max_distance_in_slice(fwd, spec, 0) ==
          doctest::Approx(max_distance_in_slice(rev, spec, 0)).epsilon(1e-15));
}

namespace {

// Two users, 3 slices each, one missing slice for u1.
struct Fixture {
    Dataset ds;
    std::map<std::string, EntropySequence> sequences;

    Fixture() {
        ds.traces.emplace("u1", make_trace("u1", {{0, 0.1, 0.1}, {600, 0.2, 0.2}}));
        ds.traces.emplace("u2", make_trace("u2", {{0, 0.1, 0.1}, {600, 0.2, 0.2}}));
        DemographicRecord d1{"u1", Gender::Female, AgeGroup::Under22, {}};
        DemographicRecord d2{"u2", {}, AgeGroup::From33Up, WorkingProfile::Other};
        ds.demographics = {{"u1", d1}, {"u2", d2}};

        TimeSliceSpec spec{utc_to_epoch(2009, 1, 5, 0, 0, 0), 86400, 3};  // a Monday
        EntropySequence s1{"u1", spec, {10.0, std::nullopt, 30.0}};
        EntropySequence s2{"u2", spec, {5.0, 15.0, 25.0}};
        sequences = {{"u1", s1}, {"u2", s2}};
    }
};

}  // namespace

TEST_CASE("assemble: row count is present slices of labeled users") {
    Fixture f;
    auto table = assemble_features(f.ds, f.sequences, Target::AgeGroup);
    CHECK(table.rows.size() == 5);
}

TEST_CASE("assemble: unlabeled users contribute no rows") {
    Fixture f;
    auto table = assemble_features(f.ds, f.sequences, Target::Gender);
    CHECK(table.rows.size() == 2);  // only u1 has a gender
    for (const auto& r : table.rows) CHECK(r.user_id == "u1");
}

TEST_CASE("assemble: day_of_week comes from the slice start") {
    Fixture f;
    auto table = assemble_features(f.ds, f.sequences, Target::AgeGroup);
    for (const auto& r : table.rows)
        CHECK(r.day_of_week == r.slice_index % 7);  // Monday-origin spec
}

TEST_CASE("assemble: rows are sorted by user then slice") {
    Fixture f;
    auto table = assemble_features(f.ds, f.sequences, Target::AgeGroup);
    CHECK(std::is_sorted(table.rows.begin(), table.rows.end(),
                         [](const CovariateRow& a, const CovariateRow& b) {
                             return std::tie(a.user_id, a.slice_index) <
                                    std::tie(b.user_id, b.slice_index);
                         }));
}

TEST_CASE("assemble: per-user label constant; class without rows warns") {
    Fixture f;
    auto table = assemble_features(f.ds, f.sequences, Target::AgeGroup);
    CHECK(table.warnings.size() == 1);  // 22to32 absent
    CHECK(table.warnings[0].find("22to32") != std::string::npos);
}

TEST_CASE("assemble: no labeled user at all is an error") {
    Fixture f;
    auto table_ok = assemble_features(f.ds, f.sequences, Target::WorkingProfile);
    CHECK(table_ok.rows.size() == 3);
    f.ds.demographics.clear();
    CHECK_THROWS_AS(assemble_features(f.ds, f.sequences, Target::WorkingProfile), DataError);
}

TEST_CASE("assemble: dropping one user's rows equals assembling without them") {
    Fixture f;
    auto full = assemble_features(f.ds, f.sequences, Target::AgeGroup);

    Fixture g;
    g.ds.demographics.erase("u2");
    auto partial = assemble_features(g.ds, g.sequences, Target::AgeGroup);

    std::vector<CovariateRow> expect;
    for (const auto& r : full.rows)
        if (r.user_id == "u1") expect.push_back(r);
    REQUIRE(partial.rows.size() == expect.size());
    for (std::size_t i = 0; i < expect.size(); ++i) {
        CHECK(partial.rows[i].entropy == expect[i].entropy);
        CHECK(partial.rows[i].max_distance_km == expect[i].max_distance_km);
        CHECK(partial.rows[i].day_of_week == expect[i].day_of_week);
    }
}
