#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <set>

#include "stgam/entropy.hpp"
#include "stgam/errors.hpp"
#include "stgam/pipeline.hpp"
#include "stgam/synth.hpp"

using namespace stgam;

namespace {

// One row per user, labels assigned round-robin over the class count.
FeatureTable users_table(int n_users, int n_classes, Target target = Target::Gender) {
    FeatureTable table;
    table.target = target;
    table.levels = class_levels(target);
    REQUIRE(static_cast<std::size_t>(n_classes) <= table.levels.size());
    for (int u = 0; u < n_users; ++u) {
        CovariateRow r;
        char buf[16];
        std::snprintf(buf, sizeof(buf), "u%05d", u);
        r.user_id = buf;
        r.slice_index = 0;
        r.entropy = 50.0;
        r.max_distance_km = 1.0;
        r.day_of_week = 0;
        r.label = u % n_classes;
        table.rows.push_back(std::move(r));
    }
    return table;
}

double logit(double p) { return std::log(p / (1.0 - p)); }

// Binary model with a day-of-week factor only: day 0 maps to the probability
// p1_day0 for the second level, day 1 to p1_day1, all other days to p1_day0.
MultiClassGam factor_model(double p1_day0, double p1_day1) {
    MultiClassGam m;
    m.target = Target::Gender;
    m.levels = class_levels(Target::Gender);
    FittedGam f;
    f.spec.factors.push_back(FactorTerm{"day_of_week", 7});
    f.beta = Eigen::VectorXd::Zero(f.spec.n_cols());
    f.beta(0) = logit(p1_day0);
    f.beta(1) = logit(p1_day1) - logit(p1_day0);
    f.positive_class = 1;
    m.models.push_back(std::move(f));
    return m;
}

CovariateRow row_for_day(int day, const std::string& uid = "u1") {
    CovariateRow r;
    r.user_id = uid;
    r.slice_index = day;
    r.entropy = 0.0;
    r.max_distance_km = 0.0;
    r.day_of_week = day;
    r.label = 0;
    return r;
}

RunConfig config_for(const GridSpec& g) {
    RunConfig cfg;
    cfg.grid_min_lat = g.min_lat;
    cfg.grid_min_lon = g.min_lon;
    cfg.grid_max_lat = g.max_lat;
    cfg.grid_max_lon = g.max_lon;
    cfg.grid_cell_size_m = g.cell_size_m;
    return cfg;
}

Dataset permuted_labels(Dataset ds, std::uint64_t seed) {
    std::vector<std::string> users;
    for (const auto& [uid, demo] : ds.demographics) users.push_back(uid);
    std::vector<std::optional<Gender>> genders;
    for (const auto& uid : users) genders.push_back(ds.demographics.at(uid).gender);
    std::mt19937_64 rng(seed);
    std::shuffle(genders.begin(), genders.end(), rng);
    for (std::size_t i = 0; i < users.size(); ++i)
        ds.demographics.at(users[i]).gender = genders[i];
    return ds;
}

}  // namespace

TEST_CASE("20 users in 2 classes split 18 train / 2 test with both classes training") {
    FeatureTable table = users_table(20, 2);
    SplitPlan plan = split_users(table, 1);
    CHECK(plan.train_users.size() == 18);
    CHECK(plan.test_users.size() == 2);

    std::set<std::string> train(plan.train_users.begin(), plan.train_users.end());
    std::set<std::string> test(plan.test_users.begin(), plan.test_users.end());
    CHECK(train.size() + test.size() == 20);
    for (const auto& u : test) CHECK(!train.contains(u));

    std::set<int> train_labels;
    for (const auto& r : table.rows)
        if (train.contains(r.user_id)) train_labels.insert(r.label);
    CHECK(train_labels == std::set<int>{0, 1});
}

TEST_CASE("split is deterministic per seed and varies across seeds") {
    FeatureTable table = users_table(40, 2);
    SplitPlan a = split_users(table, 9);
    SplitPlan b = split_users(table, 9);
    CHECK(a.train_users == b.train_users);
    CHECK(a.test_users == b.test_users);

    bool any_differs = false;
    for (std::uint64_t s = 10; s < 20 && !any_differs; ++s)
        any_differs = split_users(table, s).test_users != a.test_users;
    CHECK(any_differs);
}

TEST_CASE("153 labeled users yield exactly 15 test users") {
    FeatureTable table = users_table(153, 2);
    SplitPlan plan = split_users(table, 42);
    CHECK(plan.test_users.size() == 15);
    CHECK(plan.train_users.size() == 138);
}

TEST_CASE("split preconditions: enough users and at least 2 per class") {
    CHECK_THROWS_AS(split_users(users_table(8, 2), 1), DataError);

    FeatureTable lopsided = users_table(11, 1);
    lopsided.rows.back().label = 1;  // second class has a single user
    CHECK_THROWS_AS(split_users(lopsided, 1), DataError);
}

TEST_CASE("three-class split keeps every class in training") {
    FeatureTable table = users_table(153, 3, Target::AgeGroup);
    SplitPlan plan = split_users(table, 7);
    CHECK(plan.test_users.size() == 15);
    std::set<std::string> test(plan.test_users.begin(), plan.test_users.end());
    std::set<int> train_labels;
    for (const auto& r : table.rows)
        if (!test.contains(r.user_id)) train_labels.insert(r.label);
    CHECK(train_labels == std::set<int>{0, 1, 2});
}

TEST_CASE("predict_user on a single row returns that row's probabilities") {
    MultiClassGam m = factor_model(0.1, 0.9);
    std::vector<CovariateRow> rows{row_for_day(0)};
    UserPrediction pred = predict_user(m, rows);
    Eigen::VectorXd direct = predict_proba(m, rows[0]);
    CHECK(pred.probabilities(0) == direct(0));
    CHECK(pred.probabilities(1) == direct(1));
    CHECK(pred.predicted == 0);
    CHECK(pred.slice_count == 1);
}

TEST_CASE("predict_user averages to a tie and keeps the earlier class level") {
    MultiClassGam m = factor_model(0.1, 0.9);
    std::vector<CovariateRow> rows{row_for_day(0), row_for_day(1)};
    UserPrediction pred = predict_user(m, rows);
    CHECK(pred.probabilities(0) == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(pred.probabilities(1) == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(pred.predicted == 0);
}

TEST_CASE("predict_user vote aggregation counts per-row winners") {
    MultiClassGam m = factor_model(0.1, 0.9);
    std::vector<CovariateRow> rows{row_for_day(0), row_for_day(0), row_for_day(1)};
    UserPrediction pred = predict_user(m, rows, Aggregate::Vote);
    CHECK(pred.probabilities(0) == doctest::Approx(2.0 / 3.0));
    CHECK(pred.predicted == 0);
}

TEST_CASE("predict_user rejects empty input and mixed users") {
    MultiClassGam m = factor_model(0.1, 0.9);
    std::vector<CovariateRow> empty;
    CHECK_THROWS_AS(predict_user(m, empty), DataError);
    std::vector<CovariateRow> mixed{row_for_day(0, "a"), row_for_day(1, "b")};
    CHECK_THROWS_AS(predict_user(m, mixed), DataError);
}

TEST_CASE("separable two-class benchmark evaluates to perfect accuracy") {
    GridSpec grid = make_synth_grid(2, 2);
    Dataset ds = generate_dataset(synth_a_spec(30, 20), grid, 5);
    RunConfig cfg = config_for(grid);
    EvaluationReport report = evaluate(ds, Target::Gender, cfg, 42);

    CHECK(report.accuracy == 1.0);
    CHECK(report.per_user.size() == 6);

    int total = 0;
    for (const auto& row : report.confusion)
        for (int c : row) total += c;
    CHECK(total == static_cast<int>(report.per_user.size()));
}

TEST_CASE("evaluation is byte-identical across repeated runs") {
    GridSpec grid = make_synth_grid(2, 2);
    Dataset ds = generate_dataset(synth_a_spec(15, 12), grid, 8);
    RunConfig cfg = config_for(grid);
    EvaluationReport a = evaluate(ds, Target::Gender, cfg, 3);
    EvaluationReport b = evaluate(ds, Target::Gender, cfg, 3);
    CHECK(report_to_string(a) == report_to_string(b));
}

TEST_CASE("fitting only on the training subset reproduces the evaluation model bitwise") {
    GridSpec grid = make_synth_grid(2, 2);
    Dataset ds = generate_dataset(synth_a_spec(15, 12), grid, 8);
    RunConfig cfg = config_for(grid);
    const std::uint64_t seed = 21;
    EvaluationReport report = evaluate(ds, Target::Gender, cfg, seed);

    auto sequences = entropy_sequences(ds, grid, cfg.entropy_config());
    FeatureTable table = assemble_features(ds, sequences, Target::Gender);
    SplitPlan plan = split_users(table, seed);
    FeatureTable train = subset_rows(table, plan.train_users);
    GamConfig gam_cfg{cfg.gam_basis_dim, cfg.gam_penalty_order, cfg.lambda_grid(),
                      {cfg.gam_max_iter, cfg.gam_tol, 1e-8}};
    MultiClassGam refit = fit_multiclass(train, gam_cfg);

    REQUIRE(refit.models.size() == report.model.models.size());
    for (std::size_t i = 0; i < refit.models.size(); ++i) {
        const auto& a = refit.models[i].beta;
        const auto& b = report.model.models[i].beta;
        REQUIRE(a.size() == b.size());
        for (Eigen::Index j = 0; j < a.size(); ++j) CHECK(a(j) == b(j));
    }
}

TEST_CASE("permuted labels drive accuracy to chance level") {
    GridSpec grid = make_synth_grid(2, 2);
    Dataset base = generate_dataset(synth_a_spec(30, 10), grid, 13);
    RunConfig cfg = config_for(grid);

    double total = 0.0;
    const int n_seeds = 20;
    for (int s = 0; s < n_seeds; ++s) {
        Dataset permuted = permuted_labels(base, 100 + s);
        total += evaluate(permuted, Target::Gender, cfg, 1000 + s).accuracy;
    }
    CHECK(total / n_seeds == doctest::Approx(0.5).epsilon(0.3));
}

TEST_CASE("more training users never hurt on the standard benchmark") {
    GridSpec grid = make_synth_grid(2, 2);
    RunConfig cfg = config_for(grid);
    double small_sum = 0.0, large_sum = 0.0;
    const int n_seeds = 5;
    for (int s = 0; s < n_seeds; ++s) {
        Dataset small = generate_dataset(synth_a_spec(10, 10), grid, 50 + s);
        Dataset large = generate_dataset(synth_a_spec(100, 10), grid, 50 + s);
        small_sum += evaluate(small, Target::Gender, cfg, 60 + s).accuracy;
        large_sum += evaluate(large, Target::Gender, cfg, 60 + s).accuracy;
    }
    CHECK(large_sum >= small_sum);
}

TEST_CASE("summary line carries target, accuracy, test count, and seed") {
    GridSpec grid = make_synth_grid(2, 2);
    Dataset ds = generate_dataset(synth_a_spec(15, 12), grid, 8);
    RunConfig cfg = config_for(grid);
    EvaluationReport report = evaluate(ds, Target::Gender, cfg, 3);
    std::string line = summary_line(report);
    CHECK(line.find("target=gender") != std::string::npos);
    CHECK(line.find("accuracy=") != std::string::npos);
    CHECK(line.find("n_test=3") != std::string::npos);
    CHECK(line.find("seed=3") != std::string::npos);
}
