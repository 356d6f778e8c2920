#include "stgam/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <iomanip>
#include <map>
#include <random>
#include <set>
#include <sstream>

#include "stgam/entropy.hpp"
#include "stgam/errors.hpp"
#include "stgam/grid.hpp"

namespace stgam {

namespace {

void shuffle_deterministic(std::vector<std::string>& v, std::mt19937_64& rng) {
    for (std::size_t i = v.size(); i > 1; --i) {
        const std::size_t j = rng() % i;
        std::swap(v[i - 1], v[j]);
    }
}

}  // namespace

SplitPlan split_users(const FeatureTable& table, std::uint64_t seed) {
    // Per-user labels are constant across rows; collect one label per user.
    std::map<std::string, int> user_label;
    for (const auto& r : table.rows) user_label.emplace(r.user_id, r.label);

    const std::size_t n_classes = table.levels.size();
    std::vector<std::vector<std::string>> by_class(n_classes);
    for (const auto& [uid, label] : user_label) by_class[label].push_back(uid);

    const std::size_t n_users = user_label.size();
    if (n_users < 10)
        throw DataError("pipeline.split_users: need at least 10 labeled users, have " +
                        std::to_string(n_users));
    for (std::size_t k = 0; k < n_classes; ++k)
        if (by_class[k].size() < 2)
            throw DataError("pipeline.split_users: class " + table.levels[k] +
                            " has fewer than 2 users; cannot stratify");

    const auto n_test = static_cast<std::size_t>(std::lround(0.1 * static_cast<double>(n_users)));

    // Largest-remainder allocation of test slots across classes.
    std::vector<std::size_t> take(n_classes, 0);
    std::vector<double> frac(n_classes, 0.0);
    std::size_t assigned = 0;
    for (std::size_t k = 0; k < n_classes; ++k) {
        const double quota =
            static_cast<double>(n_test) * static_cast<double>(by_class[k].size()) /
            static_cast<double>(n_users);
        take[k] = static_cast<std::size_t>(std::floor(quota));
        frac[k] = quota - static_cast<double>(take[k]);
        assigned += take[k];
    }
    std::vector<std::size_t> order(n_classes);
    for (std::size_t k = 0; k < n_classes; ++k) order[k] = k;
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return frac[a] > frac[b]; });
    for (std::size_t i = 0; assigned < n_test; i = (i + 1) % n_classes) {
        const std::size_t k = order[i];
        if (take[k] < by_class[k].size() - 1) {
            ++take[k];
            ++assigned;
        }
    }
    // Keep at least one training user per class.
    for (std::size_t k = 0; k < n_classes; ++k) {
        while (take[k] >= by_class[k].size()) {
            --take[k];
            for (std::size_t j = 0; j < n_classes; ++j)
                if (j != k && take[j] < by_class[j].size() - 1) {
                    ++take[j];
                    break;
                }
        }
    }

    SplitPlan plan;
    plan.seed = seed;
    plan.target = table.target;
    std::mt19937_64 rng(seed);
    for (std::size_t k = 0; k < n_classes; ++k) {
        auto users = by_class[k];  // already sorted (map iteration order)
        shuffle_deterministic(users, rng);
        for (std::size_t i = 0; i < users.size(); ++i)
            (i < take[k] ? plan.test_users : plan.train_users).push_back(users[i]);
    }
    std::sort(plan.train_users.begin(), plan.train_users.end());
    std::sort(plan.test_users.begin(), plan.test_users.end());
    return plan;
}

UserPrediction predict_user(const MultiClassGam& model, std::span<const CovariateRow> rows,
                            Aggregate aggregate) {
    if (rows.empty())
        throw DataError("pipeline.predict_user: user has no usable slices");
    for (const auto& r : rows)
        if (r.user_id != rows.front().user_id)
            throw DataError("pipeline.predict_user: rows from more than one user");

    const auto k = static_cast<Eigen::Index>(model.levels.size());
    Eigen::VectorXd agg = Eigen::VectorXd::Zero(k);
    if (aggregate == Aggregate::MeanProb) {
        for (const auto& r : rows) agg += predict_proba(model, r);
        agg /= static_cast<double>(rows.size());
    } else {
        for (const auto& r : rows) {
            Eigen::VectorXd p = predict_proba(model, r);
            Eigen::Index arg = 0;
            for (Eigen::Index i = 1; i < k; ++i)
                if (p(i) > p(arg)) arg = i;
            agg(arg) += 1.0;
        }
        agg /= static_cast<double>(rows.size());
    }

    UserPrediction pred;
    pred.user_id = rows.front().user_id;
    pred.probabilities = agg;
    pred.true_label = rows.front().label;
    pred.slice_count = static_cast<int>(rows.size());
    Eigen::Index arg = 0;
    for (Eigen::Index i = 1; i < k; ++i)
        if (agg(i) > agg(arg)) arg = i;  // strict: ties keep the earlier level
    pred.predicted = static_cast<int>(arg);
    return pred;
}

FeatureTable subset_rows(const FeatureTable& table, std::span<const std::string> users) {
    std::set<std::string> keep(users.begin(), users.end());
    FeatureTable out;
    out.target = table.target;
    out.levels = table.levels;
    for (const auto& r : table.rows)
        if (keep.contains(r.user_id)) out.rows.push_back(r);
    return out;
}

EvaluationReport evaluate(const Dataset& ds, Target target, const RunConfig& cfg,
                          std::uint64_t seed) {
    GridSpec grid = build_grid(cfg.grid_min_lat, cfg.grid_min_lon, cfg.grid_max_lat,
                               cfg.grid_max_lon, cfg.grid_cell_size_m);
    auto sequences = entropy_sequences(ds, grid, cfg.entropy_config());
    FeatureTable table = assemble_features(ds, sequences, target);
    SplitPlan plan = split_users(table, seed);

    FeatureTable train = subset_rows(table, plan.train_users);
    GamConfig gam_cfg{cfg.gam_basis_dim, cfg.gam_penalty_order, cfg.lambda_grid(),
                      {cfg.gam_max_iter, cfg.gam_tol, 1e-8}};
    MultiClassGam model = fit_multiclass(train, gam_cfg);
    model.config_fingerprint = config_fingerprint(cfg);

    EvaluationReport report;
    report.target = target;
    report.levels = table.levels;
    report.seed = seed;
    report.config_fingerprint = model.config_fingerprint;

    const std::size_t k = table.levels.size();
    report.confusion.assign(k, std::vector<int>(k, 0));

    FeatureTable test = subset_rows(table, plan.test_users);
    std::size_t begin = 0;
    while (begin < test.rows.size()) {
        std::size_t end = begin;
        while (end < test.rows.size() && test.rows[end].user_id == test.rows[begin].user_id)
            ++end;
        auto pred = predict_user(
            model, std::span<const CovariateRow>(test.rows.data() + begin, end - begin),
            cfg.pipeline_aggregate);
        ++report.confusion[pred.true_label][pred.predicted];
        report.per_user.push_back(std::move(pred));
        begin = end;
    }
    if (report.per_user.empty())
        throw DataError("pipeline.evaluate: no test users produced predictions");

    int correct = 0;
    for (std::size_t i = 0; i < k; ++i) correct += report.confusion[i][i];
    report.accuracy = static_cast<double>(correct) / static_cast<double>(report.per_user.size());
    report.model = std::move(model);
    return report;
}

std::string report_to_string(const EvaluationReport& report) {
    std::ostringstream out;
    out << std::setprecision(17);
    out << "stgam_evaluation 1\n";
    out << "target " << target_name(report.target) << '\n';
    out << "seed " << report.seed << '\n';
    out << "config_fingerprint " << report.config_fingerprint << '\n';
    out << "levels " << report.levels.size();
    for (const auto& l : report.levels) out << ' ' << l;
    out << '\n';
    out << "n_test " << report.per_user.size() << '\n';
    out << "accuracy " << report.accuracy << '\n';
    out << "confusion\n";
    for (const auto& row : report.confusion) {
        for (std::size_t c = 0; c < row.size(); ++c) out << (c ? " " : "") << row[c];
        out << '\n';
    }
    for (const auto& u : report.per_user) {
        out << "user " << u.user_id << " true " << report.levels[u.true_label] << " predicted "
            << report.levels[u.predicted] << " slices " << u.slice_count << " probs";
        for (Eigen::Index i = 0; i < u.probabilities.size(); ++i) out << ' ' << u.probabilities(i);
        out << '\n';
    }
    out << "end\n";
    return out.str();
}

std::string summary_line(const EvaluationReport& report) {
    char acc[32];
    std::snprintf(acc, sizeof(acc), "%g", report.accuracy);
    std::ostringstream out;
    out << "target=" << target_name(report.target) << " accuracy=" << acc
        << " n_test=" << report.per_user.size() << " seed=" << report.seed;
    return out.str();
}

}  // namespace stgam
