#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "stgam/config.hpp"
#include "stgam/features.hpp"
#include "stgam/gam.hpp"

namespace stgam {

struct SplitPlan {
    std::uint64_t seed;
    Target target;
    std::vector<std::string> train_users;
    std::vector<std::string> test_users;  // round(0.1 * labeled users)
};

// Stratified, user-level, deterministic for a given seed. Every class keeps at
// least one training user; a class with fewer than 2 users is an error.
SplitPlan split_users(const FeatureTable& table, std::uint64_t seed);

struct UserPrediction {
    std::string user_id;
    int predicted;   // argmax, ties to the earlier class level
    Eigen::VectorXd probabilities;
    int true_label;
    int slice_count;
};

UserPrediction predict_user(const MultiClassGam& model, std::span<const CovariateRow> rows,
                            Aggregate aggregate = Aggregate::MeanProb);

struct EvaluationReport {
    Target target;
    std::vector<std::string> levels;
    double accuracy;
    std::vector<std::vector<int>> confusion;  // [true][predicted]
    std::vector<UserPrediction> per_user;
    std::string config_fingerprint;
    std::uint64_t seed;
    MultiClassGam model;  // trained on the 90% side
};

// The full protocol: entropy -> features -> 90/10 user split -> GCV + fit on
// training rows only -> per-test-user prediction -> report.
EvaluationReport evaluate(const Dataset& ds, Target target, const RunConfig& cfg,
                          std::uint64_t seed);

std::string report_to_string(const EvaluationReport& report);
// e.g. `target=working_profile accuracy=0.87 n_test=15 seed=42`
std::string summary_line(const EvaluationReport& report);

FeatureTable subset_rows(const FeatureTable& table, std::span<const std::string> users);

}  // namespace stgam
