#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "stgam/entropy.hpp"

namespace stgam {

enum class Aggregate { MeanProb, Vote };

// Flat key=value run configuration. Unknown keys are rejected; every run
// writes the resolved snapshot next to its outputs.
struct RunConfig {
    double grid_min_lat = 0.0;
    double grid_min_lon = 0.0;
    double grid_max_lat = 0.0;
    double grid_max_lon = 0.0;
    double grid_cell_size_m = 500.0;

    std::int64_t entropy_slice_seconds = 86400;
    std::int64_t entropy_max_gap_seconds = 3600;
    ProportionMode entropy_mode = ProportionMode::Dwell;
    Alignment entropy_alignment = Alignment::MidnightUtc;

    int gam_basis_dim = 10;
    int gam_penalty_order = 2;
    double gam_lambda_log10_min = -3.0;
    double gam_lambda_log10_max = 3.0;
    int gam_lambda_grid_points = 13;
    int gam_max_iter = 100;
    double gam_tol = 1e-8;

    Aggregate pipeline_aggregate = Aggregate::MeanProb;

    std::string io_traces;
    std::string io_demographics;
    std::string io_out_dir = ".";
    std::uint64_t run_seed = 42;
    std::string run_target = "all";  // gender|age_group|working_profile|all

    EntropyConfig entropy_config() const {
        return {entropy_slice_seconds, entropy_max_gap_seconds, entropy_mode, entropy_alignment};
    }
    std::vector<double> lambda_grid() const;
};

RunConfig parse_config_file(const std::string& path);
// key=value override, applied after the file.
void apply_override(RunConfig& cfg, const std::string& key, const std::string& value);
// Canonical snapshot: every key, sorted, one per line.
std::string config_to_string(const RunConfig& cfg);
// FNV-1a hash of the canonical snapshot, as 16 hex digits.
std::string config_fingerprint(const RunConfig& cfg);
// `--help` material: every key with its default.
std::string config_keys_help();

}  // namespace stgam
