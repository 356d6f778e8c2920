#include "stgam/cli.hpp"

#include <CLI11.hpp>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <vector>

#include "stgam/config.hpp"
#include "stgam/entropy.hpp"
#include "stgam/errors.hpp"
#include "stgam/features.hpp"
#include "stgam/gam.hpp"
#include "stgam/ingest.hpp"
#include "stgam/pipeline.hpp"
#include "stgam/synth.hpp"

namespace stgam {

namespace {

namespace fs = std::filesystem;

struct CommonOpts {
    std::string config_path;
    std::vector<std::string> overrides;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> target;
};

void add_common(CLI::App* cmd, CommonOpts& opts, bool target_opt = true) {
    cmd->add_option("--config", opts.config_path, "run configuration file (key = value lines)")
        ->required();
    cmd->add_option("--set", opts.overrides, "config override, key=value; beats the file");
    cmd->add_option("--seed", opts.seed, "override run.seed");
    if (target_opt)
        cmd->add_option("--target", opts.target,
                        "demographic target: gender|age_group|working_profile|all");
    cmd->footer("Config keys:\n" + config_keys_help());
}

RunConfig resolve_config(const CommonOpts& opts) {
    RunConfig cfg = parse_config_file(opts.config_path);
    for (const auto& ov : opts.overrides) {
        auto eq = ov.find('=');
        if (eq == std::string::npos)
            throw UsageError("cli.run: --set expects key=value, got '" + ov + "'");
        apply_override(cfg, ov.substr(0, eq), ov.substr(eq + 1));
    }
    if (opts.seed) cfg.run_seed = *opts.seed;
    if (opts.target) apply_override(cfg, "run.target", *opts.target);
    return cfg;
}

std::vector<Target> targets_of(const RunConfig& cfg) {
    if (cfg.run_target == "all")
        return {Target::Gender, Target::AgeGroup, Target::WorkingProfile};
    return {*target_from_name(cfg.run_target)};
}

void write_snapshot(const RunConfig& cfg) {
    fs::create_directories(cfg.io_out_dir);
    std::ofstream out(fs::path(cfg.io_out_dir) / "resolved_config.cfg");
    if (!out) throw DataError("cli.run: cannot write resolved config snapshot");
    out << config_to_string(cfg);
}

Dataset load_dataset(const RunConfig& cfg, bool need_demographics) {
    if (cfg.io_traces.empty()) throw UsageError("cli.run: io.traces is not set");
    auto traces = parse_traces(cfg.io_traces);
    if (traces.malformed_rows > 0)
        std::cerr << "warning: ingest.parse_traces: " << traces.malformed_rows
                  << " malformed rows skipped\n";
    if (traces.duplicate_rows > 0)
        std::cerr << "warning: ingest.parse_traces: " << traces.duplicate_rows
                  << " duplicate (user, timestamp) rows dropped\n";
    std::map<std::string, DemographicRecord> demo;
    if (need_demographics) {
        if (cfg.io_demographics.empty())
            throw UsageError("cli.run: io.demographics is not set");
        demo = parse_demographics(cfg.io_demographics);
    }
    return make_dataset(std::move(traces), std::move(demo));
}

GridSpec grid_of(const RunConfig& cfg) {
    return build_grid(cfg.grid_min_lat, cfg.grid_min_lon, cfg.grid_max_lat, cfg.grid_max_lon,
                      cfg.grid_cell_size_m);
}

GamConfig gam_config_of(const RunConfig& cfg) {
    return {cfg.gam_basis_dim, cfg.gam_penalty_order, cfg.lambda_grid(),
            {cfg.gam_max_iter, cfg.gam_tol, 1e-8}};
}

// Per-user covariate rows for prediction (no labels involved).
std::map<std::string, std::vector<CovariateRow>> prediction_rows(const Dataset& ds,
                                                                 const RunConfig& cfg) {
    GridSpec grid = grid_of(cfg);
    auto sequences = entropy_sequences(ds, grid, cfg.entropy_config());
    std::map<std::string, std::vector<CovariateRow>> out;
    for (const auto& [uid, seq] : sequences) {
        const Trace& trace = ds.traces.at(uid);
        for (int t = 0; t < seq.spec.T; ++t) {
            if (!seq.values[t]) continue;
            CovariateRow row;
            row.user_id = uid;
            row.slice_index = t;
            row.entropy = *seq.values[t];
            row.max_distance_km = max_distance_in_slice(trace, seq.spec, t);
            row.day_of_week = day_of_week_utc(seq.spec.slice_start(t));
            row.label = 0;
            out[uid].push_back(std::move(row));
        }
    }
    return out;
}

int cmd_synth(const CommonOpts& opts, const std::string& benchmark, int users_per_profile,
              int days) {
    RunConfig cfg = resolve_config(opts);
    GridSpec grid = make_synth_grid(2, 2, cfg.grid_cell_size_m);
    SynthSpec spec;
    if (benchmark == "synth-a") spec = synth_a_spec(users_per_profile, days);
    else if (benchmark == "synth-3") spec = synth_3_spec(users_per_profile, days);
    else throw UsageError("cli.synth: unknown benchmark '" + benchmark + "'");

    Dataset ds = generate_dataset(spec, grid, cfg.run_seed);

    cfg.grid_min_lat = grid.min_lat;
    cfg.grid_min_lon = grid.min_lon;
    cfg.grid_max_lat = grid.max_lat;
    cfg.grid_max_lon = grid.max_lon;
    fs::create_directories(cfg.io_out_dir);
    const auto traces_path = fs::path(cfg.io_out_dir) / "traces.csv";
    const auto demo_path = fs::path(cfg.io_out_dir) / "demographics.csv";
    {
        std::ofstream t(traces_path), d(demo_path);
        if (!t || !d) throw DataError("cli.synth: cannot write output CSVs");
        write_traces_csv(t, ds.traces);
        write_demographics_csv(d, ds.demographics);
    }
    cfg.io_traces = traces_path.string();
    cfg.io_demographics = demo_path.string();
    write_snapshot(cfg);
    std::cout << "synth: wrote " << ds.traces.size() << " users to " << cfg.io_out_dir << "\n";
    return 0;
}

int cmd_entropy(const CommonOpts& opts, const std::string& out_path) {
    RunConfig cfg = resolve_config(opts);
    write_snapshot(cfg);
    Dataset ds = load_dataset(cfg, false);
    GridSpec grid = grid_of(cfg);
    auto sequences = entropy_sequences(ds, grid, cfg.entropy_config());

    std::ofstream file;
    std::ostream* out = &std::cout;
    if (!out_path.empty()) {
        file.open(out_path);
        if (!file) throw DataError("cli.entropy: cannot open " + out_path);
        out = &file;
    }
    *out << "user_id,slice_index,slice_start_iso,entropy_pct\n";
    char buf[40];
    for (const auto& [uid, seq] : sequences) {
        for (int t = 0; t < seq.spec.T; ++t) {
            *out << uid << ',' << t << ',' << epoch_to_iso(seq.spec.slice_start(t)) << ',';
            if (seq.values[t]) {
                std::snprintf(buf, sizeof(buf), "%.17g", *seq.values[t]);
                *out << buf;
            }
            *out << '\n';
        }
    }
    return 0;
}

void write_feature_csv(std::ostream& out, const FeatureTable& table) {
    out << "user_id,slice_index,entropy,max_distance_km,day_of_week,label\n";
    char buf[96];
    for (const auto& r : table.rows) {
        std::snprintf(buf, sizeof(buf), "%.17g,%.17g", r.entropy, r.max_distance_km);
        out << r.user_id << ',' << r.slice_index << ',' << buf << ',' << r.day_of_week << ','
            << table.levels[r.label] << '\n';
    }
}

int cmd_features(const CommonOpts& opts) {
    RunConfig cfg = resolve_config(opts);
    write_snapshot(cfg);
    Dataset ds = load_dataset(cfg, true);
    GridSpec grid = grid_of(cfg);
    auto sequences = entropy_sequences(ds, grid, cfg.entropy_config());
    for (Target target : targets_of(cfg)) {
        FeatureTable table = assemble_features(ds, sequences, target);
        for (const auto& w : table.warnings)
            std::cerr << "warning: features.assemble_features: " << w << "\n";
        const auto path =
            fs::path(cfg.io_out_dir) / ("features_" + target_name(target) + ".csv");
        std::ofstream out(path);
        if (!out) throw DataError("cli.features: cannot open " + path.string());
        write_feature_csv(out, table);
        std::cout << "features: " << table.rows.size() << " rows -> " << path.string() << "\n";
    }
    return 0;
}

int cmd_train(const CommonOpts& opts) {
    RunConfig cfg = resolve_config(opts);
    write_snapshot(cfg);
    Dataset ds = load_dataset(cfg, true);
    GridSpec grid = grid_of(cfg);
    auto sequences = entropy_sequences(ds, grid, cfg.entropy_config());
    for (Target target : targets_of(cfg)) {
        FeatureTable table = assemble_features(ds, sequences, target);
        MultiClassGam model = fit_multiclass(table, gam_config_of(cfg));
        model.config_fingerprint = config_fingerprint(cfg);
        const auto path = fs::path(cfg.io_out_dir) / ("model_" + target_name(target) + ".txt");
        save_model_file(path.string(), model);
        std::cout << "train: " << target_name(target) << " -> " << path.string() << "\n";
    }
    return 0;
}

int cmd_predict(const CommonOpts& opts, const std::string& model_path,
                const std::string& out_path) {
    RunConfig cfg = resolve_config(opts);
    write_snapshot(cfg);
    MultiClassGam model = load_model_file(model_path);
    Dataset ds = load_dataset(cfg, false);
    auto rows = prediction_rows(ds, cfg);

    std::ofstream file;
    std::ostream* out = &std::cout;
    if (!out_path.empty()) {
        file.open(out_path);
        if (!file) throw DataError("cli.predict: cannot open " + out_path);
        out = &file;
    }
    *out << "user_id,predicted";
    for (const auto& l : model.levels) *out << ",p_" << l;
    const bool binary = model.models.size() == 1;
    if (binary) *out << ",ci95_low,ci95_high";
    *out << '\n';
    char buf[40];
    for (const auto& [uid, user_rows] : rows) {
        if (user_rows.empty()) continue;
        auto pred = predict_user(model, user_rows, cfg.pipeline_aggregate);
        *out << uid << ',' << model.levels[pred.predicted];
        for (Eigen::Index i = 0; i < pred.probabilities.size(); ++i) {
            std::snprintf(buf, sizeof(buf), "%.17g", pred.probabilities(i));
            *out << ',' << buf;
        }
        if (binary) {
            // Mean of the per-slice interval bounds for the positive class.
            double lo = 0.0, hi = 0.0;
            for (const auto& r : user_rows) {
                auto ci = confidence_interval(model.models.front(), r, 0.95);
                lo += ci.lower;
                hi += ci.upper;
            }
            std::snprintf(buf, sizeof(buf), "%.17g", lo / user_rows.size());
            *out << ',' << buf;
            std::snprintf(buf, sizeof(buf), "%.17g", hi / user_rows.size());
            *out << ',' << buf;
        }
        *out << '\n';
    }
    return 0;
}

int cmd_evaluate(const CommonOpts& opts, int repeats) {
    RunConfig cfg = resolve_config(opts);
    write_snapshot(cfg);
    Dataset ds = load_dataset(cfg, true);
    for (Target target : targets_of(cfg)) {
        for (int r = 0; r < repeats; ++r) {
            const std::uint64_t seed = cfg.run_seed + static_cast<std::uint64_t>(r);
            EvaluationReport report = evaluate(ds, target, cfg, seed);
            std::string name = "evaluation_" + target_name(target);
            if (repeats > 1) name += "_seed" + std::to_string(seed);
            const auto path = fs::path(cfg.io_out_dir) / (name + ".txt");
            std::ofstream out(path);
            if (!out) throw DataError("cli.evaluate: cannot open " + path.string());
            out << report_to_string(report);
            save_model_file(
                (fs::path(cfg.io_out_dir) / ("model_" + target_name(target) + ".txt")).string(),
                report.model);
            std::cout << summary_line(report) << "\n";
        }
    }
    return 0;
}

}  // namespace

int run(int argc, const char* const* argv) {
    CLI::App app{"spatio-temporal entropy sequences + GAM demographic prediction"};
    app.require_subcommand(1);

    CommonOpts synth_opts, entropy_opts, features_opts, train_opts, predict_opts, eval_opts;
    std::string benchmark = "synth-a";
    int users_per_profile = 100, days = 60;
    std::string entropy_out, predict_model, predict_out;
    int repeats = 1;

    auto* synth = app.add_subcommand("synth", "generate a synthetic benchmark dataset");
    add_common(synth, synth_opts, false);
    synth->add_option("--benchmark", benchmark, "synth-a (2-class) or synth-3 (3-class)");
    synth->add_option("--users-per-profile", users_per_profile, "users per class profile");
    synth->add_option("--days", days, "observation days per user");

    auto* entropy = app.add_subcommand("entropy", "export per-user entropy sequences as CSV");
    add_common(entropy, entropy_opts, false);
    entropy->add_option("--out", entropy_out, "output CSV path (default stdout)");

    auto* features = app.add_subcommand("features", "export per-target covariate tables as CSV");
    add_common(features, features_opts);

    auto* train = app.add_subcommand("train", "fit and persist one model per target");
    add_common(train, train_opts);

    auto* predict = app.add_subcommand("predict", "predict demographics for unlabeled users");
    add_common(predict, predict_opts, false);
    predict->add_option("--model", predict_model, "model file from `train`")->required();
    predict->add_option("--out", predict_out, "output CSV path (default stdout)");

    auto* evaluate_cmd =
        app.add_subcommand("evaluate", "run the 90/10 split evaluation protocol");
    add_common(evaluate_cmd, eval_opts);
    evaluate_cmd->add_option("--repeats", repeats, "number of seeded repetitions");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 1;
    }

    try {
        if (synth->parsed()) return cmd_synth(synth_opts, benchmark, users_per_profile, days);
        if (entropy->parsed()) return cmd_entropy(entropy_opts, entropy_out);
        if (features->parsed()) return cmd_features(features_opts);
        if (train->parsed()) return cmd_train(train_opts);
        if (predict->parsed()) return cmd_predict(predict_opts, predict_model, predict_out);
        if (evaluate_cmd->parsed()) return cmd_evaluate(eval_opts, repeats);
    } catch (const UsageError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const NumericError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const DataError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 1;
}

}  // namespace stgam
