#include "stgam/config.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include "stgam/errors.hpp"

namespace stgam {

namespace {

std::string trim(const std::string& s) {
    auto b = s.find_first_not_of(" \t\r");
    auto e = s.find_last_not_of(" \t\r");
    if (b == std::string::npos) return "";
    return s.substr(b, e - b + 1);
}

std::string fmt_real(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

double to_real(const std::string& key, const std::string& v) {
    try {
        std::size_t pos = 0;
        double x = std::stod(v, &pos);
        if (pos != v.size()) throw std::invalid_argument(v);
        return x;
    } catch (...) {
        throw UsageError("config: key '" + key + "' expects a number, got '" + v + "'");
    }
}

std::int64_t to_int(const std::string& key, const std::string& v) {
    try {
        std::size_t pos = 0;
        long long x = std::stoll(v, &pos);
        if (pos != v.size()) throw std::invalid_argument(v);
        return x;
    } catch (...) {
        throw UsageError("config: key '" + key + "' expects an integer, got '" + v + "'");
    }
}

struct KeySpec {
    std::string default_value;
    std::string doc;
    std::function<void(RunConfig&, const std::string&, const std::string&)> set;
    std::function<std::string(const RunConfig&)> get;
};

const std::map<std::string, KeySpec>& key_table() {
    static const std::map<std::string, KeySpec> table = {
        {"grid.min_lat",
         {"0", "grid bbox south edge, degrees",
          [](RunConfig& c, const std::string& k, const std::string& v) { c.grid_min_lat = to_real(k, v); },
          [](const RunConfig& c) { return fmt_real(c.grid_min_lat); }}},
        {"grid.min_lon",
         {"0", "grid bbox west edge, degrees",
          [](RunConfig& c, const std::string& k, const std::string& v) { c.grid_min_lon = to_real(k, v); },
          [](const RunConfig& c) { return fmt_real(c.grid_min_lon); }}},
        {"grid.max_lat",
         {"0", "grid bbox north edge, degrees",
          [](RunConfig& c, const std::string& k, const std::string& v) { c.grid_max_lat = to_real(k, v); },
          [](const RunConfig& c) { return fmt_real(c.grid_max_lat); }}},
        {"grid.max_lon",
         {"0", "grid bbox east edge, degrees",
          [](RunConfig& c, const std::string& k, const std::string& v) { c.grid_max_lon = to_real(k, v); },
          [](const RunConfig& c) { return fmt_real(c.grid_max_lon); }}},
        {"grid.cell_size_m",
         {"500", "grid cell edge length in meters",
          [](RunConfig& c, const std::string& k, const std::string& v) { c.grid_cell_size_m = to_real(k, v); },
          [](const RunConfig& c) { return fmt_real(c.grid_cell_size_m); }}},
        {"entropy.slice_seconds",
         {"86400", "time slice duration in seconds",
          [](RunConfig& c, const std::string& k, const std::string& v) { c.entropy_slice_seconds = to_int(k, v); },
          [](const RunConfig& c) { return std::to_string(c.entropy_slice_seconds); }}},
        {"entropy.max_gap_seconds",
         {"3600", "dwell attribution cap between consecutive fixes",
          [](RunConfig& c, const std::string& k, const std::string& v) { c.entropy_max_gap_seconds = to_int(k, v); },
          [](const RunConfig& c) { return std::to_string(c.entropy_max_gap_seconds); }}},
        {"entropy.proportion_mode",
         {"dwell", "cell time-proportion estimator: dwell|count",
          [](RunConfig& c, const std::string& k, const std::string& v) {
              if (v == "dwell") c.entropy_mode = ProportionMode::Dwell;
              else if (v == "count") c.entropy_mode = ProportionMode::Count;
              else throw UsageError("config: key '" + k + "' expects dwell|count, got '" + v + "'");
          },
          [](const RunConfig& c) {
              return std::string(c.entropy_mode == ProportionMode::Dwell ? "dwell" : "count");
          }}},
        {"entropy.alignment",
         {"midnight_utc", "slice origin: midnight_utc|first_fix",
          [](RunConfig& c, const std::string& k, const std::string& v) {
              if (v == "midnight_utc") c.entropy_alignment = Alignment::MidnightUtc;
              else if (v == "first_fix") c.entropy_alignment = Alignment::FirstFix;
              else
                  throw UsageError("config: key '" + k + "' expects midnight_utc|first_fix, got '" +
                                   v + "'");
          },
          [](const RunConfig& c) {
              return std::string(c.entropy_alignment == Alignment::MidnightUtc ? "midnight_utc"
                                                                               : "first_fix");
          }}},
        {"gam.basis_dim",
         {"10", "B-spline basis functions per smooth term",
          [](RunConfig& c, const std::string& k, const std::string& v) { c.gam_basis_dim = static_cast<int>(to_int(k, v)); },
          [](const RunConfig& c) { return std::to_string(c.gam_basis_dim); }}},
        {"gam.penalty_order",
         {"2", "difference penalty order",
          [](RunConfig& c, const std::string& k, const std::string& v) { c.gam_penalty_order = static_cast<int>(to_int(k, v)); },
          [](const RunConfig& c) { return std::to_string(c.gam_penalty_order); }}},
        {"gam.lambda_grid_log10",
         {"-3:3:13", "smoothing grid as log10_min:log10_max:points",
          [](RunConfig& c, const std::string& k, const std::string& v) {
              std::istringstream ss(v);
              std::string a, b, n;
              if (!std::getline(ss, a, ':') || !std::getline(ss, b, ':') || !std::getline(ss, n))
                  throw UsageError("config: key '" + k + "' expects min:max:points, got '" + v + "'");
              c.gam_lambda_log10_min = to_real(k, trim(a));
              c.gam_lambda_log10_max = to_real(k, trim(b));
              c.gam_lambda_grid_points = static_cast<int>(to_int(k, trim(n)));
              if (c.gam_lambda_grid_points < 1)
                  throw UsageError("config: key '" + k + "' needs at least 1 grid point");
          },
          [](const RunConfig& c) {
              return fmt_real(c.gam_lambda_log10_min) + ":" + fmt_real(c.gam_lambda_log10_max) +
                     ":" + std::to_string(c.gam_lambda_grid_points);
          }}},
        {"gam.max_iter",
         {"100", "P-IRLS iteration cap",
          [](RunConfig& c, const std::string& k, const std::string& v) { c.gam_max_iter = static_cast<int>(to_int(k, v)); },
          [](const RunConfig& c) { return std::to_string(c.gam_max_iter); }}},
        {"gam.tol",
         {"1e-08", "P-IRLS relative penalized-deviance tolerance",
          [](RunConfig& c, const std::string& k, const std::string& v) { c.gam_tol = to_real(k, v); },
          [](const RunConfig& c) { return fmt_real(c.gam_tol); }}},
        {"pipeline.aggregate",
         {"mean", "per-user aggregation of slice probabilities: mean|vote",
          [](RunConfig& c, const std::string& k, const std::string& v) {
              if (v == "mean") c.pipeline_aggregate = Aggregate::MeanProb;
              else if (v == "vote") c.pipeline_aggregate = Aggregate::Vote;
              else throw UsageError("config: key '" + k + "' expects mean|vote, got '" + v + "'");
          },
          [](const RunConfig& c) {
              return std::string(c.pipeline_aggregate == Aggregate::MeanProb ? "mean" : "vote");
          }}},
        {"io.traces",
         {"", "trace CSV path",
          [](RunConfig& c, const std::string&, const std::string& v) { c.io_traces = v; },
          [](const RunConfig& c) { return c.io_traces; }}},
        {"io.demographics",
         {"", "demographics CSV path",
          [](RunConfig& c, const std::string&, const std::string& v) { c.io_demographics = v; },
          [](const RunConfig& c) { return c.io_demographics; }}},
        {"io.out_dir",
         {".", "output directory",
          [](RunConfig& c, const std::string&, const std::string& v) { c.io_out_dir = v; },
          [](const RunConfig& c) { return c.io_out_dir; }}},
        {"run.seed",
         {"42", "RNG seed for splits and synthesis",
          [](RunConfig& c, const std::string& k, const std::string& v) {
              c.run_seed = static_cast<std::uint64_t>(to_int(k, v));
          },
          [](const RunConfig& c) { return std::to_string(c.run_seed); }}},
        {"run.target",
         {"all", "demographic target: gender|age_group|working_profile|all",
          [](RunConfig& c, const std::string& k, const std::string& v) {
              if (v != "all" && !target_from_name(v))
                  throw UsageError("config: key '" + k + "' expects a demographic target, got '" +
                                   v + "'");
              c.run_target = v;
          },
          [](const RunConfig& c) { return c.run_target; }}},
    };
    return table;
}

}  // namespace

std::vector<double> RunConfig::lambda_grid() const {
    std::vector<double> grid;
    grid.reserve(gam_lambda_grid_points);
    if (gam_lambda_grid_points == 1) {
        grid.push_back(std::pow(10.0, gam_lambda_log10_min));
        return grid;
    }
    for (int i = 0; i < gam_lambda_grid_points; ++i) {
        double lg = gam_lambda_log10_min + (gam_lambda_log10_max - gam_lambda_log10_min) * i /
                                               (gam_lambda_grid_points - 1);
        grid.push_back(std::pow(10.0, lg));
    }
    return grid;
}

void apply_override(RunConfig& cfg, const std::string& key, const std::string& value) {
    auto it = key_table().find(key);
    if (it == key_table().end()) throw UsageError("config: unknown key '" + key + "'");
    it->second.set(cfg, key, value);
}

RunConfig parse_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw UsageError("config: cannot open " + path);
    RunConfig cfg;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        auto t = trim(line);
        if (t.empty() || t[0] == '#') continue;
        auto eq = t.find('=');
        if (eq == std::string::npos)
            throw UsageError("config: " + path + ":" + std::to_string(lineno) +
                             ": expected key = value");
        apply_override(cfg, trim(t.substr(0, eq)), trim(t.substr(eq + 1)));
    }
    return cfg;
}

std::string config_to_string(const RunConfig& cfg) {
    std::ostringstream out;
    for (const auto& [key, spec] : key_table()) out << key << " = " << spec.get(cfg) << "\n";
    return out.str();
}

std::string config_fingerprint(const RunConfig& cfg) {
    const std::string s = config_to_string(cfg);
    std::uint64_t h = 14695981039346656037ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ull;
    }
    char buf[20];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

std::string config_keys_help() {
    std::ostringstream out;
    for (const auto& [key, spec] : key_table())
        out << "  " << key << " (default: " << spec.default_value << "): " << spec.doc << "\n";
    return out.str();
}

}  // namespace stgam
