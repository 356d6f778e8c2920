#include "stgam/gam.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>

#include "stgam/errors.hpp"

namespace stgam {

namespace {

constexpr double kEtaSeparation = 15.0;
constexpr double kMuFloor = 1e-12;

double sigmoid(double eta) { return 1.0 / (1.0 + std::exp(-eta)); }

Eigen::VectorXd mu_from_eta(const Eigen::VectorXd& eta) {
    Eigen::VectorXd mu(eta.size());
    for (Eigen::Index i = 0; i < eta.size(); ++i)
        mu(i) = std::clamp(sigmoid(eta(i)), kMuFloor, 1.0 - kMuFloor);
    return mu;
}

// Null space of the row vector c, via the full Householder Q of c^T.
Eigen::MatrixXd null_space_of(const Eigen::RowVectorXd& c) {
    const Eigen::Index k = c.size();
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(c.transpose());
    Eigen::MatrixXd q = qr.householderQ();
    return q.rightCols(k - 1);
}

}  // namespace

SmoothTerm make_smooth_term(std::string name, BSplineBasis basis, int penalty_order,
                            const Eigen::MatrixXd& training_design) {
    SmoothTerm term;
    term.name = std::move(name);
    term.basis = std::move(basis);
    term.penalty_order = penalty_order;
    Eigen::RowVectorXd means = training_design.colwise().mean();
    term.center = null_space_of(means);
    Eigen::MatrixXd d = penalty_difference_matrix(term.basis, penalty_order);
    term.penalty_sqrt = d * term.center;
    term.penalty = term.penalty_sqrt.transpose() * term.penalty_sqrt;
    return term;
}

namespace {

void rebuild_smooth_penalty(SmoothTerm& term) {
    Eigen::MatrixXd d = penalty_difference_matrix(term.basis, term.penalty_order);
    term.penalty_sqrt = d * term.center;
    term.penalty = term.penalty_sqrt.transpose() * term.penalty_sqrt;
}

Eigen::MatrixXd total_penalty(const GamSpec& spec, std::span<const double> lambdas,
                              double ridge) {
    const int p = spec.n_cols();
    Eigen::MatrixXd s = ridge * Eigen::MatrixXd::Identity(p, p);
    for (std::size_t k = 0; k < spec.smooths.size(); ++k) {
        const int off = spec.smooth_offset(k);
        const int w = spec.smooths[k].cols();
        s.block(off, off, w, w) += lambdas[k] * spec.smooths[k].penalty;
    }
    return s;
}

}  // namespace

int GamSpec::n_cols() const {
    int p = 1;
    for (const auto& f : factors) p += f.cols();
    for (const auto& s : smooths) p += s.cols();
    return p;
}

int GamSpec::factor_offset(std::size_t f) const {
    int off = 1;
    for (std::size_t i = 0; i < f; ++i) off += factors[i].cols();
    return off;
}

int GamSpec::smooth_offset(std::size_t s) const {
    int off = 1;
    for (const auto& f : factors) off += f.cols();
    for (std::size_t i = 0; i < s; ++i) off += smooths[i].cols();
    return off;
}

double binomial_deviance(const Eigen::VectorXd& y, const Eigen::VectorXd& mu) {
    double dev = 0.0;
    for (Eigen::Index i = 0; i < y.size(); ++i) {
        const double m = std::clamp(mu(i), kMuFloor, 1.0 - kMuFloor);
        dev += y(i) > 0.5 ? -2.0 * std::log(m) : -2.0 * std::log1p(-m);
    }
    return dev;
}

double penalized_deviance(const GamSpec& spec, const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                          std::span<const double> lambdas, const Eigen::VectorXd& beta,
                          double ridge) {
    Eigen::VectorXd mu = mu_from_eta(X * beta);
    double pen = ridge * beta.squaredNorm();
    for (std::size_t k = 0; k < spec.smooths.size(); ++k) {
        const int off = spec.smooth_offset(k);
        const int w = spec.smooths[k].cols();
        Eigen::VectorXd b = beta.segment(off, w);
        pen += lambdas[k] * b.dot(spec.smooths[k].penalty * b);
    }
    return binomial_deviance(y, mu) + pen;
}

Eigen::VectorXd penalized_deviance_gradient(const GamSpec& spec, const Eigen::MatrixXd& X,
                                            const Eigen::VectorXd& y,
                                            std::span<const double> lambdas,
                                            const Eigen::VectorXd& beta, double ridge) {
    Eigen::VectorXd mu = mu_from_eta(X * beta);
    Eigen::VectorXd g = -2.0 * (X.transpose() * (y - mu));
    g += 2.0 * ridge * beta;
    for (std::size_t k = 0; k < spec.smooths.size(); ++k) {
        const int off = spec.smooth_offset(k);
        const int w = spec.smooths[k].cols();
        g.segment(off, w) += 2.0 * lambdas[k] * (spec.smooths[k].penalty * beta.segment(off, w));
    }
    return g;
}

PirlsFit pirls_fit(const GamSpec& spec, const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                   std::span<const double> lambdas, const PirlsOptions& opt,
                   const Eigen::VectorXd* warm_start) {
    const Eigen::Index n = X.rows();
    const int p = spec.n_cols();
    if (X.cols() != p) throw NumericError("gam.pirls_fit: design/spec column mismatch");
    if (lambdas.size() != spec.smooths.size())
        throw NumericError("gam.pirls_fit: one lambda per smooth term required");
    const double ybar = y.mean();
    if (ybar <= 0.0 || ybar >= 1.0)
        throw DataError("gam.pirls_fit: response needs at least one observation of each class");

    // Augmented rows: per-smooth sqrt(lambda)*penalty_sqrt plus a ridge block.
    int pen_rows = p;
    for (const auto& s : spec.smooths) pen_rows += static_cast<int>(s.penalty_sqrt.rows());

    Eigen::VectorXd beta = Eigen::VectorXd::Zero(p);
    if (warm_start && warm_start->size() == p) {
        beta = *warm_start;
    } else {
        beta(0) = std::log(ybar / (1.0 - ybar));
    }

    double pdev = penalized_deviance(spec, X, y, lambdas, beta, opt.ridge);
    std::vector<double> trace{pdev};

    Eigen::MatrixXd a(n + pen_rows, p);
    Eigen::VectorXd b(n + pen_rows);
    {
        Eigen::Index r = n;
        for (std::size_t k = 0; k < spec.smooths.size(); ++k) {
            const auto& s = spec.smooths[k];
            const Eigen::Index rows = s.penalty_sqrt.rows();
            a.block(r, 0, rows, p).setZero();
            a.block(r, spec.smooth_offset(k), rows, s.cols()) =
                std::sqrt(lambdas[k]) * s.penalty_sqrt;
            r += rows;
        }
        a.block(r, 0, p, p) = std::sqrt(opt.ridge) * Eigen::MatrixXd::Identity(p, p);
        b.tail(pen_rows).setZero();
    }

    bool converged = false;
    int iter = 0;
    for (; iter < opt.max_iter; ++iter) {
        Eigen::VectorXd eta = X * beta;
        Eigen::VectorXd mu = mu_from_eta(eta);
        Eigen::VectorXd w(n), z(n);
        for (Eigen::Index i = 0; i < n; ++i) {
            w(i) = std::max(mu(i) * (1.0 - mu(i)), 1e-10);
            z(i) = eta(i) + (y(i) - mu(i)) / w(i);
        }
        Eigen::VectorXd sw = w.array().sqrt();
        a.topRows(n) = sw.asDiagonal() * X;
        b.head(n) = sw.cwiseProduct(z);

        Eigen::VectorXd proposal = a.colPivHouseholderQr().solve(b);

        // Step halving keeps the penalized deviance monotone.
        Eigen::VectorXd step = proposal - beta;
        double alpha = 1.0;
        double new_pdev = penalized_deviance(spec, X, y, lambdas, beta + step, opt.ridge);
        int halvings = 0;
        while (new_pdev > pdev + 1e-12 && halvings < 30) {
            alpha *= 0.5;
            ++halvings;
            new_pdev = penalized_deviance(spec, X, y, lambdas, beta + alpha * step, opt.ridge);
        }
        if (new_pdev > pdev + 1e-12) {
            converged = true;  // no descent direction left
            break;
        }
        beta += alpha * step;
        trace.push_back(new_pdev);
        const double rel = std::abs(pdev - new_pdev) / (std::abs(new_pdev) + 0.1);
        pdev = new_pdev;
        if (rel < opt.tol) {
            converged = true;
            ++iter;
            break;
        }
    }
    if (!converged) {
        std::ostringstream msg;
        msg << "gam.pirls_fit: no convergence after " << opt.max_iter
            << " iterations; penalized deviance trace:";
        msg << std::setprecision(10);
        for (double d : trace) msg << ' ' << d;
        throw NumericError(msg.str());
    }

    PirlsFit fit;
    fit.beta = beta;
    fit.iterations = iter;
    fit.objective_trace = trace;
    Eigen::VectorXd eta = X * beta;
    Eigen::VectorXd mu = mu_from_eta(eta);
    fit.deviance = binomial_deviance(y, mu);
    fit.penalized_deviance = pdev;
    fit.separation_warning = (eta.cwiseAbs().minCoeff() > kEtaSeparation);

    Eigen::VectorXd w(n);
    for (Eigen::Index i = 0; i < n; ++i) w(i) = std::max(mu(i) * (1.0 - mu(i)), 1e-10);
    Eigen::MatrixXd xtwx = X.transpose() * w.asDiagonal() * X;
    Eigen::MatrixXd m = xtwx + total_penalty(spec, lambdas, opt.ridge);
    Eigen::LDLT<Eigen::MatrixXd> ldlt(m);
    fit.cov = ldlt.solve(Eigen::MatrixXd::Identity(p, p));
    fit.edf = (ldlt.solve(xtwx)).trace();
    return fit;
}

GcvChoice gcv_select(const GamSpec& spec, const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                     std::span<const double> grid, const PirlsOptions& opt) {
    if (grid.empty()) throw NumericError("gam.gcv_select: empty lambda grid");
    const auto n = static_cast<double>(X.rows());
    const std::size_t n_terms = spec.smooths.size();

    auto gcv_of = [&](const PirlsFit& f) {
        const double denom = n - f.edf;
        return n * f.deviance / (denom * denom);
    };

    // Start in the middle of the grid.
    std::vector<double> lambdas(n_terms, grid[grid.size() / 2]);

    GcvChoice best;
    bool any_converged = false;
    Eigen::VectorXd warm;
    {
        try {
            best.fit = pirls_fit(spec, X, y, lambdas, opt);
            best.lambdas = lambdas;
            best.gcv = gcv_of(best.fit);
            warm = best.fit.beta;
            any_converged = true;
        } catch (const NumericError&) {
            best.gcv = std::numeric_limits<double>::infinity();
        }
    }
    if (n_terms == 0) {
        if (!any_converged) throw NumericError("gam.gcv_select: fit failed to converge");
        return best;
    }

    for (int sweep = 0; sweep < 2; ++sweep) {
        for (std::size_t k = 0; k < n_terms; ++k) {
            // Descending grid with strict improvement: exact ties keep the
            // larger (smoother) lambda.
            for (std::size_t gi = grid.size(); gi-- > 0;) {
                std::vector<double> cand = best.lambdas.empty() ? lambdas : best.lambdas;
                cand[k] = grid[gi];
                try {
                    PirlsFit f = pirls_fit(spec, X, y, cand, opt,
                                           warm.size() > 0 ? &warm : nullptr);
                    any_converged = true;
                    warm = f.beta;
                    const double g = gcv_of(f);
                    if (g < best.gcv) {
                        best.gcv = g;
                        best.lambdas = cand;
                        best.fit = std::move(f);
                    }
                } catch (const NumericError&) {
                    continue;
                }
            }
        }
    }
    if (!any_converged)
        throw NumericError("gam.gcv_select: every candidate lambda failed to converge");
    return best;
}

GamSpec make_demographic_spec(std::span<const CovariateRow> rows, int basis_dim,
                              int penalty_order) {
    if (rows.empty()) throw DataError("gam.make_demographic_spec: no rows");
    GamSpec spec;
    spec.factors.push_back({"day_of_week", 7});

    auto add_smooth = [&](const std::string& name, auto getter) {
        Eigen::VectorXd x(rows.size());
        for (std::size_t i = 0; i < rows.size(); ++i) x(i) = getter(rows[i]);
        if (x.maxCoeff() - x.minCoeff() <= 0.0) return;  // constant covariate: no smooth
        auto basis = make_bspline_basis(std::span<const double>(x.data(), x.size()), basis_dim);
        Eigen::MatrixXd design = bspline_design(basis, x);
        spec.smooths.push_back(make_smooth_term(name, std::move(basis), penalty_order, design));
    };
    add_smooth("entropy", [](const CovariateRow& r) { return r.entropy; });
    add_smooth("max_distance", [](const CovariateRow& r) { return r.max_distance_km; });
    return spec;
}

Eigen::RowVectorXd demographic_design_row(const GamSpec& spec, const CovariateRow& row) {
    Eigen::RowVectorXd out = Eigen::RowVectorXd::Zero(spec.n_cols());
    out(0) = 1.0;
    for (std::size_t f = 0; f < spec.factors.size(); ++f) {
        const int level = row.day_of_week;
        if (level > 0) out(spec.factor_offset(f) + level - 1) = 1.0;
    }
    for (std::size_t s = 0; s < spec.smooths.size(); ++s) {
        const auto& term = spec.smooths[s];
        const double x = term.name == "entropy" ? row.entropy : row.max_distance_km;
        out.segment(spec.smooth_offset(s), term.cols()) = bspline_row(term.basis, x) * term.center;
    }
    return out;
}

Eigen::MatrixXd demographic_design(const GamSpec& spec, std::span<const CovariateRow> rows) {
    Eigen::MatrixXd x(rows.size(), spec.n_cols());
    for (std::size_t i = 0; i < rows.size(); ++i) x.row(i) = demographic_design_row(spec, rows[i]);
    return x;
}

MultiClassGam fit_multiclass(const FeatureTable& table, const GamConfig& cfg) {
    const std::size_t k_classes = table.levels.size();
    std::vector<std::size_t> counts(k_classes, 0);
    for (const auto& r : table.rows) ++counts[r.label];
    for (std::size_t k = 0; k < k_classes; ++k)
        if (counts[k] == 0)
            throw DataError("gam.fit_multiclass: class " + table.levels[k] + " has no rows");

    GamSpec spec = make_demographic_spec(table.rows, cfg.basis_dim, cfg.penalty_order);
    Eigen::MatrixXd x = demographic_design(spec, table.rows);

    MultiClassGam model;
    model.target = table.target;
    model.levels = table.levels;

    auto fit_one = [&](int positive) {
        Eigen::VectorXd y(table.rows.size());
        for (std::size_t i = 0; i < table.rows.size(); ++i)
            y(i) = table.rows[i].label == positive ? 1.0 : 0.0;
        GcvChoice choice = gcv_select(spec, x, y, cfg.lambda_grid, cfg.pirls);
        FittedGam g;
        g.spec = spec;
        g.beta = choice.fit.beta;
        g.lambdas = choice.lambdas;
        g.cov = choice.fit.cov;
        g.deviance = choice.fit.deviance;
        g.edf = choice.fit.edf;
        g.positive_class = positive;
        g.separation_warning = choice.fit.separation_warning;
        return g;
    };

    if (k_classes == 2) {
        model.models.push_back(fit_one(1));
    } else {
        for (std::size_t k = 0; k < k_classes; ++k)
            model.models.push_back(fit_one(static_cast<int>(k)));
    }
    return model;
}

Eigen::VectorXd predict_proba(const MultiClassGam& model, const CovariateRow& row) {
    const auto k = static_cast<Eigen::Index>(model.levels.size());
    Eigen::VectorXd probs(k);
    constexpr double floor = 1e-15;
    if (model.models.size() == 1) {
        const auto& m = model.models.front();
        const double eta = demographic_design_row(m.spec, row).dot(m.beta);
        const double p = std::clamp(sigmoid(eta), floor, 1.0 - floor);
        probs(1 - m.positive_class) = 1.0 - p;
        probs(m.positive_class) = p;
        return probs;
    }
    for (const auto& m : model.models) {
        const double eta = demographic_design_row(m.spec, row).dot(m.beta);
        probs(m.positive_class) = std::clamp(sigmoid(eta), floor, 1.0 - floor);
    }
    probs /= probs.sum();
    for (Eigen::Index i = 0; i < k; ++i) probs(i) = std::clamp(probs(i), floor, 1.0 - floor);
    return probs / probs.sum();
}

double normal_quantile(double p) {
    // Acklam's rational approximation, |relative error| < 1.15e-9.
    if (!(p > 0.0 && p < 1.0)) throw NumericError("gam.normal_quantile: p outside (0,1)");
    static const double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                               -2.759285104469687e+02, 1.383577518672690e+02,
                               -3.066479806614716e+01, 2.506628277459239e+00};
    static const double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                               -1.556989798598866e+02, 6.680131188771972e+01,
                               -1.328068155288572e+01};
    static const double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                               -2.400758277161838e+00, -2.549732539343734e+00,
                               4.374664141464968e+00,  2.938163982698783e+00};
    static const double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                               2.445134137142996e+00, 3.754408661907416e+00};
    const double plow = 0.02425;
    double q, r;
    if (p < plow) {
        q = std::sqrt(-2.0 * std::log(p));
        return (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
               ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    }
    if (p > 1.0 - plow) {
        q = std::sqrt(-2.0 * std::log(1.0 - p));
        return -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
               ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    }
    q = p - 0.5;
    r = q * q;
    return (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
           (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
}

ProbInterval confidence_interval(const FittedGam& model, const GamSpec& spec,
                                 const CovariateRow& row, double level) {
    if (!(level > 0.0 && level < 1.0))
        throw NumericError("gam.confidence_interval: level outside (0,1)");
    Eigen::RowVectorXd x = demographic_design_row(spec, row);
    const double eta = x.dot(model.beta);
    const double var = std::max(0.0, (x * model.cov * x.transpose())(0, 0));
    const double se = std::sqrt(var);
    const double z = normal_quantile(0.5 * (1.0 + level));
    auto inside = [](double p) { return std::clamp(p, 1e-15, 1.0 - 1e-15); };
    return {inside(sigmoid(eta)), inside(sigmoid(eta - z * se)), inside(sigmoid(eta + z * se))};
}

ProbInterval confidence_interval(const FittedGam& model, const CovariateRow& row, double level) {
    return confidence_interval(model, model.spec, row, level);
}

namespace {

void expect_token(std::istream& in, const std::string& want, const char* where) {
    std::string got;
    if (!(in >> got) || got != want)
        throw DataError(std::string("gam.load_model: expected '") + want + "' " + where +
                        ", got '" + got + "'");
}

void write_matrix(std::ostream& out, const Eigen::MatrixXd& m) {
    out << m.rows() << ' ' << m.cols() << '\n';
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        for (Eigen::Index c = 0; c < m.cols(); ++c) out << (c ? " " : "") << m(r, c);
        out << '\n';
    }
}

Eigen::MatrixXd read_matrix(std::istream& in) {
    Eigen::Index rows, cols;
    if (!(in >> rows >> cols)) throw DataError("gam.load_model: bad matrix header");
    Eigen::MatrixXd m(rows, cols);
    for (Eigen::Index r = 0; r < rows; ++r)
        for (Eigen::Index c = 0; c < cols; ++c)
            if (!(in >> m(r, c))) throw DataError("gam.load_model: truncated matrix");
    return m;
}

}  // namespace

void save_model(std::ostream& out, const MultiClassGam& model) {
    out << std::setprecision(17);
    out << "stgam_model 1\n";
    out << "target " << target_name(model.target) << '\n';
    out << "config_fingerprint "
        << (model.config_fingerprint.empty() ? "none" : model.config_fingerprint) << '\n';
    out << "levels " << model.levels.size();
    for (const auto& l : model.levels) out << ' ' << l;
    out << '\n';
    out << "models " << model.models.size() << '\n';
    for (std::size_t i = 0; i < model.models.size(); ++i) {
        const auto& m = model.models[i];
        out << "model " << i << '\n';
        out << "positive_class " << m.positive_class << '\n';
        out << "separation_warning " << (m.separation_warning ? 1 : 0) << '\n';
        out << "deviance " << m.deviance << '\n';
        out << "edf " << m.edf << '\n';
        out << "lambdas " << m.lambdas.size();
        for (double l : m.lambdas) out << ' ' << l;
        out << '\n';
        out << "factors " << m.spec.factors.size() << '\n';
        for (const auto& f : m.spec.factors) out << "factor " << f.name << ' ' << f.levels << '\n';
        out << "smooths " << m.spec.smooths.size() << '\n';
        for (const auto& s : m.spec.smooths) {
            out << "smooth " << s.name << '\n';
            out << "degree " << s.basis.degree << '\n';
            out << "penalty_order " << s.penalty_order << '\n';
            out << "knots " << s.basis.knots.size();
            for (double k : s.basis.knots) out << ' ' << k;
            out << '\n';
            out << "center ";
            write_matrix(out, s.center);
        }
        out << "beta " << m.beta.size();
        for (Eigen::Index j = 0; j < m.beta.size(); ++j) out << ' ' << m.beta(j);
        out << '\n';
        out << "cov ";
        write_matrix(out, m.cov);
        out << "end_model\n";
    }
    out << "end\n";
}

MultiClassGam load_model(std::istream& in) {
    expect_token(in, "stgam_model", "at header");
    int version;
    if (!(in >> version) || version != 1)
        throw DataError("gam.load_model: unsupported model version");

    MultiClassGam model;
    expect_token(in, "target", "after header");
    std::string tname;
    in >> tname;
    auto target = target_from_name(tname);
    if (!target) throw DataError("gam.load_model: unknown target " + tname);
    model.target = *target;

    expect_token(in, "config_fingerprint", "after target");
    in >> model.config_fingerprint;
    if (model.config_fingerprint == "none") model.config_fingerprint.clear();

    expect_token(in, "levels", "after fingerprint");
    std::size_t k;
    in >> k;
    model.levels.resize(k);
    for (auto& l : model.levels) in >> l;

    expect_token(in, "models", "after levels");
    std::size_t n_models;
    in >> n_models;
    for (std::size_t i = 0; i < n_models; ++i) {
        expect_token(in, "model", "at model block");
        std::size_t idx;
        in >> idx;
        FittedGam m;
        expect_token(in, "positive_class", "in model");
        in >> m.positive_class;
        expect_token(in, "separation_warning", "in model");
        int sw;
        in >> sw;
        m.separation_warning = sw != 0;
        expect_token(in, "deviance", "in model");
        in >> m.deviance;
        expect_token(in, "edf", "in model");
        in >> m.edf;
        expect_token(in, "lambdas", "in model");
        std::size_t nl;
        in >> nl;
        m.lambdas.resize(nl);
        for (auto& l : m.lambdas) in >> l;
        expect_token(in, "factors", "in model");
        std::size_t nf;
        in >> nf;
        for (std::size_t f = 0; f < nf; ++f) {
            expect_token(in, "factor", "in factors");
            FactorTerm ft;
            in >> ft.name >> ft.levels;
            m.spec.factors.push_back(std::move(ft));
        }
        expect_token(in, "smooths", "in model");
        std::size_t ns;
        in >> ns;
        for (std::size_t s = 0; s < ns; ++s) {
            expect_token(in, "smooth", "in smooths");
            SmoothTerm st;
            in >> st.name;
            expect_token(in, "degree", "in smooth");
            in >> st.basis.degree;
            expect_token(in, "penalty_order", "in smooth");
            in >> st.penalty_order;
            expect_token(in, "knots", "in smooth");
            std::size_t nk;
            in >> nk;
            st.basis.knots.resize(nk);
            for (auto& kn : st.basis.knots) in >> kn;
            expect_token(in, "center", "in smooth");
            st.center = read_matrix(in);
            rebuild_smooth_penalty(st);
            m.spec.smooths.push_back(std::move(st));
        }
        expect_token(in, "beta", "in model");
        Eigen::Index nb;
        in >> nb;
        m.beta.resize(nb);
        for (Eigen::Index j = 0; j < nb; ++j) in >> m.beta(j);
        expect_token(in, "cov", "in model");
        m.cov = read_matrix(in);
        expect_token(in, "end_model", "after model");
        if (!in) throw DataError("gam.load_model: truncated model file");
        model.models.push_back(std::move(m));
    }
    expect_token(in, "end", "at footer");
    return model;
}

void save_model_file(const std::string& path, const MultiClassGam& model) {
    std::ofstream out(path);
    if (!out) throw DataError("gam.save_model: cannot open " + path);
    save_model(out, model);
}

MultiClassGam load_model_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("gam.load_model: cannot open " + path);
    return load_model(in);
}

}  // namespace stgam
