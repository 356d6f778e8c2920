#pragma once

#include <Eigen/Dense>
#include <iosfwd>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "stgam/bspline.hpp"
#include "stgam/features.hpp"

namespace stgam {

// A centered P-spline smooth: B-spline basis, sum-to-zero reparameterization
// Z (one dimension dropped against the training column means), and the
// order-d difference penalty mapped through Z.
struct SmoothTerm {
    std::string name;
    BSplineBasis basis;
    int penalty_order = 2;
    Eigen::MatrixXd center;        // Z, dim x (dim-1)
    Eigen::MatrixXd penalty;       // Z^T D^T D Z
    Eigen::MatrixXd penalty_sqrt;  // D Z, used for the augmented solve

    int cols() const { return basis.dim() - 1; }
};

struct FactorTerm {
    std::string name;
    int levels;  // dummy contrasts against level 0

    int cols() const { return levels - 1; }
};

// Logit/binomial additive model: intercept + factor dummies + centered smooths.
struct GamSpec {
    std::vector<FactorTerm> factors;
    std::vector<SmoothTerm> smooths;

    int n_cols() const;
    int factor_offset(std::size_t f) const;
    int smooth_offset(std::size_t s) const;
};

struct PirlsOptions {
    int max_iter = 100;
    double tol = 1e-8;
    double ridge = 1e-8;
};

struct PirlsFit {
    Eigen::VectorXd beta;
    Eigen::MatrixXd cov;  // (X^T W X + S_lambda)^-1
    double deviance = 0.0;
    double penalized_deviance = 0.0;
    double edf = 0.0;
    int iterations = 0;
    bool separation_warning = false;
    std::vector<double> objective_trace;  // penalized deviance per accepted step
};

SmoothTerm make_smooth_term(std::string name, BSplineBasis basis, int penalty_order,
                            const Eigen::MatrixXd& raw_training_design);

double binomial_deviance(const Eigen::VectorXd& y, const Eigen::VectorXd& mu);
double penalized_deviance(const GamSpec& spec, const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                          std::span<const double> lambdas, const Eigen::VectorXd& beta,
                          double ridge);
Eigen::VectorXd penalized_deviance_gradient(const GamSpec& spec, const Eigen::MatrixXd& X,
                                            const Eigen::VectorXd& y,
                                            std::span<const double> lambdas,
                                            const Eigen::VectorXd& beta, double ridge);

// Penalized IRLS for fixed smoothing parameters. The weighted step solves the
// augmented system (sqrt(W)X stacked on the penalty square roots) by
// column-pivoted QR; step halving keeps the penalized deviance non-increasing.
PirlsFit pirls_fit(const GamSpec& spec, const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                   std::span<const double> lambdas, const PirlsOptions& opt,
                   const Eigen::VectorXd* warm_start = nullptr);

struct GcvChoice {
    std::vector<double> lambdas;  // one per smooth term
    double gcv = 0.0;
    PirlsFit fit;
};

// Coordinate-wise grid search minimizing GCV = n*Dev/(n-edf)^2, two sweeps,
// ties broken toward the larger (smoother) lambda.
GcvChoice gcv_select(const GamSpec& spec, const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                     std::span<const double> grid, const PirlsOptions& opt);

struct GamConfig {
    int basis_dim = 10;
    int penalty_order = 2;
    std::vector<double> lambda_grid;  // shared per-term grid
    PirlsOptions pirls;
};

struct FittedGam {
    GamSpec spec;
    Eigen::VectorXd beta;
    std::vector<double> lambdas;
    Eigen::MatrixXd cov;
    double deviance = 0.0;
    double edf = 0.0;
    int positive_class = 1;  // index into MultiClassGam::levels
    bool separation_warning = false;
};

struct MultiClassGam {
    Target target = Target::Gender;
    std::vector<std::string> levels;
    std::vector<FittedGam> models;  // 1 for K=2, K one-vs-rest for K>2
    std::string config_fingerprint;
};

// Covariate layout of the demographic models: smooths over entropy and
// max_distance (a constant covariate drops its smooth), day-of-week factor.
GamSpec make_demographic_spec(std::span<const CovariateRow> rows, int basis_dim,
                              int penalty_order);
Eigen::MatrixXd demographic_design(const GamSpec& spec, std::span<const CovariateRow> rows);
Eigen::RowVectorXd demographic_design_row(const GamSpec& spec, const CovariateRow& row);

MultiClassGam fit_multiclass(const FeatureTable& table, const GamConfig& cfg);

// Probability vector over levels; sums to 1 and is strictly inside (0,1).
// Out-of-range covariates are clamped to the training range by the basis.
Eigen::VectorXd predict_proba(const MultiClassGam& model, const CovariateRow& row);

// Pointwise interval on the probability scale: inverse-logit of
// eta +/- z * se(eta), se from the Bayesian coefficient covariance.
struct ProbInterval {
    double point, lower, upper;
};
ProbInterval confidence_interval(const FittedGam& model, const GamSpec& spec,
                                 const CovariateRow& row, double level);
ProbInterval confidence_interval(const FittedGam& model, const CovariateRow& row, double level);

// Upper-tail standard normal quantile helpers.
double normal_quantile(double p);

void save_model(std::ostream& out, const MultiClassGam& model);
MultiClassGam load_model(std::istream& in);
void save_model_file(const std::string& path, const MultiClassGam& model);
MultiClassGam load_model_file(const std::string& path);

}  // namespace stgam
