#pragma once

#include <Eigen/Dense>
#include <span>
#include <vector>

namespace stgam {

// Clamped B-spline basis with equally spaced interior knots over the observed
// covariate range. basis_dim = interior knots + degree + 1.
struct BSplineBasis {
    int degree = 3;
    std::vector<double> knots;  // boundary knots repeated degree+1 times

    int dim() const { return static_cast<int>(knots.size()) - degree - 1; }
    double x_min() const { return knots.front(); }
    double x_max() const { return knots.back(); }
};

// Throws when x has fewer than 2 distinct values or basis_dim < degree + 1.
BSplineBasis make_bspline_basis(std::span<const double> x, int basis_dim, int degree = 3);

BSplineBasis make_bspline_basis_on_range(double x_min, double x_max, int basis_dim,
                                         int degree = 3);

// One row of the design matrix via the Cox-de Boor recursion; x is clamped to
// [x_min, x_max]. Rows sum to 1 and have at most degree+1 nonzeros.
Eigen::RowVectorXd bspline_row(const BSplineBasis& basis, double x);

Eigen::MatrixXd bspline_design(const BSplineBasis& basis, const Eigen::VectorXd& x);

// Order-d difference matrix over k coefficients, (k-d) x k. The P-spline
// penalty is D^T D.
Eigen::MatrixXd difference_matrix(int k, int order);

// Greville abscissae: xi_i = mean(knots[i+1 .. i+degree]). Coefficients affine
// in xi produce an affine spline.
std::vector<double> greville_abscissae(const BSplineBasis& basis);

// Divided-difference penalty root over the Greville abscissae. With clamped
// boundary knots the plain index differences would penalize affine functions
// near the boundary; dividing by the xi spacings keeps the order-2 null space
// exactly affine.
Eigen::MatrixXd penalty_difference_matrix(const BSplineBasis& basis, int order);

}  // namespace stgam
