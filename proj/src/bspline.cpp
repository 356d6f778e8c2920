#include "stgam/bspline.hpp"

#include <algorithm>
#include <cmath>

#include "stgam/errors.hpp"

namespace stgam {

BSplineBasis make_bspline_basis_on_range(double x_min, double x_max, int basis_dim, int degree) {
    if (!(x_min < x_max))
        throw DataError("bspline.make_basis: need at least 2 distinct covariate values");
    if (degree < 1 || basis_dim < degree + 1)
        throw DataError("bspline.make_basis: basis_dim must be >= degree + 1");

    BSplineBasis b;
    b.degree = degree;
    const int interior = basis_dim - degree - 1;
    b.knots.reserve(basis_dim + degree + 1);
    for (int i = 0; i <= degree; ++i) b.knots.push_back(x_min);
    for (int i = 1; i <= interior; ++i)
        b.knots.push_back(x_min + (x_max - x_min) * i / (interior + 1));
    for (int i = 0; i <= degree; ++i) b.knots.push_back(x_max);
    return b;
}

BSplineBasis make_bspline_basis(std::span<const double> x, int basis_dim, int degree) {
    if (x.empty()) throw DataError("bspline.make_basis: empty covariate vector");
    auto [lo, hi] = std::minmax_element(x.begin(), x.end());
    return make_bspline_basis_on_range(*lo, *hi, basis_dim, degree);
}

Eigen::RowVectorXd bspline_row(const BSplineBasis& basis, double x) {
    const int p = basis.degree;
    const auto& t = basis.knots;
    const int k = basis.dim();
    x = std::clamp(x, basis.x_min(), basis.x_max());

    // Knot span index such that t[span] <= x < t[span+1], with the last
    // nondegenerate span owning x == x_max.
    int span = p;
    while (span < k - 1 && x >= t[span + 1]) ++span;

    // de Boor: N[0..p] are the p+1 nonzero basis values on this span.
    std::vector<double> N(p + 1, 0.0), left(p + 1), right(p + 1);
    N[0] = 1.0;
    for (int j = 1; j <= p; ++j) {
        left[j] = x - t[span + 1 - j];
        right[j] = t[span + j] - x;
        double saved = 0.0;
        for (int r = 0; r < j; ++r) {
            const double denom = right[r + 1] + left[j - r];
            const double temp = denom != 0.0 ? N[r] / denom : 0.0;
            N[r] = saved + right[r + 1] * temp;
            saved = left[j - r] * temp;
        }
        N[j] = saved;
    }

    Eigen::RowVectorXd row = Eigen::RowVectorXd::Zero(k);
    for (int r = 0; r <= p; ++r) row(span - p + r) = N[r];
    return row;
}

Eigen::MatrixXd bspline_design(const BSplineBasis& basis, const Eigen::VectorXd& x) {
    Eigen::MatrixXd out(x.size(), basis.dim());
    for (Eigen::Index i = 0; i < x.size(); ++i) out.row(i) = bspline_row(basis, x(i));
    return out;
}

std::vector<double> greville_abscissae(const BSplineBasis& basis) {
    const int k = basis.dim();
    std::vector<double> xi(k, 0.0);
    for (int i = 0; i < k; ++i) {
        for (int j = 1; j <= basis.degree; ++j) xi[i] += basis.knots[i + j];
        xi[i] /= basis.degree;
    }
    return xi;
}

Eigen::MatrixXd penalty_difference_matrix(const BSplineBasis& basis, int order) {
    const int k = basis.dim();
    std::vector<double> pts = greville_abscissae(basis);
    Eigen::MatrixXd d = Eigen::MatrixXd::Identity(k, k);
    // Mean knot spacing normalizes the scale so uniform interiors reproduce
    // the plain difference penalty.
    const double h = (basis.x_max() - basis.x_min()) / std::max(1, k - basis.degree);
    for (int o = 0; o < order; ++o) {
        const Eigen::Index rows = d.rows() - 1;
        Eigen::MatrixXd next(rows, k);
        std::vector<double> mid(rows);
        for (Eigen::Index r = 0; r < rows; ++r) {
            const double dx = pts[r + 1] - pts[r];
            next.row(r) = (d.row(r + 1) - d.row(r)) * (h / dx);
            mid[r] = 0.5 * (pts[r] + pts[r + 1]);
        }
        d = std::move(next);
        pts = std::move(mid);
    }
    return d;
}

Eigen::MatrixXd difference_matrix(int k, int order) {
    Eigen::MatrixXd d = Eigen::MatrixXd::Identity(k, k);
    for (int o = 0; o < order; ++o) {
        const Eigen::Index rows = d.rows() - 1;
        Eigen::MatrixXd next(rows, k);
        for (Eigen::Index r = 0; r < rows; ++r) next.row(r) = d.row(r + 1) - d.row(r);
        d = std::move(next);
    }
    return d;
}

}  // namespace stgam
