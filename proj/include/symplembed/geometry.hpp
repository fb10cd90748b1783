#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <stdexcept>
#include <string>

namespace symplembed {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

// Coordinates are ordered (x1, y1, x2, y2, ..., xn, yn).
struct PointChart {
    enum class Kind { Flat, TorusQuotient };
    Kind kind = Kind::Flat;
    double latticeScale = 0.0;  // quotient lattice is latticeScale * Z^2 on the leading plane
};

struct Point {
    Vec coords;
    PointChart chart;

    Point() = default;
    explicit Point(Vec c) : coords(std::move(c)) {}
    Point(Vec c, PointChart ch) : coords(std::move(c)), chart(ch) {}
    int dim() const { return static_cast<int>(coords.size()); }
};

inline double positiveMod(double x, double m) {
    double r = std::fmod(x, m);
    return r < 0 ? r + m : r;
}

// Representative normalization for a torus-quotient plane: each quotient
// coordinate lands in [0, s).
inline void normalizeTorusRep(Vec& v, double s, int firstCoord = 0) {
    v[firstCoord] = positiveMod(v[firstCoord], s);
    v[firstCoord + 1] = positiveMod(v[firstCoord + 1], s);
}

// Standard symplectic form omega_0 = sum dx_i ^ dy_i.
struct StandardForm {
    int n;  // half-dimension
    explicit StandardForm(int halfDim) : n(halfDim) {
        if (n <= 0) throw std::invalid_argument("StandardForm: n must be positive");
    }
    Mat matrix() const {
        Mat J = Mat::Zero(2 * n, 2 * n);
        for (int i = 0; i < n; ++i) {
            J(2 * i, 2 * i + 1) = 1.0;
            J(2 * i + 1, 2 * i) = -1.0;
        }
        return J;
    }
};

inline double omega(const Vec& u, const Vec& v) {
    if (u.size() != v.size()) throw std::invalid_argument("omega: dimension mismatch");
    if (u.size() % 2 != 0) throw std::invalid_argument("omega: odd dimension");
    double s = 0.0;
    for (int i = 0; i + 1 < u.size(); i += 2) s += u[i] * v[i + 1] - u[i + 1] * v[i];
    return s;
}

inline Mat omegaMatrix(int dim) {
    if (dim % 2 != 0) throw std::invalid_argument("omegaMatrix: odd dimension");
    return StandardForm(dim / 2).matrix();
}

// Symplectic basis (f1p, f2p) of the omega-orthogonal complement of span{v1, v2}
// in R^4: omega(f1p, f2p) = 1 and omega(fip, vj) = 0.
std::pair<Vec, Vec> symplecticComplementBasis(const Vec& v1, const Vec& v2);

// max-norm residual of M^T Omega M - Omega.
inline double symplecticMatrixResidual(const Mat& M) {
    Mat Om = omegaMatrix(static_cast<int>(M.rows()));
    return (M.transpose() * Om * M - Om).cwiseAbs().maxCoeff();
}

inline Vec unitVector(int dim, int k) {
    Vec e = Vec::Zero(dim);
    e[k] = 1.0;
    return e;
}

}  // namespace symplembed
