#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "symplembed/maps.hpp"

using namespace symplembed;

namespace {
MapPtr scaleMap(double s, int d = 2) {
    Mat A = Mat::Identity(d, d) * s;
    return std::make_shared<AffineMap>(A);
}
}  // namespace

TEST_CASE("compose behaves as expected") {
    auto id = std::make_shared<IdentityMap>(2);
    auto f = scaleMap(3.0);
    auto c = compose(id, f);
    Rng rng(1);
    for (int i = 0; i < 100; ++i) {
        Vec x(2);
        x << rng.uniform(-1, 1), rng.uniform(-1, 1);
        CHECK((c->eval(x) - f->eval(x)).norm() <= 1e-15);
    }
    auto half = compose(scaleMap(2.0), scaleMap(0.5));
    Vec x(2);
    x << 0.4, -0.9;
    CHECK((half->eval(x) - x).norm() <= 1e-14);
}

TEST_CASE("chain rule matches finite differences on composites") {
    // nonlinear pair with analytic Jacobians
    auto f = std::make_shared<FuncMap>(
        2, 2,
        [](const Vec& x) {
            Vec y(2);
            y << x[0] + 0.1 * std::sin(x[1]), x[1] + 0.1 * x[0] * x[0];
            return y;
        },
        [](const Vec& x) {
            Mat J(2, 2);
            J << 1.0, 0.1 * std::cos(x[1]), 0.2 * x[0], 1.0;
            return J;
        });
    auto g = scaleMap(1.7);
    auto c = compose(f, g);
    Rng rng(2);
    for (int i = 0; i < 1000; ++i) {
        Vec x(2);
        x << rng.uniform(-1, 1), rng.uniform(-1, 1);
        Mat Ja = c->jacobian(x);
        Mat Jf = c->fdJacobian(x);
        CHECK((Ja - Jf).cwiseAbs().maxCoeff() <= 1e-6);
    }
}

TEST_CASE("product map leaves the other factor unchanged") {
    auto f = scaleMap(2.0);
    auto id = std::make_shared<IdentityMap>(2);
    auto p = product(f, id);
    Vec x(4);
    x << 0.3, 0.4, 0.5, 0.6;
    Vec y = p->eval(x);
    CHECK(y[2] == doctest::Approx(0.5));
    CHECK(y[3] == doctest::Approx(0.6));
    // block symplecticity: product of symplectic is symplectic
    Mat rot(2, 2);
    rot << std::cos(0.3), -std::sin(0.3), std::sin(0.3), std::cos(0.3);
    auto r = std::make_shared<AffineMap>(rot);
    auto pr = product(r, r);
    CHECK(symplecticResidual(*pr, x) <= 1e-12);
}

TEST_CASE("conjugate dilation") {
    auto id = std::make_shared<IdentityMap>(2);
    auto c1 = conjugateDilation(id, 1.0);
    Vec x(2);
    x << 0.2, 0.7;
    CHECK((c1->eval(x) - x).norm() == 0.0);
    auto c2 = conjugateDilation(id, 2.0);
    CHECK((c2->eval(x) - x).norm() <= 1e-15);  // identity at any scale
    CHECK_THROWS(conjugateDilation(id, -1.0));

    // preserves the symplecticity residual pointwise under x <-> x/lambda
    auto shear = std::make_shared<FuncMap>(
        2, 2,
        [](const Vec& p) {
            Vec y(2);
            y << p[0], p[1] + p[0] * p[0];
            return y;
        },
        [](const Vec& p) {
            Mat J(2, 2);
            J << 1, 0, 2 * p[0], 1;
            return J;
        });
    auto conj = conjugateDilation(std::static_pointer_cast<const SmoothMap>(shear), 3.0);
    Rng rng(3);
    for (int i = 0; i < 50; ++i) {
        Vec p(2);
        p << rng.uniform(-1, 1), rng.uniform(-1, 1);
        double r1 = symplecticResidual(*shear, p);
        double r2 = symplecticResidual(*conj, 3.0 * p);
        CHECK(std::abs(r1 - r2) <= 1e-12);
    }
}

TEST_CASE("torus quotient normalizes the leading factor") {
    auto id = std::make_shared<IdentityMap>(4);
    auto q = torusQuotient(id, 1.0);
    Vec x(4);
    x << 0.2, 0.3, 5.0, -1.0;
    CHECK((q->eval(x) - x).norm() == 0.0);
    x << 1.2, -0.3, 0.0, 0.0;
    Vec y = q->eval(x);
    CHECK(y[0] == doctest::Approx(0.2));
    CHECK(y[1] == doctest::Approx(0.7));
}

TEST_CASE("invert_local") {
    auto id = std::make_shared<IdentityMap>(2);
    Vec y(2);
    y << 0.4, -0.2;
    CHECK((invertLocal(*id, y, Vec::Zero(2)) - y).norm() <= 1e-11);

    Mat A = Mat::Identity(2, 2);
    Vec b(2);
    b << 0.7, 0.0;
    auto tr = std::make_shared<AffineMap>(A, b);
    CHECK((invertLocal(*tr, y, Vec::Zero(2)) - (y - b)).norm() <= 1e-11);

    // nonlinear shear-type map, residual check
    auto f = std::make_shared<FuncMap>(
        2, 2,
        [](const Vec& p) {
            Vec out(2);
            out << p[0], p[1] + 0.5 * std::sin(2 * p[0]);
            return out;
        },
        [](const Vec& p) {
            Mat J(2, 2);
            J << 1, 0, std::cos(2 * p[0]), 1;
            return J;
        });
    Rng rng(4);
    for (int i = 0; i < 100; ++i) {
        Vec target(2);
        target << rng.uniform(-1, 1), rng.uniform(-1, 1);
        Vec x = invertLocal(*f, target, Vec::Zero(2));
        CHECK((f->eval(x) - target).norm() <= 1e-10);
    }
}

TEST_CASE("embedding family grid continuity") {
    EmbeddingFamily fam(
        0.0, 1.0,
        [](double t) {
            Mat A = Mat::Identity(2, 2);
            Vec b(2);
            b << t * t, 0.0;
            return std::static_pointer_cast<const SmoothMap>(std::make_shared<AffineMap>(A, b));
        },
        [](double) { return makeBall(2, 1.0); });
    Vec x = Vec::Zero(2);
    Vec d = fam.paramDerivative(0.5, x, 1e-4);
    CHECK(d[0] == doctest::Approx(1.0).epsilon(1e-6));
    std::vector<double> grid{0.2, 0.3, 0.4, 0.5};
    double defect = fam.gridContinuityDefect(grid, {x}, 1e-4);
    CHECK(defect <= 0.21);  // derivative 2t changes by 0.2 per grid step
}
