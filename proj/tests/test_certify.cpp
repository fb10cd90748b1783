#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "symplembed/certify.hpp"

using namespace symplembed;

TEST_CASE("check_symplectic detects the dilation control map") {
    auto id = std::make_shared<IdentityMap>(2);
    Sampler s;
    s.seed = 1;
    auto pts = makeBall(2, 1.0)->sample(100, s);
    CHECK(checkSymplectic(*id, pts).maxResidual == 0.0);

    Mat A(2, 2);
    A << 2.0, 0.0, 0.0, 1.0;  // non-symplectic control: det = 2
    auto bad = std::make_shared<AffineMap>(A);
    auto rep = checkSymplectic(*bad, pts);
    CHECK(rep.maxResidual == doctest::Approx(1.0));
    CHECK_FALSE(rep.pass(1e-10));
}

TEST_CASE("check_injective detects the constant control map") {
    Sampler s;
    s.seed = 2;
    auto pts = makeBall(2, 1.0)->sample(500, s);
    auto id = std::make_shared<IdentityMap>(2);
    CHECK(checkInjective(*id, pts).collisions == 0);

    auto constant = std::make_shared<FuncMap>(2, 2, [](const Vec&) { return Vec::Zero(2); });
    auto rep = checkInjective(*constant, pts);
    CHECK(rep.collisions > 0);
    CHECK(rep.witness.has_value());
    CHECK_FALSE(rep.pass());
}

TEST_CASE("check_contained margins and the out-of-target control") {
    auto id = std::make_shared<IdentityMap>(2);
    Sampler s;
    s.seed = 3;
    auto pts = makeBall(2, 1.0)->sample(400, s);
    auto rep = checkContained(*id, *makeBall(2, 2.0), pts);
    CHECK(rep.pass());
    CHECK(rep.minMargin >= 1.0 - 1e-9);

    Mat A = Mat::Identity(2, 2) * 3.0;
    auto dil = std::make_shared<AffineMap>(A);  // pushes points outside B(2)
    auto bad = checkContained(*dil, *makeBall(2, 2.0), pts);
    CHECK_FALSE(bad.pass());
}

TEST_CASE("torus-wrapped injectivity scan") {
    // map into the unit torus: points near opposite edges are close in the quotient
    auto wrap = std::make_shared<FuncMap>(2, 2, [](const Vec& p) {
        Vec q = p;
        normalizeTorusRep(q, 1.0);
        return q;
    });
    std::vector<Vec> pts;
    Vec a(2), c(2);
    a << 2e-7, 0.5;
    c << 1.0 - 2e-7, 0.5;  // quotient distance 4e-7 < deltaInj, source distance ~1
    pts.push_back(a);
    pts.push_back(c);
    auto rep = checkInjective(*wrap, pts, 1e-6, 1e-4, true, 1.0);
    CHECK(rep.collisions == 1);  // sources are far, images quotient-close
}

TEST_CASE("certificate JSON determinism") {
    Certificate c;
    c.subject = "demo";
    c.seed = 42;
    c.add("residual", 1e-12, 1e-10);
    c.addConstant("t", 0.1005, "solved");
    auto j1 = c.toJson().dump();
    auto j2 = c.toJson().dump();
    CHECK(j1 == j2);
    CHECK(c.pass());
    c.add("failing", 2.0, 1.0);
    CHECK_FALSE(c.pass());
}
