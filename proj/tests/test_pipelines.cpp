#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "symplembed/pipelines.hpp"

using namespace symplembed;

TEST_CASE("radius chain arithmetic") {
    CHECK(radiusChain(2).radius == doctest::Approx(1.0));
    CHECK(radiusChain(3).radius == doctest::Approx(2.0));
    CHECK(radiusChain(3).radiusSquared == 4);
    CHECK(radiusChain(4).radius == doctest::Approx(std::sqrt(10.0)));
    CHECK(radiusChain(4).radiusSquared == 10);
    for (int n = 2; n <= 12; ++n) {
        std::uint64_t expect =
            (n == 2) ? 1
                     : (std::uint64_t{1} << (n - 1)) + (std::uint64_t{1} << (n - 2)) - 2;
        CHECK(radiusChain(n).radiusSquared == expect);
    }
    CHECK_THROWS(radiusChain(1));
}

TEST_CASE("capacity models: normalization, conformality, ellipsoid radius") {
    CapacityModel gr{CapacityModel::Kind::GromovRadius};
    CapacityModel vc{CapacityModel::Kind::VolumeCapacity};
    CHECK(gr.value(*makeBall(4, 1.0)) == doctest::Approx(1.0));
    CHECK(vc.value(*makeBall(6, 1.0)) == doctest::Approx(1.0));
    auto ell = Ellipsoid::symplectic({1.0, 2.0, 3.0});
    CHECK(gr.radius(*ell) == doctest::Approx(1.0));  // min semi-axis convention
    // conformality: dilation by sqrt(lambda) scales value by lambda
    double lam = 2.7;
    CHECK(gr.value(*makeBall(4, std::sqrt(lam))) == doctest::Approx(lam).epsilon(1e-13));
    CHECK(vc.value(*makeBall(4, std::sqrt(lam))) == doctest::Approx(lam).epsilon(1e-13));
    // cylinder: volume capacity infinite, gromov radius finite
    Cylinder cyl(2, 1.0, 4, 3.0);
    CHECK(std::isinf(vc.value(cyl)));
    CHECK(gr.radius(cyl) == doctest::Approx(1.0));
}

TEST_CASE("axiom harness passes on the default catalog") {
    for (auto kind : {CapacityModel::Kind::GromovRadius, CapacityModel::Kind::VolumeCapacity}) {
        CapacityModel m{kind};
        auto rep = axiomHarness(m, defaultCatalog(), 123);
        CHECK(rep.certificate.pass());
        CHECK(rep.violations.empty());
    }
}

TEST_CASE("general0 chain at (n,d) = (3,2)") {
    auto res = general0Chain(3, 2, 2000, 99);
    for (auto& c : res.certificate.checks) {
        INFO(c.name);
        CHECK(c.pass);
    }
    // the norm inequality at R = 2
    CHECK(std::sqrt(1.0 + 4.0) <= 3.0);
    CHECK(res.report.find("d-nontriviality") != std::string::npos);
}

TEST_CASE("scaling invariance of the containment logic") {
    // argmax-style invariance: scaling every domain by lambda leaves the
    // chain's containment verdicts unchanged
    Sampler s;
    s.seed = 17;
    for (double lam : {0.5, 1.0, 3.0}) {
        auto src = makeBall(4, 1.0 * lam);
        auto mid = makeProduct({makeBall(2, 1.0 * lam), makeBall(2, 1.0 * lam)});
        bool ok = true;
        for (auto& p : src->sample(500, s))
            if (!mid->contains(p)) ok = false;
        CHECK(ok);
    }
}
