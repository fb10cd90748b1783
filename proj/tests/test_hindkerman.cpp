#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "symplembed/certify.hpp"
#include "symplembed/hindkerman.hpp"

using namespace symplembed;

TEST_CASE("solve_A limit roots") {
    auto r = solveA(0.05);
    CHECK(std::abs(r.limitSmall - 0.126468) <= 1e-5);
    CHECK(std::abs(r.limitLarge - 19.87353) <= 1e-5);
    CHECK(r.limitSmall >= 0.125);
    CHECK(r.limitLarge >= 0.125);
    // the limit quadratic is satisfied to 1e-9
    auto q = [](double A) { return 5 * A * A - 100 * A + 4 * M_PI; };
    CHECK(std::abs(q(r.limitSmall)) <= 1e-9);
    CHECK(std::abs(q(r.limitLarge)) <= 1e-9);
    CHECK(r.largeFeasible);
}

TEST_CASE("measured Moser equality at the solved A") {
    for (double eps : {0.05, 0.02}) {
        auto r = solveA(eps);
        double p = serpentineArea(eps, r.measuredLarge);
        CHECK(std::abs(p - 100.0 * eps) / (100.0 * eps) <= 1e-6);
    }
}

TEST_CASE("serpentine: exact unit determinant and periodicity in u") {
    auto s = std::make_shared<const SerpentineImmersion>(buildSerpentine(0.05));
    auto pts = s->sampleCore(4000, 7);
    for (auto& p : pts) {
        Mat J = s->jacobianFlat(p);
        CHECK(std::abs(J.determinant() - 1.0) <= 1e-9);
    }
    // u-periodicity: the circuit closes smoothly
    Rng rng(8);
    for (int i = 0; i < 50; ++i) {
        Vec a(2), b(2);
        double v = rng.uniform(0.05, 0.95) * s->ell;
        a << 0.0, v;
        b << s->ell, v;
        CHECK((s->evalFlat(a) - s->evalFlat(b)).norm() <= 1e-9);
        CHECK((s->jacobianFlat(a) - s->jacobianFlat(b)).cwiseAbs().maxCoeff() <= 1e-7);
    }
}

TEST_CASE("serpentine analytic jacobian vs feature-scaled finite differences") {
    auto s = std::make_shared<const SerpentineImmersion>(buildSerpentine(0.05));
    auto pts = s->sampleCore(300, 17);
    // feature-adapted FD step (box features are ~eps^2 wide in image space,
    // ~eps^2/speed in u); 1e-7 resolves them while staying above roundoff
    const double h = 1e-7;
    for (auto& p : pts) {
        Mat Ja = s->jacobianFlat(p);
        Mat Jf(2, 2);
        for (int c = 0; c < 2; ++c) {
            Vec pp = p, pm = p;
            pp[c] += h;
            pm[c] -= h;
            Jf.col(c) = (s->evalFlat(pp) - s->evalFlat(pm)) / (2 * h);
        }
        double scale = std::max(1.0, Ja.cwiseAbs().maxCoeff());
        CHECK((Ja - Jf).cwiseAbs().maxCoeff() / scale <= 2e-4);
    }
}

TEST_CASE("serpentine double points are confined to the box") {
    auto s = std::make_shared<const SerpentineImmersion>(buildSerpentine(0.05));
    auto pts = s->sampleCore(20000, 3);
    // self-intersection scan of i_eps
    auto m = serpentineMap(s);
    auto rep = checkInjective(*m, pts, /*deltaInj=*/2e-4, /*deltaSrc=*/5e-2);
    // collisions exist (the dive) but all witnesses must be inside the box
    double a = s->a;
    long outsideBox = 0;
    for (size_t i = 0; i < pts.size(); ++i) {
        Vec y = m->eval(pts[i]);
        (void)y;
    }
    // direct pairwise scan of image points against the box
    std::vector<Vec> images(pts.size());
    for (size_t i = 0; i < pts.size(); ++i) images[i] = m->eval(pts[i]);
    for (size_t i = 0; i < pts.size(); ++i) {
        for (size_t j = i + 1; j < std::min(pts.size(), i + 40); ++j) {
            double di = (images[i] - images[j]).norm();
            double ds = (pts[i] - pts[j]).norm();
            if (di < 2e-4 && ds > 5e-2) {
                bool inBox = std::abs(images[i][0]) <= a + 2e-4 &&
                             std::abs(images[i][1]) <= 0.5 * s->eps + 2e-4;
                if (!inBox) ++outsideBox;
            }
        }
    }
    CHECK(outsideBox == 0);
    (void)rep;
}

TEST_CASE("cutoff chi invariants") {
    double eps = 0.05;
    auto r = solveA(eps);
    double A = r.measuredLarge, a = eps * eps;
    CutoffChi chi(eps, a, A);
    CHECK(chi.value(0.0) == doctest::Approx(1.0));
    CHECK(chi.value(a) == doctest::Approx(1.0));
    CHECK(chi.value(-(A - eps * eps)) == doctest::Approx(0.0));
    CHECK(chi.value(A) == 0.0);
    double maxSlope = 0, maxTentDiff = 0;
    bool monotoneOk = true;
    double prev = chi.value(-A);
    for (int i = 0; i <= 100000; ++i) {
        double x = -A + 2 * A * i / 100000.0;
        double v = chi.value(x);
        maxSlope = std::max(maxSlope, std::abs(chi.d1(x)));
        if (x >= -A + eps / 2 && x <= A - eps / 2)
            maxTentDiff = std::max(maxTentDiff, std::abs(v - (1.0 - std::abs(x) / A)));
        if (x <= 0 && v < prev - 1e-12) monotoneOk = false;
        if (x > 0 && v > prev + 1e-12) monotoneOk = false;
        prev = v;
    }
    CHECK(maxSlope <= 1.0 / A + eps);
    CHECK(maxTentDiff <= eps);
    CHECK(monotoneOk);
    CHECK_THROWS(CutoffChi(0.05, 0.0025, 0.004));  // infeasible geometry
}

TEST_CASE("flow Phi_eps: plateau translation, identity outside, symplectic") {
    double eps = 0.05;
    auto r = solveA(eps);
    auto chi = std::make_shared<const CutoffChi>(eps, eps * eps, r.measuredLarge);
    auto flow = buildFlow(chi);
    double sq = std::sqrt(M_PI);
    Vec p(4);
    p << 0.0, 0.3, 0.5, 0.2;  // plateau: chi = 1, chi' = 0
    Vec q = flow->eval(p);
    CHECK(q[1] == doctest::Approx(0.3));
    CHECK(q[3] == doctest::Approx(0.2 + sq));
    p << r.measuredLarge + 1.0, 0.3, 0.5, 0.2;  // outside support
    CHECK((flow->eval(p) - p).norm() == 0.0);

    Sampler s;
    s.seed = 6;
    auto pts = makeBall(4, 2.0)->sample(10000, s);
    CHECK(checkSymplectic(*flow, pts).maxResidual <= 1e-12);
}

TEST_CASE("I_eps injectivity and seam smoothness") {
    auto b = buildBundle(0.05);
    auto pts = b->sampleSigmaQ(20000, 11);
    auto rep = checkInjective(*b->I, pts, 1e-6, 1e-3);
    CHECK(rep.collisions == 0);

    // the off-strip branch: I(sigma, b) = (i(sigma), b)
    for (auto& p : pts) {
        Vec sigma = p.head(2);
        if (!b->serp->inStrip(sigma)) {
            Vec y = b->I->eval(p);
            Vec im = b->serp->evalFlat(sigma);
            CHECK((y.head(2) - im).norm() == 0.0);
            CHECK(y[2] == p[2]);
            CHECK(y[3] == p[3]);
        }
    }
}

TEST_CASE("envelope area law and r(eps)") {
    for (double eps : {0.05, 0.02}) {
        auto s = buildSerpentine(eps);
        CHECK(s.envelopeArea() == doctest::Approx(2 * M_PI + kEnvelopeSlope * eps));
        auto env = s.envelope();
        CHECK(env->measure().value == doctest::Approx(s.envelopeArea()).epsilon(1e-12));
        CHECK(s.rEps() == doctest::Approx(std::sqrt(s.envelopeArea() / M_PI)));
        // envelope contains the serpentine image
        auto m = serpentineMap(std::make_shared<const SerpentineImmersion>(s));
        for (auto& p : s.sampleCore(3000, 4)) CHECK(env->contains(m->eval(p)));
    }
    // two-point extrapolation to eps = 0 recovers 2 pi exactly
    double a1 = buildSerpentine(0.05).envelopeArea(), a2 = buildSerpentine(0.02).envelopeArea();
    double extrap = a2 - 0.02 * (a1 - a2) / (0.05 - 0.02);
    CHECK(std::abs(extrap - 2 * M_PI) <= 1e-3);
    // fitted ctilde: r(eps) <= sqrt2 + ctilde eps with positive ctilde
    HkConstants k = hkConstants();
    CHECK(k.ctilde > 0);
    for (double eps : {0.05, 0.02, 0.01})
        CHECK(std::sqrt((2 * M_PI + kEnvelopeSlope * eps) / M_PI) <=
              std::sqrt(2.0) + k.ctilde * eps + 1e-12);
}

TEST_CASE("chain containment into B2(r) x B2(sqrt2)") {
    auto b = buildBundle(0.05);
    auto pts = b->sampleSigmaDisk(3000, 13);
    double m1 = 1e9, m2 = 1e9;
    for (auto& p : pts) {
        Vec y = b->chain->eval(p);
        m1 = std::min(m1, b->rEps - y.head(2).norm());
        m2 = std::min(m2, std::sqrt(2.0) - y.tail(2).norm());
    }
    CHECK(m1 > 0.0);
    CHECK(m2 > -1e-9);
    auto rep = checkSymplectic(*b->chain, {pts.begin(), pts.begin() + 300});
    CHECK(rep.maxResidual <= 1e-4);
}

TEST_CASE("i_SR parameter domain and containment") {
    HkConstants k = hkConstants();
    double S = 2.0;
    double R = std::sqrt(2.0) + 0.5 * std::min(k.Cprime * S * S, k.c * 100.0 * kEpsMax);
    auto d = buildISR(3, S, R);
    CHECK(d.T > 1.0 / 3.0);
    CHECK(d.epsOur <= kEpsMax + 1e-12);
    Sampler smp;
    smp.seed = 3;
    auto pts = d.source->sample(2000, smp);
    auto rep = checkContained(*d.map, *d.target, pts);
    CHECK(rep.pass());
    auto sy = checkSymplectic(*d.map, {pts.begin(), pts.begin() + 200});
    CHECK(sy.maxResidual <= 1e-4);
    CHECK_THROWS(buildISR(3, 1.0, std::sqrt(2.0) + k.Cprime * 1.1));
}
