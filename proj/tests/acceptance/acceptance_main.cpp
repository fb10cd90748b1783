// Acceptance suite: one pass/fail line per criterion; exit code 0 iff all pass.
#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

#include "symplembed/certify.hpp"
#include "symplembed/gluing.hpp"
#include "symplembed/guth.hpp"
#include "symplembed/hindkerman.hpp"
#include "symplembed/pipelines.hpp"
#include "symplembed/transport.hpp"

using namespace symplembed;

namespace {

int gFailures = 0;

void line(const std::string& name, bool pass, const std::string& detail = "") {
    std::printf("[%s] %s%s%s\n", pass ? "PASS" : "FAIL", name.c_str(),
                detail.empty() ? "" : " -- ", detail.c_str());
    if (!pass) ++gFailures;
}

double quadVR(double R) {
    // quadrature of omega over B^4(R) cap V_R: area of the slice disk of the
    // image under L_R pulled back = pi * (t R^2 / sqrt(2t^2-2t+1)); verify by
    // direct 2D quadrature in the (f1, f2) chart where the slice is the round
    // disk u^2 + v^2 < R^2 and the pullback of omega is (t/q) du dv.
    GuthFrame fr = buildGuthFrame(R);
    double q = std::sqrt(2 * fr.t * fr.t - 2 * fr.t + 1);
    // midpoint quadrature over the disk
    int N = 2000;
    long inside = 0;
    for (int i = 0; i < N; ++i)
        for (int j = 0; j < N; ++j) {
            double u = (-1.0 + (2.0 * i + 1) / N) * R;
            double v = (-1.0 + (2.0 * j + 1) / N) * R;
            if (u * u + v * v < R * R) ++inside;
        }
    double diskArea = double(inside) * (2.0 * R / N) * (2.0 * R / N);
    return diskArea * (fr.t / q);
}

// criterion 1: Guth family
void criterion1() {
    bool all = true;
    std::string why;
    for (double R : {0.4, 1.0, 2.0}) {
        auto iR = buildGuthFamily(3, R);
        Sampler s;
        s.seed = 1234;
        auto pts = makeBall(4, R)->sample(100000, s);
        auto sy = checkSymplectic(*iR, {pts.begin(), pts.begin() + 20000});
        if (sy.maxResidual > 1e-10) {
            all = false;
            why += "symplectic residual " + std::to_string(sy.maxResidual) + " at R=" +
                   std::to_string(R) + "; ";
        }
        auto inj = checkInjective(*iR, pts, 1e-6, 1e-3, true, 1.0);
        if (inj.collisions != 0) {
            all = false;
            why += "collisions at R=" + std::to_string(R) + "; ";
        }
        auto target = makeProduct(
            {std::make_shared<PuncturedTorus>(1.0), makeBall(2, 10.0 * R * R)});
        long outside = 0;
        for (size_t i = 0; i < 20000; ++i) {
            Vec y = iR->eval(pts[i]);
            if (!(y.tail(2).norm() < 10.0 * R * R)) ++outside;
        }
        (void)target;
        if (outside) {
            all = false;
            why += "containment failures at R=" + std::to_string(R) + "; ";
        }
    }
    double t1 = solveT(1.0);
    if (std::abs(t1 - 0.10057) > 1e-4) {
        all = false;
        why += "t(1) off; ";
    }
    for (double lg = -6; lg <= 1.0; lg += 0.5) {
        double R = 1.0 / 3.0 + std::pow(10.0, lg);
        if (solveTResidual(R, solveT(R)) > 1e-12) {
            all = false;
            why += "solve_t residual; ";
            break;
        }
    }
    for (double R : {0.4, 1.0, 2.0}) {
        if (std::abs(quadVR(R) - M_PI / 9.0) > 1e-6) {
            all = false;
            why += "VR integral off at R=" + std::to_string(R) + "; ";
        }
        if (!(projectionRadiusBound(R) <= std::sqrt(72.0) * R * R)) {
            all = false;
            why += "S(R) bound; ";
        }
    }
    line("1. guth family: symplectic/injective/contained, t(1), pi/9 slice, S bound", all, why);
}

void criterion2() {
    bool all = true;
    double prevT = 0, prevSlope = 0;
    for (int k = 2; k <= 7; ++k) {
        double R = 1.0 / 3.0 + std::pow(10.0, -k);
        double h = std::pow(10.0, -k - 3);
        double slope = std::abs((solveT(R + h) - solveT(R - h)) / (2 * h));
        double t = solveT(R);
        if (!(t > prevT && slope > prevSlope)) all = false;
        prevT = t;
        prevSlope = slope;
    }
    if (!(prevT > 0.99)) all = false;
    line("2. double-root singularity: t(R) -> 1, |dt/dR| increasing as R -> 1/3", all);
}

void criterion3() {
    bool all = true;
    std::string why;
    double disc = std::sqrt(10000.0 - 80.0 * M_PI);
    double As = (100.0 - disc) / 10.0, Al = (100.0 + disc) / 10.0;
    if (std::abs(As - 0.126468) > 1e-5 || std::abs(Al - 19.87353) > 1e-5 || As < 0.125) {
        all = false;
        why += "limit roots; ";
    }
    for (double eps : {0.05, 0.02}) {
        auto r = solveA(eps);
        double p = serpentineArea(eps, r.measuredLarge);
        if (std::abs(p - 100 * eps) / (100 * eps) > 1e-6) {
            all = false;
            why += "moser equality; ";
        }
        auto b = buildBundle(eps);
        // chi bounds on 1e5 grid points
        long viol = 0;
        double A = b->serp->A;
        for (int i = 0; i <= 100000; ++i) {
            double x = -A + 2 * A * i / 100000.0;
            double v = b->chi->value(x), d1 = b->chi->d1(x);
            if (std::abs(d1) > 1.0 / A + eps) ++viol;
            if (x >= -A + eps / 2 && x <= A - eps / 2 &&
                std::abs(v - (1.0 - std::abs(x) / A)) > eps)
                ++viol;
        }
        if (viol) {
            all = false;
            why += "chi bounds (" + std::to_string(viol) + "); ";
        }
        Sampler s;
        s.seed = 77;
        auto pts4 = makeBall(4, 2.0)->sample(5000, s);
        if (checkSymplectic(*b->flow, pts4).maxResidual > 1e-12) {
            all = false;
            why += "Phi_eps residual; ";
        }
        auto ptsI = b->sampleSigmaQ(100000, 91);
        auto inj = checkInjective(*b->I, ptsI, 1e-6, 1e-3);
        if (inj.collisions != 0) {
            all = false;
            why += "I_eps collisions at eps=" + std::to_string(eps) + "; ";
        }
    }
    double a1 = buildSerpentine(0.05).envelopeArea(), a2 = buildSerpentine(0.02).envelopeArea();
    double extrap = a2 - 0.02 * (a1 - a2) / 0.03;
    if (std::abs(extrap - 2 * M_PI) > 1e-3) {
        all = false;
        why += "envelope extrapolation; ";
    }
    HkConstants k = hkConstants();
    bool rOk = k.ctilde > 0;
    for (double eps : {0.05, 0.02})
        rOk = rOk && (std::sqrt((2 * M_PI + kEnvelopeSlope * eps) / M_PI) <=
                      std::sqrt(2.0) + k.ctilde * eps + 1e-12);
    if (!rOk) {
        all = false;
        why += "r(eps) bound; ";
    }
    line("3. hind-kerman: roots, moser equality, chi bounds, flow, injectivity, envelope", all,
         why);
}

void criterion4() {
    bool all = true;
    std::string why;
    auto f = rectToDisk();
    auto g = diskToSquare();
    if (f->detResidual(100, 0.9) > 1e-5 || g->detResidual(100, 0.9) > 1e-5) {
        all = false;
        why += "det residual f/g; ";
    }
    auto s005 = buildSerpentine(0.05);
    auto t = knotheMap(s005.envelope(), makeBall(2, s005.rEps()));
    if (t->detResidual(100, 0.9) > 1e-5) {
        all = false;
        why += "det residual envelope transport; ";
    }
    // sub-rectangle push-forward areas
    Rng rng(5);
    auto pushforward = [&](const TransportMap& tm, double x0, double x1, double y0, double y1) {
        long N = 20000;
        double acc = 0;
        for (long i = 0; i < N; ++i) {
            Vec p(2);
            p << rng.uniform(x0, x1), rng.uniform(y0, y1);
            acc += tm.jacobian(p).determinant();
        }
        return acc / double(N);
    };
    for (int w = 0; w < 20; ++w) {
        double sp = std::sqrt(M_PI);
        double x0 = rng.uniform(0.05, 0.5) * sp, x1 = x0 + rng.uniform(0.1, 0.4) * sp;
        double y0 = rng.uniform(0.05, 0.5) * 2 * sp, y1 = y0 + rng.uniform(0.1, 0.4) * 2 * sp;
        x1 = std::min(x1, 0.95 * sp);
        y1 = std::min(y1, 1.9 * sp);
        double ratio = pushforward(*f, x0, x1, y0, y1);
        if (std::abs(ratio - 1.0) > 1e-4) {
            all = false;
            why += "pushforward f; ";
            break;
        }
    }
    line("4. moser transports: |det J - 1| <= 1e-5 on cores, push-forward areas", all, why);
}

void criterion5() {
    bool all = true;
    std::string why;
    // toys
    for (int which = 0; which < 2; ++which) {
        auto fam = which == 0 ? translationFamily() : rotationFamily();
        Sampler s;
        s.seed = 404 + which;
        std::vector<Vec> inside;
        for (auto& p : makeBall(2, 0.45)->sample(1500, s))
            if (fam.level(p) > 0.52) inside.push_back(p);
        if (inside.size() > 1000) inside.resize(1000);
        FlowOptions fo;
        fo.odeTol = 1e-10;
        auto rep = lemma1Step(fam, 0.25, 1.0 / 3.0, 0.5, inside, fo);
        if (rep.defect > 1e-8) {
            all = false;
            why += "toy defect " + std::to_string(rep.defect) + "; ";
        }
        if (rep.symplectic > 1e-7) {
            all = false;
            why += "toy flow residual; ";
        }
    }
    // section 7 family, n = 3
    try {
        auto ans = answersPipeline(3, {1.0 / 3, 1.0 / 4, 1.0 / 5}, 10000, 2024, 3.0);
        for (auto& c : ans.certificate.checks)
            if (!c.pass) {
                all = false;
                why += c.name + "; ";
            }
        // symplecticity of the glued map within 1e-3 on samples
        Sampler s;
        s.seed = 31;
        DomainPtr dom = makeProduct({makeBall(2, 2.0 / 3), makeBall(4, 3.0)});
        auto pts = dom->sample(10000, s);
        Mat Om = omegaMatrix(6);
        std::vector<double> res(pts.size(), 0.0);
        parallelFor(static_cast<long>(pts.size()), [&](long i) {
            const int d = 6;
            Mat J(d, d);
            for (int c = 0; c < d; ++c) {
                double h = 2e-5 * (1.0 + std::abs(pts[i][c]));
                Vec pp = pts[i], pm = pts[i];
                pp[c] += h;
                pm[c] -= h;
                J.col(c) = (ans.glued->eval(pp) - ans.glued->eval(pm)) / (2 * h);
            }
            res[i] = (J.transpose() * Om * J - Om).cwiseAbs().maxCoeff();
        });
        double worst = 0;
        for (double r : res) worst = std::max(worst, r);
        if (worst > 1e-3) {
            all = false;
            why += "glued symplectic residual " + std::to_string(worst) + "; ";
        }
    } catch (const std::exception& e) {
        all = false;
        why += std::string("pipeline: ") + e.what();
    }
    line("5. gluing engine: toy defects <= 1e-8, glued j symplectic <= 1e-3 and contained", all,
         why);
}

void criterion6() {
    bool all = true;
    if (radiusChain(3).radius != 2.0) all = false;
    if (std::abs(radiusChain(4).radius - std::sqrt(10.0)) > 1e-15) all = false;
    for (int n = 2; n <= 12; ++n) {
        std::uint64_t expect =
            n == 2 ? 1 : (std::uint64_t{1} << (n - 1)) + (std::uint64_t{1} << (n - 2)) - 2;
        if (radiusChain(n).radiusSquared != expect) all = false;
    }
    auto res = general0Chain(3, 2, 5000, 13);
    if (!res.certificate.pass()) all = false;
    line("6. theorem-level arithmetic: radius chain exact, general0 containments", all);
}

void criterion7() {
    bool all = true;
    for (auto kind : {CapacityModel::Kind::GromovRadius, CapacityModel::Kind::VolumeCapacity}) {
        CapacityModel m{kind};
        auto rep = axiomHarness(m, defaultCatalog(), 321);
        if (!rep.certificate.pass() || !rep.violations.empty()) all = false;
    }
    line("7. axiom harness: monotonicity, conformality (1e-12), normalization", all);
}

void criterion8() {
    bool all = true;
    Sampler s;
    s.seed = 3;
    auto pts = makeBall(2, 1.0)->sample(500, s);
    Mat A(2, 2);
    A << 2, 0, 0, 1;
    auto nonSymp = std::make_shared<AffineMap>(A);
    if (checkSymplectic(*nonSymp, pts).pass(1e-10)) all = false;
    auto constant = std::make_shared<FuncMap>(2, 2, [](const Vec&) { return Vec::Zero(2); });
    if (checkInjective(*constant, pts).pass()) all = false;
    Mat D = Mat::Identity(2, 2) * 3.0;
    auto outMap = std::make_shared<AffineMap>(D);
    if (checkContained(*outMap, *makeBall(2, 2.0), pts).pass()) all = false;
    line("8. negative controls: non-symplectic / non-injective / out-of-target all fail", all);
}

}  // namespace

int main() {
    criterion1();
    criterion2();
    criterion3();
    criterion4();
    criterion5();
    criterion6();
    criterion7();
    criterion8();
    std::printf("%s: %d criterion(s) failing\n", gFailures == 0 ? "ACCEPTANCE PASS" : "ACCEPTANCE FAIL",
                gFailures);
    return gFailures == 0 ? 0 : 1;
}
