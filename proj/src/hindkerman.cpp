#include "symplembed/hindkerman.hpp"

#include <cmath>
#include <map>
#include <mutex>

#include "symplembed/guth.hpp"
#include "symplembed/smoothstep.hpp"

namespace symplembed {

namespace {
const double kSqrtPi = std::sqrt(M_PI);

// helpers for the mollifier algebra: integrals of the unit bump
// I2(t) = int_0^t s S(s) ds for the septic smoothstep
inline double stepI2(double t) {
    if (t <= 0) return 0;
    t = std::min(t, 1.0);
    double t2 = t * t, t3 = t2 * t, t6 = t3 * t3;
    return t6 * (35.0 / 6.0 + t * (-12.0 + t * (8.75 - (20.0 / 9.0) * t)));
}
const double kStepI2One = 35.0 / 6.0 - 12.0 + 8.75 - 20.0 / 9.0;  // int_0^1 s S ds

// TB(tau) = int_0^tau s Bump(s) ds
inline double bumpI2(double tau) {
    if (tau <= 0) return 0;
    if (tau >= 1) tau = 1;
    if (tau <= 0.5) return 0.25 * stepI2(2 * tau);
    double v = 2 - 2 * tau;
    // int_{1/2}^{tau} s S(2-2s) ds = (1/4) [ 2 (SInt(1)-SInt(v)) - (I2(1)-I2(v)) ]
    double tail = 0.25 * (2.0 * (0.5 - smoothStepIntegral(v)) - (kStepI2One - stepI2(v)));
    return 0.25 * stepI2(1.0) + tail;
}
const double kBumpI2One = 0.25 * stepI2(1.0) + 0.25 * (2.0 * 0.5 - (kStepI2One - 0.0)) -
                          0.25 * (2.0 * smoothStepIntegral(0.0)) * 0;  // = bumpI2(1)

}  // namespace

CutoffChi::CutoffChi(double eps, double a, double A) : eps_(eps), a_(a), A_(A) {
    if (!(a > 0 && a < A - eps * eps))
        throw std::invalid_argument("CutoffChi: infeasible geometry (need a = eps^2 < A - eps^2)");
    d_ = eps / (200.0 * A);
    k1_ = a + 2.0 * d_;             // plateau edge (kink of the trapezoid)
    k2_ = A - eps * eps - 2.0 * d_;  // support edge
    if (k2_ - k1_ < 8.0 * d_)
        throw std::invalid_argument("CutoffChi: eps too large for A");
    slope_ = 1.0 / (k2_ - k1_);
    // slope bound check (paper Eq. slopebound)
    if (slope_ > 1.0 / A + eps)
        throw std::invalid_argument("CutoffChi: slope bound violated (branch infeasible)");
}

// K (convolution kernel) = Bump((u+d)/(2d)) / d, mass 1 on [-d, d].
// smRamp = K * max(0, .): 0 for y <= -d, y for y >= d.
double CutoffChi::smRamp(double y) const {
    if (y <= -d_) return 0.0;
    if (y >= d_) return y;
    double tau = (y + d_) / (2.0 * d_);
    // int_{-d}^{y} K(u) (y - u) du = y K1 - int u K
    double K1 = 2.0 * bumpIntegral(tau);
    double intUK = 2.0 * d_ * (2.0 * bumpI2(tau) - bumpIntegral(tau));
    return y * K1 - intUK;
}

double CutoffChi::smRampD1(double y) const {
    if (y <= -d_) return 0.0;
    if (y >= d_) return 1.0;
    return 2.0 * bumpIntegral((y + d_) / (2.0 * d_));
}

double CutoffChi::smRampD2(double y) const {
    if (std::abs(y) >= d_) return 0.0;
    return Bump::value((y + d_) / (2.0 * d_)) / d_;
}

double CutoffChi::value(double x) const {
    double ax = std::abs(x);
    return 1.0 - slope_ * (smRamp(ax - k1_) - smRamp(ax - k2_));
}

double CutoffChi::d1(double x) const {
    double ax = std::abs(x);
    double d = -slope_ * (smRampD1(ax - k1_) - smRampD1(ax - k2_));
    return x >= 0 ? d : -d;
}

double CutoffChi::d2(double x) const {
    double ax = std::abs(x);
    return -slope_ * (smRampD2(ax - k1_) - smRampD2(ax - k2_));
}

MapPtr buildFlow(std::shared_ptr<const CutoffChi> chi) {
    auto eval = [chi](const Vec& p) {
        Vec out(4);
        out << p[0], p[1] + chi->d1(p[0]) * p[2] * kSqrtPi, p[2], p[3] + chi->value(p[0]) * kSqrtPi;
        return out;
    };
    auto jac = [chi](const Vec& p) {
        Mat J = Mat::Identity(4, 4);
        J(1, 0) = chi->d2(p[0]) * p[2] * kSqrtPi;
        J(1, 2) = chi->d1(p[0]) * kSqrtPi;
        J(3, 0) = chi->d1(p[0]) * kSqrtPi;
        return J;
    };
    return std::make_shared<FuncMap>(4, 4, eval, jac, "Phi_eps");
}

SolveAResult solveA(double eps) {
    SolveAResult r;
    double disc = std::sqrt(10000.0 - 80.0 * M_PI);
    r.limitSmall = (100.0 - disc) / 10.0;
    r.limitLarge = (100.0 + disc) / 10.0;
    SerpentineRoots m = solveSerpentineA(eps);
    r.measuredSmall = m.Asmall;
    r.measuredLarge = m.Alarge;
    r.smallFeasible = m.smallFeasible;
    r.largeFeasible = m.largeFeasible;
    if (!(r.measuredSmall >= 0.125 && r.measuredLarge >= 0.125))
        throw std::runtime_error("solve_A: roots below 1/8 (eps too large)");
    return r;
}

HkConstants hkConstants() {
    HkConstants k;
    // area(D_eps) = 2 pi + kEnvelopeSlope eps exactly, so (r(eps)-sqrt2)/eps is
    // decreasing with supremum sqrt2 * slope / (4 pi) at eps -> 0
    k.ctilde = std::sqrt(2.0) * kEnvelopeSlope / (4.0 * M_PI);
    k.c = k.ctilde / 100.0;
    k.C = 10.0 * std::sqrt(k.c);
    k.Cprime = 9.0 * k.c;
    k.eps0 = kEpsMax;
    return k;
}

namespace {

// the piecewise map I_eps with analytic Jacobian
class MapI final : public SmoothMap {
public:
    MapI(std::shared_ptr<const SerpentineImmersion> s, std::shared_ptr<const CutoffChi> chi)
        : s_(std::move(s)), chi_(std::move(chi)) {
        setTag("I_eps");
        source = makeProduct({std::make_shared<PuncturedTorus>(100.0 * s_->eps),
                              makeSquare(kSqrtPi)});
    }
    int dimIn() const override { return 4; }
    int dimOut() const override { return 4; }

    Vec eval(const Vec& p) const override {
        Vec sigma = p.head(2);
        Vec im = s_->evalFlat(sigma);
        Vec out(4);
        if (s_->inStrip(sigma)) {
            out << im[0], im[1] + chi_->d1(im[0]) * p[2] * kSqrtPi, p[2],
                p[3] + chi_->value(im[0]) * kSqrtPi;
        } else {
            out << im[0], im[1], p[2], p[3];
        }
        return out;
    }

    Mat jacobian(const Vec& p) const override {
        Vec sigma = p.head(2);
        Mat Ji = s_->jacobianFlat(sigma);
        Mat J = Mat::Zero(4, 4);
        J.block(0, 0, 2, 2) = Ji;
        J(2, 2) = 1.0;
        J(3, 3) = 1.0;
        if (s_->inStrip(sigma)) {
            Vec im = s_->evalFlat(sigma);
            double c1 = chi_->d1(im[0]), c2 = chi_->d2(im[0]);
            // y1' = y1 + chi'(x1) x2 sqrt(pi); y2' = y2 + chi(x1) sqrt(pi)
            J.row(1) += c2 * p[2] * kSqrtPi * J.row(0);
            J(1, 2) = c1 * kSqrtPi;
            J.row(3).head(2) = c1 * kSqrtPi * Ji.row(0);
        }
        return J;
    }
    bool analyticJacobian() const override { return true; }

private:
    std::shared_ptr<const SerpentineImmersion> s_;
    std::shared_ptr<const CutoffChi> chi_;
};

std::mutex gBundleMutex;
std::map<double, std::shared_ptr<const HkBundle>> gBundleCache;

}  // namespace

std::shared_ptr<const HkBundle> buildBundle(double eps) {
    {
        std::lock_guard<std::mutex> lk(gBundleMutex);
        auto it = gBundleCache.find(eps);
        if (it != gBundleCache.end()) return it->second;
    }
    auto b = std::make_shared<HkBundle>();
    b->eps = eps;
    b->serp = std::make_shared<const SerpentineImmersion>(buildSerpentine(eps));
    b->chi = std::make_shared<const CutoffChi>(eps, eps * eps, b->serp->A);
    b->iEps = serpentineMap(b->serp);
    b->flow = buildFlow(b->chi);
    b->I = std::make_shared<MapI>(b->serp, b->chi);
    b->envelope = b->serp->envelope();
    b->rEps = b->serp->rEps();
    b->f = rectToDisk();
    b->g = diskToSquare();
    b->phiEnv = knotheMap(b->envelope, makeBall(2, b->rEps));
    // chain: (Id (x) g) then I_eps then (Id (x) f) then (phiEnv (x) Id)
    MapPtr idg = product(std::make_shared<IdentityMap>(2), b->g);
    MapPtr idf = product(std::make_shared<IdentityMap>(2), b->f);
    MapPtr envId = product(b->phiEnv, std::make_shared<IdentityMap>(2));
    b->chain = annotate(
        composeChain({envId, idf, b->I, idg}), "I_chain[eps=" + std::to_string(eps) + "]",
        makeProduct({std::make_shared<PuncturedTorus>(100.0 * eps), makeBall(2, 1.0)}),
        makeProduct({makeBall(2, b->rEps), makeBall(2, std::sqrt(2.0))}));
    std::lock_guard<std::mutex> lk(gBundleMutex);
    gBundleCache[eps] = b;
    if (gBundleCache.size() > 400) gBundleCache.erase(gBundleCache.begin());
    return b;
}

std::vector<Vec> HkBundle::sampleSigmaQ(int count, std::uint64_t seed) const {
    auto su = serp->sampleCore(count, seed);
    Rng rng(hashCombine(seed, 0x51AB17ULL));
    std::vector<Vec> out;
    out.reserve(count);
    const double margin = 1e-6;
    for (auto& s : su) {
        Vec p(4);
        p << s[0], s[1], rng.uniform(margin, kSqrtPi - margin), rng.uniform(margin, kSqrtPi - margin);
        out.push_back(std::move(p));
    }
    return out;
}

std::vector<Vec> HkBundle::sampleSigmaDisk(int count, std::uint64_t seed) const {
    auto su = serp->sampleCore(count, seed);
    Rng rng(hashCombine(seed, 0xD15CULL));
    std::vector<Vec> out;
    out.reserve(count);
    while (static_cast<int>(out.size()) < count) {
        auto& s = su[out.size() % su.size()];
        double x = rng.uniform(-1.0, 1.0), y = rng.uniform(-1.0, 1.0);
        if (x * x + y * y >= 0.98) continue;
        Vec p(4);
        p << s[0], s[1], x, y;
        out.push_back(std::move(p));
    }
    return out;
}

ISRData buildISR(int n, double S, double R) {
    if (n < 3) throw std::invalid_argument("build_iSR: n must be >= 3");
    HkConstants k = hkConstants();
    if (!(S > 0 && R > std::sqrt(2.0) && R < std::sqrt(2.0) + k.Cprime * S * S))
        throw std::domain_error("build_iSR: (S,R) outside the parameter domain");
    ISRData d;
    d.eps63 = (R - std::sqrt(2.0)) / k.c;
    d.epsOur = d.eps63 / 100.0;
    if (d.epsOur > k.eps0 + 1e-12)
        throw std::domain_error("build_iSR: recovered eps exceeds eps0 (R too far from sqrt 2)");
    d.T = S / std::sqrt(d.eps63);
    if (!(d.T > 1.0 / 3.0))
        throw std::domain_error("build_iSR: recovered T <= 1/3");

    auto bundle = buildBundle(d.epsOur);
    double sq = std::sqrt(d.eps63);

    // x-part: scaled Guth embedding bar-tau_sq . i_T . tau_sq^{-1}; conjugation
    // carries the lattice representative from [0,1)^2 to [0, sq)^2.
    MapPtr guth = buildGuthFamily(n, d.T);
    MapPtr scaled = conjugateDilation(guth, sq);  // x -> sq * i_T(x / sq)

    // assemble: (b, x) -> (b, sigma, w) -> (sigma, b, w) -> (chain(sigma,b), w)
    int dimX = 2 * (n - 1), dimW = 2 * (n - 2);
    MapPtr stage1 = product(std::make_shared<IdentityMap>(2), scaled);
    std::vector<int> perm(4 + dimW);
    perm[0] = 2;
    perm[1] = 3;  // sigma
    perm[2] = 0;
    perm[3] = 1;  // b
    for (int i = 0; i < dimW; ++i) perm[4 + i] = 4 + i;
    MapPtr stage2 = permutation(perm);
    MapPtr stage3 = product(bundle->chain, std::make_shared<IdentityMap>(dimW));
    d.map = annotate(composeChain({stage3, stage2, stage1}),
                     "i_SR[n=" + std::to_string(n) + "]");
    d.source = makeProduct({makeBall(2, 1.0), makeBall(dimX, S)});
    double wBound = k.C * S * S / std::sqrt(R - std::sqrt(2.0));
    std::vector<DomainPtr> tf{makeBall(2, R), makeBall(2, std::sqrt(2.0))};
    if (dimW > 0) tf.push_back(makeBall(dimW, wBound));
    d.target = makeProduct(tf);
    d.map = annotate(d.map, d.map->tag(), d.source, d.target);
    return d;
}

ISRData buildJSR(int n, double S, double R) {
    ISRData d = buildISR(n, S, R);
    double lam = std::sqrt(2.0) / R;
    d.map = annotate(conjugateDilation(d.map, lam), "j_SR[n=" + std::to_string(n) + "]");
    int dimX = 2 * (n - 1), dimW = 2 * (n - 2);
    d.source = makeProduct({makeBall(2, std::sqrt(2.0) / R), makeBall(dimX, std::sqrt(2.0) * S / R)});
    HkConstants k = hkConstants();
    double wBound = lam * k.C * S * S / std::sqrt(R - std::sqrt(2.0));
    std::vector<DomainPtr> tf{makeBall(2, std::sqrt(2.0)), makeBall(2, 2.0 / R)};
    if (dimW > 0) tf.push_back(makeBall(dimW, wBound));
    d.target = makeProduct(tf);
    d.map = annotate(d.map, d.map->tag(), d.source, d.target);
    return d;
}

PhiFamilyData buildPhiEps(int n, double e) {
    if (!(e > 0 && e < 1)) throw std::domain_error("phi_eps: e in (0,1) required");
    HkConstants k = hkConstants();
    if (!(e * e * e * (1 - e) < k.Cprime / std::sqrt(2.0)))
        throw std::domain_error("phi_eps: constraint e^3(1-e) < C'/sqrt(2) violated");
    PhiFamilyData p;
    p.S = 1.0 / (e * (1.0 - e));
    p.R = std::sqrt(2.0) / (1.0 - e);
    ISRData j = buildJSR(n, p.S, p.R);
    p.map = annotate(j.map, "phi_eps[e=" + std::to_string(e) + "]");
    p.rho = std::pow(2.0, -0.25) * k.C / std::sqrt(std::pow(e, 5) * (1.0 - e));
    p.source = makeProduct({makeBall(2, 1.0 - e), makeBall(2 * (n - 1), 1.0 / e)});
    p.map = annotate(p.map, p.map->tag(), p.source, j.target);
    return p;
}

}  // namespace symplembed
