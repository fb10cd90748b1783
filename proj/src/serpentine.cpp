#include "symplembed/serpentine.hpp"

#include <Eigen/Geometry>

#include <cmath>

#include "symplembed/smoothstep.hpp"

namespace symplembed {

namespace {

constexpr int kPrefixCells = 64;
constexpr int kGaussN = 10;
const double gx[kGaussN] = {0.0765265211334973, 0.2277858511416451, 0.3737060887154195,
                            0.5108670019508271, 0.6360536807265150, 0.7463319064601508,
                            0.8391169718222188, 0.9122344282513259, 0.9639719272779138,
                            0.9931285991850949};
const double gw[kGaussN] = {0.1527533871307258, 0.1491729864726037, 0.1420961093183820,
                            0.1316886384491766, 0.1181945319615184, 0.1019301198172404,
                            0.0832767415767048, 0.0626720483341091, 0.0406014298003869,
                            0.0176140071391521};

inline Eigen::Vector2d dirVec(double th) { return {std::cos(th), std::sin(th)}; }
inline Eigen::Vector2d leftNormVec(double th) { return {-std::sin(th), std::cos(th)}; }

// reciprocal-smoothstep width profile: 1/w affine in S(sigma)
inline double widthProfile(double w0, double w1, double s, double& dw) {
    double S = SmoothStep::value(s), dS = SmoothStep::d1(s);
    double inv = 1.0 / w0 + (1.0 / w1 - 1.0 / w0) * S;
    double w = 1.0 / inv;
    dw = -w * w * (1.0 / w1 - 1.0 / w0) * dS;
    return w;
}

inline double widthIntegralInv(double w0, double w1, double s) {
    // int_0^s 1/w = s/w0 + (1/w1-1/w0) * SInt(s)
    return s / w0 + (1.0 / w1 - 1.0 / w0) * smoothStepIntegral(s);
}

// m(y; kappa) = (1 - sqrt(1-2 y kappa)) / kappa, stable form
inline double ribbonM(double y, double k) {
    double q = std::sqrt(std::max(1.0 - 2.0 * y * k, 1e-12));
    return 2.0 * y / (1.0 + q);
}
inline double ribbonDmDk(double y, double k) {
    double u = y * k;
    if (std::abs(u) < 1e-4) return y * y * (0.5 + u + 1.875 * u * u);
    double q = std::sqrt(std::max(1.0 - 2.0 * u, 1e-12));
    return (u / q - 1.0 + q) / (k * k);
}

}  // namespace

double BandPiece::widthAt(double sigma) const {
    if (type == Type::Corner) return width;
    if (type == Type::Straight) return w0;
    double dw;
    return widthProfile(w0, w1, sigma, dw);
}

Eigen::Vector2d BandPiece::centerline(double sigma) const {
    switch (type) {
        case Type::Straight:
            return P0 + dirVec(theta0) * (length * sigma) +
                   leftNormVec(theta0) * (lateralShift * SmoothStep::value(sigma));
        case Type::Channel: {
            double X = length * widthIntegralInv(w0, w1, sigma) / widthIntegralInv(w0, w1, 1.0);
            return P0 + dirVec(theta0) * X +
                   leftNormVec(theta0) * (lateralShift * SmoothStep::value(sigma));
        }
        case Type::Corner: {
            // prefix table lookup + Gauss remainder
            double sk = sigma * kPrefixCells;
            int cell = std::min(static_cast<int>(sk), kPrefixCells - 1);
            double s0 = double(cell) / kPrefixCells;
            Eigen::Vector2d p = prefix[cell];
            double hw = 0.5 * (sigma - s0);
            double c = s0 + hw;
            for (int i = 0; i < kGaussN; ++i) {
                for (double s : {c - hw * gx[i], c + hw * gx[i]}) {
                    double th = theta0 + turn * 2.0 * bumpIntegral(s);
                    p += gw[i] * hw * arcLen * dirVec(th);
                }
            }
            return p;
        }
    }
    return P0;
}

Eigen::Vector2d BandPiece::endPos() const {
    if (hasEndCached) return endCached;
    if (type == Type::Corner) return prefix[kPrefixCells];
    return centerline(1.0);
}

double BandPiece::endTheta() const { return type == Type::Corner ? theta0 + turn : theta0; }

Eigen::Vector2d BandPiece::eval(double sigma, double t) const {
    switch (type) {
        case Type::Straight:
            return centerline(sigma) + leftNormVec(theta0) * (t * w0);
        case Type::Channel: {
            double dw;
            double w = widthProfile(w0, w1, sigma, dw);
            return centerline(sigma) + leftNormVec(theta0) * (t * w);
        }
        case Type::Corner: {
            double th = theta0 + turn * 2.0 * bumpIntegral(sigma);
            double kphys = turn * 2.0 * Bump::value(sigma) / arcLen;
            double m = ribbonM(t * width, kphys);
            return centerline(sigma) + leftNormVec(th) * m;
        }
    }
    return P0;
}

Eigen::Matrix2d BandPiece::partials(double sigma, double t) const {
    Eigen::Matrix2d J;
    switch (type) {
        case Type::Straight: {
            Eigen::Vector2d T = dirVec(theta0), N = leftNormVec(theta0);
            J.col(0) = T * length + N * (lateralShift * SmoothStep::d1(sigma));
            J.col(1) = N * w0;
            break;
        }
        case Type::Channel: {
            Eigen::Vector2d T = dirVec(theta0), N = leftNormVec(theta0);
            double dw;
            double w = widthProfile(w0, w1, sigma, dw);
            double Xp = length * (1.0 / w) / widthIntegralInv(w0, w1, 1.0);
            J.col(0) = T * Xp + N * (t * dw + lateralShift * SmoothStep::d1(sigma));
            J.col(1) = N * w;
            break;
        }
        case Type::Corner: {
            double th = theta0 + turn * 2.0 * bumpIntegral(sigma);
            Eigen::Vector2d T = dirVec(th), N = leftNormVec(th);
            double kphys = turn * 2.0 * Bump::value(sigma) / arcLen;
            double kprime = turn * 2.0 * Bump::d1(sigma) / arcLen;
            double y = t * width;
            double m = ribbonM(y, kphys);
            double q = std::sqrt(std::max(1.0 - 2.0 * y * kphys, 1e-12));
            J.col(0) = T * (arcLen * (1.0 - m * kphys)) + N * (ribbonDmDk(y, kphys) * kprime);
            J.col(1) = N * (width / q);
            break;
        }
    }
    return J;
}

// ---------------------------------------------------------------- assembly

namespace {

BandPiece makeStraight(Eigen::Vector2d P0, double th, double L, double w, double drift = 0.0) {
    BandPiece p;
    p.type = BandPiece::Type::Straight;
    p.P0 = std::move(P0);
    p.theta0 = th;
    p.length = L;
    p.w0 = p.w1 = w;
    p.lateralShift = drift;
    p.area = L * w;
    return p;
}

BandPiece makeChannel(Eigen::Vector2d P0, double th, double dL, double w0, double w1,
                      double shift) {
    BandPiece p;
    p.type = BandPiece::Type::Channel;
    p.P0 = std::move(P0);
    p.theta0 = th;
    p.length = dL;
    p.w0 = w0;
    p.w1 = w1;
    p.lateralShift = shift;
    p.area = dL / widthIntegralInv(w0, w1, 1.0);
    return p;
}

// unit displacement integrals of the bump-curvature turn profiles:
// (int cos theta, int sin theta) over sigma for |turn| = pi/2 and pi
const Eigen::Vector2d& unitTurn90() {
    static Eigen::Vector2d v = [] {
        Eigen::Vector2d acc = Eigen::Vector2d::Zero();
        for (int c = 0; c < 256; ++c) {
            double hw = 0.5 / 256, ctr = (c + 0.5) / 256;
            for (int i = 0; i < kGaussN; ++i)
                for (double s : {ctr - hw * gx[i], ctr + hw * gx[i]}) {
                    double th = (M_PI / 2) * 2.0 * bumpIntegral(s);
                    acc += gw[i] * hw * dirVec(th);
                }
        }
        return acc;
    }();
    return v;
}
const Eigen::Vector2d& unitTurn180() {
    static Eigen::Vector2d v = [] {
        Eigen::Vector2d acc = Eigen::Vector2d::Zero();
        for (int c = 0; c < 256; ++c) {
            double hw = 0.5 / 256, ctr = (c + 0.5) / 256;
            for (int i = 0; i < kGaussN; ++i)
                for (double s : {ctr - hw * gx[i], ctr + hw * gx[i]}) {
                    double th = M_PI * 2.0 * bumpIntegral(s);
                    acc += gw[i] * hw * dirVec(th);
                }
        }
        return acc;
    }();
    return v;
}

BandPiece makeCorner(Eigen::Vector2d P0, double th, double turn, double w,
                     bool buildTable = true) {
    BandPiece p;
    p.type = BandPiece::Type::Corner;
    p.P0 = std::move(P0);
    p.theta0 = th;
    p.turn = turn;
    p.width = w;
    p.arcLen = (std::abs(turn) > 2.0 ? 7.2 : 3.6) * w;
    p.area = p.arcLen * w;
    if (buildTable) {
        p.prefix.resize(kPrefixCells + 1);
        p.prefix[0] = p.P0;
        for (int c = 0; c < kPrefixCells; ++c) {
            double s0 = double(c) / kPrefixCells;
            double hw = 0.5 / kPrefixCells;
            double ctr = s0 + hw;
            Eigen::Vector2d acc = Eigen::Vector2d::Zero();
            for (int i = 0; i < kGaussN; ++i) {
                for (double s : {ctr - hw * gx[i], ctr + hw * gx[i]}) {
                    double thv = th + turn * 2.0 * bumpIntegral(s);
                    acc += gw[i] * hw * p.arcLen * dirVec(thv);
                }
            }
            p.prefix[c + 1] = p.prefix[c] + acc;
        }
    } else {
        const Eigen::Vector2d& u = std::abs(turn) > 2.0 ? unitTurn180() : unitTurn90();
        Eigen::Vector2d local(u.x(), (turn >= 0 ? 1.0 : -1.0) * u.y());
        Eigen::Rotation2Dd rot(th);
        p.endCached = p.P0 + p.arcLen * (rot * local);
        p.hasEndCached = true;
    }
    return p;
}

// displacement of a unit-heading corner: (along-initial, along-left)
std::pair<double, double> cornerDisplacement(double turn, double w) {
    BandPiece c = makeCorner({0, 0}, 0.0, turn, w, false);
    Eigen::Vector2d e = c.endPos();
    return {e.x(), e.y()};  // theta0 = 0: x = along, y = left
}

struct Plan {
    std::vector<BandPiece> pieces;
    int laneUp = -1, laneDown = -1;
    bool feasible = true;
    double minStraight = std::numeric_limits<double>::infinity();
    double L1 = 0, H2 = 0, lowLevel = 0;
};

Plan planCircuit(double eps, double A, bool lite) {
    Plan pl;
    const double a = eps * eps;
    const double m = eps;
    const double w = eps, wl = 0.5 * eps;
    const double h = M_PI / (A - a);
    const double L1 = std::max(5.2 * eps, h - 6.0 * eps);
    const double H2 = h + 6.0 * eps;
    const double xcu = 3.0 * eps;
    const double wd = 1.2 * a;
    pl.L1 = L1;
    pl.H2 = H2;

    auto [p90, q90] = cornerDisplacement(M_PI / 2, w);  // symmetric: p90 == q90
    double d9 = p90;
    auto [p180, q180] = cornerDisplacement(-M_PI, w);
    (void)p180;  // ~0 by symmetry
    double uHalf = 0.5 * std::abs(q180);

    auto add = [&](BandPiece p) {
        if (p.type == BandPiece::Type::Straight || p.type == BandPiece::Type::Channel)
            pl.minStraight = std::min(pl.minStraight, p.length);
        pl.pieces.push_back(std::move(p));
    };
    auto tip = [&]() { return pl.pieces.back().endPos(); };
    auto tth = [&]() { return pl.pieces.back().endTheta(); };

    const double E = 0, N = M_PI / 2, W = M_PI, S = -M_PI / 2;

    // 1. lane up (eastbound, upper half of the strip)
    pl.laneUp = 0;
    add(makeStraight({-A - m, eps / 4}, E, 2 * (A + m), wl));
    // 2. splay to full width, centerline to y = 0 (outboard east)
    add(makeChannel(tip(), E, 2 * eps, wl, w, -eps / 4));
    // 3-5. up and over to the T1 level
    add(makeCorner(tip(), E, +M_PI / 2, w, !lite));
    add(makeStraight(tip(), N, L1 - 2 * d9 - tip().y() + q90, w));  // rise to y = L1 - d9
    // (we want corner-5 to end exactly at level L1)
    {
        // recompute: straight so that after corner (adds +p90 in y) we are at L1
        BandPiece& s = pl.pieces.back();
        double yNow = s.P0.y();
        s.length = (L1 - d9) - yNow;
        s.area = s.length * s.w0;
        pl.minStraight = std::min(pl.minStraight, s.length);
    }
    add(makeCorner(tip(), N, +M_PI / 2, w, !lite));
    // 6. T1 westbound at level L1
    add(makeStraight(tip(), W, tip().x() - (xcu + d9), w));
    // 7. corner down
    add(makeCorner(tip(), W, +M_PI / 2, w, !lite));
    // 8. CU descent to the dive
    add(makeStraight(tip(), S, tip().y() - 2.2 * eps, w));
    // 9-13. dive: narrow, shift into the box, cross, shift west, widen
    add(makeChannel(tip(), S, 0.7 * eps, w, wd, 0.0));
    add(makeChannel(tip(), S, 0.7 * eps, wd, wd, (0.2 * a - tip().x())));
    add(makeChannel(tip(), S, 1.6 * eps, wd, wd, -0.4 * a));
    add(makeChannel(tip(), S, 0.7 * eps, wd, wd, (-2.0 * eps - tip().x())));
    add(makeChannel(tip(), S, 0.7 * eps, wd, w, +0.8 * eps));
    // 14. corner to the west
    add(makeCorner(tip(), S, -M_PI / 2, w, !lite));
    pl.lowLevel = tip().y();
    // 15. low run westbound
    {
        double xwc = -(A + m) - 3.6 * eps;  // W column center
        add(makeStraight(tip(), W, tip().x() - (xwc + d9), w));
    }
    // 16. corner north
    add(makeCorner(tip(), W, -M_PI / 2, w, !lite));
    // 17. west column up to the high run
    add(makeStraight(tip(), N, (H2 - d9) - tip().y(), w));
    // 18. corner east
    add(makeCorner(tip(), N, -M_PI / 2, w, !lite));
    // 19. high run eastbound at H2
    const double xed = A + m + 5.6 * eps;  // E descent column center
    add(makeStraight(tip(), E, (xed - d9) - tip().x(), w));
    // 20. corner south
    add(makeCorner(tip(), E, -M_PI / 2, w, !lite));
    // 21. east descent
    add(makeStraight(tip(), S, tip().y() - (-2.2 * eps + d9), w));
    // 22. corner west
    add(makeCorner(tip(), S, -M_PI / 2, w, !lite));
    // 23. approach: taper to lane width, rise to lane-down level
    add(makeChannel(tip(), W, tip().x() - (A + m), w, wl, -(-eps / 4 - tip().y())));
    // 24. lane down (westbound, lower half of the strip)
    pl.laneDown = static_cast<int>(pl.pieces.size());
    add(makeStraight(tip(), W, 2 * (A + m), wl));
    // 25. splay down for the U-turn
    add(makeChannel(tip(), W, 1.5 * eps, wl, w, -(-uHalf - tip().y())));
    // 26. U-turn (west side, rising, exits eastbound)
    add(makeCorner(tip(), W, -M_PI, w, !lite));
    // 27. splay back onto the lane-up start
    add(makeChannel(tip(), E, 1.5 * eps, w, wl, (eps / 4 - tip().y())));

    pl.feasible = pl.minStraight > 0.05 * eps;
    return pl;
}

}  // namespace

double serpentineArea(double eps, double A) {
    Plan pl = planCircuit(eps, A, /*lite=*/true);
    double s = 0;
    for (auto& p : pl.pieces) s += p.area;
    return s;
}

SerpentineRoots solveSerpentineA(double eps) {
    SerpentineRoots out;
    const double target = 100.0 * eps;
    auto f = [&](double A) { return serpentineArea(eps, A) - target; };
    // p(A) ~ 6A + c pi/(A-a): decreasing then increasing; minimum near sqrt(c pi/6)
    double Astar = 1.45;
    auto bisect = [&](double lo, double hi) {
        double flo = f(lo);
        for (int i = 0; i < 90; ++i) {
            double mid = 0.5 * (lo + hi);
            double fm = f(mid);
            if ((fm > 0) == (flo > 0)) {
                lo = mid;
                flo = fm;
            } else
                hi = mid;
        }
        return 0.5 * (lo + hi);
    };
    out.Asmall = bisect(Astar, 0.125);  // decreasing side: f(0.125+) > 0
    out.Alarge = bisect(Astar, 60.0);
    out.smallFeasible = planCircuit(eps, out.Asmall, true).feasible;
    out.largeFeasible = planCircuit(eps, out.Alarge, true).feasible;
    return out;
}

SerpentineImmersion buildSerpentine(double eps) {
    if (!(eps > 0)) throw std::invalid_argument("buildSerpentine: eps must be positive");
    SerpentineRoots roots = solveSerpentineA(eps);
    if (!roots.largeFeasible)
        throw std::runtime_error("buildSerpentine: eps too large (no feasible serpentine branch)");
    SerpentineImmersion s;
    s.eps = eps;
    s.a = eps * eps;
    s.A = roots.Alarge;
    s.h = M_PI / (s.A - s.a);
    s.ell = std::sqrt(100.0 * eps);
    s.seamMargin = 5e-4 * s.ell;

    Plan pl = planCircuit(eps, s.A, /*lite=*/false);
    if (!pl.feasible) throw std::runtime_error("buildSerpentine: infeasible plan");
    s.pieces = std::move(pl.pieces);
    s.laneUpIdx = pl.laneUp;
    s.laneDownIdx = pl.laneDown;
    s.laneLevelTop = pl.L1;
    s.highLevel = pl.H2;
    s.lowLevel = pl.lowLevel;

    s.cumArea.assign(1, 0.0);
    for (auto& p : s.pieces) s.cumArea.push_back(s.cumArea.back() + p.area);
    s.totalArea = s.cumArea.back();

    // circuit closure sanity
    Eigen::Vector2d closure = s.pieces.back().endPos() - s.pieces.front().P0;
    if (closure.norm() > 1e-9)
        throw std::runtime_error("buildSerpentine: circuit failed to close (defect " +
                                 std::to_string(closure.norm()) + ")");
    return s;
}

int SerpentineImmersion::pieceAt(double u, double& sigma) const {
    double target = positiveMod(u, ell) / ell * totalArea;
    int lo = 0, hi = static_cast<int>(pieces.size());
    while (hi - lo > 1) {
        int mid = (lo + hi) / 2;
        (cumArea[mid] <= target ? lo : hi) = mid;
    }
    sigma = (target - cumArea[lo]) / pieces[lo].area;
    sigma = std::clamp(sigma, 0.0, 1.0);
    return lo;
}

Vec SerpentineImmersion::evalFlat(const Vec& uv) const {
    double sigma;
    int k = pieceAt(uv[0], sigma);
    double t = positiveMod(uv[1], ell) / ell - 0.5;
    Eigen::Vector2d p = pieces[k].eval(sigma, t);
    Vec out(2);
    out << p.x(), p.y();
    return out;
}

Mat SerpentineImmersion::jacobianFlat(const Vec& uv) const {
    double sigma;
    int k = pieceAt(uv[0], sigma);
    double t = positiveMod(uv[1], ell) / ell - 0.5;
    Eigen::Matrix2d P = pieces[k].partials(sigma, t);
    // u -> sigma: d sigma/du = (totalArea/ell) / area_k ; v -> t: 1/ell
    Mat J(2, 2);
    J.col(0) = P.col(0) * (totalArea / ell / pieces[k].area);
    J.col(1) = P.col(1) / ell;
    return J;
}

bool SerpentineImmersion::inStrip(const Vec& uv) const {
    double sigma;
    int k = pieceAt(uv[0], sigma);
    if (k != laneUpIdx && k != laneDownIdx) return false;
    double x = pieces[k].centerline(sigma).x();
    return x > -A && x < A;
}

std::vector<Vec> SerpentineImmersion::sampleCore(int count, std::uint64_t seed) const {
    Rng rng(hashCombine(seed, 0xABCDEF987ULL));
    std::vector<Vec> out;
    out.reserve(count);
    const double deltaPunct = 1e-3 * ell;
    while (static_cast<int>(out.size()) < count) {
        double u = rng.uniform(0.0, ell);
        double v = rng.uniform(0.0, ell);
        double seamDist = std::min(v, ell - v);
        if (seamDist <= seamMargin) continue;
        double du = std::min(u, ell - u);
        if (std::hypot(du, seamDist) <= deltaPunct) continue;
        Vec p(2);
        p << u, v;
        out.push_back(std::move(p));
    }
    return out;
}

double SerpentineImmersion::envelopeArea() const { return 2.0 * M_PI + kEnvelopeSlope * eps; }

double SerpentineImmersion::rEps() const { return std::sqrt(envelopeArea() / M_PI); }

DomainPtr SerpentineImmersion::envelope() const {
    // bounding box of all pieces
    double x0 = 1e300, x1 = -1e300, y0 = 1e300, y1 = -1e300;
    for (auto& p : pieces) {
        for (int i = 0; i <= 16; ++i) {
            double sg = double(i) / 16;
            double w = p.widthAt(sg);
            Eigen::Vector2d c = p.centerline(sg);
            x0 = std::min(x0, c.x() - w);
            x1 = std::max(x1, c.x() + w);
            y0 = std::min(y0, c.y() - w);
            y1 = std::max(y1, c.y() + w);
        }
    }
    const double r = 0.5 * eps;
    const double Wd = x1 - x0, Hg = y1 - y0;
    // pad so that total rounded-rect area is exactly 2 pi + slope * eps
    const double target = envelopeArea() - M_PI * r * r - 2.0 * (Wd + Hg) * r;
    // (W+2p)(H+2p) + 4p*... : solve (Wd+2p)(Hg+2p) + 4 r p adjustments folded:
    // area(P_in) + perimeter(P_in) r + pi r^2 = target + ... keep it simple:
    // f(p) = (Wd+2p)(Hg+2p) + 2r(Wd+Hg+4p) + pi r^2 - envelopeArea() = 0
    double A2 = 4.0, B2 = 2.0 * (Wd + Hg) + 8.0 * r,
           C2 = Wd * Hg + 2.0 * r * (Wd + Hg) + M_PI * r * r - envelopeArea();
    (void)target;
    double disc = B2 * B2 - 4 * A2 * C2;
    if (disc < 0) throw std::runtime_error("SerpentineImmersion: envelope pad insolvable");
    double pad = (-B2 + std::sqrt(disc)) / (2 * A2);
    if (pad < 0.2 * eps)
        throw std::runtime_error("SerpentineImmersion: envelope slope too small for the hull");
    return Envelope2D::roundedRect(x0 - pad, x1 + pad, y0 - pad, y1 + pad, r);
}

std::vector<Eigen::Vector2d> SerpentineImmersion::centerlinePolyline(int perPiece) const {
    std::vector<Eigen::Vector2d> poly;
    for (auto& p : pieces)
        for (int i = 0; i < perPiece; ++i) poly.push_back(p.centerline(double(i) / perPiece));
    poly.push_back(pieces.back().endPos());
    return poly;
}

namespace {

class SerpentineMapImpl final : public SmoothMap {
public:
    explicit SerpentineMapImpl(std::shared_ptr<const SerpentineImmersion> s) : s_(std::move(s)) {
        setTag("i_eps");
        source = std::make_shared<PuncturedTorus>(100.0 * s_->eps);
    }
    int dimIn() const override { return 2; }
    int dimOut() const override { return 2; }
    Vec eval(const Vec& x) const override { return s_->evalFlat(x); }
    Mat jacobian(const Vec& x) const override { return s_->jacobianFlat(x); }
    bool analyticJacobian() const override { return true; }

private:
    std::shared_ptr<const SerpentineImmersion> s_;
};

}  // namespace

MapPtr serpentineMap(std::shared_ptr<const SerpentineImmersion> s) {
    return std::make_shared<SerpentineMapImpl>(std::move(s));
}

}  // namespace symplembed
