#include "symplembed/guth.hpp"

#include <cmath>

namespace symplembed {

namespace {
inline double auxQ(double t) { return std::sqrt(2.0 * t * t - 2.0 * t + 1.0); }
inline double auxG(double t) { return t / auxQ(t); }  // strictly increasing on (0,1)
}  // namespace

double solveT(double R) {
    if (!(R > 1.0 / 3.0))
        throw std::domain_error("solve_t: requires R > 1/3 (square-root singularity at R = 1/3)");
    const double target = 1.0 / (9.0 * R * R);  // = auxG(t), in (0,1)
    double lo = 0.0, hi = 1.0;
    for (int i = 0; i < 200; ++i) {
        double mid = 0.5 * (lo + hi);
        (auxG(mid) < target ? lo : hi) = mid;
    }
    double t = 0.5 * (lo + hi);
    // Newton polish with g'(t) = (1-t) / q^3
    for (int i = 0; i < 4; ++i) {
        double q = auxQ(t);
        double g = t / q - target;
        double dg = (1.0 - t) / (q * q * q);
        if (std::abs(dg) < 1e-300) break;
        double tn = t - g / dg;
        if (tn > 0.0 && tn < 1.0) t = tn;
    }
    return t;
}

double solveTResidual(double R, double t) { return std::abs(t * R * R / auxQ(t) - 1.0 / 9.0); }

GuthFrame buildGuthFrame(double R) {
    GuthFrame fr;
    fr.R = R;
    double t = solveT(R);
    fr.t = t;
    double q = auxQ(t);
    fr.lambda = q / t;  // 1 / omega(f1, f2)
    double sqLam = std::sqrt(fr.lambda);

    fr.f1 = Vec::Zero(4);
    fr.f1 << 1, 0, 0, 0;
    fr.f2 = Vec::Zero(4);
    fr.f2 << 0, t / q, (1 - t) / q, 0;
    // closed-form symplectic complement basis, smooth in t
    fr.f1p = Vec::Zero(4);
    fr.f1p << 0, 0, 1, 0;
    fr.f2p = Vec::Zero(4);
    fr.f2p << (1 - t) / t, 0, 0, 1;

    // columns of (L_R)^{-1}: sqrt(lambda) f1, sqrt(lambda) f2, f1p, f2p
    // (the sqrt split makes the restriction to V_R-parallel planes a
    // similarity, so horizontal slices of the image are disks)
    Mat B(4, 4);
    B.col(0) = sqLam * fr.f1;
    B.col(1) = sqLam * fr.f2;
    B.col(2) = fr.f1p;
    B.col(3) = fr.f2p;

    // Schur complement of the image quadratic form G = B^T B onto (x2,y2) is
    // diag(t^2/q^2, 1); ell_R = diag(1,1,mu,1/mu) with mu = sqrt(t/q) turns the
    // shadow into a disk of radius R sqrt(q/t) = 3 R^2.
    fr.mu = std::sqrt(t / q);
    Mat D = Mat::Identity(4, 4);
    D(2, 2) = fr.mu;
    D(3, 3) = 1.0 / fr.mu;
    fr.Minv = B * D.inverse();
    fr.M = D * B.inverse();
    fr.shadowRadius = R * std::sqrt(q / t);  // = 3 R^2 by the defining equation
    fr.centralSliceRadius = R * std::sqrt(t / q);
    fr.rho = 1.0 + 2.0 * fr.shadowRadius;  // both (x1,y1)-shadow half-axes equal 3R^2
    return fr;
}

MapPtr buildLR(double R) {
    GuthFrame fr = buildGuthFrame(R);
    auto m = std::make_shared<AffineMap>(fr.M);
    m->setTag("L_R");
    return m;
}

double projectionRadiusBound(double R) {
    GuthFrame fr = buildGuthFrame(R);
    return fr.shadowRadius;
}

SpikeFunction::SpikeFunction(double rho_) : rho(rho_) {
    if (rho < 1.0) throw std::invalid_argument("SpikeFunction: rho must be >= 1");
    w = 1e-6 / rho;                  // cap half-width; |f| <= 100 rho w = 1e-4
    D = 200.0 * rho * w / (1.0 - 2.0 * w);  // decay depth; >= -0.1 easily
}

// f' = 100 rho * cap(x) - D * plateau(x) on the period [0,1); f = integral.
// cap: Bump((x+w)/(2w)) near integers (value 1 at x=0); plateau: Bump over
// [w, 1-w]. Periodicity: 100 rho * w = D * (1-2w)/2.
namespace {
inline double capVal(double u, double w) {  // u in [-1/2, 1/2); cap around 0
    if (std::abs(u) >= w) return 0.0;
    return Bump::value((u + w) / (2 * w));
}
inline double capD1(double u, double w) {
    if (std::abs(u) >= w) return 0.0;
    return Bump::d1((u + w) / (2 * w)) / (2 * w);
}
inline double plateauVal(double x, double w) {  // x in [0,1)
    if (x <= w || x >= 1 - w) return 0.0;
    return Bump::value((x - w) / (1 - 2 * w));
}
inline double plateauD1(double x, double w) {
    if (x <= w || x >= 1 - w) return 0.0;
    return Bump::d1((x - w) / (1 - 2 * w)) / (1 - 2 * w);
}
// integral of cap from -w to u
inline double capInt(double u, double w) {
    if (u <= -w) return 0.0;
    if (u >= w) return w;  // 2w * 1/2
    // integrate Bump from 0 to (u+w)/(2w), scaled by 2w
    double s = (u + w) / (2 * w);
    double acc;
    if (s <= 0.5) {
        // int_0^s S(2t) dt = (1/2) int_0^{2s} S = (1/2) * I(2s)
        acc = 0.5 * [&] {
            double v = 2 * s;  // int_0^v SmoothStep
            // antiderivative of septic smoothstep: 7t^5 - 14 t^6 + 10 t^7 - 2.5 t^8
            double t2 = v * v, t4 = t2 * t2;
            return t4 * v * (7.0 + v * (-14.0 + v * (10.0 - 2.5 * v)));
        }();
    } else {
        double half = 0.25;  // int over first half of bump = 1/4
        double v = 2.0 - 2.0 * s;
        double t2 = v * v, t4 = t2 * t2;
        double tail = 0.5 * (t4 * v * (7.0 + v * (-14.0 + v * (10.0 - 2.5 * v))));
        acc = half + (0.25 - tail);
    }
    return acc * 2 * w;
}
inline double plateauInt(double x, double w) {  // integral from 0 to x
    if (x <= w) return 0.0;
    double L = 1 - 2 * w;
    double s = std::min((x - w) / L, 1.0);
    double acc;
    if (s <= 0.5) {
        double v = 2 * s;
        double t2 = v * v, t4 = t2 * t2;
        acc = 0.5 * (t4 * v * (7.0 + v * (-14.0 + v * (10.0 - 2.5 * v))));
    } else {
        double v = 2.0 - 2.0 * s;
        double t2 = v * v, t4 = t2 * t2;
        acc = 0.25 + (0.25 - 0.5 * (t4 * v * (7.0 + v * (-14.0 + v * (10.0 - 2.5 * v)))));
    }
    return acc * L;
}
}  // namespace

double SpikeFunction::value(double x) const {
    double u = x - std::floor(x);  // in [0,1)
    // f(u) = 100 rho * [capInt over [0,u]] - D * plateauInt(u)
    // cap mass on [0,u]: cap lives on [0,w] and [1-w,1)
    double capMass = 0.0;
    capMass += capInt(std::min(u, 0.5) , w) - capInt(0.0, w);
    if (u > 1 - w) capMass += capInt(u - 1.0, w) - capInt(-w, w);
    return 100.0 * rho * capMass - D * plateauInt(u, w);
}

double SpikeFunction::d1(double x) const {
    double u = x - std::floor(x);
    double c = capVal(u, w) + capVal(u - 1.0, w);
    return 100.0 * rho * c - D * plateauVal(u, w);
}

double SpikeFunction::d2(double x) const {
    double u = x - std::floor(x);
    double c = capD1(u, w) + capD1(u - 1.0, w);
    return 100.0 * rho * c - D * plateauD1(u, w);
}

MapPtr liftShear(const SpikeFunction& s) {
    auto eval = [s](const Vec& p) {
        Vec out(2);
        out << p[0] + s.value(p[0]), p[1] / (1.0 + s.d1(p[0]));
        return out;
    };
    auto jac = [s](const Vec& p) {
        double f1 = s.d1(p[0]), f2 = s.d2(p[0]);
        Mat J(2, 2);
        J << 1.0 + f1, 0.0, -p[1] * f2 / ((1.0 + f1) * (1.0 + f1)), 1.0 / (1.0 + f1);
        return J;
    };
    auto m = std::make_shared<FuncMap>(2, 2, eval, jac, "Psi_R");
    return m;
}

MapPtr buildGuthFamily(int n, double R) {
    if (n < 3) throw std::invalid_argument("build_guth_family: n must be >= 3");
    GuthFrame fr = buildGuthFrame(R);
    SpikeFunction spike(fr.rho);
    auto linear = std::make_shared<AffineMap>(fr.M);
    linear->setTag("L_R");
    MapPtr shear = product(liftShear(spike), std::make_shared<IdentityMap>(2));
    MapPtr core = torusQuotient(compose(shear, linear), 1.0);
    MapPtr full = core;
    if (n > 3) full = product(core, std::make_shared<IdentityMap>(2 * (n - 3)));
    return annotate(full, "i_R[n=" + std::to_string(n) + ",R=" + std::to_string(R) + "]",
                    makeBall(2 * (n - 1), R),
                    makeProduct({std::make_shared<PuncturedTorus>(1.0),
                                 makeBall(2 * (n - 2), 10.0 * R * R)}));
}

EmbeddingFamily guthFamily(int n, double Rlo, double Rhi) {
    return EmbeddingFamily(
        Rlo, Rhi, [n](double R) { return buildGuthFamily(n, R); },
        [n](double R) { return makeBall(2 * (n - 1), R); });
}

}  // namespace symplembed
