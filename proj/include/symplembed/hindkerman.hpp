#pragma once

#include <memory>

#include "symplembed/serpentine.hpp"
#include "symplembed/transport.hpp"

namespace symplembed {

// Buhovski-style mollified trapezoid cutoff of Eqs. (cutoff)-(trickyinequality):
// identically 1 on [-a, a], identically 0 outside [-A+eps^2, A-eps^2],
// |chi'| <= 1/A + eps, within eps of the tent 1 - |x|/A on [-A+eps/2, A-eps/2].
class CutoffChi {
public:
    CutoffChi(double eps, double a, double A);
    double value(double x) const;
    double d1(double x) const;
    double d2(double x) const;
    double eps() const { return eps_; }
    double a() const { return a_; }
    double A() const { return A_; }
    double mollifierWidth() const { return d_; }

private:
    double eps_, a_, A_, d_, k1_, k2_, slope_;
    // smoothed ramp K (*) max(0,y) and its derivatives
    double smRamp(double y) const;
    double smRampD1(double y) const;
    double smRampD2(double y) const;
};

// Phi_eps(x1,y1,x2,y2) = (x1, y1 + chi'(x1) x2 sqrt(pi), x2, y2 + chi(x1) sqrt(pi)):
// the exact time-1 flow of H = -chi(x1) x2 sqrt(pi); symplectic analytically.
MapPtr buildFlow(std::shared_ptr<const CutoffChi> chi);

struct SolveAResult {
    double limitSmall = 0, limitLarge = 0;    // roots of 5A^2 - 100A + 4pi
    double measuredSmall = 0, measuredLarge = 0;  // roots of the measured p(A) = 100 eps
    bool smallFeasible = false, largeFeasible = false;
};
SolveAResult solveA(double eps);

// shipped validity threshold for the construction (largest grid eps for which
// the serpentine plan, cutoff feasibility and injectivity scans all pass)
inline constexpr double kEpsMax = 0.05;

// Derived constants (closed form, from the envelope law area = 2pi + 160 eps):
// r(eps) <= sqrt2 + ctilde * eps with ctilde = 40 sqrt2 / pi; c = ctilde/100;
// C = 10 sqrt(c); C' = 9c.
struct HkConstants {
    double ctilde = 0, c = 0, C = 0, Cprime = 0, eps0 = kEpsMax;
};
HkConstants hkConstants();

// Everything Theorem 6.2 needs at one eps.
struct HkBundle {
    double eps = 0;
    std::shared_ptr<const SerpentineImmersion> serp;
    std::shared_ptr<const CutoffChi> chi;
    MapPtr iEps;        // Sigma(100 eps) -> R^2 (flat torus chart coords)
    MapPtr flow;        // Phi_eps on R^4
    MapPtr I;           // Sigma x Q(sqrt pi) -> R^2 x R(sqrt pi, 2 sqrt pi)
    DomainPtr envelope;  // D_eps
    double rEps = 0;
    TransportPtr f;        // R(sqrt pi, 2 sqrt pi) -> B^2(sqrt 2)
    TransportPtr g;        // B^2(1) -> Q(sqrt pi)
    TransportPtr phiEnv;   // D_eps -> B^2(r(eps))
    MapPtr chain;          // Sigma(100 eps) x B^2(1) -> B^2(r) x B^2(sqrt 2)

    // samples of Sigma x Q / Sigma x B^2(1) cores
    std::vector<Vec> sampleSigmaQ(int count, std::uint64_t seed) const;
    std::vector<Vec> sampleSigmaDisk(int count, std::uint64_t seed) const;
};

std::shared_ptr<const HkBundle> buildBundle(double eps);

// Theorem 6.3: i_{S,R} : B^2(1) x B^{2(n-1)}(S) ->
//   B^2(R) x B^2(sqrt 2) x B^{2(n-2)}(C S^2 / sqrt(R - sqrt 2)),
// valid on { S > 0, sqrt2 < R < sqrt2 + C' S^2, (R - sqrt2)/c <= 100 eps0 }.
struct ISRData {
    MapPtr map;
    double T = 0, eps63 = 0, epsOur = 0;
    DomainPtr source, target;
};
ISRData buildISR(int n, double S, double R);

// section 7 rescaling j_{S,R}: x -> sqrt2/R * i_{S,R}(R x / sqrt2)
ISRData buildJSR(int n, double S, double R);

// the section 7 subfamily phi_eps (S = 1/(e(1-e)), R = sqrt2/(1-e))
struct PhiFamilyData {
    MapPtr map;
    double S = 0, R = 0, rho = 0;  // rho(e) = 2^{-1/4} C / sqrt(e^5 (1-e))
    DomainPtr source;              // B^2(1-e) x B^{2(n-1)}(1/e)
};
PhiFamilyData buildPhiEps(int n, double e);

}  // namespace symplembed
