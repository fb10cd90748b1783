#pragma once

#include <functional>
#include <memory>
#include <optional>

#include "symplembed/maps.hpp"

namespace symplembed {

// X_H = Omega grad H, i.e. xdot_i = dH/dy_i, ydot_i = -dH/dx_i (the convention
// under which Phi_eps is the time-1 flow of -chi(x1) x2 sqrt(pi)).
Vec hamiltonianField(const Vec& gradH);

// Nested family (W_t, phi_t), t in (lo, hi), with W_t = { level(x) > t } and
// cl(W_s) in W_t for t < s. The hull radius realizes Remark "automatically
// satisfied": phi_v(W_v) lies in a ball of radius hullRadius(v).
struct NestedFamily {
    EmbeddingFamily family;
    std::function<double(const Vec&)> level;
    std::function<Vec(const Vec&)> levelGrad;
    std::function<double(double)> hullRadius;
    int dim = 2;
    double paramStep = 1e-4;  // finite-difference step for the v-derivative
    // when set, the family builder is expensive: phi_v is evaluated on a fixed
    // v-grid of this spacing and the v-derivative uses 4-point stencils
    std::optional<double> gridSpacing;

    // X_v(y) with y = phi_v(x) (x known): the pullback field and its pushforward
    Vec fieldAtSource(double v, const Vec& x) const;   // d/dv phi_v(x)
    Vec pulledBackField(double v, const Vec& x) const; // (D phi_v)^{-1} d/dv phi_v
    MapPtr mapAt(double v) const;
    // phi_v(x) / D phi_v(x) at continuous v: exact for cheap families, cubic
    // Lagrange interpolation through the cached v-grid when gridSpacing is set
    Vec evalAt(double v, const Vec& x) const;
    Mat jacobianAt(double v, const Vec& x) const;
};

// toy families for the oracle tests
NestedFamily translationFamily(double speed = 1.0);  // phi_v(x) = x + (v,0) on B^2(1-v)
NestedFamily rotationFamily();                       // phi_v = rotation by v on B^2(1-v)

// H~_v on W_{s''} by ray quadrature from the basepoint; pinned by the oracle
// families (translation: H~ = y - y0; rotation: H~ = |x-0|^2/2-type up to the
// documented sign convention).
double hamiltonianTilde(const NestedFamily& fam, double v, const Vec& x, const Vec& basepoint,
                        int quadNodes = 32);
// two-path closedness residual at x (straight ray vs a bent two-leg path)
double hamiltonianPathResidual(const NestedFamily& fam, double v, const Vec& x,
                               const Vec& basepoint);

// tau_v(y) = chi(level(phi_v^{-1} y)) with chi == 1 on W_s, == 0 off W_{s'}
struct CutoffTau {
    const NestedFamily* fam;
    double v, s, sPrime;
    double evalAtSource(const Vec& x) const;  // chi(level(x))
};

struct FlowOptions {
    double odeTol = 1e-8;
    double maxStep = 0.05;
    int maxSteps = 100000;
};

// Hamiltonian flow Psi of G_v = H_v tau_v from v = t to v = tPrime, realized
// trajectory-wise with the source point tracked for warm-started inversion.
class Lemma1Flow final : public SmoothMap {
public:
    Lemma1Flow(const NestedFamily* fam, double t, double tPrime, double s, FlowOptions opt);
    int dimIn() const override { return fam_->dim; }
    int dimOut() const override { return fam_->dim; }
    Vec eval(const Vec& y) const override;
    // trajectory with a known source point (exact seeding)
    Vec evalSeeded(const Vec& y0, const Vec& xSeed) const;
    double t() const { return t_; }
    double tPrime() const { return tP_; }

private:
    Vec rhs(double v, const Vec& y, Vec& xTracked, bool& outside) const;
    const NestedFamily* fam_;
    double t_, tP_, s_, sPrime_, sDoublePrime_;
    FlowOptions opt_;
    Vec basepoint_;
    mutable std::vector<std::pair<Vec, Vec>> seeds_;  // (image, source) seed grid
};

struct Lemma1Report {
    std::shared_ptr<Lemma1Flow> flow;
    double defect = 0;       // sup | Psi(phi_t x) - phi_{t'} x | over samples of W_s
    double symplectic = 0;   // flow symplecticity residual (FD Jacobian)
    long samples = 0;
};

Lemma1Report lemma1Step(const NestedFamily& fam, double t, double tPrime, double s,
                        const std::vector<Vec>& testPoints, FlowOptions opt = {});

// Telescope of Lemma "j := psi_2 . psi_3 ... i_n" with levels t_n = 1/n,
// n = 3 .. nMax, evaluated lazily per point.
class GluedEmbedding : public SmoothMap {
public:
    GluedEmbedding(const NestedFamily* fam, int nMax, FlowOptions opt,
                   const std::vector<Vec>& defectProbes);
    int dimIn() const override { return fam_->dim; }
    int dimOut() const override { return fam_->dim; }
    Vec eval(const Vec& x) const override;
    // evaluate via a forced level (for the well-definedness check)
    Vec evalAtLevel(const Vec& x, int n) const;
    int minLevelFor(const Vec& x) const;
    const std::vector<Lemma1Report>& levels() const { return levels_; }
    double accumulatedTolerance() const;

private:
    const NestedFamily* fam_;
    int nMax_;
    std::vector<Lemma1Report> levels_;  // psi_n for n = 3..nMax-1 at levels_[n-3]
};

std::shared_ptr<GluedEmbedding> theoremCor(const NestedFamily& fam, int nMax,
                                           const std::vector<Vec>& defectProbes,
                                           FlowOptions opt = {});

// simple thread-pool map (worker count capped by SYMPLEMBED_THREADS)
void parallelFor(long n, const std::function<void(long)>& body);
int workerCount();

}  // namespace symplembed
