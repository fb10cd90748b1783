#include "symplembed/gluing.hpp"

#include <atomic>
#include <cmath>
#include <cstdlib>
#include <mutex>
#include <thread>

#include "symplembed/smoothstep.hpp"

namespace symplembed {

Vec hamiltonianField(const Vec& gradH) {
    Vec X(gradH.size());
    for (int i = 0; i + 1 < gradH.size(); i += 2) {
        X[i] = gradH[i + 1];
        X[i + 1] = -gradH[i];
    }
    return X;
}

MapPtr NestedFamily::mapAt(double v) const { return family.at(v); }

namespace {
// Lagrange basis values and derivatives at v on 4 nodes
void lagrange4(const double nodes[4], double v, double* val, double* der) {
    for (int i = 0; i < 4; ++i) {
        double den = 1;
        for (int j = 0; j < 4; ++j)
            if (j != i) den *= (nodes[i] - nodes[j]);
        double prod = 1;
        for (int j = 0; j < 4; ++j)
            if (j != i) prod *= (v - nodes[j]);
        if (val) val[i] = prod / den;
        if (der) {
            double num = 0;
            for (int j = 0; j < 4; ++j) {
                if (j == i) continue;
                double p = 1;
                for (int k = 0; k < 4; ++k)
                    if (k != i && k != j) p *= (v - nodes[k]);
                num += p;
            }
            der[i] = num / den;
        }
    }
}
void gridNodes(double v, double g, double nodes[4]) {
    double base = std::floor(v / g) * g;
    nodes[0] = base - g;
    nodes[1] = base;
    nodes[2] = base + g;
    nodes[3] = base + 2 * g;
}
}  // namespace

Vec NestedFamily::fieldAtSource(double v, const Vec& x) const {
    if (gridSpacing) {
        double nodes[4], w[4];
        gridNodes(v, *gridSpacing, nodes);
        lagrange4(nodes, v, nullptr, w);
        Vec acc = Vec::Zero(dim);
        for (int i = 0; i < 4; ++i) acc += w[i] * family.at(nodes[i])->eval(x);
        return acc;
    }
    return family.paramDerivative(v, x, paramStep);
}

Vec NestedFamily::evalAt(double v, const Vec& x) const {
    if (!gridSpacing) return family.at(v)->eval(x);
    double nodes[4], w[4];
    gridNodes(v, *gridSpacing, nodes);
    lagrange4(nodes, v, w, nullptr);
    Vec acc = Vec::Zero(dim);
    for (int i = 0; i < 4; ++i) acc += w[i] * family.at(nodes[i])->eval(x);
    return acc;
}

Mat NestedFamily::jacobianAt(double v, const Vec& x) const {
    if (!gridSpacing) return family.at(v)->jacobian(x);
    double nodes[4], w[4];
    gridNodes(v, *gridSpacing, nodes);
    lagrange4(nodes, v, w, nullptr);
    Mat acc = Mat::Zero(dim, dim);
    for (int i = 0; i < 4; ++i) acc += w[i] * family.at(nodes[i])->jacobian(x);
    return acc;
}

Vec NestedFamily::pulledBackField(double v, const Vec& x) const {
    Vec dv = fieldAtSource(v, x);
    Mat J = jacobianAt(v, x);
    return J.colPivHouseholderQr().solve(dv);
}

NestedFamily translationFamily(double speed) {
    NestedFamily f{
        EmbeddingFamily(
            1e-4, 0.9,
            [speed](double v) {
                Mat A = Mat::Identity(2, 2);
                Vec b(2);
                b << speed * v, 0.0;
                return std::static_pointer_cast<const SmoothMap>(
                    std::make_shared<AffineMap>(A, b));
            },
            [](double v) { return makeBall(2, 1.0 - v); }),
        [](const Vec& x) { return 1.0 - x.norm(); },
        [](const Vec& x) {
            double n = std::max(x.norm(), 1e-12);
            return Vec(-x / n);
        },
        [speed](double v) { return 1.0 - v + speed * v + 0.5; },
        2};
    return f;
}

NestedFamily rotationFamily() {
    NestedFamily f{
        EmbeddingFamily(
            1e-4, 0.9,
            [](double v) {
                Mat A(2, 2);
                A << std::cos(v), -std::sin(v), std::sin(v), std::cos(v);
                return std::static_pointer_cast<const SmoothMap>(std::make_shared<AffineMap>(A));
            },
            [](double v) { return makeBall(2, 1.0 - v); }),
        [](const Vec& x) { return 1.0 - x.norm(); },
        [](const Vec& x) {
            double n = std::max(x.norm(), 1e-12);
            return Vec(-x / n);
        },
        [](double v) { return 1.5 - v; },
        2};
    return f;
}

double hamiltonianTilde(const NestedFamily& fam, double v, const Vec& x, const Vec& basepoint,
                        int quadNodes) {
    // H~(x) = int_0^1 omega( X~(x0 + t(x-x0)), x - x0 ) dt   (ray quadrature)
    Vec d = x - basepoint;
    double acc = 0.0;
    for (int i = 0; i < quadNodes; ++i) {
        double t = (i + 0.5) / quadNodes;
        Vec xt = basepoint + t * d;
        acc += omega(fam.pulledBackField(v, xt), d);
    }
    return acc / quadNodes;
}

double hamiltonianPathResidual(const NestedFamily& fam, double v, const Vec& x,
                               const Vec& basepoint) {
    double direct = hamiltonianTilde(fam, v, x, basepoint);
    // two-leg path through a midpoint displaced orthogonally
    Vec d = x - basepoint;
    Vec mid = basepoint + 0.5 * d;
    if (d.size() >= 2) {
        Vec offs = Vec::Zero(d.size());
        offs[0] = -d[1] * 0.2;
        offs[1] = d[0] * 0.2;
        mid += offs;
    }
    auto legs = [&](const Vec& a, const Vec& b) {
        Vec dd = b - a;
        double acc = 0.0;
        const int nq = 48;
        for (int i = 0; i < nq; ++i) {
            double t = (i + 0.5) / nq;
            acc += omega(fam.pulledBackField(v, a + t * dd), dd);
        }
        return acc / nq;
    };
    double bent = legs(basepoint, mid) + legs(mid, x);
    return std::abs(direct - bent);
}

double CutoffTau::evalAtSource(const Vec& x) const {
    double lam = fam->level(x);
    return SmoothStep::value((lam - sPrime) / (s - sPrime));
}

// --------------------------------------------------------------- Lemma1Flow

Lemma1Flow::Lemma1Flow(const NestedFamily* fam, double t, double tPrime, double s, FlowOptions opt)
    : fam_(fam), t_(t), tP_(tPrime), s_(s), opt_(opt) {
    setTag("psi[" + std::to_string(t) + "->" + std::to_string(tPrime) + "]");
    if (!(t < tPrime && tPrime < s)) throw std::invalid_argument("lemma1_step: need t < t' < s");
    sDoublePrime_ = 0.5 * (tPrime + s);        // s'' in (t', s)
    sPrime_ = 0.5 * (sDoublePrime_ + s);       // s' in (s'', s)
    // basepoint: center of mass of W_{s''} samples
    auto dom = fam_->family.domainAt(sDoublePrime_);
    Sampler sampler;
    sampler.seed = 97;
    auto pts = dom->sample(128, sampler);
    basepoint_ = Vec::Zero(fam_->dim);
    for (auto& p : pts) basepoint_ += p;
    basepoint_ /= double(pts.size());
    // seed grid for cold inversions
    MapPtr phiT = fam_->mapAt(t_);
    for (auto& p : pts) seeds_.emplace_back(phiT->eval(p), p);
}

Vec Lemma1Flow::rhs(double v, const Vec& y, Vec& xTracked, bool& outside) const {
    // invert phi_v at y, warm-started from the tracked source point
    Vec x = xTracked;
    bool converged = false;
    for (int it = 0; it < 40; ++it) {
        Vec r = fam_->evalAt(v, x) - y;
        double res = r.norm();
        if (res < 1e-10 * (1.0 + y.norm())) {
            converged = true;
            break;
        }
        Mat J = fam_->jacobianAt(v, x);
        Vec step = J.colPivHouseholderQr().solve(r);
        double alpha = 1.0;
        bool improved = false;
        for (int ls = 0; ls < 20; ++ls) {
            Vec xt = x - alpha * step;
            if ((fam_->evalAt(v, xt) - y).norm() < res) {
                x = xt;
                improved = true;
                break;
            }
            alpha *= 0.5;
        }
        if (!improved) break;
    }
    if (!converged) {
        outside = true;  // inversion failed: treat as outside the hull
        return Vec::Zero(fam_->dim);
    }
    xTracked = x;
    double lam = fam_->level(x);
    if (lam <= sPrime_) {
        outside = true;
        return Vec::Zero(fam_->dim);
    }
    outside = false;
    Vec Xv = fam_->fieldAtSource(v, x);  // = d/dv phi_v at x; equals X_v(y)
    double tau = SmoothStep::value((lam - sPrime_) / (s_ - sPrime_));
    if (tau >= 1.0) return Xv;
    // X_G = tau X_H + H * (Omega grad tau)
    double H = hamiltonianTilde(*fam_, v, x, basepoint_);
    double chiPrime = SmoothStep::d1((lam - sPrime_) / (s_ - sPrime_)) / (s_ - sPrime_);
    Mat J = fam_->jacobianAt(v, x);
    Vec gradLamY = J.transpose().colPivHouseholderQr().solve(fam_->levelGrad(x));
    Vec gradTau = chiPrime * gradLamY;
    return tau * Xv + H * hamiltonianField(gradTau);
}

namespace {
// Cash-Karp 5(4) embedded pair
const double kA[6] = {0, 1.0 / 5, 3.0 / 10, 3.0 / 5, 1.0, 7.0 / 8};
const double kB[6][5] = {{0, 0, 0, 0, 0},
                         {1.0 / 5, 0, 0, 0, 0},
                         {3.0 / 40, 9.0 / 40, 0, 0, 0},
                         {3.0 / 10, -9.0 / 10, 6.0 / 5, 0, 0},
                         {-11.0 / 54, 5.0 / 2, -70.0 / 27, 35.0 / 27, 0},
                         {1631.0 / 55296, 175.0 / 512, 575.0 / 13824, 44275.0 / 110592,
                          253.0 / 4096}};
const double kC5[6] = {37.0 / 378, 0, 250.0 / 621, 125.0 / 594, 0, 512.0 / 1771};
const double kC4[6] = {2825.0 / 27648, 0, 18575.0 / 48384, 13525.0 / 55296, 277.0 / 14336,
                       1.0 / 4};
}  // namespace

Vec Lemma1Flow::evalSeeded(const Vec& y0, const Vec& xSeed) const {
    Vec y = y0;
    Vec xTracked = xSeed;
    double v = t_;
    double hstep = std::min(opt_.maxStep, (tP_ - t_) / 8.0);
    int steps = 0;
    Vec k[6];
    while (v < tP_ && steps++ < opt_.maxSteps) {
        hstep = std::min(hstep, tP_ - v);
        bool outside = false;
        Vec xStage = xTracked;
        k[0] = rhs(v, y, xStage, outside);
        if (outside && k[0].norm() == 0.0) {
            // field vanishes; nothing moves
            v += hstep;
            continue;
        }
        bool reject = false;
        Vec y5 = y, y4 = y;
        for (int attempt = 0; attempt < 40; ++attempt) {
            reject = false;
            for (int i = 1; i < 6; ++i) {
                Vec yi = y;
                for (int j = 0; j < i; ++j) yi += hstep * kB[i][j] * k[j];
                Vec xs = xStage;
                bool out;
                k[i] = rhs(v + kA[i] * hstep, yi, xs, out);
            }
            y5 = y;
            y4 = y;
            for (int i = 0; i < 6; ++i) {
                y5 += hstep * kC5[i] * k[i];
                y4 += hstep * kC4[i] * k[i];
            }
            double err = (y5 - y4).norm();
            double scale = opt_.odeTol * (1.0 + y.norm());
            if (err > scale) {
                hstep *= std::max(0.2, 0.9 * std::pow(scale / (err + 1e-300), 0.25));
                reject = true;
                continue;
            }
            // accept
            v += hstep;
            y = y5;
            if (err > 0) hstep *= std::min(5.0, 0.9 * std::pow(scale / err, 0.2));
            break;
        }
        if (reject) throw std::runtime_error("lemma1_step: ODE step failure (tolerance unreachable)");
    }
    if (v < tP_) throw std::runtime_error("lemma1_step: step budget exhausted");
    return y;
}

Vec Lemma1Flow::eval(const Vec& y) const {
    // cold start: nearest seed
    double best = std::numeric_limits<double>::infinity();
    Vec xSeed = basepoint_;
    for (auto& [img, src] : seeds_) {
        double d2 = (img - y).squaredNorm();
        if (d2 < best) {
            best = d2;
            xSeed = src;
        }
    }
    return evalSeeded(y, xSeed);
}

Lemma1Report lemma1Step(const NestedFamily& fam, double t, double tPrime, double s,
                        const std::vector<Vec>& testPoints, FlowOptions opt) {
    Lemma1Report rep;
    rep.flow = std::make_shared<Lemma1Flow>(&fam, t, tPrime, s, opt);
    MapPtr phiT = fam.mapAt(t), phiTP = fam.mapAt(tPrime);
    rep.samples = static_cast<long>(testPoints.size());
    std::vector<double> defects(testPoints.size(), 0.0);
    parallelFor(static_cast<long>(testPoints.size()), [&](long i) {
        const Vec& x = testPoints[i];
        Vec got = rep.flow->evalSeeded(phiT->eval(x), x);
        defects[i] = (got - phiTP->eval(x)).lpNorm<Eigen::Infinity>();
    });
    for (double d : defects) rep.defect = std::max(rep.defect, d);
    // flow symplecticity on a few probes (FD Jacobian of the flow)
    Mat Om = omegaMatrix(fam.dim);
    long nsym = std::min<long>(8, testPoints.size());
    std::vector<double> syms(nsym, 0.0);
    parallelFor(nsym, [&](long i) {
        const Vec& x = testPoints[i];
        Vec y0 = phiT->eval(x);
        const int d = fam.dim;
        Mat J(d, d);
        for (int c = 0; c < d; ++c) {
            double h = 1e-6 * (1.0 + std::abs(y0[c]));
            Vec yp = y0, ym = y0;
            yp[c] += h;
            ym[c] -= h;
            J.col(c) = (rep.flow->evalSeeded(yp, x) - rep.flow->evalSeeded(ym, x)) / (2 * h);
        }
        syms[i] = (J.transpose() * Om * J - Om).cwiseAbs().maxCoeff();
    });
    for (double v : syms) rep.symplectic = std::max(rep.symplectic, v);
    return rep;
}

// ----------------------------------------------------------- GluedEmbedding

GluedEmbedding::GluedEmbedding(const NestedFamily* fam, int nMax, FlowOptions opt,
                               const std::vector<Vec>& defectProbes)
    : fam_(fam), nMax_(nMax) {
    setTag("glued_j");
    for (int n = 3; n < nMax; ++n) {
        double t = 1.0 / (n + 1), tP = 1.0 / n, s = 1.0 / (n - 1);
        // probe points inside W_s
        std::vector<Vec> pts;
        for (auto& p : defectProbes)
            if (fam_->level(p) > s) pts.push_back(p);
        if (pts.empty()) pts.push_back(Vec::Zero(fam_->dim));
        levels_.push_back(lemma1Step(*fam_, t, tP, s, pts, opt));
    }
}

int GluedEmbedding::minLevelFor(const Vec& x) const {
    double lam = fam_->level(x);
    for (int n = 3; n <= nMax_; ++n)
        if (lam > 1.0 / (n - 1) + 1e-9) return n;
    throw std::domain_error("glued embedding: point outside V_{nMax-1}");
}

Vec GluedEmbedding::evalAtLevel(const Vec& x, int n) const {
    Vec y = fam_->mapAt(1.0 / n)->eval(x);  // i_n(x)
    Vec xs = x;
    for (int k = n - 1; k >= 3; --k) {
        // apply psi_k (levels_[k-3]); its source tracking starts from x itself
        y = levels_[k - 3].flow->evalSeeded(y, xs);
    }
    return y;
}

Vec GluedEmbedding::eval(const Vec& x) const { return evalAtLevel(x, minLevelFor(x)); }

double GluedEmbedding::accumulatedTolerance() const {
    double acc = 0.0;
    for (auto& l : levels_) acc += l.defect;
    return acc;
}

std::shared_ptr<GluedEmbedding> theoremCor(const NestedFamily& fam, int nMax,
                                           const std::vector<Vec>& defectProbes, FlowOptions opt) {
    return std::make_shared<GluedEmbedding>(&fam, nMax, opt, defectProbes);
}

// --------------------------------------------------------------- threading

int workerCount() {
    static int n = [] {
        if (const char* env = std::getenv("SYMPLEMBED_THREADS")) {
            int k = std::atoi(env);
            if (k > 0) return k;
        }
        return static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
    }();
    return n;
}

void parallelFor(long n, const std::function<void(long)>& body) {
    int workers = std::min<long>(workerCount(), n);
    if (workers <= 1) {
        for (long i = 0; i < n; ++i) body(i);
        return;
    }
    std::atomic<long> next(0);
    std::vector<std::thread> pool;
    std::exception_ptr err = nullptr;
    std::mutex errMx;
    for (int w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            for (;;) {
                long i = next.fetch_add(1);
                if (i >= n) return;
                try {
                    body(i);
                } catch (...) {
                    std::lock_guard<std::mutex> lk(errMx);
                    if (!err) err = std::current_exception();
                    return;
                }
            }
        });
    }
    for (auto& th : pool) th.join();
    if (err) std::rethrow_exception(err);
}

}  // namespace symplembed
