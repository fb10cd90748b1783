#include "symplembed/transport.hpp"

#include <algorithm>
#include <cmath>

namespace symplembed {

namespace {

// 20-node Gauss-Legendre on [-1, 1]
constexpr int kGauss = 10;
const double kGx[kGauss] = {0.0765265211334973, 0.2277858511416451, 0.3737060887154195,
                            0.5108670019508271, 0.6360536807265150, 0.7463319064601508,
                            0.8391169718222188, 0.9122344282513259, 0.9639719272779138,
                            0.9931285991850949};
const double kGw[kGauss] = {0.1527533871307258, 0.1491729864726037, 0.1420961093183820,
                            0.1316886384491766, 0.1181945319615184, 0.1019301198172404,
                            0.0832767415767048, 0.0626720483341091, 0.0406014298003869,
                            0.0176140071391521};

double gauss(const std::function<double(double)>& f, double a, double b) {
    double c = 0.5 * (a + b), h = 0.5 * (b - a), s = 0.0;
    for (int i = 0; i < kGauss; ++i) s += kGw[i] * (f(c - h * kGx[i]) + f(c + h * kGx[i]));
    return s * h;
}

struct CdfTable {
    std::vector<double> nodes;  // cell boundaries
    std::vector<double> cum;    // cumulative integral at nodes
    std::function<double(double)> len;

    double eval(double x) const {
        if (x <= nodes.front()) return 0.0;
        if (x >= nodes.back()) return cum.back();
        auto it = std::upper_bound(nodes.begin(), nodes.end(), x);
        size_t k = static_cast<size_t>(it - nodes.begin()) - 1;
        return cum[k] + gauss(len, nodes[k], x);
    }
    double total() const { return cum.back(); }
};

CdfTable buildCdf(const SliceProfile& p, int cellsPerBreak) {
    CdfTable t;
    t.len = [bounds = p.bounds](double x) {
        auto [lo, hi] = bounds(x);
        return std::max(hi - lo, 0.0);
    };
    std::vector<double> brk = p.breaks;
    std::sort(brk.begin(), brk.end());
    brk.erase(std::unique(brk.begin(), brk.end(),
                          [](double a, double b) { return std::abs(a - b) < 1e-14; }),
              brk.end());
    t.nodes.push_back(brk.front());
    t.cum.push_back(0.0);
    for (size_t s = 0; s + 1 < brk.size(); ++s) {
        double a = brk[s], b = brk[s + 1];
        // cosine-graded cells: clusters nodes at segment ends where slice
        // lengths may have sqrt behavior (disk caps, rounded corners)
        for (int i = 1; i <= cellsPerBreak; ++i) {
            double u = 0.5 * (1.0 - std::cos(M_PI * double(i) / cellsPerBreak));
            double x = a + (b - a) * u;
            t.cum.push_back(t.cum.back() + gauss(t.len, t.nodes.back(), x));
            t.nodes.push_back(x);
        }
    }
    return t;
}

double invertCdf(const CdfTable& t, const std::function<double(double)>& len, double target) {
    double lo = t.nodes.front(), hi = t.nodes.back();
    target = std::clamp(target, 0.0, t.total());
    // bracketed Newton with bisection safeguard
    double x = 0.5 * (lo + hi);
    for (int it = 0; it < 100; ++it) {
        double F = t.eval(x) - target;
        if (F > 0)
            hi = x;
        else
            lo = x;
        double d = len(x);
        double xn = d > 1e-300 ? x - F / d : 0.5 * (lo + hi);
        if (!(xn > lo && xn < hi)) xn = 0.5 * (lo + hi);
        if (std::abs(xn - x) < 1e-15 * (1.0 + std::abs(x))) return xn;
        x = xn;
    }
    return x;
}

}  // namespace

SliceProfile sliceProfileFor(const Domain& d, int quadCellsPerBreak) {
    SliceProfile p;
    if (auto* r = dynamic_cast<const Rectangle2D*>(&d)) {
        p.xlo = 0;
        p.xhi = r->w1();
        p.breaks = {0.0, r->w1()};
        double h = r->w2();
        p.bounds = [h](double) { return std::make_pair(0.0, h); };
        p.boundsD1 = [](double) { return std::make_pair(0.0, 0.0); };
        p.closedFormCdf = true;
        p.cdf = [h](double x) { return h * x; };
        p.area = r->w1() * r->w2();
        return p;
    }
    if (auto* b = dynamic_cast<const Ball*>(&d)) {
        if (b->dim() != 2) throw std::invalid_argument("sliceProfileFor: only 2D balls");
        double R = b->radius();
        p.xlo = -R;
        p.xhi = R;
        p.breaks = {-R, R};
        p.bounds = [R](double x) {
            double s = std::sqrt(std::max(R * R - x * x, 0.0));
            return std::make_pair(-s, s);
        };
        p.boundsD1 = [R](double x) {
            double s = std::sqrt(std::max(R * R - x * x, 1e-300));
            return std::make_pair(x / s, -x / s);
        };
        p.closedFormCdf = true;
        p.cdf = [R](double x) {
            double u = std::clamp(x / R, -1.0, 1.0);
            return R * R * (std::asin(u) + u * std::sqrt(1.0 - u * u)) + 0.5 * M_PI * R * R;
        };
        p.area = M_PI * R * R;
        return p;
    }
    if (auto* e = dynamic_cast<const Envelope2D*>(&d)) {
        auto [xlo, xhi] = e->xRange();
        p.xlo = xlo;
        p.xhi = xhi;
        p.breaks = {xlo, xhi};
        for (auto& v : e->innerVertices()) {
            for (double off : {-e->radius(), 0.0, e->radius()}) {
                double x = v.x() + off;
                if (x > xlo + 1e-13 && x < xhi - 1e-13) p.breaks.push_back(x);
            }
        }
        p.bounds = [e](double x) {
            auto s = e->sliceBounds(x);
            if (!s) return std::make_pair(0.0, 0.0);
            return *s;
        };
        p.boundsD1 = [e](double x) {
            auto s = e->sliceBoundsD1(x);
            if (!s) return std::make_pair(0.0, 0.0);
            return *s;
        };
        p.area = e->measure().value;
        // CDF is built numerically from the breaks
        CdfTable t = buildCdf(p, quadCellsPerBreak);
        p.cdf = [t](double x) { return t.eval(x); };
        // normalize tiny quadrature drift so cdf(xhi) equals the closed-form area
        double tot = t.total();
        if (tot > 0 && std::abs(tot - p.area) / p.area < 1e-6) {
            double scale = p.area / tot;
            auto base = p.cdf;
            p.cdf = [base, scale](double x) { return scale * base(x); };
        }
        return p;
    }
    throw std::invalid_argument("sliceProfileFor: domain kind '" + d.kind() +
                                "' is not slice-convex (caller must decompose)");
}

TransportMap::TransportMap(DomainPtr src, DomainPtr dst, int quadCells) {
    src_ = sliceProfileFor(*src, quadCells);
    dst_ = sliceProfileFor(*dst, quadCells);
    rho_ = dst_.area / src_.area;
    if (std::abs(rho_ - 1.0) > 1e-8)
        throw std::invalid_argument("TransportMap: source/target areas differ beyond 1e-8 relative");
    source = std::move(src);
    target = std::move(dst);
    setTag("knothe[" + source->kind() + "->" + target->kind() + "]");
}

double TransportMap::forwardX(double x) const {
    // warm start from the previous query on this thread (trajectory locality)
    struct Warm {
        const void* owner = nullptr;
        double x = 0, tx = 0;
        bool valid = false;
    };
    thread_local Warm warm;

    double targetMass = rho_ * src_.cdf(x);
    auto len = [this](double t) {
        auto [lo, hi] = dst_.bounds(t);
        return std::max(hi - lo, 0.0);
    };
    // bracketed Newton on dst cdf
    double lo = dst_.xlo, hi = dst_.xhi, t = 0.5 * (lo + hi);
    if (warm.valid && warm.owner == this) t = std::clamp(warm.tx, lo + 1e-12, hi - 1e-12);
    targetMass = std::clamp(targetMass, 0.0, dst_.area);
    for (int it = 0; it < 100; ++it) {
        double F = dst_.cdf(t) - targetMass;
        if (F > 0)
            hi = t;
        else
            lo = t;
        double d = len(t);
        double tn = d > 1e-300 ? t - F / d : 0.5 * (lo + hi);
        if (!(tn > lo && tn < hi)) tn = 0.5 * (lo + hi);
        if (std::abs(tn - t) < 1e-15 * (1.0 + std::abs(t))) {
            warm = {this, x, tn, true};
            return tn;
        }
        t = tn;
    }
    warm = {this, x, t, true};
    return t;
}

Vec TransportMap::eval(const Vec& p) const {
    double x = p[0], y = p[1];
    double tx = forwardX(x);
    auto [slo, shi] = src_.bounds(x);
    auto [dlo, dhi] = dst_.bounds(tx);
    double ls = std::max(shi - slo, 1e-300), ld = std::max(dhi - dlo, 1e-300);
    double s = ld / (rho_ * ls);
    Vec out(2);
    out << tx, dlo + (y - slo) * s;
    return out;
}

Mat TransportMap::jacobian(const Vec& p) const {
    double x = p[0], y = p[1];
    double tx = forwardX(x);
    auto [slo, shi] = src_.bounds(x);
    auto [dlo, dhi] = dst_.bounds(tx);
    auto [slo1, shi1] = src_.boundsD1(x);
    auto [dlo1, dhi1] = dst_.boundsD1(tx);
    double ls = std::max(shi - slo, 1e-300), ld = std::max(dhi - dlo, 1e-300);
    double ls1 = shi1 - slo1, ld1 = dhi1 - dlo1;
    double t1 = rho_ * ls / ld;             // dT1/dx
    double s = ld / (rho_ * ls);            // dT2/dy
    double s1 = (ld1 * t1 * ls - ld * ls1) / (rho_ * ls * ls);
    Mat J(2, 2);
    J(0, 0) = t1;
    J(0, 1) = 0.0;
    J(1, 0) = dlo1 * t1 + (y - slo) * s1 - slo1 * s;
    J(1, 1) = s;
    return J;
}

double TransportMap::detResidual(int grid, double coreFraction) const {
    double worst = 0.0;
    double margin = 0.5 * (1.0 - coreFraction);
    for (int i = 0; i < grid; ++i) {
        double u = margin + (1.0 - 2 * margin) * (i + 0.5) / grid;
        double x = src_.xlo + u * (src_.xhi - src_.xlo);
        auto [lo, hi] = src_.bounds(x);
        if (hi - lo <= 0) continue;
        for (int j = 0; j < 8; ++j) {
            double v = margin + (1.0 - 2 * margin) * (j + 0.5) / 8;
            Vec p(2);
            p << x, lo + v * (hi - lo);
            double det = jacobian(p).determinant();
            worst = std::max(worst, std::abs(det - 1.0));
        }
    }
    return worst;
}

TransportPtr knotheMap(DomainPtr src, DomainPtr dst) {
    return std::make_shared<TransportMap>(std::move(src), std::move(dst));
}

CorrectionReport moserFlowCorrect(TransportPtr t, double tolDet, int budgetRefinements) {
    CorrectionReport rep;
    rep.initialResidual = t->detResidual();
    rep.map = t;
    rep.finalResidual = rep.initialResidual;
    if (rep.initialResidual <= tolDet) return rep;  // already there: unchanged

    int cells = 96;
    for (int k = 0; k < budgetRefinements; ++k, cells *= 2) {
        auto refined = std::make_shared<TransportMap>(t->source, t->target, cells);
        refined->setMethod("knothe+moser-flow");
        double res = refined->detResidual();
        // displacement between correction stages, probed on the core
        double disp = 0.0;
        Sampler s;
        s.seed = 2718;
        for (auto& p : t->source->sample(200, s))
            disp = std::max(disp, (refined->eval(p) - rep.map->eval(p)).norm());
        rep.maxDisplacement = std::max(rep.maxDisplacement, disp);
        rep.map = refined;
        rep.finalResidual = res;
        if (res <= tolDet) return rep;
    }
    rep.reachedTol = false;
    return rep;
}

TransportPtr rectToDisk() {
    auto t = std::make_shared<TransportMap>(makeRect(std::sqrt(M_PI), 2.0 * std::sqrt(M_PI)),
                                            makeBall(2, std::sqrt(2.0)));
    t->setTag("f:R(sqrt_pi,2sqrt_pi)->B2(sqrt2)");
    return t;
}

TransportPtr diskToSquare() {
    auto t = std::make_shared<TransportMap>(makeBall(2, 1.0), makeSquare(std::sqrt(M_PI)));
    t->setTag("g:B2(1)->Q(sqrt_pi)");
    return t;
}

TransportFamily::TransportFamily(DomainFn src, DomainFn dst, double lo, double hi)
    : srcFn_(std::move(src)), dstFn_(std::move(dst)), lo_(lo), hi_(hi) {}

TransportPtr TransportFamily::at(double delta) const {
    for (auto& [v, m] : cache_)
        if (v == delta) return m;
    DomainPtr s = srcFn_(delta), d = dstFn_(delta);
    double as = s->measure().value, ad = d->measure().value;
    if (std::abs(as - ad) > 1e-8 * std::max(1.0, as))
        throw std::runtime_error("TransportFamily: area mismatch at delta=" + std::to_string(delta));
    auto m = knotheMap(s, d);
    cache_.emplace_back(delta, m);
    if (cache_.size() > 128) cache_.erase(cache_.begin());
    return m;
}

double TransportFamily::gridContinuityDefect(const std::vector<double>& grid,
                                             const std::vector<Vec>& pts, double h) const {
    double worst = 0.0;
    for (auto& x : pts) {
        Vec prev;
        for (size_t i = 0; i < grid.size(); ++i) {
            double d0 = std::max(lo_, grid[i] - h), d1 = std::min(hi_, grid[i] + h);
            Vec der = (at(d1)->eval(x) - at(d0)->eval(x)) / (d1 - d0);
            if (i > 0) worst = std::max(worst, (der - prev).lpNorm<Eigen::Infinity>());
            prev = der;
        }
    }
    return worst;
}

}  // namespace symplembed
